#  Copyright 2021 The misep Authors
#
#  Licensed under the Apache License, Version 2.0 (the "License");
#  you may not use this file except in compliance with the License.
#  You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
#  Unless required by applicable law or agreed to in writing, software
#  distributed under the License is distributed on an "AS IS" BASIS,
#  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#  See the License for the specific language governing permissions and
#  limitations under the License.

import unittest
from fractions import Fraction

import numpy as np

from misep.align import coarse_shift
from misep.imagery import ImageGray, bicubic_resample, bicubic_shift, cubic_weights, catmull_rom
from test.utils import smooth_image


class TestResample(unittest.TestCase):

    def test_catmull_rom_knots(self):
        # When
        actual = catmull_rom(np.array([0.0, 1.0, 2.0, -1.0, 2.5]))
        # Then
        np.testing.assert_array_equal([1.0, 0.0, 0.0, 0.0, 0.0], actual)

    def test_cubic_weights_partition_of_unity(self):
        # Given
        phases = np.random.default_rng(0).random(1000)
        # When
        sums = [cubic_weights(phase).sum() for phase in phases]
        # Then
        self.assertLess(np.max(np.abs(np.array(sums) - 1.0)), 1e-12)

    def test_cubic_weights_integer_position(self):
        # When
        actual = cubic_weights(0.0)
        # Then
        np.testing.assert_allclose([0.0, 1.0, 0.0, 0.0], actual, atol=1e-15)

    def test_cubic_weights_half_phase_is_symmetric(self):
        # When
        actual = cubic_weights(0.5)
        # Then
        np.testing.assert_allclose([-0.0625, 0.5625, 0.5625, -0.0625], actual, atol=1e-15)

    def test_cubic_weights_invalid_phase(self):
        # When
        with self.assertRaises(ValueError) as error:
            cubic_weights(1.0)
        # Then
        message = error.exception.args[0]
        self.assertEqual('Invalid sample phase 1.0, expected a value in [0, 1)!', message)

    def test_resample_constant_image(self):
        # Given
        image = ImageGray.constant(13, 7, 0.37)
        # When
        enlarged = bicubic_resample(image, 4)
        reduced = bicubic_resample(image, Fraction(1, 2))
        # Then
        self.assertEqual((28, 52), enlarged.shape)
        self.assertEqual((4, 6), reduced.shape)
        np.testing.assert_allclose(0.37, enlarged.data, atol=1e-12)
        np.testing.assert_allclose(0.37, reduced.data, atol=1e-12)

    def test_resample_factor_one_is_identity(self):
        # Given
        image = smooth_image(20, 15, seed=1)
        # When
        actual = bicubic_resample(image, 1)
        # Then
        np.testing.assert_array_equal(image.data, actual.data)

    def test_resample_round_trip_of_ramp(self):
        # Given
        columns = np.arange(64)
        image = ImageGray(np.tile(0.1 + 0.8 * columns / 63.0, (48, 1)))
        # When
        actual = bicubic_resample(bicubic_resample(image, 4), Fraction(1, 4))
        # Then
        self.assertEqual(image.shape, actual.shape)
        self.assertLess(np.abs(actual.data - image.data).max(), 0.01)

    def test_resample_round_trip_of_smooth_image(self):
        # Given
        image = smooth_image(40, 40, seed=2)
        # When
        actual = bicubic_resample(bicubic_resample(image, 4), Fraction(1, 4))
        # Then
        self.assertLess(np.abs(actual.data - image.data)[4:-4, 4:-4].max(), 0.02)

    def test_resample_degenerate_size(self):
        # When
        with self.assertRaises(ValueError) as error:
            bicubic_resample(ImageGray.constant(1, 1, 0.5), 0.25)
        # Then
        message = error.exception.args[0]
        self.assertEqual('Degenerate output size 0x0 for scale factor 0.25!', message)

    def test_resample_invalid_factor(self):
        # When
        with self.assertRaises(ValueError) as error:
            bicubic_resample(ImageGray.constant(2, 2, 0.5), 0)
        # Then
        message = error.exception.args[0]
        self.assertEqual('Invalid scale factor 0.0, expected a positive value!', message)

    def test_shift_by_whole_pixels_matches_coarse_shift(self):
        # Given
        image = smooth_image(30, 20, seed=3)
        # When
        actual = bicubic_shift(image, 2, -1)
        # Then
        np.testing.assert_allclose(coarse_shift(image, 2, -1).data, actual.data, atol=1e-15)

    def test_shift_moves_content(self):
        # Given
        image = smooth_image(40, 40, seed=4)
        # When
        actual = bicubic_shift(bicubic_shift(image, 1.5, 0.75), -1.5, -0.75)
        # Then
        self.assertLess(np.abs(actual.data - image.data)[6:-6, 6:-6].max(), 0.02)

    def test_anchored_enlarge_keeps_input_pixels(self):
        # Given
        image = smooth_image(30, 20, seed=5)
        # When
        actual = bicubic_resample(image, 4, anchored=True)
        # Then
        self.assertEqual((80, 120), actual.shape)
        np.testing.assert_array_equal(image.data, actual.data[::4, ::4])

    def test_anchored_round_trip_is_exact(self):
        # Given
        image = smooth_image(30, 20, seed=6)
        # When
        actual = bicubic_resample(bicubic_resample(image, 4, anchored=True), Fraction(1, 4), anchored=True)
        # Then
        np.testing.assert_array_equal(image.data, actual.data)

    def test_anchored_enlarge_interpolates_ramp(self):
        # Given
        image = ImageGray(np.tile(np.linspace(0.1, 0.9, 16), (3, 1)))
        # When
        actual = bicubic_resample(image, 4, anchored=True)
        # Then
        expected = 0.1 + 0.8 / 15 * np.arange(4, 56) / 4
        np.testing.assert_allclose(expected, actual.data[1, 4:56], atol=1e-12)
