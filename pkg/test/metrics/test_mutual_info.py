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

import numpy as np

from misep.imagery import ImageGray, sample_pixel_pairs
from misep.metrics import kraskov_mi, q3_q4
from test.utils import gaussian_pairs, random_image

GAUSSIAN_MI_BITS = -0.5 * np.log2(1 - 0.6 ** 2)


class TestKraskov(unittest.TestCase):

    def test_independent_uniform(self):
        for seed in range(3):
            # Given
            samples = np.random.default_rng(seed).random((5000, 2))
            # When
            actual = kraskov_mi(samples, seed=seed)
            # Then
            self.assertLess(abs(actual), 0.05)

    def test_correlated_gaussian(self):
        for seed in range(10):
            # Given
            samples = gaussian_pairs(5000, 0.6, seed=seed)
            # When
            actual = kraskov_mi(samples, seed=seed)
            # Then
            self.assertTrue(0.272 <= actual <= 0.372, f'seed {seed}: {actual}')
            self.assertAlmostEqual(GAUSSIAN_MI_BITS, actual, delta=0.05)

    def test_monotone_transform(self):
        # Given
        samples = gaussian_pairs(5000, 0.6, seed=11)
        transformed = np.column_stack([samples[:, 0] ** 3, samples[:, 1]])
        # When
        actual = kraskov_mi(transformed, jitter=0.0)
        # Then
        self.assertAlmostEqual(kraskov_mi(samples, jitter=0.0), actual, delta=0.05)

    def test_exchange_symmetry(self):
        # Given
        samples = gaussian_pairs(2000, 0.3, seed=12)
        # When
        actual = kraskov_mi(samples[:, ::-1], jitter=0.0)
        # Then
        self.assertEqual(kraskov_mi(samples, jitter=0.0), actual)

    def test_error_shrinks_with_sample_count(self):
        # Given
        errors = {count: [] for count in (500, 2000, 5000)}

        for count in errors:
            for seed in range(12):
                # When
                estimate = kraskov_mi(gaussian_pairs(count, 0.6, seed=100 + seed), seed=seed)
                errors[count].append(estimate - GAUSSIAN_MI_BITS)
        # Then
        rmse = {count: np.sqrt(np.mean(np.square(values))) for count, values in errors.items()}
        self.assertLess(rmse[2000], rmse[500])
        self.assertLess(rmse[5000], rmse[500])

    def test_too_few_samples(self):
        # When
        with self.assertRaises(ValueError) as error:
            kraskov_mi(np.random.default_rng(0).random((4, 2)), k=3)
        # Then
        message = error.exception.args[0]
        self.assertEqual('Mutual information with k=3 needs at least 5 samples, got 4!', message)

    def test_duplicates_without_jitter(self):
        # Given
        samples = np.array([[0.1, 0.2], [0.1, 0.2], [0.3, 0.4], [0.5, 0.1], [0.9, 0.7], [0.2, 0.8]])
        # When
        with self.assertRaises(ValueError) as error:
            kraskov_mi(samples, jitter=0.0)
        # Then
        message = error.exception.args[0]
        self.assertEqual('Mutual information samples contain duplicate points!', message)

    def test_quantized_samples_are_jittered(self):
        # Given
        samples = np.round(np.random.default_rng(13).random((3000, 2)) * 9) / 9
        # When
        actual = kraskov_mi(samples, seed=1)
        # Then
        self.assertLess(abs(actual), 0.05)

    def test_wrong_shape(self):
        # When
        with self.assertRaises(ValueError) as error:
            kraskov_mi(np.zeros((10, 3)))
        # Then
        message = error.exception.args[0]
        self.assertEqual('Mutual information needs samples of shape (N, 2)!', message)


class TestQ3Q4(unittest.TestCase):

    def setUp(self):
        self.sources = (random_image(100, 100, seed=0), random_image(100, 100, seed=1))

    def test_perfect_extraction(self):
        # When
        (q3_first, q3_second), (q4_first, q4_second) = q3_q4(self.sources, self.sources, eval_samples=5000)
        # Then
        self.assertGreater(q3_first, 1.0)
        self.assertGreater(q3_second, 1.0)
        self.assertLess(abs(q4_first), 0.05)
        self.assertLess(abs(q4_second), 0.05)

    def test_noise_extraction(self):
        # Given
        extracted = (random_image(100, 100, seed=2), random_image(100, 100, seed=3))
        # When
        q3, q4 = q3_q4(extracted, self.sources, eval_samples=5000)
        # Then
        self.assertTrue(all(abs(value) < 0.05 for value in q3 + q4))

    def test_is_reproducible(self):
        # Given
        extracted = (ImageGray(0.5 * self.sources[0].data + 0.5 * self.sources[1].data), self.sources[1])
        # When
        actual = q3_q4(extracted, self.sources, eval_samples=1000, seed=4)
        # Then
        self.assertEqual(q3_q4(extracted, self.sources, eval_samples=1000, seed=4), actual)

    def test_not_enough_pixels_outside_training_set(self):
        # Given
        exclude = sample_pixel_pairs(self.sources[0], self.sources[1], 9000, seed=5)
        # When
        with self.assertRaises(ValueError) as error:
            q3_q4(self.sources, self.sources, eval_samples=5000, exclude=exclude)
        # Then
        message = error.exception.args[0]
        self.assertEqual('Cannot draw 5000 pixel pairs from 1000 available pixels!', message)

    def test_different_dimensions(self):
        # When
        with self.assertRaises(ValueError) as error:
            q3_q4((random_image(10, 10), random_image(10, 10)), (random_image(10, 10), random_image(10, 12)))
        # Then
        message = error.exception.args[0]
        self.assertEqual('Mutual information measures need two extracted components and two sources '
                         'of equal dimensions!', message)
