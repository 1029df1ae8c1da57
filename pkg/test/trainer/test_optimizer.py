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

from misep.trainer import Rprop


class TestRprop(unittest.TestCase):

    def test_step_follows_gradient_sign(self):
        # Given
        optimizer = Rprop(3, initial_step=0.01)
        # When
        actual = optimizer.step(np.zeros(3), np.array([2.0, -0.5, 0.0]))
        # Then
        np.testing.assert_array_equal([0.01, -0.01, 0.0], actual)

    def test_step_grows_and_shrinks(self):
        # Given
        optimizer = Rprop(1, initial_step=1e-3)
        parameters = np.zeros(1)
        # When
        parameters = optimizer.step(parameters, np.array([1.0]))
        parameters = optimizer.step(parameters, np.array([1.0]))
        grown = optimizer.steps
        flipped = optimizer.step(parameters, np.array([-1.0]))
        shrunk = optimizer.steps
        resumed = optimizer.step(flipped, np.array([-1.0]))
        # Then
        self.assertAlmostEqual(2.2e-3, parameters[0], places=15)
        self.assertAlmostEqual(1.2e-3, grown[0], places=15)
        np.testing.assert_array_equal(parameters, flipped)
        self.assertAlmostEqual(6e-4, shrunk[0], places=15)
        self.assertAlmostEqual(1.6e-3, resumed[0], places=15)

    def test_step_limits(self):
        # Given
        optimizer = Rprop(1, initial_step=0.09, min_step=0.05, max_step=0.1)
        parameters = np.zeros(1)
        # When
        for _ in range(3):
            parameters = optimizer.step(parameters, np.array([1.0]))
        high = optimizer.steps[0]

        for sign in (-1.0, 1.0, -1.0, 1.0):
            parameters = optimizer.step(parameters, np.array([sign]))
        low = optimizer.steps[0]
        # Then
        self.assertEqual(0.1, high)
        self.assertEqual(0.05, low)

    def test_mask_freezes_parameters(self):
        # Given
        optimizer = Rprop(2, initial_step=0.01)
        mask = np.array([True, False])
        # When
        first = optimizer.step(np.zeros(2), np.ones(2), mask)
        second = optimizer.step(first, np.ones(2), mask)
        # Then
        np.testing.assert_array_equal([0.01, 0.0], first)
        self.assertEqual(0.0, second[1])
        np.testing.assert_allclose([0.012, 0.01], optimizer.steps)

    def test_wrong_size(self):
        # Given
        optimizer = Rprop(2)
        # When
        with self.assertRaises(ValueError) as error:
            optimizer.step(np.zeros(3), np.zeros(3))
        # Then
        message = error.exception.args[0]
        self.assertEqual('Optimizer was created for 2 parameters, got 3!', message)

    def test_invalid_steps(self):
        # When
        with self.assertRaises(ValueError) as error:
            Rprop(2, initial_step=1.0, max_step=0.1)
        # Then
        message = error.exception.args[0]
        self.assertEqual('Step sizes must satisfy 0 < min_step <= initial_step <= max_step!', message)
