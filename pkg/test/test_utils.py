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

import os
import tempfile
import unittest
from unittest.mock import patch

import numpy as np

from misep._utils import derive_seed, read_key_values, parse_bool, exception_warn
from misep.imagery import ImageGray, sample_pixel_pairs


class TestUtils(unittest.TestCase):

    def test_derive_seed_is_reproducible(self):
        # When
        first = derive_seed(7, 'sampling', 3)
        second = derive_seed(7, 'sampling', 3)
        # Then
        self.assertEqual(first, second)
        self.assertIsInstance(first, int)
        self.assertGreaterEqual(first, 0)

    def test_derive_seed_separates_names_and_runs(self):
        # Given
        names = ['sampling', 'init', 'noise', 'eval', 'sources', 'jitter']
        # When
        seeds = {derive_seed(0, name, run) for name in names for run in range(10)}
        # Then
        self.assertEqual(60, len(seeds))

    def test_derive_seed_depends_on_master(self):
        # When
        seeds = {derive_seed(master, 'init', 0) for master in range(20)}
        # Then
        self.assertEqual(20, len(seeds))

    def test_derive_seed_negative(self):
        # When
        with self.assertRaises(ValueError) as error:
            derive_seed(-1, 'init')
        # Then
        message = error.exception.args[0]
        self.assertEqual('Seeds and run indices must be non-negative!', message)

    def test_read_key_values(self):
        # Given
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'settings.cfg')

            with open(path, 'w') as file:
                file.write('# experiment settings\n\nseed = 3\ntrain.mode: linear  # comment\npaths.out = /tmp/a=b\n')
            # When
            actual = read_key_values(path)
        # Then
        self.assertEqual({'seed': '3', 'train.mode': 'linear', 'paths.out': '/tmp/a=b'}, actual)

    def test_read_key_values_duplicate_key(self):
        # Given
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'settings.cfg')

            with open(path, 'w') as file:
                file.write('seed = 1\nseed = 2\n')
            # When
            with self.assertRaises(ValueError) as error:
                read_key_values(path)
        # Then
        message = error.exception.args[0]
        self.assertEqual('Duplicate configuration key "seed" on line 2!', message)

    def test_read_key_values_invalid_line(self):
        # Given
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'settings.cfg')

            with open(path, 'w') as file:
                file.write('seed\n')
            # When
            with self.assertRaises(ValueError) as error:
                read_key_values(path)
        # Then
        message = error.exception.args[0]
        self.assertEqual('Invalid configuration line 1: "seed"!', message)

    def test_read_key_values_missing_file(self):
        # When
        with self.assertRaises(FileNotFoundError) as error:
            read_key_values('/nonexistent/settings.cfg')
        # Then
        message = error.exception.args[0]
        self.assertEqual('Configuration file not found: /nonexistent/settings.cfg!', message)

    def test_parse_bool(self):
        # Then
        self.assertTrue(parse_bool('Yes'))
        self.assertTrue(parse_bool(' true '))
        self.assertFalse(parse_bool('0'))
        self.assertFalse(parse_bool('off'))

    def test_parse_bool_invalid(self):
        # When
        with self.assertRaises(ValueError) as error:
            parse_bool('maybe')
        # Then
        message = error.exception.args[0]
        self.assertEqual('Invalid boolean value "maybe"!', message)

    def test_co_registered_different_dimensions(self):
        # Given
        first = ImageGray(np.zeros((2, 3)))
        second = ImageGray(np.zeros((2, 2)))
        # When
        with self.assertRaises(ValueError) as error:
            sample_pixel_pairs(first, second, 1, 0)
        # Then
        message = error.exception.args[0]
        self.assertEqual('Cannot execute "sample_pixel_pairs" on images with different dimensions (3x2 and 2x2)!',
                         message)

    def test_co_registered_equal_dimensions(self):
        # Given
        first = ImageGray(np.zeros((2, 3)))
        second = ImageGray(np.ones((2, 3)))
        # When
        actual = sample_pixel_pairs(first, second, 6, 0)
        # Then
        self.assertEqual(6, len(actual))

    @patch('warnings.warn')
    def test_exception_warn(self, mock_warn):
        # When
        exception_warn(ValueError('Something odd happened'))
        # Then
        self.assertEqual('Something odd happened', mock_warn.call_args_list[0][0][0])
