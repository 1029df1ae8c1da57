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
import unittest

import numpy as np

from misep._utils import derive_seed
from misep.imagery import load_grayscale, sample_pixel_pairs
from misep.metrics import evaluate_quality
from misep.mixsim import MixParams, generate_bars_pair, mix_showthrough
from misep.trainer import TrainConfig, psi_uniformity, run_series, training_samples
from test.utils import ACCEPTANCE, SCAN_DATA

WORKERS = max(1, min(10, os.cpu_count() or 1))
LINEAR = TrainConfig(mode='linear')
NONLINEAR = TrainConfig(mode='nonlinear')


def component_means(reports, name):
    return np.mean([report.measure(name) for report in reports], axis=0)


@unittest.skipUnless(ACCEPTANCE, 'set MISEP_ACCEPTANCE=1 to run the acceptance experiments')
class TestBarsExperiment(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.sources = generate_bars_pair(seed=derive_seed(0, 'sources'))
        cls.mixtures = mix_showthrough(*cls.sources, MixParams())
        cls.baseline = evaluate_quality(cls.mixtures, cls.sources, seed=derive_seed(0, 'baseline'))
        cls.linear_runs = run_series(*cls.mixtures, LINEAR, 10, cls.sources, workers=WORKERS)
        cls.nonlinear_runs = run_series(*cls.mixtures, NONLINEAR, 10, cls.sources, workers=WORKERS)
        cls.linear = [report for _, report in cls.linear_runs]
        cls.nonlinear = [report for _, report in cls.nonlinear_runs]

    def test_nonlinear_beats_linear(self):
        # When
        linear = component_means(self.linear, 'q2_db')
        nonlinear = component_means(self.nonlinear, 'q2_db')
        # Then
        self.assertTrue(np.all(nonlinear >= linear + 1.5), f'{nonlinear} vs {linear}')

    def test_separation_beats_baseline(self):
        # Given
        baseline = np.asarray(self.baseline.q2_db)
        # When
        linear = component_means(self.linear, 'q2_db')
        nonlinear = component_means(self.nonlinear, 'q2_db')
        # Then
        self.assertTrue(np.all(linear >= baseline + 3.0), f'{linear} vs {baseline}')
        self.assertTrue(np.all(nonlinear >= baseline + 3.0), f'{nonlinear} vs {baseline}')

    def test_nonlinear_leaves_less_mutual_information(self):
        # When
        linear = component_means(self.linear, 'q4_bits')
        nonlinear = component_means(self.nonlinear, 'q4_bits')
        # Then
        self.assertTrue(np.all(nonlinear < linear), f'{nonlinear} vs {linear}')

    def test_runs_agree(self):
        # When
        spreads = [np.std([report.q2_db for report in reports], axis=0) for reports in (self.linear, self.nonlinear)]
        # Then
        for spread in spreads:
            self.assertTrue(np.all(spread < 1.5), f'{spread}')

    def test_psi_outputs_are_uniform_on_held_out_samples(self):
        for run, (model, _) in enumerate(self.nonlinear_runs):
            # Given
            training = training_samples(*self.mixtures, NONLINEAR, run)
            held_out = sample_pixel_pairs(*self.mixtures, 5000, derive_seed(1, 'held_out', run), training)
            # When
            actual = psi_uniformity(model, held_out)
            # Then
            self.assertTrue(all(value < 0.05 for value in actual), f'run {run}: {actual}')

    def test_objective_settles_over_final_epochs(self):
        for model, _ in self.linear_runs + self.nonlinear_runs:
            # When
            actual = np.mean(np.diff(model.objective_trace[-51:]))
            # Then
            self.assertGreaterEqual(actual, -1e-4, f'{model.kind} run {model.run}')

    def test_snr_gain_shows_in_mutual_information(self):
        # Given
        results = {'baseline': [self.baseline], 'linear': self.linear, 'nonlinear': self.nonlinear}
        q2 = {name: component_means(reports, 'q2_db') for name, reports in results.items()}
        q3 = {name: component_means(reports, 'q3_bits') for name, reports in results.items()}

        for worse, better in (('baseline', 'linear'), ('baseline', 'nonlinear'), ('linear', 'nonlinear')):
            for component in range(2):
                # When
                gain = q2[better][component] - q2[worse][component]
                # Then
                if gain >= 1.0:
                    self.assertGreater(q3[better][component] - q3[worse][component], 0.05,
                                       f'{worse} to {better}, component {component + 1}')


@unittest.skipUnless(SCAN_DATA, 'set MISEP_SCAN_DATA to a directory with the published scan pair')
class TestPublishedPair(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.sources = tuple(load_grayscale(os.path.join(SCAN_DATA, f'source_{index}.png')) for index in (1, 2))
        cls.mixtures = tuple(load_grayscale(os.path.join(SCAN_DATA, f'mixture_{index}.png')) for index in (1, 2))

    def test_baseline(self):
        # When
        actual = evaluate_quality(self.mixtures, self.sources, seed=derive_seed(0, 'baseline'))
        # Then
        np.testing.assert_allclose([1.9, 1.9], actual.q1_db, atol=0.5)
        np.testing.assert_allclose([12.1, 12.2], actual.q2_db, atol=0.5)
        np.testing.assert_allclose([1.21, 1.23], actual.q3_bits, atol=0.1)
        np.testing.assert_allclose([0.48, 0.49], actual.q4_bits, atol=0.1)

    def test_nonlinear_separation(self):
        # When
        reports = [report for _, report in
                   run_series(*self.mixtures, TrainConfig(mode='nonlinear'), 10, self.sources, workers=WORKERS)]
        # Then
        np.testing.assert_allclose([20.6, 20.2], component_means(reports, 'q2_db'), atol=1.5)
