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

import asyncio
import csv
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.stats import kstest

from misep._utils import co_registered, derive_seed, exception_warn
from misep.imagery import ImageGray, PixelPairSet, sample_pixel_pairs
from misep.metrics import QualityReport, evaluate_quality
from misep.network import KINDS, PsiNet, SeparatorModel, init_identity
from ._objective import DET_FLOOR, evaluate
from ._optimizer import Rprop

_DEFAULT_EPOCHS = {'linear': 200, 'nonlinear': 400}


@dataclass(frozen=True)
class TrainConfig:
    mode: str = 'nonlinear'
    epochs: Optional[int] = None
    priming_epochs: int = 100
    train_set_size: int = 5000
    learning_rate: float = 1e-3
    min_step: float = 1e-7
    max_step: float = 1e-1
    seed: int = 0
    det_floor: float = DET_FLOOR
    f_hidden: int = 20
    psi_hidden: int = 20

    def __post_init__(self) -> None:
        if self.mode not in KINDS:
            raise ValueError(f'Unknown training mode "{self.mode}", expected one of {", ".join(KINDS)}!')

        if self.total_epochs < 0 or self.priming_epochs < 0:
            raise ValueError('Epoch counts must be non-negative!')

        if self.mode == 'nonlinear' and self.priming_epochs > self.total_epochs:
            raise ValueError(f'Priming epochs ({self.priming_epochs}) exceed the epoch budget ({self.total_epochs})!')

        if self.train_set_size < 1 or self.f_hidden < 1 or self.psi_hidden < 1:
            raise ValueError('Training set size and hidden layer sizes must be positive!')

        if self.learning_rate <= 0 or self.det_floor <= 0:
            raise ValueError('Learning rate and determinant floor must be positive!')

        if self.seed < 0:
            raise ValueError('Seed must be non-negative!')

    @property
    def total_epochs(self) -> int:
        """
        Epoch budget: `epochs` when given, 200 in linear and 400 in nonlinear mode otherwise.
        """
        return _DEFAULT_EPOCHS[self.mode] if self.epochs is None else self.epochs

    @property
    def effective_priming(self) -> int:
        return self.priming_epochs if self.mode == 'nonlinear' else 0

    def with_changes(self, **changes) -> 'TrainConfig':
        return replace(self, **changes)

    @staticmethod
    def from_mapping(mapping: Dict[str, str]) -> 'TrainConfig':
        """
        Create a training configuration from the `train.*` keys of a flat key-value mapping.

        :param mapping:         - Mapping with keys without the `train.` prefix.
        :return:                - The training configuration.
        """
        converters = {'mode': str, 'epochs': int, 'priming_epochs': int, 'train_set_size': int,
                      'learning_rate': float, 'min_step': float, 'max_step': float, 'seed': int,
                      'det_floor': float, 'f_hidden': int, 'psi_hidden': int}
        unknown = set(mapping) - set(converters)

        if unknown:
            raise ValueError(f'Unknown training settings: {", ".join(sorted(unknown))}!')

        try:
            return TrainConfig(**{key: converters[key](value) for key, value in mapping.items()})
        except (TypeError, ValueError) as error:
            raise ValueError(f'Invalid training settings: {error}') from error


def initial_model(config: 'TrainConfig', run: int = 0) -> 'SeparatorModel':
    """
    Create the untrained model of a run: an identity separator and two psi networks.
    Each network draws from its own stream of the run's `init` seed, so that linear and nonlinear models of
    the same run start from identical psi networks.

    :param config:          - Training configuration.
    :param run:             - Index of the run within a series.
    :return:                - The initial model.
    """
    init_seed = derive_seed(config.seed, 'init', run)
    psi = tuple(PsiNet.initial(np.random.default_rng([init_seed, index]), config.psi_hidden) for index in (0, 1))
    separator = init_identity(config.mode, np.random.default_rng([init_seed, 2]), config.f_hidden)

    return SeparatorModel(separator, psi, config.seed, run)


def training_samples(first: 'ImageGray', second: 'ImageGray', config: 'TrainConfig',
                     run: int = 0) -> 'PixelPairSet':
    return sample_pixel_pairs(first, second, config.train_set_size, derive_seed(config.seed, 'sampling', run))


@co_registered
def train(first: 'ImageGray', second: 'ImageGray', config: 'TrainConfig', run: int = 0) -> 'SeparatorModel':
    """
    Train a separator on a co-registered mixture pair.

    :param first:           - First mixture image, aligned and normalized.
    :param second:          - Second mixture image, aligned and normalized.
    :param config:          - Training configuration.
    :param run:             - Index of the run within a series; selects the sampling and initialization seeds.
    :return:                - The trained model with its objective trace.
    """
    return train_on_samples(training_samples(first, second, config, run), config, run)


def train_on_samples(samples: 'PixelPairSet', config: 'TrainConfig', run: int = 0) -> 'SeparatorModel':
    """
    Maximize the objective by full-batch Rprop ascent for `config.total_epochs` epochs.
    In nonlinear mode the hidden-to-output weights of the separator stay at zero for the first
    `config.priming_epochs` epochs.

    :param samples:         - Training samples.
    :param config:          - Training configuration.
    :param run:             - Index of the run within a series.
    :return:                - The trained model.
    """
    model = initial_model(config, run)
    parameters = model.parameters()
    optimizer = Rprop(parameters.size, config.learning_rate, min(config.min_step, config.learning_rate),
                      max(config.max_step, config.learning_rate))

    priming_mask = np.ones(parameters.size, dtype=bool)
    priming_mask[model.separator.output_weight_indices] = False

    trace = []
    clamped = 0

    for epoch in range(config.total_epochs):
        try:
            value, direction = evaluate(samples, model, config.det_floor)
        except ArithmeticError as error:
            raise ArithmeticError(f'Training aborted at epoch {epoch}: {error}') from error

        trace.append(value.value)
        clamped += value.singular

        mask = priming_mask if epoch < config.effective_priming else None
        parameters = optimizer.step(parameters, direction, mask)
        model = model.with_parameters(parameters)

    if clamped:
        exception_warn(f'Jacobian determinant was clamped {clamped} times during training of run {run}')

    return model.with_training(config.total_epochs, trace)


@co_registered
def separate(first: 'ImageGray', second: 'ImageGray', model: 'SeparatorModel') -> Tuple['ImageGray', 'ImageGray']:
    """
    Apply the separator pixel-wise. The outputs are not rescaled and may leave [0, 1].

    :param first:           - First mixture image.
    :param second:          - Second mixture image.
    :param model:           - Trained model.
    :return:                - The two separated components.
    """
    x = np.column_stack([first.data.reshape(-1), second.data.reshape(-1)])
    y, _ = model.separator.forward(x)

    return ImageGray(y[:, 0].reshape(first.shape)), ImageGray(y[:, 1].reshape(first.shape))


def psi_uniformity(model: 'SeparatorModel', samples: 'PixelPairSet') -> Tuple[float, float]:
    """
    Kolmogorov-Smirnov distance of each psi output from the uniform distribution on [0, 1].
    Small distances mean the psi networks have learned the distribution functions of the separated components.

    :param model:           - Trained model.
    :param samples:         - Samples not used for training.
    :return:                - The two distances.
    """
    _, z = model.transform(samples.samples)
    return float(kstest(z[:, 0], 'uniform').statistic), float(kstest(z[:, 1], 'uniform').statistic)


def export_trace(model: 'SeparatorModel', path: str) -> None:
    try:
        with open(path, 'w', newline='') as file:
            writer = csv.writer(file)
            writer.writerow(['epoch', 'objective'])
            writer.writerows((epoch, repr(float(value))) for epoch, value in enumerate(model.objective_trace))
    except OSError as error:
        raise OSError(f'Cannot write objective trace {path}: {error.strerror}!') from error


def run_series(first: 'ImageGray', second: 'ImageGray', config: 'TrainConfig', n_runs: int = 10,
               sources: Optional[Tuple['ImageGray', 'ImageGray']] = None, eval_samples: int = 5000, k: int = 3,
               workers: int = 1) -> List[Tuple['SeparatorModel', Optional['QualityReport']]]:
    """
    Train `n_runs` independent models that differ only in their derived sampling and initialization seeds.
    When the true sources are known, every run is also evaluated on samples disjoint from its training set.

    :param first:           - First mixture image.
    :param second:          - Second mixture image.
    :param config:          - Training configuration shared by all runs.
    :param n_runs:          - Number of runs.
    :param sources:         - Optional true source pair.
    :param eval_samples:    - Number of evaluation samples for the mutual information measures.
    :param k:               - Neighbour order of the mutual information estimator.
    :param workers:         - Number of runs trained concurrently.
    :return:                - One (model, report) pair per run, ordered by run index.
    """
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return asyncio.run(run_series_async(first, second, config, n_runs, sources, eval_samples, k, executor))

    return [_run_once(first, second, config, run, sources, eval_samples, k) for run in _run_indices(n_runs)]


async def run_series_async(first: 'ImageGray', second: 'ImageGray', config: 'TrainConfig', n_runs: int = 10,
                           sources: Optional[Tuple['ImageGray', 'ImageGray']] = None, eval_samples: int = 5000,
                           k: int = 3, executor: Optional['Executor'] = None) \
        -> List[Tuple['SeparatorModel', Optional['QualityReport']]]:
    """
    Schedule the runs of a series on an executor and wait for all of them.
    The results are ordered by run index whatever the order of completion.

    :param executor:        - Executor for the runs, the loop's default executor if None.
    :return:                - One (model, report) pair per run, ordered by run index.
    """
    loop = asyncio.get_running_loop()
    tasks = [loop.run_in_executor(executor, partial(_run_once, first, second, config, run, sources, eval_samples, k))
             for run in _run_indices(n_runs)]

    return list(await asyncio.gather(*tasks))


def _run_once(first: 'ImageGray', second: 'ImageGray', config: 'TrainConfig', run: int,
              sources: Optional[Tuple['ImageGray', 'ImageGray']], eval_samples: int,
              k: int) -> Tuple['SeparatorModel', Optional['QualityReport']]:
    samples = training_samples(first, second, config, run)

    try:
        model = train_on_samples(samples, config, run)
    except ArithmeticError as error:
        raise ArithmeticError(f'Run {run}: {error}') from error

    if sources is None:
        return model, None

    extracted = separate(first, second, model)
    report = evaluate_quality(extracted, sources, eval_samples, k, samples, derive_seed(config.seed, 'eval', run))

    return model, report


def _run_indices(n_runs: int) -> range:
    if n_runs < 1:
        raise ValueError('A series needs at least one run!')

    return range(n_runs)
