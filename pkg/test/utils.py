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
from typing import Callable, Tuple

import numpy as np

from misep.imagery import ImageGray
from misep.metrics import QualityReport
from misep.network import FNonlinear, PsiNet, SeparatorModel

ACCEPTANCE = os.environ.get('MISEP_ACCEPTANCE', '') not in ('', '0')
SCAN_DATA = os.environ.get('MISEP_SCAN_DATA', '')


def smooth_image(width: int, height: int, seed: int = 0, components: int = 6) -> 'ImageGray':
    rng = np.random.default_rng(seed)
    rows, columns = np.mgrid[0:height, 0:width]
    data = np.zeros((height, width))

    for _ in range(components):
        fx, fy = rng.uniform(0.02, 0.08, 2) * rng.choice([-1, 1], 2)
        data += np.cos(2 * np.pi * (fx * columns + fy * rows) + rng.uniform(0, 2 * np.pi))

    data = (data - data.min()) / (data.max() - data.min())
    return ImageGray(0.1 + 0.8 * data)


def random_image(width: int, height: int, seed: int = 0) -> 'ImageGray':
    return ImageGray(np.random.default_rng(seed).random((height, width)))


def random_nonlinear(seed: int, hidden: int = 5) -> 'FNonlinear':
    rng = np.random.default_rng(seed)

    return FNonlinear(1.0 + rng.uniform(-0.2, 0.2), rng.uniform(-0.3, 0.3), rng.uniform(-2, 2, hidden),
                      rng.uniform(-2, 2, hidden), rng.uniform(-1, 1, hidden), rng.uniform(-0.05, 0.05, hidden))


def random_model(separator, seed: int, psi_hidden: int = 4) -> 'SeparatorModel':
    rng = np.random.default_rng(seed)
    return SeparatorModel(separator, (PsiNet.initial(rng, psi_hidden), PsiNet.initial(rng, psi_hidden)))


def numeric_gradient(function: Callable[[np.ndarray], float], parameters: np.ndarray, step: float = 1e-6) -> np.ndarray:
    result = np.empty(parameters.size)

    for index in range(parameters.size):
        forward, backward = parameters.copy(), parameters.copy()
        forward[index] += step
        backward[index] -= step
        result[index] = (function(forward) - function(backward)) / (2 * step)

    return result


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-8) -> float:
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)

    return float(np.max(np.abs(analytic - numeric) / np.maximum(np.abs(analytic), floor)))


def gaussian_pairs(count: int, rho: float, seed: int = 0) -> np.ndarray:
    # Cholesky factor of the unit-variance covariance with correlation rho
    z = np.random.default_rng(seed).standard_normal((count, 2))
    return np.column_stack([z[:, 0], rho * z[:, 0] + np.sqrt(1.0 - rho ** 2) * z[:, 1]])


def quality_report(q1: Tuple[float, float] = (0.0, 0.0), q2: Tuple[float, float] = (0.0, 0.0),
                   q3: Tuple[float, float] = (0.0, 0.0), q4: Tuple[float, float] = (0.0, 0.0)) -> 'QualityReport':
    return QualityReport(q1, q2, q3, q4, q3, q4, 0, 5000, 3)


def best_monotone_residual(means: np.ndarray, weights: np.ndarray, values: np.ndarray, groups: np.ndarray) -> float:
    """
    Smallest residual of a monotone step map, by enumerating every split of the sorted levels into contiguous
    blocks with monotone block means.
    """
    count = means.size
    best = np.inf

    for mask in range(2 ** (count - 1)):
        starts = [0] + [index + 1 for index in range(count - 1) if mask >> index & 1] + [count]
        fitted = np.empty(count)

        for start, end in zip(starts[:-1], starts[1:]):
            fitted[start:end] = np.average(means[start:end], weights=weights[start:end])

        steps = np.diff(fitted)

        if np.all(steps >= -1e-15) or np.all(steps <= 1e-15):
            best = min(best, float(np.sum((fitted[groups] - values) ** 2)))

    return best
