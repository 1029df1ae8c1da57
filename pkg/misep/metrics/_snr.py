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

from typing import Tuple, Union

import numpy as np
from scipy.optimize import isotonic_regression

from misep._utils import co_registered
from misep.imagery import ImageGray

SNR_CAP_DB = 150.0


class MonotoneMap:
    """
    Monotone intensity map in table form: one output value per distinct input level.
    """

    def __init__(self, levels: np.ndarray, values: np.ndarray, orientation: str, residual: float) -> None:
        levels = np.array(levels, dtype=np.float64).reshape(-1)
        values = np.array(values, dtype=np.float64).reshape(-1)

        if levels.shape != values.shape or levels.size == 0:
            raise ValueError('Monotone map needs one value per input level!')

        if np.any(np.diff(levels) <= 0):
            raise ValueError('Monotone map levels must be unique and sorted!')

        if orientation not in ('increasing', 'decreasing'):
            raise ValueError(f'Unknown monotone map orientation "{orientation}"!')

        levels.setflags(write=False)
        values.setflags(write=False)

        self.__levels = levels
        self.__values = values
        self.__orientation = orientation
        self.__residual = float(residual)

    def __call__(self, y: Union[float, np.ndarray]) -> np.ndarray:
        """
        Map intensities. Values between table levels are interpolated linearly, values outside are clamped.
        """
        return np.interp(y, self.__levels, self.__values)

    def __len__(self) -> int:
        return self.__levels.size

    @property
    def levels(self) -> np.ndarray:
        return self.__levels

    @property
    def values(self) -> np.ndarray:
        return self.__values

    @property
    def orientation(self) -> str:
        return self.__orientation

    @property
    def residual(self) -> float:
        """
        Sum of squared differences between the mapped component and the source.
        """
        return self.__residual


@co_registered
def q1_snr(extracted: 'ImageGray', source: 'ImageGray') -> float:
    """
    Signal to noise ratio of an extracted component relative to its source, in dB.

    :param extracted:       - Extracted component.
    :param source:          - Corresponding source.
    :return:                - 10 log10(var(S) / var(Y - S)), capped at `SNR_CAP_DB`.
    """
    signal = _source_variance(source)
    return _snr_db(signal, float(np.var(extracted.data - source.data)))


@co_registered
def fit_monotone_map(extracted: 'ImageGray', source: 'ImageGray') -> 'MonotoneMap':
    """
    Find the monotone table map f minimizing sum (f(Y) - S)^2 over the distinct levels of Y.
    Source values are averaged within groups of equal Y, weighted by group size, and fitted by pool adjacent
    violators in both orientations; the orientation with the lower residual wins, increasing on ties.

    :param extracted:       - Extracted component.
    :param source:          - Corresponding source.
    :return:                - The best monotone map.
    """
    y = extracted.data.reshape(-1)
    s = source.data.reshape(-1)
    levels, inverse, counts = np.unique(y, return_inverse=True, return_counts=True)

    if levels.size < 2:
        raise ValueError('Cannot fit a monotone map to a component with fewer than 2 distinct levels!')

    means = np.bincount(inverse, weights=s) / counts
    best = None

    for orientation in ('increasing', 'decreasing'):
        fitted = isotonic_regression(means, weights=counts, increasing=orientation == 'increasing').x
        residual = float(np.sum((fitted[inverse] - s) ** 2))

        if best is None or residual < best.residual:
            best = MonotoneMap(levels, fitted, orientation, residual)

    return best


@co_registered
def q2_snr(extracted: 'ImageGray', source: 'ImageGray') -> Tuple[float, 'MonotoneMap']:
    """
    Signal to noise ratio after the optimal monotone remapping of the extracted component, in dB.

    :param extracted:       - Extracted component.
    :param source:          - Corresponding source.
    :return:                - Tuple of 10 log10(var(S) / var(f(Y) - S)), capped at `SNR_CAP_DB`, and the map f.
    """
    signal = _source_variance(source)
    mapping = fit_monotone_map(extracted, source)
    levels_index = np.searchsorted(mapping.levels, extracted.data.reshape(-1))
    noise = mapping.values[levels_index] - source.data.reshape(-1)

    return _snr_db(signal, float(np.var(noise))), mapping


def _source_variance(source: 'ImageGray') -> float:
    variance = float(np.var(source.data))

    if variance <= 0:
        raise ValueError('Cannot compute a signal to noise ratio against a constant source!')

    return variance


def _snr_db(signal: float, noise: float) -> float:
    if noise <= 0:
        return SNR_CAP_DB

    return float(min(10.0 * np.log10(signal / noise), SNR_CAP_DB))
