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

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from misep._utils import co_registered, derive_seed
from misep.imagery import ImageGray

_RANGE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class MixParams:
    """
    Parameters of the synthetic show-through mixture
    m1 = s1 (q + (1 - q) s2^gamma), m2 = s2 (q + (1 - q) s1^gamma), followed by acquisition noise.
    """

    q: float = 0.6
    gamma: float = 2.0
    sigma: float = 0.01
    levels: int = 256
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.q <= 1:
            raise ValueError(f'Show-through floor q must lie in (0, 1], got {self.q}!')

        if self.gamma < 1:
            raise ValueError(f'Nonlinearity exponent must be at least 1, got {self.gamma}!')

        if self.sigma < 0:
            raise ValueError(f'Noise standard deviation must be non-negative, got {self.sigma}!')

        if self.levels < 2:
            raise ValueError(f'At least 2 quantization levels are needed, got {self.levels}!')

    @staticmethod
    def from_mapping(mapping: Dict[str, str]) -> 'MixParams':
        converters = {'q': float, 'gamma': float, 'sigma': float, 'levels': int, 'seed': int}
        unknown = set(mapping) - set(converters)

        if unknown:
            raise ValueError(f'Unknown mixture settings: {", ".join(sorted(unknown))}!')

        return MixParams(**{key: converters[key](value) for key, value in mapping.items()})


def generate_bars_pair(n_bars: int = 25, size: int = 500, seed: int = 0) -> Tuple['ImageGray', 'ImageGray']:
    """
    Create two square images of uniform bars with intensities evenly spaced between black and white, in random
    order. The first image has vertical bars; the second is the first rotated by 90 degrees, so that the two
    intensity fields are independent.

    :param n_bars:          - Number of bars.
    :param size:            - Image side in pixels.
    :param seed:            - Seed of the bar order.
    :return:                - The two source images.
    """
    if n_bars < 2:
        raise ValueError('At least 2 bars are needed!')

    if size < n_bars:
        raise ValueError(f'Image size {size} is smaller than the number of bars {n_bars}!')

    levels = np.linspace(0.0, 1.0, n_bars)[np.random.default_rng(seed).permutation(n_bars)]
    bars = (np.arange(size) * n_bars) // size
    first = np.tile(levels[bars], (size, 1))

    return ImageGray(first), ImageGray(np.rot90(first))


@co_registered
def mix_core(s1: 'ImageGray', s2: 'ImageGray', p: 'MixParams') -> Tuple['ImageGray', 'ImageGray']:
    return (ImageGray(_attenuate(s1.data, s2.data, p)),
            ImageGray(_attenuate(s2.data, s1.data, p)))


@co_registered
def mix_showthrough(s1: 'ImageGray', s2: 'ImageGray', p: 'MixParams') -> Tuple['ImageGray', 'ImageGray']:
    """
    Mix two sources with the show-through model and add acquisition noise to both mixtures.

    :param s1:              - Front source.
    :param s2:              - Back source, registered with the front.
    :param p:               - Mixture parameters; the noise of each mixture derives from `p.seed`.
    :return:                - The two acquired mixtures.
    """
    m1, m2 = mix_core(s1, s2, p)

    return (add_acquisition_noise(m1, p.sigma, p.levels, derive_seed(p.seed, 'noise', 0)),
            add_acquisition_noise(m2, p.sigma, p.levels, derive_seed(p.seed, 'noise', 1)))


def add_acquisition_noise(image: 'ImageGray', sigma: float, levels: int = 256, seed: int = 0) -> 'ImageGray':
    """
    Add Gaussian noise, clip to [0, 1] and quantize to `levels` uniform levels.
    Noise comes from a counter-based Philox generator.

    :param image:           - Image to degrade.
    :param sigma:           - Noise standard deviation.
    :param levels:          - Number of quantization levels.
    :param seed:            - Noise seed.
    :return:                - The degraded image.
    """
    if sigma < 0:
        raise ValueError('Noise standard deviation must be non-negative!')

    if levels < 2:
        raise ValueError('At least 2 quantization levels are needed!')

    values = image.data

    if sigma > 0:
        values = values + np.random.Generator(np.random.Philox(seed)).normal(0.0, sigma, image.shape)

    steps = levels - 1
    return ImageGray(np.rint(np.clip(values, 0.0, 1.0) * steps) / steps)


@co_registered
def invert_showthrough(m1: 'ImageGray', m2: 'ImageGray', p: 'MixParams', max_iterations: int = 1000,
                       tolerance: float = 1e-12) -> Tuple['ImageGray', 'ImageGray']:
    """
    Recover the sources of a noiseless mixture by Gauss-Seidel fixed point iteration.

    :param m1:              - First noiseless mixture.
    :param m2:              - Second noiseless mixture.
    :param p:               - Parameters the mixtures were made with.
    :param max_iterations:  - Iteration limit.
    :param tolerance:       - Convergence threshold on the largest update.
    :return:                - The recovered sources.
    """
    s1 = m1.data.copy()
    s2 = m2.data.copy()

    for _ in range(max_iterations):
        previous1, previous2 = s1, s2
        s1 = m1.data / (p.q + (1.0 - p.q) * np.clip(s2, 0.0, 1.0) ** p.gamma)
        s2 = m2.data / (p.q + (1.0 - p.q) * np.clip(s1, 0.0, 1.0) ** p.gamma)

        if s1.max() > 1 + _RANGE_TOLERANCE or s2.max() > 1 + _RANGE_TOLERANCE or min(s1.min(), s2.min()) < 0:
            raise RuntimeError('Mixture values lie outside the range of the show-through model!')

        if max(np.abs(s1 - previous1).max(), np.abs(s2 - previous2).max()) < tolerance:
            return ImageGray(np.clip(s1, 0.0, 1.0)), ImageGray(np.clip(s2, 0.0, 1.0))

    raise RuntimeError(f'Show-through inversion did not converge in {max_iterations} iterations!')


@co_registered
def parallelogram_ratio(m1: 'ImageGray', m2: 'ImageGray') -> float:
    """
    Area of the convex hull of the mixture scatter over the area of its smallest enclosing parallelogram.
    Linear mixtures of sources filling a square give 1. The smallest parallelogram has its sides along hull edges,
    so all pairs of edge directions are tried.

    :param m1:              - First mixture.
    :param m2:              - Second mixture.
    :return:                - The area ratio in (0, 1].
    """
    points = np.unique(np.column_stack([m1.data.reshape(-1), m2.data.reshape(-1)]), axis=0)

    if points.shape[0] < 3:
        raise ValueError('Scatter needs at least 3 distinct points!')

    try:
        hull = ConvexHull(points)
    except QhullError as error:
        raise ValueError('Scatter points are collinear!') from error

    vertices = points[hull.vertices]
    edges = np.roll(vertices, -1, axis=0) - vertices
    normals = np.column_stack([-edges[:, 1], edges[:, 0]]) / np.hypot(edges[:, 0], edges[:, 1])[:, None]

    projections = vertices @ normals.T
    widths = projections.max(axis=0) - projections.min(axis=0)
    sines = np.abs(np.multiply.outer(normals[:, 0], normals[:, 1]) - np.multiply.outer(normals[:, 1], normals[:, 0]))

    with np.errstate(divide='ignore'):
        areas = np.where(sines > 1e-12, np.multiply.outer(widths, widths) / np.where(sines > 1e-12, sines, 1.0),
                         np.inf)

    return float(hull.volume / areas.min())


def _attenuate(front: np.ndarray, back: np.ndarray, p: 'MixParams') -> np.ndarray:
    return front * (p.q + (1.0 - p.q) * back ** p.gamma)
