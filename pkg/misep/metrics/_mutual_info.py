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

from typing import Optional, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma

from misep._utils import derive_seed, exception_warn
from misep.imagery import ImageGray, PixelPairSet, sample_pixel_pairs

JITTER = 1e-6
_JITTER_ATTEMPTS = 3


def kraskov_mi(samples: Union['PixelPairSet', np.ndarray], k: int = 3, seed: int = 0,
               jitter: float = JITTER) -> float:
    """
    Estimate the mutual information between the two coordinates of the samples with the first k-nearest-neighbour
    estimator of Kraskov, Stoegbauer and Grassberger, using max-norm distances.
    Quantized data are de-tied by adding uniform noise of amplitude `jitter` to both coordinates.

    :param samples:         - Sample pairs, a pixel pair set or an array of shape (N, 2).
    :param k:               - Neighbour order.
    :param seed:            - Seed of the jitter.
    :param jitter:          - Jitter amplitude, 0 to use the samples as they are.
    :return:                - The estimate in bits.
    """
    points = samples.samples if isinstance(samples, PixelPairSet) else np.asarray(samples, dtype=np.float64)

    if points.ndim != 2 or points.shape[1] != 2:
        raise ValueError('Mutual information needs samples of shape (N, 2)!')

    count = points.shape[0]

    if k < 1 or count < k + 2:
        raise ValueError(f'Mutual information with k={k} needs at least {k + 2} samples, got {count}!')

    points = _detie(points, jitter, seed)

    distances, _ = cKDTree(points).query(points, k=k + 1, p=np.inf)
    radii = np.nextafter(distances[:, k], 0)

    neighbours = []

    for column in range(2):
        marginal = points[:, column:column + 1]
        neighbours.append(cKDTree(marginal).query_ball_point(marginal, r=radii, p=np.inf, return_length=True) - 1)

    nats = digamma(k) + digamma(count) - np.mean(digamma(neighbours[0] + 1) + digamma(neighbours[1] + 1))

    return float(nats / np.log(2.0))


def q3_q4(extracted: Tuple['ImageGray', 'ImageGray'], sources: Tuple['ImageGray', 'ImageGray'],
          eval_samples: int = 5000, exclude: Optional['PixelPairSet'] = None, seed: int = 0,
          k: int = 3) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """
    Mutual information of each extracted component with its own source (Q3) and with the opposite source (Q4).
    All four estimates use the same pixel locations, drawn away from the training samples.

    :param extracted:       - Extracted components (Y1, Y2).
    :param sources:         - Sources (S1, S2).
    :param eval_samples:    - Number of pixel locations.
    :param exclude:         - Training samples whose locations must not be used.
    :param seed:            - Seed of the location sampling; the jitter of each estimate derives from it.
    :param k:               - Neighbour order.
    :return:                - Tuple ((Q3_1, Q3_2), (Q4_1, Q4_2)) in bits.
    """
    images = list(extracted) + list(sources)

    if len(images) != 4 or any(image.shape != images[0].shape for image in images):
        raise ValueError('Mutual information measures need two extracted components and two sources '
                         'of equal dimensions!')

    locations = sample_pixel_pairs(images[0], images[2], eval_samples, seed, exclude)
    flat = locations.flat_indices(images[0].width)
    first, second, source_first, source_second = (image.data.reshape(-1)[flat] for image in images)

    pairs = [(first, source_first), (second, source_second), (first, source_second), (second, source_first)]
    estimates = [kraskov_mi(np.column_stack(pair), k, derive_seed(seed, 'jitter', index))
                 for index, pair in enumerate(pairs)]

    return (estimates[0], estimates[1]), (estimates[2], estimates[3])


def _detie(points: np.ndarray, jitter: float, seed: int) -> np.ndarray:
    count = points.shape[0]

    if jitter <= 0:
        if np.unique(points, axis=0).shape[0] != count:
            raise ValueError('Mutual information samples contain duplicate points!')
        return points

    rng = np.random.default_rng(seed)

    for attempt in range(_JITTER_ATTEMPTS):
        jittered = points + rng.uniform(-jitter, jitter, points.shape)

        if np.unique(jittered, axis=0).shape[0] == count:
            return jittered

        exception_warn(f'Duplicate points remain after jitter attempt {attempt + 1}, jittering again')

    raise ValueError(f'Duplicate points remain after {_JITTER_ATTEMPTS} jitter attempts!')
