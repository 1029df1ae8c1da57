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

from typing import Optional

import numpy as np

from misep._utils import co_registered
from ._image import ImageGray


class PixelPairSet:

    def __init__(self, samples: np.ndarray, indices: np.ndarray, seed: Optional[int] = None) -> None:
        samples = np.array(samples, dtype=np.float64).reshape(-1, 2)
        indices = np.array(indices, dtype=np.int64).reshape(-1, 2)

        if samples.shape[0] != indices.shape[0]:
            raise ValueError('Pixel pair samples and source indices must have the same length!')

        samples.setflags(write=False)
        indices.setflags(write=False)

        self.__samples = samples
        self.__indices = indices
        self.__seed = seed

    def __len__(self) -> int:
        return self.__samples.shape[0]

    def __str__(self) -> str:
        return f'PixelPairSet({len(self)}, seed={self.seed})'

    @property
    def samples(self) -> np.ndarray:
        """
        Paired intensities (x1, x2), one row per sample.
        """
        return self.__samples

    @property
    def indices(self) -> np.ndarray:
        """
        Pixel locations (row, col) the samples were drawn from, one row per sample.
        """
        return self.__indices

    @property
    def seed(self) -> Optional[int]:
        return self.__seed

    def flat_indices(self, width: int) -> np.ndarray:
        return self.__indices[:, 0] * width + self.__indices[:, 1]

    @staticmethod
    def create_from(samples: np.ndarray) -> 'PixelPairSet':
        """
        Create a pixel pair set from raw samples that were not drawn from an image.
        The source indices are set to consecutive positions of a single image row.

        :param samples:         - Array of shape (N, 2) with paired values.
        :return:                - The pixel pair set.
        """
        samples = np.asarray(samples, dtype=np.float64).reshape(-1, 2)
        count = samples.shape[0]
        indices = np.column_stack([np.zeros(count, dtype=np.int64), np.arange(count, dtype=np.int64)])

        return PixelPairSet(samples, indices)


@co_registered
def sample_pixel_pairs(first: 'ImageGray', second: 'ImageGray', count: int, seed: int,
                       exclude: Optional['PixelPairSet'] = None) -> 'PixelPairSet':
    """
    Draw distinct, uniformly random pixel locations from a co-registered image pair.

    :param first:           - First image, supplies x1.
    :param second:          - Second image, supplies x2.
    :param count:           - Number of pixel pairs to draw.
    :param seed:            - Seed of the random selection.
    :param exclude:         - Optional set whose pixel locations must not be drawn again.
    :return:                - The sampled pixel pairs, in draw order.
    """
    available = np.arange(first.size, dtype=np.int64)

    if exclude is not None and len(exclude) > 0:
        rows, columns = exclude.indices[:, 0], exclude.indices[:, 1]

        if rows.min() < 0 or columns.min() < 0 or rows.max() >= first.height or columns.max() >= first.width:
            raise ValueError('Excluded pixel locations lie outside the image!')

        available = np.setdiff1d(available, exclude.flat_indices(first.width), assume_unique=False)

    if count < 0 or count > available.size:
        raise ValueError(f'Cannot draw {count} pixel pairs from {available.size} available pixels!')

    chosen = np.random.default_rng(seed).choice(available, size=count, replace=False)
    rows, columns = np.divmod(chosen, first.width)
    samples = np.column_stack([first.data[rows, columns], second.data[rows, columns]])

    return PixelPairSet(samples, np.column_stack([rows, columns]), seed)
