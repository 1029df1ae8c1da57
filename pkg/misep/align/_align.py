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
from typing import Any, Dict, NamedTuple, Tuple

import numpy as np
from scipy.signal import fftconvolve

from misep._utils import co_registered, exception_warn, parse_bool
from misep.imagery import ImageGray, bicubic_resample

# Per-pixel variance below which a block carries no alignment signal.
_VARIANCE_FLOOR = 1e-12
# Scores closer than this to the maximum are treated as ties.
_TIE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class AlignParams:
    block_size: int = 25
    upsample: int = 4
    search_radius: int = 16
    flip: bool = False
    coarse_dx: int = 0
    coarse_dy: int = 0

    def __post_init__(self) -> None:
        if self.block_size < 1 or self.upsample < 1 or self.search_radius < 0:
            raise ValueError('Block size and upsampling factor must be positive and the search radius non-negative!')

    @staticmethod
    def from_mapping(mapping: Dict[str, str]) -> 'AlignParams':
        """
        Create alignment parameters from the `align.*` keys of a flat key-value mapping.

        :param mapping:         - Mapping with keys without the `align.` prefix.
        :return:                - Alignment parameters.
        """
        converters = {'block_size': int, 'upsample': int, 'search_radius': int, 'flip': parse_bool,
                      'coarse_dx': int, 'coarse_dy': int}
        unknown = set(mapping) - set(converters)

        if unknown:
            raise ValueError(f'Unknown alignment settings: {", ".join(sorted(unknown))}!')

        return AlignParams(**{key: converters[key](value) for key, value in mapping.items()})


class BlockMatch(NamedTuple):
    dx: int
    dy: int
    score: float
    flagged: bool


class DisplacementField:

    def __init__(self, displacements: np.ndarray, flags: np.ndarray, block_size: int = 25, upsample: int = 4,
                 search_radius: int = 16) -> None:
        displacements = np.array(displacements, dtype=np.int64)
        flags = np.array(flags, dtype=bool)

        if displacements.ndim != 3 or displacements.shape[2] != 2 or flags.shape != displacements.shape[:2]:
            raise ValueError('Displacement field must hold one (dx, dy) pair and one flag per block!')

        if displacements.size and np.abs(displacements).max() > search_radius:
            raise ValueError('Block displacement exceeds the search radius!')

        displacements.setflags(write=False)
        flags.setflags(write=False)

        self.__displacements = displacements
        self.__flags = flags
        self.block_size = block_size
        self.upsample = upsample
        self.search_radius = search_radius

    @property
    def blocks_x(self) -> int:
        return self.__displacements.shape[1]

    @property
    def blocks_y(self) -> int:
        return self.__displacements.shape[0]

    @property
    def displacements(self) -> np.ndarray:
        """
        Block displacements (dx, dy) in units of 1 / upsample pixel, indexed by block row and column.
        """
        return self.__displacements

    @property
    def flags(self) -> np.ndarray:
        """
        Blocks without alignment signal, whose displacement was set to (0, 0).
        """
        return self.__flags

    @property
    def max_displacement(self) -> int:
        return int(np.abs(self.__displacements).max()) if self.__displacements.size else 0

    def displacements_px(self) -> np.ndarray:
        return self.__displacements / float(self.upsample)

    def to_document(self) -> Dict[str, Any]:
        grid = [[int(dx), int(dy), bool(flag)]
                for (dx, dy), flag in zip(self.__displacements.reshape(-1, 2), self.__flags.reshape(-1))]

        return {'block_size': self.block_size, 'upsample': self.upsample, 'search_radius': self.search_radius,
                'blocks_x': self.blocks_x, 'blocks_y': self.blocks_y, 'grid': grid}

    @staticmethod
    def from_document(document: Dict[str, Any]) -> 'DisplacementField':
        """
        Create a displacement field from its JSON document.

        :param document:        - Parsed document as produced by `to_document`.
        :return:                - The displacement field.
        """
        try:
            blocks_x, blocks_y = int(document['blocks_x']), int(document['blocks_y'])
            grid = np.array(document['grid'], dtype=np.int64).reshape(blocks_y, blocks_x, 3)
            return DisplacementField(grid[:, :, :2], grid[:, :, 2].astype(bool), int(document['block_size']),
                                     int(document['upsample']), int(document['search_radius']))
        except (KeyError, TypeError, ValueError) as error:
            raise ValueError(f'Malformed displacement field document: {error}!') from error


def coarse_shift(image: 'ImageGray', dx: int, dy: int) -> 'ImageGray':
    """
    Translate image content by an integer number of pixels, replicating the nearest edge into vacated margins.

    :param image:           - Image to translate.
    :param dx:              - Horizontal displacement in pixels (positive moves content right).
    :param dy:              - Vertical displacement in pixels (positive moves content down).
    :return:                - The translated image with unchanged dimensions.
    """
    if abs(dx) >= image.width or abs(dy) >= image.height:
        raise ValueError(f'Shift ({dx}, {dy}) is not smaller than the image dimensions '
                         f'{image.width}x{image.height}!')

    rows = np.clip(np.arange(image.height) - dy, 0, image.height - 1)
    columns = np.clip(np.arange(image.width) - dx, 0, image.width - 1)

    return ImageGray(image.data[np.ix_(rows, columns)])


def block_match(reference_region: 'ImageGray', moving_block: 'ImageGray', search_radius: int) -> 'BlockMatch':
    """
    Find the offset of a block inside a reference region that maximizes the zero-mean normalized
    cross-correlation. Ties are broken by the smallest displacement, then by row-major candidate order.

    :param reference_region:    - Reference region, larger than the block by `search_radius` on every side.
    :param moving_block:        - Block to locate.
    :param search_radius:       - Largest displacement tried along each axis.
    :return:                    - The best offset, its score in [-1, 1], and whether the block had no signal.
    """
    return _match_arrays(reference_region.data, moving_block.data, search_radius)


@co_registered
def local_align(reference: 'ImageGray', moving: 'ImageGray', block_size: int = 25, upsample: int = 4,
                search_radius: int = 16) -> Tuple['ImageGray', 'DisplacementField']:
    """
    Align the moving image onto the reference with independent block translations at sub-pixel resolution.
    Both images are enlarged by `upsample`, each block of the moving image is matched against the reference,
    the moving image is rebuilt from its displaced blocks and reduced back by `upsample`. Both resamplings use
    a grid anchored at the original pixels, so blocks that do not move come back unchanged.

    :param reference:       - Reference image.
    :param moving:          - Image to align, coarsely aligned with the reference.
    :param block_size:      - Block side in original pixels.
    :param upsample:        - Enlargement factor; displacements are found in units of 1 / upsample pixel.
    :param search_radius:   - Largest displacement tried, in enlarged pixels.
    :return:                - The aligned moving image and the displacement field.
    """
    if block_size < 1 or upsample < 1 or search_radius < 0:
        raise ValueError('Block size and upsampling factor must be positive and the search radius non-negative!')

    reference_up = bicubic_resample(reference, upsample, anchored=True).data
    moving_up = bicubic_resample(moving, upsample, anchored=True).data
    padded = np.pad(reference_up, search_radius, mode='edge')

    height, width = moving_up.shape
    side = block_size * upsample
    blocks_y = -(-reference.height // block_size)
    blocks_x = -(-reference.width // block_size)

    displacements = np.zeros((blocks_y, blocks_x, 2), dtype=np.int64)
    flags = np.zeros((blocks_y, blocks_x), dtype=bool)
    rebuilt = np.empty_like(moving_up)

    for block_row in range(blocks_y):
        top, bottom = block_row * side, min((block_row + 1) * side, height)

        for block_column in range(blocks_x):
            left, right = block_column * side, min((block_column + 1) * side, width)

            region = padded[top:bottom + 2 * search_radius, left:right + 2 * search_radius]
            match = _match_arrays(region, moving_up[top:bottom, left:right], search_radius)

            displacements[block_row, block_column] = (match.dx, match.dy)
            flags[block_row, block_column] = match.flagged

            rows = np.clip(np.arange(top, bottom) - match.dy, 0, height - 1)
            columns = np.clip(np.arange(left, right) - match.dx, 0, width - 1)
            rebuilt[top:bottom, left:right] = moving_up[np.ix_(rows, columns)]

    if flags.any():
        exception_warn(f'{int(flags.sum())} of {flags.size} blocks carry no alignment signal and were left in place')

    aligned = bicubic_resample(ImageGray(rebuilt), 1 / upsample, anchored=True)
    field = DisplacementField(displacements, flags, block_size, upsample, search_radius)

    return aligned, field


def _match_arrays(region: np.ndarray, block: np.ndarray, search_radius: int) -> 'BlockMatch':
    block_height, block_width = block.shape
    expected = (block_height + 2 * search_radius, block_width + 2 * search_radius)

    if region.shape != expected:
        raise ValueError(f'Reference region of shape {region.shape} does not fit a {block.shape} block '
                         f'with search radius {search_radius}, expected {expected}!')

    template = block - block.mean()
    template_energy = float(np.sum(template ** 2))

    if template_energy <= _VARIANCE_FLOOR * block.size:
        return BlockMatch(0, 0, 0.0, True)

    numerator = fftconvolve(region, template[::-1, ::-1], mode='valid')
    sums = _window_sums(region, block_height, block_width)
    window_energy = np.maximum(_window_sums(region ** 2, block_height, block_width) - sums ** 2 / block.size, 0.0)

    valid = window_energy > _VARIANCE_FLOOR * block.size

    if not valid.any():
        return BlockMatch(0, 0, 0.0, True)

    scores = np.zeros_like(numerator)
    scores[valid] = numerator[valid] / np.sqrt(window_energy[valid] * template_energy)
    scores = np.clip(scores, -1.0, 1.0)

    candidates = np.argwhere(scores >= scores.max() - _TIE_TOLERANCE) - search_radius
    distances = candidates[:, 0] ** 2 + candidates[:, 1] ** 2
    dy, dx = candidates[int(np.argmin(distances))]

    return BlockMatch(int(dx), int(dy), float(scores[dy + search_radius, dx + search_radius]), False)


def _window_sums(values: np.ndarray, height: int, width: int) -> np.ndarray:
    """
    Sum `values` over every height x width window fully inside the array.

    :return:                - Array of shape (rows - height + 1, columns - width + 1).
    """
    table = np.zeros((values.shape[0] + 1, values.shape[1] + 1), dtype=np.float64)
    table[1:, 1:] = values.cumsum(axis=0).cumsum(axis=1)

    return table[height:, width:] - table[:-height, width:] - table[height:, :-width] + table[:-height, :-width]
