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

from fractions import Fraction
from numbers import Real
from typing import Union

import numpy as np

from ._image import ImageGray

# Catmull-Rom support radius in input pixels, before stretching for reduction.
_SUPPORT = 2.0


def catmull_rom(x: Union[float, np.ndarray]) -> np.ndarray:
    """
    Evaluate the Catmull-Rom cubic convolution kernel (a = -0.5).

    :param x:               - Distance(s) from the sample position, in pixels.
    :return:                - Kernel weight(s).
    """
    x = np.abs(np.asarray(x, dtype=np.float64))
    near = (x ** 2) * (1.5 * x - 2.5) + 1.0
    far = (x ** 2) * (-0.5 * x + 2.5) - 4.0 * x + 2.0
    return np.where(x <= 1.0, near, np.where(x < 2.0, far, 0.0))


def cubic_weights(phase: float) -> np.ndarray:
    """
    Return the four Catmull-Rom taps for a sample that lies `phase` pixels past an input pixel.
    The taps apply to the pixels at offsets -1, 0, 1 and 2 from that pixel.

    :param phase:           - Fractional sample position in [0, 1).
    :return:                - Array with the four weights.
    """
    if not 0.0 <= phase < 1.0:
        raise ValueError(f'Invalid sample phase {phase}, expected a value in [0, 1)!')

    return catmull_rom(np.array([1.0 + phase, phase, 1.0 - phase, 2.0 - phase]))


def bicubic_resample(image: 'ImageGray', factor: Union[Real, Fraction], anchored: bool = False) -> 'ImageGray':
    """
    Resize an image by a scale factor with bicubic (Catmull-Rom) interpolation.
    Samples are taken at pixel centres, borders are clamped to the edge pixels, and when reducing
    the kernel is widened by 1 / factor so that every input pixel contributes. The output is clipped to [0, 1].

    With `anchored`, output sample j lies at input position j * input size / output size, that is j / factor for
    sizes the factor divides, and the kernel is never widened.
    Enlarging by an integer factor then keeps every input pixel, `result[::factor, ::factor]` being the input,
    and reducing by its inverse takes those samples back exactly.

    :param image:           - Image to resize.
    :param factor:          - Scale factor, e.g. 4 or Fraction(1, 4).
    :param anchored:        - Anchor the output grid at the first input pixel instead of pixel centres.
    :return:                - The resized image.
    """
    factor = float(factor)

    if not factor > 0.0:
        raise ValueError(f'Invalid scale factor {factor}, expected a positive value!')

    height = int(round(image.height * factor))
    width = int(round(image.width * factor))

    if height < 1 or width < 1:
        raise ValueError(f'Degenerate output size {width}x{height} for scale factor {factor}!')

    if factor == 1.0:
        return ImageGray(image.data)

    if anchored:
        rows = _weight_matrix(image.height, np.arange(height) * image.height / height, 1.0)
        columns = _weight_matrix(image.width, np.arange(width) * image.width / width, 1.0)
    else:
        stretch = min(factor, 1.0)
        rows = _weight_matrix(image.height, (np.arange(height) + 0.5) / factor - 0.5, stretch)
        columns = _weight_matrix(image.width, (np.arange(width) + 0.5) / factor - 0.5, stretch)

    return ImageGray(np.clip(rows @ image.data @ columns.T, 0.0, 1.0))


def bicubic_shift(image: 'ImageGray', dx: float, dy: float) -> 'ImageGray':
    """
    Translate image content by a possibly fractional number of pixels with bicubic interpolation.
    A positive `dx` moves the content right and a positive `dy` moves it down; vacated borders are clamped.

    :param image:           - Image to translate.
    :param dx:              - Horizontal displacement in pixels.
    :param dy:              - Vertical displacement in pixels.
    :return:                - The translated image, clipped to [0, 1].
    """
    rows = _weight_matrix(image.height, np.arange(image.height) - float(dy), 1.0)
    columns = _weight_matrix(image.width, np.arange(image.width) - float(dx), 1.0)

    return ImageGray(np.clip(rows @ image.data @ columns.T, 0.0, 1.0))


def _weight_matrix(size: int, positions: np.ndarray, stretch: float) -> np.ndarray:
    """
    Build the dense interpolation matrix of one axis.

    :param size:            - Number of input pixels along the axis.
    :param positions:       - Sample positions in input pixel coordinates.
    :param stretch:         - Kernel compression factor (1 when enlarging, the scale factor when reducing).
    :return:                - Matrix of shape (len(positions), size) whose rows sum to 1.
    """
    radius = _SUPPORT / stretch
    taps = int(np.ceil(2.0 * radius)) + 1
    first = np.floor(positions - radius).astype(np.int64) + 1
    offsets = first[:, np.newaxis] + np.arange(taps)[np.newaxis, :]

    weights = catmull_rom((offsets - positions[:, np.newaxis]) * stretch)
    weights /= weights.sum(axis=1, keepdims=True)

    matrix = np.zeros((positions.size, size), dtype=np.float64)
    rows = np.repeat(np.arange(positions.size), taps)
    np.add.at(matrix, (rows, np.clip(offsets, 0, size - 1).ravel()), weights.ravel())

    return matrix
