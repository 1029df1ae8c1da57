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
from typing import Any, Tuple

import numpy as np
from PIL import Image, UnidentifiedImageError

from misep._utils import exception_warn

_MODE_BITS = {'L': 8, 'I': 16, 'I;16': 16, 'I;16B': 16, 'I;16L': 16}
_COLOR_MODES = ('RGB', 'RGBA', 'RGBX', 'CMYK', 'YCbCr', 'LAB', 'HSV', 'P', 'PA', 'LA', 'La')
_FORMATS = {'.png': 'PNG', '.pgm': 'PPM'}


class ImageGray:

    def __init__(self, data: Any) -> None:
        array = np.array(data, dtype=np.float64)

        if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
            raise ValueError('Image data must be a non-empty two-dimensional array!')

        if not np.all(np.isfinite(array)):
            raise ValueError('Image intensities must be finite!')

        array.setflags(write=False)
        self.__data = array

    def __str__(self) -> str:
        return f'ImageGray({self.width}x{self.height})'

    @property
    def data(self) -> np.ndarray:
        return self.__data

    @property
    def width(self) -> int:
        return self.__data.shape[1]

    @property
    def height(self) -> int:
        return self.__data.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.__data.shape

    @property
    def size(self) -> int:
        return self.__data.size

    @property
    def is_normalized(self) -> bool:
        """
        Check whether every intensity of the image lies within [0, 1].
        Raw separator outputs are images as well, but are not required to satisfy this.
        """
        return bool(self.__data.min() >= 0.0 and self.__data.max() <= 1.0)

    @staticmethod
    def create_from(obj: Any) -> 'ImageGray':
        """
        Create an ImageGray object from a compatible object.

        :param obj:             - ImageGray object or a two-dimensional array of intensities (row-major).
        :return:                - Converted object as ImageGray.
        """
        if isinstance(obj, ImageGray):
            return obj

        return ImageGray(obj)

    @staticmethod
    def constant(width: int, height: int, value: float) -> 'ImageGray':
        return ImageGray(np.full((height, width), value, dtype=np.float64))


def load_grayscale(path: str) -> 'ImageGray':
    """
    Load an 8-bit or 16-bit grayscale PNG or binary PGM file.
    Stored levels are mapped linearly to [0, 1] as v / (2^bits - 1).

    :param path:            - Path to the image file.
    :return:                - The loaded image.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f'Image file not found: {path}!')

    try:
        with Image.open(path) as image:
            image.load()
            image_format = image.format
            mode = image.mode
            levels = np.array(image)
    except UnidentifiedImageError as error:
        raise ValueError(f'Unsupported image format: {path}!') from error

    if image_format not in _FORMATS.values():
        raise ValueError(f'Unsupported image format "{image_format}": {path}!')

    if mode in _COLOR_MODES:
        raise ValueError(f'Non-grayscale image (mode {mode}) is not supported: {path}!')

    if mode not in _MODE_BITS:
        raise ValueError(f'Unsupported grayscale mode {mode}: {path}!')

    return ImageGray(levels.astype(np.float64) / (2 ** _MODE_BITS[mode] - 1))


def save_grayscale(image: 'ImageGray', path: str, bits: int = 8) -> None:
    """
    Save an image as a grayscale PNG or binary PGM file, chosen by the file suffix.
    Intensities are quantized to 2^bits levels; values outside [0, 1] are clipped with a warning.

    :param image:           - Image to save.
    :param path:            - Destination path ending in `.png` or `.pgm`.
    :param bits:            - Bits per pixel, 8 or 16.
    """
    image_format = _FORMATS.get(os.path.splitext(path)[1].lower())

    if image_format is None:
        raise ValueError(f'Unsupported image suffix for {path}, expected .png or .pgm!')

    if bits not in (8, 16):
        raise ValueError(f'Unsupported bit depth {bits}, expected 8 or 16!')

    if not image.is_normalized:
        exception_warn(f'Clipping intensities outside [0, 1] while writing {path}')

    levels = np.rint(np.clip(image.data, 0.0, 1.0) * (2 ** bits - 1))

    if bits == 8:
        output = Image.fromarray(levels.astype(np.uint8))
    else:
        output = Image.fromarray(levels.astype(np.int32))

    try:
        output.save(path, format=image_format)
    except OSError as error:
        raise OSError(f'Cannot write image to {path}: {error}!') from error


def flip_horizontal(image: 'ImageGray') -> 'ImageGray':
    return ImageGray(image.data[:, ::-1])


def normalize_pair(first: 'ImageGray', second: 'ImageGray') -> Tuple['ImageGray', 'ImageGray']:
    """
    Map the joint intensity range of an image pair affinely onto [0, 1].
    The darkest pixel of the pair maps to 0 and the lightest to 1; the same map is applied to both images.

    :param first:           - First image of the pair.
    :param second:          - Second image of the pair.
    :return:                - The normalized pair.
    """
    low = min(first.data.min(), second.data.min())
    high = max(first.data.max(), second.data.max())

    if not high > low:
        raise ValueError('Cannot normalize a jointly constant image pair!')

    scale = high - low
    return ImageGray((first.data - low) / scale), ImageGray((second.data - low) / scale)


def display_normalize(image: 'ImageGray', tail: float = 0.01) -> 'ImageGray':
    """
    Stretch brightness and contrast for display, saturating the darkest and the brightest `tail` fraction of pixels.
    Pixels tied with a saturation threshold are saturated with it, so equal intensities always look equal and
    more than `tail` of the pixels may end up at 0 or 1 when the image has large flat regions.
    Only meant for viewing; quality measures are always computed on raw images.

    :param image:           - Image to stretch.
    :param tail:            - Fraction of pixels saturated at each end.
    :return:                - Display copy of the image with intensities in [0, 1].
    """
    if not 0.0 <= tail < 0.5:
        raise ValueError(f'Invalid saturation fraction {tail}, expected a value in [0, 0.5)!')

    ordered = np.sort(image.data, axis=None)
    count = int(round(tail * ordered.size))
    low = ordered[count - 1] if count > 0 else ordered[0]
    high = ordered[ordered.size - count] if count > 0 else ordered[-1]

    if not high > low:
        return ImageGray(np.where(image.data > low, 1.0, 0.0))

    return ImageGray(np.clip((image.data - low) / (high - low), 0.0, 1.0))
