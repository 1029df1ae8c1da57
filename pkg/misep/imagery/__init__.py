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

from ._image import ImageGray, load_grayscale, save_grayscale, flip_horizontal, normalize_pair, display_normalize
from ._resample import bicubic_resample, bicubic_shift, cubic_weights, catmull_rom
from ._sampling import PixelPairSet, sample_pixel_pairs

__all__ = ['ImageGray', 'load_grayscale', 'save_grayscale', 'flip_horizontal', 'normalize_pair',
           'display_normalize', 'bicubic_resample', 'bicubic_shift', 'cubic_weights', 'catmull_rom',
           'PixelPairSet', 'sample_pixel_pairs']
