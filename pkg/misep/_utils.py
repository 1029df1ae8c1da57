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
import warnings
import zlib
from functools import wraps
from typing import Callable, Dict

import numpy as np


def exception_warn(exc_value) -> None:
    warnings.simplefilter('always', UserWarning)
    warnings.warn(str(exc_value))


def co_registered(function: 'Callable') -> 'Callable':
    """
    Decorator that allows for a given image operation to be executed only on a co-registered image pair.
    The first two positional arguments of the decorated function must be images with equal dimensions.

    :param function:        - Decorated image operation.
    :return:                - The return value of the decorated image operation.
    """

    @wraps(function)
    def wrapper(*args, **kwargs):
        first, second = args[0], args[1]

        if first.shape == second.shape:
            return function(*args, **kwargs)
        else:
            raise ValueError(f'Cannot execute "{function.__name__}" on images with different dimensions '
                             f'({first.width}x{first.height} and {second.width}x{second.height})!')

    return wrapper


def derive_seed(master: int, name: str, index: int = 0) -> int:
    """
    Derive a named sub-seed from a master seed.
    The sub-seed is the first word of the state of `SeedSequence(master, spawn_key=(crc32(name), index))`,
    so that every name and index pair yields an independent, reproducible stream.

    :param master:          - Master seed.
    :param name:            - Name of the random stream (e.g. `sampling`, `init`, `noise`, `eval`).
    :param index:           - Index of the run the stream belongs to.
    :return:                - Sub-seed as a non-negative integer.
    """
    if master < 0 or index < 0:
        raise ValueError('Seeds and run indices must be non-negative!')

    sequence = np.random.SeedSequence(master, spawn_key=(zlib.crc32(name.encode('utf-8')), index))
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def read_key_values(path: str) -> Dict[str, str]:
    """
    Read a flat key-value configuration file.
    Each non-empty line holds `key = value` or `key: value`; everything after `#` is a comment.

    :param path:            - Path to the configuration file.
    :return:                - Dictionary with the raw string values of all keys.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f'Configuration file not found: {path}!')

    values = dict()

    with open(path, 'r') as file:
        for number, line in enumerate(file, start=1):
            line = line.split('#', 1)[0].strip()

            if not line:
                continue

            separator = _find_separator(line)

            if separator < 0:
                raise ValueError(f'Invalid configuration line {number}: "{line}"!')

            key = line[:separator].strip()
            value = line[separator + 1:].strip()

            if not key:
                raise ValueError(f'Missing key on configuration line {number}!')

            if key in values:
                raise ValueError(f'Duplicate configuration key "{key}" on line {number}!')

            values[key] = value

    return values


def parse_bool(value: str) -> bool:
    lowered = value.strip().lower()

    if lowered in ('true', 'yes', 'on', '1'):
        return True
    elif lowered in ('false', 'no', 'off', '0'):
        return False
    else:
        raise ValueError(f'Invalid boolean value "{value}"!')


def _find_separator(line: str) -> int:
    positions = [position for position in (line.find('='), line.find(':')) if position >= 0]
    return min(positions) if positions else -1
