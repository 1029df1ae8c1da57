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


class Rprop:
    """
    Gradient ascent with one adaptive step size per parameter.
    A step grows by `increase` while the gradient keeps its sign and shrinks by `decrease` when the sign flips;
    after a flip the parameter is left unchanged for that epoch.
    """

    def __init__(self, size: int, initial_step: float = 1e-3, min_step: float = 1e-7, max_step: float = 1e-1,
                 increase: float = 1.2, decrease: float = 0.5) -> None:
        if not 0 < min_step <= initial_step <= max_step:
            raise ValueError('Step sizes must satisfy 0 < min_step <= initial_step <= max_step!')

        if increase <= 1 or not 0 < decrease < 1:
            raise ValueError('Step increase must exceed 1 and step decrease must lie in (0, 1)!')

        self.__steps = np.full(size, float(initial_step))
        self.__previous = np.zeros(size)
        self.min_step = min_step
        self.max_step = max_step
        self.increase = increase
        self.decrease = decrease

    @property
    def steps(self) -> np.ndarray:
        return self.__steps.copy()

    def step(self, parameters: np.ndarray, gradient: np.ndarray, mask: Optional[np.ndarray] = None) -> np.ndarray:
        """
        Move the parameters one step uphill.

        :param parameters:      - Current parameter vector.
        :param gradient:        - Gradient of the objective at `parameters`.
        :param mask:            - Optional boolean vector; parameters where it is False are frozen and keep their
                                  step size.
        :return:                - The updated parameter vector.
        """
        if gradient.shape != self.__steps.shape or parameters.shape != self.__steps.shape:
            raise ValueError(f'Optimizer was created for {self.__steps.size} parameters, got {parameters.size}!')

        direction = np.sign(gradient)

        if mask is not None:
            direction = np.where(mask, direction, 0.0)

        agreement = direction * self.__previous

        self.__steps = np.where(agreement > 0, np.minimum(self.__steps * self.increase, self.max_step), self.__steps)
        self.__steps = np.where(agreement < 0, np.maximum(self.__steps * self.decrease, self.min_step), self.__steps)

        direction = np.where(agreement < 0, 0.0, direction)
        self.__previous = direction

        return parameters + direction * self.__steps
