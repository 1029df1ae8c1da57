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
from scipy.special import expit

# Initial hidden slope and the range of sigmoid centres, covering the unit interval with some margin.
_INITIAL_SLOPE = 4.0
_CENTRE_RANGE = (-0.25, 1.25)


class PsiNet:
    """
    Monotone network estimating the cumulative distribution of one separated component.

    psi(y) = sum_h v_h * sigmoid(w_h * y + b_h) / sum_h v_h, with w_h = exp(log_weights_h) and
    v_h = exp(log_output_weights_h), so that psi is strictly increasing and maps onto (0, 1).
    """

    def __init__(self, log_weights: np.ndarray, biases: np.ndarray, log_output_weights: np.ndarray) -> None:
        arrays = [np.array(values, dtype=np.float64).reshape(-1)
                  for values in (log_weights, biases, log_output_weights)]

        if arrays[0].size == 0 or any(array.shape != arrays[0].shape for array in arrays):
            raise ValueError('Psi network parameters must be non-empty vectors of equal length!')

        if not all(np.isfinite(array).all() for array in arrays):
            raise ValueError('Psi network parameters must be finite!')

        for array in arrays:
            array.setflags(write=False)

        self.__log_weights, self.__biases, self.__log_output_weights = arrays

    @property
    def hidden(self) -> int:
        return self.__biases.size

    @property
    def log_weights(self) -> np.ndarray:
        return self.__log_weights

    @property
    def biases(self) -> np.ndarray:
        return self.__biases

    @property
    def log_output_weights(self) -> np.ndarray:
        return self.__log_output_weights

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.__log_weights)

    @property
    def output_weights(self) -> np.ndarray:
        return np.exp(self.__log_output_weights)

    def parameters(self) -> np.ndarray:
        """
        Free parameters in the order (log_weights, biases, log_output_weights).
        """
        return np.concatenate([self.__log_weights, self.__biases, self.__log_output_weights])

    def with_parameters(self, parameters: np.ndarray) -> 'PsiNet':
        return PsiNet.from_parameters(parameters)

    def evaluate(self, y: Union[float, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
        """
        Evaluate the network and its derivative.

        :param y:               - Scalar or array of separated values.
        :return:                - Tuple of psi(y) in (0, 1) and psi'(y) > 0, with the shape of `y`.
        """
        y = np.asarray(y, dtype=np.float64)
        weights = self.weights
        output_weights = self.output_weights

        activations = expit(np.multiply.outer(y, weights) + self.__biases)
        total = output_weights.sum()

        z = (activations * output_weights).sum(axis=-1) / total
        dz = (activations * (1.0 - activations) * (output_weights * weights)).sum(axis=-1) / total

        return z, dz

    @staticmethod
    def from_parameters(parameters: np.ndarray) -> 'PsiNet':
        parameters = np.asarray(parameters, dtype=np.float64).reshape(-1)

        if parameters.size == 0 or parameters.size % 3 != 0:
            raise ValueError(f'Cannot split {parameters.size} values into psi network parameters!')

        return PsiNet(*np.split(parameters, 3))

    @staticmethod
    def initial(seed: Optional[Union[int, np.random.Generator]] = None, hidden: int = 20) -> 'PsiNet':
        """
        Create a psi network whose sigmoids are spread over the unit interval, approximating the
        distribution function of a uniform variable.

        :param seed:            - Seed or random generator for the initial parameters.
        :param hidden:          - Number of hidden units.
        :return:                - The initial psi network.
        """
        if hidden < 1:
            raise ValueError('Psi network needs at least one hidden unit!')

        rng = np.random.default_rng(seed)
        log_weights = np.log(_INITIAL_SLOPE) + rng.uniform(-0.25, 0.25, hidden)
        centres = rng.uniform(*_CENTRE_RANGE, hidden)
        log_output_weights = rng.uniform(-0.5, 0.5, hidden)

        return PsiNet(log_weights, -np.exp(log_weights) * centres, log_output_weights)


def psi_forward(psi: 'PsiNet', y: Union[float, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Evaluate a psi network and its derivative at `y`.

    :param psi:             - Psi network.
    :param y:               - Scalar or array of separated values.
    :return:                - Tuple of psi(y) and psi'(y).
    """
    return psi.evaluate(y)
