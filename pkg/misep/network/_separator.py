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

KINDS = ('linear', 'nonlinear')


class FLinear:
    """
    Symmetric linear separator [[a, b], [b, a]].
    """

    kind = 'linear'

    def __init__(self, a: float, b: float) -> None:
        if not np.isfinite(a) or not np.isfinite(b):
            raise ValueError('Separator parameters must be finite!')

        self.__a = float(a)
        self.__b = float(b)

    def __str__(self) -> str:
        return f'FLinear(a={self.__a}, b={self.__b})'

    @property
    def a(self) -> float:
        return self.__a

    @property
    def b(self) -> float:
        return self.__b

    @property
    def hidden(self) -> int:
        return 0

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.__a, self.__b], [self.__b, self.__a]])

    @property
    def output_weight_indices(self) -> np.ndarray:
        return np.arange(0)

    def forward(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        x = _as_points(x)
        y = np.empty_like(x)
        y[:, 0] = self.__a * x[:, 0] + self.__b * x[:, 1]
        y[:, 1] = self.__a * x[:, 1] + self.__b * x[:, 0]

        return y, np.broadcast_to(self.matrix, (x.shape[0], 2, 2)).copy()

    def parameters(self) -> np.ndarray:
        return np.array([self.__a, self.__b])

    def with_parameters(self, parameters: np.ndarray) -> 'FLinear':
        parameters = np.asarray(parameters, dtype=np.float64).reshape(-1)

        if parameters.size != 2:
            raise ValueError(f'Linear separator takes 2 parameters, got {parameters.size}!')

        return FLinear(parameters[0], parameters[1])

    def untie(self) -> 'RawSeparator':
        return RawSeparator(self.matrix)

    def tie_gradient(self, raw_gradient: 'RawSeparator') -> np.ndarray:
        matrix = raw_gradient.matrix
        return np.array([matrix[0, 0] + matrix[1, 1], matrix[0, 1] + matrix[1, 0]])


class FNonlinear:
    """
    Symmetric separator with a shortcut matrix [[c, d], [d, c]] and two mirrored groups of sigmoidal units.

    y1 = c x1 + d x2 + sum_h u_h sigmoid(p_h x1 + q_h x2 + beta_h)
    y2 = d x1 + c x2 + sum_h u_h sigmoid(q_h x1 + p_h x2 + beta_h)

    The second output is computed by the same branch as the first with the inputs exchanged, so
    exchanging the inputs exchanges the outputs bit for bit.
    """

    kind = 'nonlinear'

    def __init__(self, c: float, d: float, p: np.ndarray, q: np.ndarray, beta: np.ndarray, u: np.ndarray) -> None:
        hidden = [np.array(values, dtype=np.float64).reshape(-1) for values in (p, q, beta, u)]

        if any(values.shape != hidden[0].shape for values in hidden):
            raise ValueError('Hidden unit parameters of the separator must have equal lengths!')

        if not np.isfinite([c, d]).all() or not all(np.isfinite(values).all() for values in hidden):
            raise ValueError('Separator parameters must be finite!')

        for values in hidden:
            values.setflags(write=False)

        self.__c = float(c)
        self.__d = float(d)
        self.__p, self.__q, self.__beta, self.__u = hidden

    def __str__(self) -> str:
        return f'FNonlinear(c={self.__c}, d={self.__d}, hidden={self.hidden})'

    @property
    def c(self) -> float:
        return self.__c

    @property
    def d(self) -> float:
        return self.__d

    @property
    def p(self) -> np.ndarray:
        return self.__p

    @property
    def q(self) -> np.ndarray:
        return self.__q

    @property
    def beta(self) -> np.ndarray:
        return self.__beta

    @property
    def u(self) -> np.ndarray:
        return self.__u

    @property
    def hidden(self) -> int:
        return self.__u.size

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.__c, self.__d], [self.__d, self.__c]])

    @property
    def is_linear(self) -> bool:
        return not self.__u.any()

    @property
    def output_weight_indices(self) -> np.ndarray:
        start = 2 + 3 * self.hidden
        return np.arange(start, start + self.hidden)

    def forward(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        x = _as_points(x)
        y = np.empty_like(x)
        jacobian = np.empty((x.shape[0], 2, 2))

        y[:, 0], jacobian[:, 0, 0], jacobian[:, 0, 1] = self._branch(x[:, 0], x[:, 1])
        y[:, 1], jacobian[:, 1, 1], jacobian[:, 1, 0] = self._branch(x[:, 1], x[:, 0])

        return y, jacobian

    def parameters(self) -> np.ndarray:
        return np.concatenate([[self.__c, self.__d], self.__p, self.__q, self.__beta, self.__u])

    def with_parameters(self, parameters: np.ndarray) -> 'FNonlinear':
        parameters = np.asarray(parameters, dtype=np.float64).reshape(-1)

        if parameters.size != 2 + 4 * self.hidden:
            raise ValueError(f'Nonlinear separator with {self.hidden} hidden units takes {2 + 4 * self.hidden} '
                             f'parameters, got {parameters.size}!')

        return FNonlinear(parameters[0], parameters[1], *np.split(parameters[2:], 4))

    def untie(self) -> 'RawSeparator':
        weights = np.stack([np.column_stack([self.__p, self.__q]), np.column_stack([self.__q, self.__p])])
        return RawSeparator(self.matrix, weights, np.stack([self.__beta, self.__beta]),
                            np.stack([self.__u, self.__u]))

    def tie_gradient(self, raw_gradient: 'RawSeparator') -> np.ndarray:
        matrix = raw_gradient.matrix
        weights = raw_gradient.weights

        return np.concatenate([[matrix[0, 0] + matrix[1, 1], matrix[0, 1] + matrix[1, 0]],
                               weights[0, :, 0] + weights[1, :, 1],
                               weights[0, :, 1] + weights[1, :, 0],
                               raw_gradient.biases.sum(axis=0),
                               raw_gradient.output_weights.sum(axis=0)])

    def _branch(self, first: np.ndarray, second: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        activations = expit(np.multiply.outer(first, self.__p) + np.multiply.outer(second, self.__q) + self.__beta)
        slopes = activations * (1.0 - activations) * self.__u

        value = self.__c * first + self.__d * second + (activations * self.__u).sum(axis=-1)
        d_first = self.__c + (slopes * self.__p).sum(axis=-1)
        d_second = self.__d + (slopes * self.__q).sum(axis=-1)

        return value, d_first, d_second


class RawSeparator:
    """
    Untied separator: a free 2x2 shortcut matrix plus one group of sigmoidal units per output.
    Output k is y_k = sum_j matrix[k, j] x_j + sum_h output_weights[k, h] sigmoid(weights[k, h] . x + biases[k, h]).
    Gradients are computed in this form and folded back onto a tied separator by `tie_gradient`.
    """

    kind = 'raw'

    def __init__(self, matrix: np.ndarray, weights: Optional[np.ndarray] = None, biases: Optional[np.ndarray] = None,
                 output_weights: Optional[np.ndarray] = None) -> None:
        matrix = np.array(matrix, dtype=np.float64)
        weights = np.zeros((2, 0, 2)) if weights is None else np.array(weights, dtype=np.float64)
        hidden = weights.shape[1] if weights.ndim == 3 else -1
        biases = np.zeros((2, max(hidden, 0))) if biases is None else np.array(biases, dtype=np.float64)
        output_weights = np.zeros((2, max(hidden, 0))) if output_weights is None else \
            np.array(output_weights, dtype=np.float64)

        if matrix.shape != (2, 2) or weights.shape != (2, hidden, 2) or biases.shape != (2, hidden) \
                or output_weights.shape != (2, hidden):
            raise ValueError('Raw separator needs a 2x2 matrix and (2, H, 2), (2, H), (2, H) hidden parameters!')

        for array in (matrix, weights, biases, output_weights):
            if not np.isfinite(array).all():
                raise ValueError('Separator parameters must be finite!')
            array.setflags(write=False)

        self.__matrix = matrix
        self.__weights = weights
        self.__biases = biases
        self.__output_weights = output_weights

    @property
    def matrix(self) -> np.ndarray:
        return self.__matrix

    @property
    def weights(self) -> np.ndarray:
        return self.__weights

    @property
    def biases(self) -> np.ndarray:
        return self.__biases

    @property
    def output_weights(self) -> np.ndarray:
        return self.__output_weights

    @property
    def hidden(self) -> int:
        return self.__biases.shape[1]

    @property
    def output_weight_indices(self) -> np.ndarray:
        start = 4 + 6 * self.hidden
        return np.arange(start, start + 2 * self.hidden)

    def forward(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        x = _as_points(x)
        y = np.empty_like(x)
        jacobian = np.empty((x.shape[0], 2, 2))

        for k in range(2):
            activations = self.activations(x, k)
            slopes = activations * (1.0 - activations) * self.__output_weights[k]

            y[:, k] = self.__matrix[k, 0] * x[:, 0] + self.__matrix[k, 1] * x[:, 1] + \
                (activations * self.__output_weights[k]).sum(axis=-1)
            jacobian[:, k, 0] = self.__matrix[k, 0] + (slopes * self.__weights[k, :, 0]).sum(axis=-1)
            jacobian[:, k, 1] = self.__matrix[k, 1] + (slopes * self.__weights[k, :, 1]).sum(axis=-1)

        return y, jacobian

    def activations(self, x: np.ndarray, k: int) -> np.ndarray:
        """
        Sigmoid outputs of the hidden units of output `k`, shape (N, H).
        """
        return expit(np.multiply.outer(x[:, 0], self.__weights[k, :, 0]) +
                     np.multiply.outer(x[:, 1], self.__weights[k, :, 1]) + self.__biases[k])

    def parameters(self) -> np.ndarray:
        return np.concatenate([self.__matrix.reshape(-1), self.__weights.reshape(-1), self.__biases.reshape(-1),
                               self.__output_weights.reshape(-1)])

    def with_parameters(self, parameters: np.ndarray) -> 'RawSeparator':
        return RawSeparator.from_parameters(parameters)

    def untie(self) -> 'RawSeparator':
        return self

    def tie_gradient(self, raw_gradient: 'RawSeparator') -> np.ndarray:
        return raw_gradient.parameters()

    @staticmethod
    def from_parameters(parameters: np.ndarray) -> 'RawSeparator':
        parameters = np.asarray(parameters, dtype=np.float64).reshape(-1)
        hidden, remainder = divmod(parameters.size - 4, 8)

        if hidden < 0 or remainder:
            raise ValueError(f'Cannot split {parameters.size} values into raw separator parameters!')

        matrix, weights, biases, output_weights = np.split(parameters, [4, 4 + 4 * hidden, 4 + 6 * hidden])

        return RawSeparator(matrix.reshape(2, 2), weights.reshape(2, hidden, 2), biases.reshape(2, hidden),
                            output_weights.reshape(2, hidden))


Separator = Union[FLinear, FNonlinear, RawSeparator]


def f_forward(separator: 'Separator', x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Evaluate a separator and its Jacobian.

    :param separator:       - Linear, nonlinear or raw separator.
    :param x:               - A single point (x1, x2) or an array of shape (N, 2).
    :return:                - Outputs of the shape of `x` and Jacobians of shape (2, 2) or (N, 2, 2).
    """
    single = np.ndim(x) == 1
    y, jacobian = separator.forward(x)

    return (y[0], jacobian[0]) if single else (y, jacobian)


def init_identity(kind: str, seed: Optional[Union[int, np.random.Generator]] = None,
                  hidden: int = 20) -> Union['FLinear', 'FNonlinear']:
    """
    Create a separator that performs the identity mapping.
    The nonlinear separator gets random hidden input weights and biases in [-0.5, 0.5] / sqrt(2) and zero
    hidden-to-output weights.

    :param kind:            - `linear` or `nonlinear`.
    :param seed:            - Seed or random generator for the hidden units.
    :param hidden:          - Number of hidden units per group of the nonlinear separator.
    :return:                - The identity separator.
    """
    if kind == 'linear':
        return FLinear(1.0, 0.0)
    elif kind == 'nonlinear':
        if hidden < 1:
            raise ValueError('Nonlinear separator needs at least one hidden unit!')

        rng = np.random.default_rng(seed)
        scale = 0.5 / np.sqrt(2.0)
        p, q, beta = rng.uniform(-scale, scale, (3, hidden))

        return FNonlinear(1.0, 0.0, p, q, beta, np.zeros(hidden))
    else:
        raise ValueError(f'Unknown separator kind "{kind}", expected one of {", ".join(KINDS)}!')


def symmetrize(raw: Union['RawSeparator', np.ndarray]) -> Union['FLinear', 'FNonlinear']:
    """
    Project unconstrained separator parameters onto the symmetric parameterization by averaging every
    parameter with its mirror image.

    :param raw:             - Raw separator, or a bare 2x2 matrix.
    :return:                - A linear separator when there are no hidden units, a nonlinear one otherwise.
    """
    if not isinstance(raw, RawSeparator):
        raw = RawSeparator(raw)

    matrix = raw.matrix
    c = (matrix[0, 0] + matrix[1, 1]) / 2.0
    d = (matrix[0, 1] + matrix[1, 0]) / 2.0

    if raw.hidden == 0:
        return FLinear(c, d)

    weights = raw.weights
    p = (weights[0, :, 0] + weights[1, :, 1]) / 2.0
    q = (weights[0, :, 1] + weights[1, :, 0]) / 2.0
    beta = raw.biases.sum(axis=0) / 2.0
    u = raw.output_weights.sum(axis=0) / 2.0

    return FNonlinear(c, d, p, q, beta, u)


def _as_points(x: np.ndarray) -> np.ndarray:
    points = np.asarray(x, dtype=np.float64)

    if points.ndim == 1:
        points = points.reshape(1, -1)

    if points.ndim != 2 or points.shape[1] != 2:
        raise ValueError(f'Separator inputs must be pairs (x1, x2), got shape {np.shape(x)}!')

    return points
