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

from typing import NamedTuple, Tuple, Union

import numpy as np
from scipy.special import expit

from misep.imagery import PixelPairSet
from misep.network import PsiNet, RawSeparator, SeparatorModel

DET_FLOOR = 1e-12


class ObjectiveValue(NamedTuple):
    value: float
    log_det: float
    log_psi: float
    singular: int


def objective(batch: Union['PixelPairSet', np.ndarray], model: 'SeparatorModel',
              det_floor: float = DET_FLOOR) -> 'ObjectiveValue':
    """
    Mean log-determinant of the Jacobian of the map from mixtures to the psi outputs:
    L = mean_n [log |det J_F(x_n)| + log psi_1'(y_1n) + log psi_2'(y_2n)].
    Samples with |det J_F| below `det_floor` use `det_floor` inside the log and are counted in `singular`.

    :param batch:           - Training samples.
    :param model:           - Model to evaluate.
    :param det_floor:       - Smallest Jacobian determinant magnitude taken at face value.
    :return:                - The objective with its two terms and the number of clamped samples.
    """
    return evaluate(batch, model, det_floor)[0]


def gradient(batch: Union['PixelPairSet', np.ndarray], model: 'SeparatorModel',
             det_floor: float = DET_FLOOR) -> np.ndarray:
    """
    Analytic gradient of the objective, laid out like `model.parameters()`.
    The separator gradient is computed on its untied form; tied parameters receive the sum of the
    contributions of all the raw parameters they stand for.

    :param batch:           - Training samples.
    :param model:           - Model to differentiate.
    :param det_floor:       - Smallest Jacobian determinant magnitude taken at face value.
    :return:                - Gradient vector.
    """
    return evaluate(batch, model, det_floor)[1]


def evaluate(batch: Union['PixelPairSet', np.ndarray], model: 'SeparatorModel',
             det_floor: float = DET_FLOOR) -> Tuple['ObjectiveValue', np.ndarray]:
    x = _samples_of(batch)

    if det_floor <= 0:
        raise ValueError('Determinant floor must be positive!')

    raw = model.separator.untie()
    y, jacobian = raw.forward(x)

    determinant = jacobian[:, 0, 0] * jacobian[:, 1, 1] - jacobian[:, 0, 1] * jacobian[:, 1, 0]
    magnitude = np.abs(determinant)
    singular = magnitude < det_floor
    log_det = np.log(np.where(singular, det_floor, magnitude))

    # d log|det J| / dJ = J^-T, zero where the floor was substituted
    safe = np.where(singular, 1.0, determinant)
    inverse_transpose = np.empty_like(jacobian)
    inverse_transpose[:, 0, 0] = jacobian[:, 1, 1]
    inverse_transpose[:, 0, 1] = -jacobian[:, 1, 0]
    inverse_transpose[:, 1, 0] = -jacobian[:, 0, 1]
    inverse_transpose[:, 1, 1] = jacobian[:, 0, 0]
    inverse_transpose /= safe[:, None, None]
    inverse_transpose[singular] = 0.0

    log_psi = np.zeros(x.shape[0])
    output_slopes = np.empty_like(y)
    psi_gradients = []

    for index, psi in enumerate(model.psi):
        log_slope, output_slopes[:, index], psi_gradient = _psi_terms(psi, y[:, index])
        log_psi += log_slope
        psi_gradients.append(psi_gradient)

    value = ObjectiveValue(float(np.mean(log_det + log_psi)), float(np.mean(log_det)), float(np.mean(log_psi)),
                           int(singular.sum()))

    if not np.isfinite(value.value):
        raise ArithmeticError(f'Objective is not finite ({value.value})!')

    raw_gradient = _separator_gradient(raw, x, inverse_transpose, output_slopes)

    return value, np.concatenate([model.separator.tie_gradient(raw_gradient)] + psi_gradients)


def _psi_terms(psi: 'PsiNet', y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Log-derivative of a psi network, its derivative with respect to the input and the mean gradient with
    respect to the network parameters.
    """
    weights = psi.weights
    output_weights = psi.output_weights

    activations = expit(np.multiply.outer(y, weights) + psi.biases)
    first = activations * (1.0 - activations)
    second = first * (1.0 - 2.0 * activations)

    scaled = output_weights * weights
    slope = first @ scaled
    log_slope = np.log(slope) - np.log(output_weights.sum())
    d_input = (second @ (scaled * weights)) / slope

    d_log_weights = scaled * (first + np.multiply.outer(y, weights) * second) / slope[:, None]
    d_biases = scaled * second / slope[:, None]
    d_log_output_weights = scaled * first / slope[:, None] - output_weights / output_weights.sum()

    parameters = np.concatenate([d_log_weights.mean(axis=0), d_biases.mean(axis=0),
                                 d_log_output_weights.mean(axis=0)])

    return log_slope, d_input, parameters


def _separator_gradient(raw: 'RawSeparator', x: np.ndarray, inverse_transpose: np.ndarray,
                        output_slopes: np.ndarray) -> 'RawSeparator':
    """
    Mean gradient of the objective with respect to the raw separator parameters, returned in raw form.

    :param raw:                 - Raw separator.
    :param x:                   - Inputs, shape (N, 2).
    :param inverse_transpose:   - Derivative of log |det J| with respect to J, shape (N, 2, 2).
    :param output_slopes:       - Derivative of log psi_k' with respect to y_k, shape (N, 2).
    """
    matrix = inverse_transpose + output_slopes[:, :, None] * x[:, None, :]

    hidden = raw.hidden
    weights = np.empty((2, hidden, 2))
    biases = np.empty((2, hidden))
    output_weights = np.empty((2, hidden))

    for k in range(2):
        activations = raw.activations(x, k)
        first = activations * (1.0 - activations)
        second = first * (1.0 - 2.0 * activations)

        unit_weights = raw.weights[k]
        projected = inverse_transpose[:, k, :] @ unit_weights.T
        slope = output_slopes[:, k:k + 1]
        scale = raw.output_weights[k]

        output_weights[k] = np.mean(first * projected + slope * activations, axis=0)
        biases[k] = scale * np.mean(second * projected + slope * first, axis=0)

        for m in range(2):
            weights[k, :, m] = scale * np.mean(second * x[:, m:m + 1] * projected +
                                               first * inverse_transpose[:, k, m:m + 1] +
                                               slope * first * x[:, m:m + 1], axis=0)

    return RawSeparator(matrix.mean(axis=0), weights, biases, output_weights)


def _samples_of(batch: Union['PixelPairSet', np.ndarray]) -> np.ndarray:
    samples = batch.samples if isinstance(batch, PixelPairSet) else np.asarray(batch, dtype=np.float64)

    if samples.ndim != 2 or samples.shape[1] != 2 or samples.shape[0] == 0:
        raise ValueError('Objective needs a non-empty batch of sample pairs!')

    return samples
