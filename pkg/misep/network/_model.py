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

import json
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from ._psi import PsiNet
from ._separator import FLinear, FNonlinear, RawSeparator, Separator

MODEL_VERSION = 1


class SeparatorModel:

    def __init__(self, separator: 'Separator', psi: Tuple['PsiNet', 'PsiNet'], seed: Optional[int] = None,
                 run: int = 0, epochs: int = 0, objective_trace: Sequence[float] = ()) -> None:
        if len(psi) != 2:
            raise ValueError('Separator model needs exactly two psi networks!')

        trace = np.array(objective_trace, dtype=np.float64).reshape(-1)

        if trace.size != epochs:
            raise ValueError(f'Objective trace has {trace.size} entries for {epochs} epochs!')

        trace.setflags(write=False)

        self.__separator = separator
        self.__psi = (psi[0], psi[1])
        self.__seed = seed
        self.__run = run
        self.__epochs = epochs
        self.__objective_trace = trace

    def __str__(self) -> str:
        return f'SeparatorModel({self.__separator}, seed={self.__seed}, run={self.__run}, epochs={self.__epochs})'

    @property
    def separator(self) -> 'Separator':
        return self.__separator

    @property
    def psi(self) -> Tuple['PsiNet', 'PsiNet']:
        return self.__psi

    @property
    def kind(self) -> str:
        return self.__separator.kind

    @property
    def seed(self) -> Optional[int]:
        return self.__seed

    @property
    def run(self) -> int:
        return self.__run

    @property
    def epochs(self) -> int:
        return self.__epochs

    @property
    def objective_trace(self) -> np.ndarray:
        return self.__objective_trace

    def transform(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Full forward pass of the network.

        :param x:               - Array of shape (N, 2) with mixture pairs.
        :return:                - Tuple of separated outputs y and their estimated distribution values z,
                                  both of shape (N, 2).
        """
        y, _ = self.__separator.forward(x)
        z = np.column_stack([psi.evaluate(y[:, index])[0] for index, psi in enumerate(self.__psi)])

        return y, z

    def parameters(self) -> np.ndarray:
        """
        All trainable parameters: the separator's followed by those of both psi networks.
        """
        return np.concatenate([self.__separator.parameters(), self.__psi[0].parameters(),
                               self.__psi[1].parameters()])

    def parameter_sizes(self) -> Tuple[int, int, int]:
        return (self.__separator.parameters().size, self.__psi[0].parameters().size,
                self.__psi[1].parameters().size)

    def with_parameters(self, parameters: np.ndarray) -> 'SeparatorModel':
        """
        Create a model with the same structure and metadata and new trainable parameters.
        """
        separator_size, first_size, second_size = self.parameter_sizes()

        if np.size(parameters) != separator_size + first_size + second_size:
            raise ValueError(f'Model takes {separator_size + first_size + second_size} parameters, '
                             f'got {np.size(parameters)}!')

        separator, first, second = np.split(np.asarray(parameters, dtype=np.float64),
                                            [separator_size, separator_size + first_size])

        return SeparatorModel(self.__separator.with_parameters(separator),
                              (self.__psi[0].with_parameters(first), self.__psi[1].with_parameters(second)),
                              self.__seed, self.__run, self.__epochs, self.__objective_trace)

    def with_training(self, epochs: int, objective_trace: Sequence[float]) -> 'SeparatorModel':
        return SeparatorModel(self.__separator, self.__psi, self.__seed, self.__run, epochs, objective_trace)


def serialize_model(model: 'SeparatorModel') -> Dict[str, Any]:
    """
    Convert a model into a JSON-compatible document.
    Floats are stored by value, so a document written with `json` restores every parameter bit for bit.

    :param model:           - Model to serialize.
    :return:                - Document with the fields version, kind, seed, run, F, psi, epochs and objective_trace.
    """
    separator = model.separator

    if isinstance(separator, FLinear):
        parameters = {'a': separator.a, 'b': separator.b}
    elif isinstance(separator, FNonlinear):
        parameters = {'c': separator.c, 'd': separator.d, 'p': separator.p.tolist(), 'q': separator.q.tolist(),
                      'beta': separator.beta.tolist(), 'u': separator.u.tolist()}
    else:
        parameters = {'matrix': separator.matrix.tolist(), 'weights': separator.weights.tolist(),
                      'biases': separator.biases.tolist(), 'output_weights': separator.output_weights.tolist()}

    psi = [{'log_weights': net.log_weights.tolist(), 'biases': net.biases.tolist(),
            'log_output_weights': net.log_output_weights.tolist()} for net in model.psi]

    return {'version': MODEL_VERSION, 'kind': model.kind, 'seed': model.seed, 'run': model.run, 'F': parameters,
            'psi': psi, 'epochs': model.epochs, 'objective_trace': model.objective_trace.tolist()}


def deserialize_model(document: Dict[str, Any]) -> 'SeparatorModel':
    """
    Restore a model from its document.

    :param document:        - Document produced by `serialize_model`.
    :return:                - The model.
    """
    if not isinstance(document, dict):
        raise ValueError('Model document must be a JSON object!')

    version = document.get('version')

    if version != MODEL_VERSION:
        raise ValueError(f'Unsupported model document version {version}, expected {MODEL_VERSION}!')

    try:
        kind = document['kind']
        parameters = document['F']

        if kind == 'linear':
            separator = FLinear(parameters['a'], parameters['b'])
        elif kind == 'nonlinear':
            separator = FNonlinear(parameters['c'], parameters['d'], parameters['p'], parameters['q'],
                                   parameters['beta'], parameters['u'])
        elif kind == 'raw':
            separator = RawSeparator(parameters['matrix'], parameters['weights'], parameters['biases'],
                                     parameters['output_weights'])
        else:
            raise ValueError(f'unknown separator kind "{kind}"')

        if len(document['psi']) != 2:
            raise ValueError('expected two psi networks')

        psi = tuple(PsiNet(net['log_weights'], net['biases'], net['log_output_weights']) for net in document['psi'])
        seed = document['seed']

        return SeparatorModel(separator, psi, None if seed is None else int(seed), int(document['run']),
                              int(document['epochs']), document['objective_trace'])
    except (KeyError, TypeError, ValueError) as error:
        raise ValueError(f'Malformed model document: {error}!') from error


def save_model(model: 'SeparatorModel', path: str) -> None:
    try:
        with open(path, 'w') as file:
            json.dump(serialize_model(model), file, indent=2)
    except OSError as error:
        raise OSError(f'Cannot write model file {path}: {error.strerror}!') from error


def load_model(path: str) -> 'SeparatorModel':
    """
    Read a model from a JSON file.

    :param path:            - Path to the model file.
    :return:                - The model.
    """
    try:
        with open(path, 'r') as file:
            text = file.read()
    except FileNotFoundError as error:
        raise FileNotFoundError(f'Model file not found: {path}!') from error

    try:
        document = json.loads(text)
    except json.JSONDecodeError as error:
        raise ValueError(f'Malformed model document {path}: {error.msg}!') from error

    return deserialize_model(document)
