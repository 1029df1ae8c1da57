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

from ._psi import PsiNet, psi_forward
from ._separator import FLinear, FNonlinear, RawSeparator, KINDS, f_forward, init_identity, symmetrize
from ._model import SeparatorModel, MODEL_VERSION, serialize_model, deserialize_model, save_model, load_model

__all__ = ['PsiNet', 'psi_forward', 'FLinear', 'FNonlinear', 'RawSeparator', 'KINDS', 'f_forward', 'init_identity',
           'symmetrize', 'SeparatorModel', 'MODEL_VERSION', 'serialize_model', 'deserialize_model', 'save_model',
           'load_model']
