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

from ._objective import ObjectiveValue, DET_FLOOR, objective, gradient
from ._optimizer import Rprop
from ._trainer import TrainConfig, initial_model, training_samples, train, train_on_samples, separate, \
    psi_uniformity, export_trace, run_series, run_series_async

__all__ = ['ObjectiveValue', 'DET_FLOOR', 'objective', 'gradient', 'Rprop', 'TrainConfig', 'initial_model',
           'training_samples', 'train', 'train_on_samples', 'separate', 'psi_uniformity', 'export_trace',
           'run_series', 'run_series_async']
