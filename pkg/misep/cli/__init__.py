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

from ._config import PipelineConfig, SimParams, EvalParams, load_config
from ._pipeline import Manifest, cmd_simulate, cmd_align, cmd_separate, cmd_evaluate, cmd_pipeline
from ._cli import build_parser, main

__all__ = ['PipelineConfig', 'SimParams', 'EvalParams', 'load_config', 'Manifest', 'cmd_simulate', 'cmd_align',
           'cmd_separate', 'cmd_evaluate', 'cmd_pipeline', 'build_parser', 'main']
