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
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

from misep._utils import exception_warn, read_key_values
from misep.align import AlignParams
from misep.mixsim import MixParams
from misep.trainer import TrainConfig

REPORT_FORMATS = ('csv', 'json')
SIM_PRESETS = ('bars', 'images')


@dataclass(frozen=True)
class SimParams:
    preset: str = 'bars'
    n_bars: int = 25
    size: int = 500

    def __post_init__(self) -> None:
        if self.preset not in SIM_PRESETS:
            raise ValueError(f'Unknown simulation preset "{self.preset}", expected one of {", ".join(SIM_PRESETS)}!')

    @staticmethod
    def from_mapping(mapping: Dict[str, str]) -> 'SimParams':
        return SimParams(**_convert(mapping, {'preset': str, 'n_bars': int, 'size': int}, 'simulation'))


@dataclass(frozen=True)
class EvalParams:
    samples: int = 5000
    k: int = 3
    scatter_points: int = 5000

    def __post_init__(self) -> None:
        if self.samples < self.k + 2 or self.k < 1 or self.scatter_points < 1:
            raise ValueError('Evaluation needs k >= 1, more than k + 1 samples and at least one scatter point!')

    @staticmethod
    def from_mapping(mapping: Dict[str, str]) -> 'EvalParams':
        return EvalParams(**_convert(mapping, {'samples': int, 'k': int, 'scatter_points': int}, 'evaluation'))


@dataclass(frozen=True)
class PipelineConfig:
    """
    Settings of every pipeline stage. The master seed overrides the seeds of the training and mixture settings;
    a group seed that is set and disagrees with it is replaced with a warning.
    """

    seed: int = 0
    runs: int = 10
    workers: int = 1
    out: str = 'results'
    sources: Optional[Tuple[str, str]] = None
    mixtures: Optional[Tuple[str, str]] = None
    report_formats: Tuple[str, ...] = REPORT_FORMATS
    sim: SimParams = field(default_factory=SimParams)
    align: AlignParams = field(default_factory=AlignParams)
    train: TrainConfig = field(default_factory=TrainConfig)
    mix: MixParams = field(default_factory=MixParams)
    eval: EvalParams = field(default_factory=EvalParams)

    def __post_init__(self) -> None:
        if self.seed < 0 or self.runs < 1 or self.workers < 1:
            raise ValueError('Seed must be non-negative and runs and workers positive!')

        unknown = set(self.report_formats) - set(REPORT_FORMATS)

        if unknown:
            raise ValueError(f'Unknown report formats: {", ".join(sorted(unknown))}!')

        for group in ('train', 'mix'):
            seed = getattr(self, group).seed

            if seed not in (0, self.seed):
                exception_warn(f'Seed {seed} of the {group} settings is replaced by the master seed {self.seed}')

        if self.train.seed != self.seed:
            object.__setattr__(self, 'train', self.train.with_changes(seed=self.seed))

        if self.mix.seed != self.seed:
            object.__setattr__(self, 'mix', replace(self.mix, seed=self.seed))

    def with_overrides(self, seed: Optional[int] = None, runs: Optional[int] = None, mode: Optional[str] = None,
                       out: Optional[str] = None, workers: Optional[int] = None) -> 'PipelineConfig':
        """
        Apply command-line overrides on top of file values.
        """
        seed = self.seed if seed is None else seed
        train = self.train.with_changes(seed=seed) if mode is None else self.train.with_changes(mode=mode, seed=seed)

        return replace(self, seed=seed, runs=self.runs if runs is None else runs,
                       out=self.out if out is None else out, workers=self.workers if workers is None else workers,
                       train=train, mix=replace(self.mix, seed=seed))

    def validate_paths(self) -> None:
        """
        Check that every referenced input file exists.
        """
        for group in (self.sources, self.mixtures):
            for path in group or ():
                if not os.path.isfile(path):
                    raise FileNotFoundError(f'Input image file not found: {path}!')

    @staticmethod
    def from_mapping(mapping: Dict[str, str]) -> 'PipelineConfig':
        """
        Create a pipeline configuration from a flat mapping with dotted keys.
        Top-level keys are `seed`, `runs` and `workers`; grouped keys are `paths.*`, `report.*`, `sim.*`,
        `align.*`, `train.*`, `mix.*` and `eval.*`.

        :param mapping:         - Flat key-value mapping, as read from a configuration file.
        :return:                - The pipeline configuration.
        """
        groups = {name: dict() for name in ('', 'paths', 'report', 'sim', 'align', 'train', 'mix', 'eval')}

        for key, value in mapping.items():
            group, _, name = key.rpartition('.')

            if group not in groups:
                raise ValueError(f'Unknown configuration group "{group}" in key "{key}"!')

            groups[group][name] = value

        for group in ('train', 'mix'):
            if 'seed' in groups[group]:
                raise ValueError(f'Key "{group}.seed" is not allowed, the master "seed" sets every seed!')

        values = _convert(groups[''], {'seed': int, 'runs': int, 'workers': int}, 'pipeline')
        paths = _convert(groups['paths'], {'out': str, 'sources': _path_pair, 'mixtures': _path_pair}, 'path')
        report = _convert(groups['report'], {'formats': _word_list}, 'report')

        if 'formats' in report:
            values['report_formats'] = report['formats']

        values.update(paths)

        return PipelineConfig(sim=SimParams.from_mapping(groups['sim']), align=AlignParams.from_mapping(groups['align']),
                              train=TrainConfig.from_mapping(groups['train']), mix=MixParams.from_mapping(groups['mix']),
                              eval=EvalParams.from_mapping(groups['eval']), **values)


def load_config(path: Optional[str] = None) -> 'PipelineConfig':
    """
    Read a pipeline configuration file, or return the defaults when no path is given.

    :param path:            - Path to a flat key-value configuration file.
    :return:                - The pipeline configuration.
    """
    return PipelineConfig() if path is None else PipelineConfig.from_mapping(read_key_values(path))


def _convert(mapping: Dict[str, str], converters: Dict[str, object], area: str) -> Dict[str, object]:
    unknown = set(mapping) - set(converters)

    if unknown:
        raise ValueError(f'Unknown {area} settings: {", ".join(sorted(unknown))}!')

    return {key: converters[key](value) for key, value in mapping.items()}


def _path_pair(value: str) -> Tuple[str, str]:
    paths = tuple(path.strip() for path in value.split(','))

    if len(paths) != 2 or not all(paths):
        raise ValueError(f'Expected two comma-separated image paths, got "{value}"!')

    return paths


def _word_list(value: str) -> Tuple[str, ...]:
    return tuple(word.strip() for word in value.split(',') if word.strip())
