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

import csv
import json
import os
from dataclasses import asdict
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from misep._utils import derive_seed, exception_warn
from misep.align import coarse_shift, local_align
from misep.imagery import ImageGray, display_normalize, flip_horizontal, load_grayscale, normalize_pair, \
    sample_pixel_pairs, save_grayscale
from misep.metrics import QualityReport, build_report, evaluate_quality
from misep.mixsim import generate_bars_pair, mix_showthrough
from misep.network import load_model, save_model
from misep.trainer import export_trace, run_series, separate, training_samples
from ._config import PipelineConfig

MANIFEST_VERSION = 1
MANIFEST = 'manifest.json'
MODES = ('linear', 'nonlinear')
SCATTER_COLUMNS = ('x1', 'x2')


class Manifest:
    """
    Record of the completed stages of an output directory, with the seeds and files of each stage.
    """

    def __init__(self, directory: str, document: Optional[Dict[str, Any]] = None) -> None:
        self.directory = directory
        self.document = document if document is not None else {'version': MANIFEST_VERSION, 'stages': {}}

    @property
    def path(self) -> str:
        return os.path.join(self.directory, MANIFEST)

    def record(self, stage: str, config: 'PipelineConfig', files: List[str], seeds: Dict[str, Any]) -> None:
        self.document['seed'] = config.seed
        self.document['config'] = _config_document(config)
        self.document['stages'][stage] = {'complete': True, 'files': files, 'seeds': seeds}

    def is_complete(self, stage: str, config: 'PipelineConfig') -> bool:
        """
        Whether a stage finished with the same configuration and all of its files still exist.
        """
        entry = self.document['stages'].get(stage)

        if entry is None or not entry.get('complete') or self.document.get('config') != _config_document(config):
            return False

        return all(os.path.isfile(os.path.join(self.directory, path)) for path in entry.get('files', []))

    def save(self) -> None:
        with open(self.path, 'w') as file:
            json.dump(self.document, file, indent=2)

    @staticmethod
    def load(directory: str) -> 'Manifest':
        path = os.path.join(directory, MANIFEST)

        if not os.path.isfile(path):
            return Manifest(directory)

        try:
            with open(path, 'r') as file:
                document = json.load(file)
        except json.JSONDecodeError as error:
            raise ValueError(f'Malformed manifest {path}: {error.msg}!') from error

        if document.get('version') != MANIFEST_VERSION or not isinstance(document.get('stages'), dict):
            raise ValueError(f'Unsupported manifest {path}!')

        return Manifest(directory, document)


def cmd_simulate(config: 'PipelineConfig') -> List[str]:
    """
    Create a source pair, mix it with the show-through model and write sources, mixtures and the manifest.

    :param config:          - Pipeline configuration.
    :return:                - Paths of the written files, relative to the output directory.
    """
    sources_seed = derive_seed(config.seed, 'sources')

    if config.sim.preset == 'bars':
        first, second = generate_bars_pair(config.sim.n_bars, config.sim.size, sources_seed)
    elif config.sources is not None:
        first, second = (load_grayscale(path) for path in config.sources)
    else:
        raise ValueError('Simulation preset "images" needs the source paths (paths.sources)!')

    mixed = mix_showthrough(first, second, config.mix)

    files = _save_pair(config, (first, second), 'sources', 'source', 16) + \
        _save_pair(config, mixed, 'mixtures', 'mixture', 8)
    seeds = {'sources': sources_seed, 'noise': [derive_seed(config.mix.seed, 'noise', index) for index in (0, 1)]}
    _record(config, 'simulate', files, seeds)

    return files


def cmd_align(config: 'PipelineConfig') -> List[str]:
    """
    Register the second acquired image onto the first: optional horizontal flip, integer shift, local block
    alignment, then joint normalization to [0, 1].

    :param config:          - Pipeline configuration.
    :return:                - Paths of the written files, relative to the output directory.
    """
    first, second = _load_pair(_mixture_paths(config))

    if first.shape != second.shape:
        raise ValueError(f'Cannot align images with different dimensions ({first.width}x{first.height} and '
                         f'{second.width}x{second.height})!')

    params = config.align

    if params.flip:
        second = flip_horizontal(second)

    if params.coarse_dx or params.coarse_dy:
        second = coarse_shift(second, params.coarse_dx, params.coarse_dy)

    aligned, field = local_align(first, second, params.block_size, params.upsample, params.search_radius)
    pair = normalize_pair(first, aligned)

    files = _save_pair(config, pair, 'aligned', 'aligned', 16)
    field_path = os.path.join('aligned', 'displacement.json')
    _write_json(config, field_path, field.to_document())
    files.append(field_path)

    print(f'[align] {field.blocks_x}x{field.blocks_y} blocks, largest displacement '
          f'{field.max_displacement / params.upsample:.2f} px, {int(field.flags.sum())} blank')
    _record(config, 'align', files, {})

    return files


def cmd_separate(config: 'PipelineConfig', mode: Optional[str] = None, runs: Optional[int] = None) -> List[str]:
    """
    Train a series of separators and write, per run, the model, the objective trace, the raw separated
    components as `.npy` arrays and display copies saturating 1% of the darkest and brightest pixels.
    When the true sources are available, runs are ranked by Q2 and the best and worst are named in `series.json`.

    :param config:          - Pipeline configuration.
    :param mode:            - `linear` or `nonlinear`, the configured mode if None.
    :param runs:            - Number of runs, the configured count if None.
    :return:                - Paths of the written files, relative to the output directory.
    """
    train = config.train if mode is None else config.train.with_changes(mode=mode)
    runs = config.runs if runs is None else runs
    first, second = _separation_inputs(config)
    sources = _optional_sources(config)

    results = run_series(first, second, train, runs, sources, config.eval.samples, config.eval.k, config.workers)

    directory = os.path.join('separated', train.mode)
    files = []

    for run, (model, _) in enumerate(results):
        run_directory = os.path.join(directory, f'run_{run:02d}')
        os.makedirs(os.path.join(config.out, run_directory), exist_ok=True)

        model_path = os.path.join(run_directory, 'model.json')
        trace_path = os.path.join(run_directory, 'trace.csv')
        save_model(model, os.path.join(config.out, model_path))
        export_trace(model, os.path.join(config.out, trace_path))
        files.extend([model_path, trace_path])

        for index, output in enumerate(separate(first, second, model), start=1):
            files.extend(_save_output(config, run_directory, index, output))

        if model.epochs:
            print(f'[separate] {train.mode} run {run}: objective {model.objective_trace[-1]:.6f}')

    series = {'mode': train.mode, 'runs': runs, 'train_set_size': train.train_set_size, 'seed': train.seed}

    if sources is not None:
        q2 = [report.mean_q2 for _, report in results]
        series.update({'q2_db': q2, 'best': int(np.argmax(q2)), 'worst': int(np.argmin(q2))})

    series_path = os.path.join(directory, 'series.json')
    _write_json(config, series_path, series)
    files.append(series_path)
    _record(config, f'separate_{train.mode}', files,
            {'sampling': [derive_seed(train.seed, 'sampling', run) for run in range(runs)],
             'init': [derive_seed(train.seed, 'init', run) for run in range(runs)]})

    return files


def cmd_evaluate(config: 'PipelineConfig') -> List[str]:
    """
    Compute the quality report of the unseparated mixtures and of every separated series, and dump scatter samples.

    :param config:          - Pipeline configuration.
    :return:                - Paths of the written files, relative to the output directory.
    """
    sources = _optional_sources(config)

    if sources is None:
        raise FileNotFoundError('Evaluation needs the true sources (paths.sources or a simulated output directory)!')

    first, second = _separation_inputs(config)
    params = config.eval
    baseline_seed = derive_seed(config.seed, 'baseline')
    baseline = evaluate_quality((first, second), sources, params.samples, params.k, None, baseline_seed)

    series: Dict[str, List['QualityReport']] = dict()
    best_outputs: Dict[str, Tuple['ImageGray', 'ImageGray']] = dict()

    for mode in MODES:
        evaluated = _evaluate_series(config, mode, (first, second), sources)

        if evaluated:
            series[mode] = [report for report, _ in evaluated]
            best = int(np.argmax([report.mean_q2 for report in series[mode]]))
            best_outputs[f'{mode}_best'] = evaluated[best][1]

    table = build_report(baseline, series, {'seed': config.seed, 'eval_samples': params.samples, 'k': params.k,
                                            'baseline_seed': baseline_seed})
    files = []

    for extension in config.report_formats:
        path = f'report.{extension}'
        getattr(table, f'to_{extension}')(os.path.join(config.out, path))
        files.append(path)

    scatter_seed = derive_seed(config.seed, 'scatter')
    panels = {'sources': sources, 'mixtures': (first, second)}
    panels.update(best_outputs)
    files.extend(_dump_scatter(config, panels, scatter_seed))

    _record(config, 'evaluate', files, {'baseline': baseline_seed, 'scatter': scatter_seed})

    return files


def cmd_pipeline(config: 'PipelineConfig', resume: bool = False) -> List[str]:
    """
    Run simulate, align, linear and nonlinear separation and evaluation in order, failing fast with the stage name.
    Simulation is skipped when acquired mixtures are configured.

    :param config:          - Pipeline configuration.
    :param resume:          - Skip stages the manifest records as complete whose files still exist.
    :return:                - Paths of the files written by the stages that ran.
    """
    stages: List[Tuple[str, Callable[['PipelineConfig'], List[str]]]] = []

    if config.mixtures is None:
        stages.append(('simulate', cmd_simulate))

    stages.extend([('align', cmd_align),
                   ('separate_linear', lambda stage_config: cmd_separate(stage_config, 'linear')),
                   ('separate_nonlinear', lambda stage_config: cmd_separate(stage_config, 'nonlinear')),
                   ('evaluate', cmd_evaluate)])

    files = []

    for name, stage in stages:
        if resume and Manifest.load(config.out).is_complete(name, config):
            print(f'[pipeline] {name}: complete, skipped')
            continue

        print(f'[pipeline] {name}: started')

        try:
            files.extend(stage(config))
        except Exception as error:
            raise RuntimeError(f'Stage "{name}" failed: {error}') from error

        print(f'[pipeline] {name}: finished')

    return files


def _evaluate_series(config: 'PipelineConfig', mode: str, mixtures: Tuple['ImageGray', 'ImageGray'],
                     sources: Tuple['ImageGray', 'ImageGray']) -> List[Tuple['QualityReport', Tuple]]:
    directory = os.path.join(config.out, 'separated', mode)
    series_path = os.path.join(directory, 'series.json')

    if not os.path.isfile(series_path):
        return []

    with open(series_path, 'r') as file:
        series = json.load(file)

    train = config.train.with_changes(mode=mode, train_set_size=int(series['train_set_size']),
                                      seed=int(series['seed']))
    evaluated = []

    for run in range(int(series['runs'])):
        run_directory = os.path.join(directory, f'run_{run:02d}')
        model = load_model(os.path.join(run_directory, 'model.json'))
        outputs = tuple(ImageGray(np.load(os.path.join(run_directory, f'output_{index}.npy'))) for index in (1, 2))

        exclude = training_samples(mixtures[0], mixtures[1], train, model.run)
        report = evaluate_quality(outputs, sources, config.eval.samples, config.eval.k, exclude,
                                  derive_seed(train.seed, 'eval', model.run))
        evaluated.append((report, outputs))

    return evaluated


def _dump_scatter(config: 'PipelineConfig', panels: Dict[str, Tuple['ImageGray', 'ImageGray']],
                  seed: int) -> List[str]:
    reference = panels['mixtures']
    count = min(config.eval.scatter_points, reference[0].size)
    locations = sample_pixel_pairs(reference[0], reference[1], count, seed)
    flat = locations.flat_indices(reference[0].width)

    os.makedirs(os.path.join(config.out, 'scatter'), exist_ok=True)
    files = []

    for name, (first, second) in panels.items():
        path = os.path.join('scatter', f'{name}.csv')

        with open(os.path.join(config.out, path), 'w', newline='') as file:
            writer = csv.writer(file)
            writer.writerow(SCATTER_COLUMNS)
            writer.writerows(zip(first.data.reshape(-1)[flat].tolist(), second.data.reshape(-1)[flat].tolist()))

        files.append(path)

    return files


def _save_output(config: 'PipelineConfig', run_directory: str, index: int, output: 'ImageGray') -> List[str]:
    raw_path = os.path.join(run_directory, f'output_{index}.npy')
    display_path = os.path.join(run_directory, f'output_{index}_display.png')

    np.save(os.path.join(config.out, raw_path), output.data)

    if not output.is_normalized:
        exception_warn(f'Separated component {raw_path} leaves [0, 1]; only its display copy is rescaled')

    save_grayscale(display_normalize(output), os.path.join(config.out, display_path))

    return [raw_path, display_path]


def _save_pair(config: 'PipelineConfig', pair: Tuple['ImageGray', 'ImageGray'], directory: str, stem: str,
               bits: int) -> List[str]:
    os.makedirs(os.path.join(config.out, directory), exist_ok=True)
    files = []

    for index, image in enumerate(pair, start=1):
        path = os.path.join(directory, f'{stem}_{index}.png')
        save_grayscale(image, os.path.join(config.out, path), bits)
        files.append(path)

    return files


def _write_json(config: 'PipelineConfig', path: str, document: Dict[str, Any]) -> None:
    full_path = os.path.join(config.out, path)
    os.makedirs(os.path.dirname(full_path), exist_ok=True)

    with open(full_path, 'w') as file:
        json.dump(document, file, indent=2)


def _record(config: 'PipelineConfig', stage: str, files: List[str], seeds: Dict[str, Any]) -> None:
    os.makedirs(config.out, exist_ok=True)
    manifest = Manifest.load(config.out)
    manifest.record(stage, config, files, seeds)
    manifest.save()


def _load_pair(paths: Tuple[str, str]) -> Tuple['ImageGray', 'ImageGray']:
    return load_grayscale(paths[0]), load_grayscale(paths[1])


def _mixture_paths(config: 'PipelineConfig') -> Tuple[str, str]:
    if config.mixtures is not None:
        return config.mixtures

    return tuple(os.path.join(config.out, 'mixtures', f'mixture_{index}.png') for index in (1, 2))


def _separation_inputs(config: 'PipelineConfig') -> Tuple['ImageGray', 'ImageGray']:
    aligned = tuple(os.path.join(config.out, 'aligned', f'aligned_{index}.png') for index in (1, 2))

    if all(os.path.isfile(path) for path in aligned):
        return _load_pair(aligned)

    return _load_pair(_mixture_paths(config))


def _optional_sources(config: 'PipelineConfig') -> Optional[Tuple['ImageGray', 'ImageGray']]:
    if config.sources is not None:
        return _load_pair(config.sources)

    simulated = tuple(os.path.join(config.out, 'sources', f'source_{index}.png') for index in (1, 2))

    return _load_pair(simulated) if all(os.path.isfile(path) for path in simulated) else None


def _config_document(config: 'PipelineConfig') -> Dict[str, Any]:
    return json.loads(json.dumps(asdict(config)))
