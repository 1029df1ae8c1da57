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
from dataclasses import asdict, dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import ttest_ind

from misep._utils import exception_warn
from misep.imagery import ImageGray, PixelPairSet
from ._mutual_info import q3_q4
from ._snr import q1_snr, q2_snr

# Mutual information estimates down to this value are treated as estimator noise around zero.
NOISE_FLOOR_BITS = -0.1
METHOD_ORDER = ('baseline', 'linear', 'nonlinear')
COLUMNS = ('method', 'component', 'tag', 'run', 'q1_db', 'q2_db', 'q3_bits', 'q4_bits', 'significant')
# Measures where a larger value is better; for q4 a smaller value is better.
_HIGHER_IS_BETTER = {'q1_db': True, 'q2_db': True, 'q3_bits': True, 'q4_bits': False}


@dataclass(frozen=True)
class QualityReport:
    q1_db: Tuple[float, float]
    q2_db: Tuple[float, float]
    q3_bits: Tuple[float, float]
    q4_bits: Tuple[float, float]
    q3_raw: Tuple[float, float]
    q4_raw: Tuple[float, float]
    eval_seed: int
    sample_count: int
    k: int

    @property
    def mean_q2(self) -> float:
        return float(np.mean(self.q2_db))

    def measure(self, name: str) -> Tuple[float, float]:
        return getattr(self, name)


class SeriesComparison(NamedTuple):
    difference: float
    p_value: float
    significant: bool


@dataclass(frozen=True)
class ReportRow:
    method: str
    component: int
    tag: str
    run: Optional[int]
    q1_db: float
    q2_db: float
    q3_bits: float
    q4_bits: float
    significant: str = ''


class ReportTable:

    def __init__(self, rows: Sequence['ReportRow'], metadata: Optional[Dict[str, object]] = None) -> None:
        self.__rows = tuple(rows)
        self.__metadata = dict(metadata or {})

    def __len__(self) -> int:
        return len(self.__rows)

    def __iter__(self):
        return iter(self.__rows)

    @property
    def rows(self) -> Tuple['ReportRow', ...]:
        return self.__rows

    @property
    def metadata(self) -> Dict[str, object]:
        return dict(self.__metadata)

    def select(self, method: str, tag: str) -> List['ReportRow']:
        return [row for row in self.__rows if row.method == method and row.tag == tag]

    def to_csv(self, path: str) -> None:
        try:
            with open(path, 'w', newline='') as file:
                writer = csv.DictWriter(file, fieldnames=COLUMNS)
                writer.writeheader()

                for row in self.__rows:
                    writer.writerow({key: '' if value is None else value for key, value in asdict(row).items()})
        except OSError as error:
            raise OSError(f'Cannot write report {path}: {error.strerror}!') from error

    def to_json(self, path: str) -> None:
        document = {'metadata': self.__metadata, 'rows': [asdict(row) for row in self.__rows]}

        try:
            with open(path, 'w') as file:
                json.dump(document, file, indent=2)
        except OSError as error:
            raise OSError(f'Cannot write report {path}: {error.strerror}!') from error


def evaluate_quality(extracted: Tuple['ImageGray', 'ImageGray'], sources: Tuple['ImageGray', 'ImageGray'],
                     eval_samples: int = 5000, k: int = 3, exclude: Optional['PixelPairSet'] = None,
                     seed: int = 0) -> 'QualityReport':
    """
    Compute the four quality measures of a pair of extracted components.

    :param extracted:       - Extracted components (Y1, Y2), or the mixtures for the no-separation baseline.
    :param sources:         - True sources (S1, S2).
    :param eval_samples:    - Number of pixel locations for the mutual information measures.
    :param k:               - Neighbour order of the mutual information estimator.
    :param exclude:         - Training samples whose locations the mutual information measures must avoid.
    :param seed:            - Evaluation seed.
    :return:                - The quality report.
    """
    q1 = tuple(q1_snr(component, source) for component, source in zip(extracted, sources))
    q2 = tuple(q2_snr(component, source)[0] for component, source in zip(extracted, sources))
    q3_raw, q4_raw = q3_q4(extracted, sources, eval_samples, exclude, seed, k)

    return QualityReport(q1, q2, _clamp_bits(q3_raw, 'Q3'), _clamp_bits(q4_raw, 'Q4'), q3_raw, q4_raw, seed,
                         eval_samples, k)


def compare_series(linear_values: Sequence[float], nonlinear_values: Sequence[float],
                   level: float = 0.05) -> 'SeriesComparison':
    """
    Welch two-sample t-test between two series of run results.

    :param linear_values:       - Values of the first series.
    :param nonlinear_values:    - Values of the second series.
    :param level:               - Significance level.
    :return:                    - Difference of the means (second minus first), p-value and significance.
    """
    first = np.asarray(linear_values, dtype=np.float64)
    second = np.asarray(nonlinear_values, dtype=np.float64)

    if first.size == 0 or second.size == 0:
        raise ValueError('Cannot compare empty series!')

    difference = float(second.mean() - first.mean())

    if first.size < 2 or second.size < 2:
        return SeriesComparison(difference, float('nan'), False)

    p_value = float(ttest_ind(first, second, equal_var=False).pvalue)

    return SeriesComparison(difference, p_value, bool(np.isfinite(p_value) and p_value < level))


def build_report(baseline: Optional['QualityReport'], series: Dict[str, Sequence['QualityReport']],
                 metadata: Optional[Dict[str, object]] = None) -> 'ReportTable':
    """
    Aggregate per-run quality reports into a table.
    The table starts with the no-separation baseline, followed by each method's mean, best and worst rows; best and
    worst are the runs with the highest and lowest Q2 averaged over both components. When both a linear and a
    nonlinear series are present, each mean row lists the measures on which that method is significantly better.

    :param baseline:        - Report of the unseparated mixtures, or None.
    :param series:          - Per-run reports keyed by method name.
    :param metadata:        - Extra values stored with the table.
    :return:                - The report table.
    """
    if not series and baseline is None:
        raise ValueError('Cannot build a report without results!')

    if any(len(reports) == 0 for reports in series.values()):
        raise ValueError('Cannot build a report from an empty run list!')

    significance = _significance(series)
    rows = []

    if baseline is not None:
        rows.extend(_rows('baseline', 'value', None, [baseline]))

    for method in sorted(series, key=_method_rank):
        reports = list(series[method])
        q2 = [report.mean_q2 for report in reports]

        rows.extend(_rows(method, 'mean', None, reports, significance.get(method)))
        rows.extend(_rows(method, 'best', int(np.argmax(q2)), [reports[int(np.argmax(q2))]]))
        rows.extend(_rows(method, 'worst', int(np.argmin(q2)), [reports[int(np.argmin(q2))]]))

    return ReportTable(rows, metadata)


def _rows(method: str, tag: str, run: Optional[int], reports: Sequence['QualityReport'],
          significant: Optional[Tuple[List[str], List[str]]] = None) -> List['ReportRow']:
    rows = []

    for component in range(2):
        values = {name: float(np.mean([report.measure(name)[component] for report in reports]))
                  for name in _HIGHER_IS_BETTER}
        better = ','.join(significant[component]) if significant else ''
        rows.append(ReportRow(method, component + 1, tag, run, significant=better, **values))

    return rows


def _significance(series: Dict[str, Sequence['QualityReport']]) -> Dict[str, Tuple[List[str], List[str]]]:
    if 'linear' not in series or 'nonlinear' not in series:
        return {}

    result = {'linear': ([], []), 'nonlinear': ([], [])}

    for name, higher_is_better in _HIGHER_IS_BETTER.items():
        for component in range(2):
            comparison = compare_series([report.measure(name)[component] for report in series['linear']],
                                        [report.measure(name)[component] for report in series['nonlinear']])

            if comparison.significant and comparison.difference != 0:
                winner = 'nonlinear' if (comparison.difference > 0) == higher_is_better else 'linear'
                result[winner][component].append(name)

    return result


def _method_rank(method: str) -> Tuple[int, str]:
    return (METHOD_ORDER.index(method) if method in METHOD_ORDER else len(METHOD_ORDER), method)


def _clamp_bits(values: Tuple[float, float], name: str) -> Tuple[float, float]:
    for component, value in enumerate(values, start=1):
        if value < NOISE_FLOOR_BITS:
            exception_warn(f'{name} of component {component} is {value:.3f} bits, below the estimator noise floor')

    return tuple(max(value, 0.0) for value in values)
