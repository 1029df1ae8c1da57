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

from ._snr import MonotoneMap, SNR_CAP_DB, q1_snr, fit_monotone_map, q2_snr
from ._mutual_info import JITTER, kraskov_mi, q3_q4
from ._report import QualityReport, SeriesComparison, ReportRow, ReportTable, NOISE_FLOOR_BITS, COLUMNS, \
    evaluate_quality, compare_series, build_report

__all__ = ['MonotoneMap', 'SNR_CAP_DB', 'q1_snr', 'fit_monotone_map', 'q2_snr', 'JITTER', 'kraskov_mi', 'q3_q4',
           'QualityReport', 'SeriesComparison', 'ReportRow', 'ReportTable', 'NOISE_FLOOR_BITS', 'COLUMNS',
           'evaluate_quality', 'compare_series', 'build_report']
