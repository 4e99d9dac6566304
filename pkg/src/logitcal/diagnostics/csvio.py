# Copyright (c) 2026 logitcal contributors
# ALL RIGHTS RESERVED.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
CSV emission for trajectory and curve tables. Floats are written with
their shortest round-trip representation.
"""
import csv
import logging
import os
from collections import OrderedDict

LOG = logging.getLogger("logitcal.diagnostics.csvio")


def _cell(v):
    return str(v) if isinstance(v, int) else repr(float(v))


def emit_csv(table, path):
    """
    Write any table exposing `columns` and `rows()` as UTF-8 CSV with a
    header row.
    """
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    n = 0
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows():
            w.writerow([_cell(v) for v in row])
            n += 1
    LOG.info("wrote %d rows to %s", n, path)
    return path


def read_csv(path):
    """
    :return: OrderedDict column -> list of values; `iter` as int, others float
    """
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        cols = OrderedDict((h, list()) for h in header)
        for row in reader:
            for h, v in zip(header, row):
                cols[h].append(int(v) if h == "iter" else float(v))
    return cols
