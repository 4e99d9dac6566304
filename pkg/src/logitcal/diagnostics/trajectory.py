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
Per-iteration logit records of attack runs and their aggregation.
"""
import logging
import numpy as np

from logitcal.diagnostics import ScheduleMismatchError, TrajectoryTooShortError
from logitcal.losses import InvalidTargetError

LOG = logging.getLogger("logitcal.diagnostics.trajectory")

TRAJECTORY_COLUMNS = ("iter", "target_logit", "nt1_logit", "nt2_logit", "margin")
# margin statistic uses the top-K non-target logits, K = min(TOP_K, N - 1)
TOP_K = 20
MIN_SUMMARY_ITERATIONS = 50
INITIAL_WINDOW = 20


def top_k(class_count):
    return min(TOP_K, class_count - 1)


class TrajectoryRecord(object):
    """
    One row per attack iteration: target logit, the two largest
    non-target logits (re-ranked every iteration) and the margin
    z_t - mean(top-K non-target logits).
    """

    columns = TRAJECTORY_COLUMNS

    def __init__(self):
        self.rows = list()

    def __len__(self):
        return len(self.rows)

    def record_iteration(self, logits, target, iteration=None):
        """
        :param iteration: explicit index, defaults to the previous one + 1
        """
        z = np.asarray(logits, dtype=np.float64).ravel()
        n = z.shape[0]
        if not 0 <= int(target) < n:
            raise InvalidTargetError("target %r outside [0, %d)" % (target, n))
        if iteration is None:
            iteration = self.rows[-1][0] + 1 if self.rows else 1
        elif self.rows and iteration <= self.rows[-1][0]:
            raise ScheduleMismatchError("iteration %d recorded after %d" % (iteration, self.rows[-1][0]))
        non_target = np.sort(np.delete(z, int(target)))[::-1]
        top = non_target[:top_k(n)]
        nt2 = float(non_target[1]) if n > 2 else float("nan")
        self.rows.append((int(iteration), float(z[int(target)]), float(non_target[0]), nt2,
                          float(z[int(target)]) - float(np.mean(top))))
        return self

    def iterations(self):
        return [r[0] for r in self.rows]

    def column(self, name):
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=np.float64)


class AggregateTrajectory(object):
    """
    Column-wise means of aligned trajectory records.
    :param data: dict column name -> array, one entry per iteration
    :param sample_count: number of records folded in
    """

    columns = TRAJECTORY_COLUMNS

    def __init__(self, data, sample_count):
        self.data = dict((c, np.asarray(data[c], dtype=np.float64)) for c in self.columns)
        self.sample_count = int(sample_count)

    def __len__(self):
        return len(self.data["iter"])

    @classmethod
    def empty(cls):
        return cls(dict((c, []) for c in cls.columns), 0)

    def column(self, name):
        return self.data[name]

    def rows(self):
        for i in range(len(self)):
            yield tuple(int(self.data[c][i]) if c == "iter" else float(self.data[c][i]) for c in self.columns)


def aggregate(records):
    """
    Arithmetic mean per column per iteration over records sharing one
    iteration schedule.
    """
    if not records:
        raise ScheduleMismatchError("cannot aggregate an empty record list")
    schedule = records[0].iterations()
    for r in records[1:]:
        if r.iterations() != schedule:
            raise ScheduleMismatchError("records have different iteration schedules (%d vs %d rows)" % (
                len(schedule), len(r)))
    data = {"iter": np.array(schedule, dtype=np.float64)}
    for c in TRAJECTORY_COLUMNS[1:]:
        stack = np.stack([r.column(c) for r in records]) if schedule else np.zeros((len(records), 0))
        # mean shifted by the first record, identical records stay bit-exact
        anchor = stack[0]
        data[c] = anchor + np.mean(stack - anchor, axis=0)
    LOG.debug("aggregated %d records over %d iterations", len(records), len(schedule))
    return AggregateTrajectory(data, len(records))


def window_slope(agg, start, stop, column="margin"):
    """
    Least-squares slope of a column against the iteration index over rows
    [start, stop).
    """
    x = agg.column("iter")[start:stop]
    y = agg.column(column)[start:stop]
    if len(x) < 2:
        raise TrajectoryTooShortError("slope needs at least two iterations, got %d" % len(x))
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def saturation_summary(agg):
    """
    :return: dict with peak_margin, final_margin, plateau_slope (least
        squares over the final third) and initial_slope (first 20
        iterations)
    """
    n = len(agg)
    if n < MIN_SUMMARY_ITERATIONS:
        raise TrajectoryTooShortError("saturation summary needs at least %d iterations, got %d" % (
            MIN_SUMMARY_ITERATIONS, n))
    margin = agg.column("margin")
    return dict(peak_margin=float(np.max(margin)),
                final_margin=float(margin[-1]),
                plateau_slope=window_slope(agg, n - n // 3, n),
                initial_slope=window_slope(agg, 0, INITIAL_WINDOW))
