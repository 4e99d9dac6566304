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
Transfer reports: success counts per (surrogate set, victim, loss,
target rule, checkpoint) and repetition, written as JSON and CSV.
"""
import csv
import logging
import os
import numpy as np
import scipy
import simplejson as json
from collections import OrderedDict
from tabulate import tabulate

import logitcal
from logitcal import LogitcalError

LOG = logging.getLogger("logitcal.bench.report")

REPORT_SCHEMA_VERSION = 1
CSV_COLUMNS = ("surrogates", "victim", "loss", "targets", "checkpoint", "white_box",
               "success", "total", "rate")


def versions():
    return dict(logitcal=logitcal.__version__, numpy=np.__version__, scipy=scipy.__version__)


class TransferCell(object):
    """
    Counts of one report cell, kept per repetition.
    """

    def __init__(self, surrogates, victim, loss, targets, checkpoint, repetitions):
        self.surrogates = tuple(surrogates)
        self.victim = victim
        self.loss = loss
        self.targets = targets
        self.checkpoint = int(checkpoint)
        self.white_box = victim in self.surrogates
        self.successes = [0] * repetitions
        self.totals = [0] * repetitions

    @property
    def key(self):
        return (self.surrogates, self.victim, self.loss, self.targets, self.checkpoint)

    @property
    def success(self):
        return sum(self.successes)

    @property
    def total(self):
        return sum(self.totals)

    @property
    def rate(self):
        """
        success / total, which equals the mean over repetitions as every
        repetition attacks the same number of images.
        """
        return self.success / float(self.total) if self.total else 0.0

    def repetition_rates(self):
        return [s / float(t) if t else 0.0 for s, t in zip(self.successes, self.totals)]

    def to_dict(self):
        return OrderedDict(surrogates="+".join(self.surrogates), victim=self.victim, loss=self.loss,
                           targets=self.targets, checkpoint=self.checkpoint, white_box=self.white_box,
                           successes=list(self.successes), totals=list(self.totals),
                           repetition_rates=self.repetition_rates(),
                           success=self.success, total=self.total, rate=self.rate)


class TransferReport(object):
    """
    :param experiment: protocol name, e.g. "transfer" or "sweep-t"
    :param repetitions: number of repetitions the counts are split into
    :param metadata: dict, completed by the protocol (seed, config hash,
        repetition seeds, targets, ensemble weights)
    """

    def __init__(self, experiment, repetitions, metadata=None):
        self.experiment = experiment
        self.repetitions = int(repetitions)
        self.metadata = dict(metadata or dict())
        self.metadata.setdefault("versions", versions())
        self.cells = OrderedDict()

    def __len__(self):
        return len(self.cells)

    def __repr__(self):
        return "TransferReport(%s, cells=%d, repetitions=%d)" % (self.experiment, len(self), self.repetitions)

    def cell(self, surrogates, victim, loss, targets, checkpoint):
        key = (tuple(surrogates), victim, loss, targets, int(checkpoint))
        if key not in self.cells:
            self.cells[key] = TransferCell(surrogates, victim, loss, targets, checkpoint, self.repetitions)
        return self.cells[key]

    def add(self, surrogates, victim, loss, targets, checkpoint, repetition, success):
        """
        Count one attacked image.
        """
        c = self.cell(surrogates, victim, loss, targets, checkpoint)
        c.totals[repetition] += 1
        c.successes[repetition] += int(bool(success))
        return c

    def rate(self, surrogates, victim, loss, checkpoint, targets=None):
        for c in self.cells.values():
            if (c.surrogates == tuple(surrogates) and c.victim == victim and c.loss == loss
                    and c.checkpoint == int(checkpoint) and (targets is None or c.targets == targets)):
                return c.rate
        raise LogitcalError("no report cell for %s -> %s, %s at %d" % (
            "+".join(surrogates), victim, loss, checkpoint))

    def checkpoints(self):
        return sorted(set(c.checkpoint for c in self.cells.values()))

    def mean_rate(self, loss, checkpoint=None, targets=None, white_box=False):
        """
        Mean rate over matching cells, black-box cells only unless
        white_box is set. Defaults to the last checkpoint.
        """
        if checkpoint is None:
            checkpoint = self.checkpoints()[-1]
        rates = [c.rate for c in self.cells.values()
                 if c.loss == loss and c.checkpoint == checkpoint and c.white_box == white_box
                 and (targets is None or c.targets == targets)]
        return float(np.mean(rates)) if rates else float("nan")

    def summary(self, group_by=("loss",), checkpoint=None):
        """
        Rows of mean black-box rate per group at one checkpoint.
        """
        if not self.cells:
            return list()
        if checkpoint is None:
            checkpoint = self.checkpoints()[-1]
        groups = OrderedDict()
        for c in self.cells.values():
            if c.white_box or c.checkpoint != checkpoint:
                continue
            key = tuple(getattr(c, g) for g in group_by)
            groups.setdefault(key, list()).append(c.rate)
        return [list(k) + [float(np.mean(v))] for k, v in groups.items()]

    def to_dict(self):
        return OrderedDict(schema_version=REPORT_SCHEMA_VERSION, experiment=self.experiment,
                           repetitions=self.repetitions, metadata=self.metadata,
                           cells=[c.to_dict() for c in self.cells.values()])

    def write_json(self, path):
        _ensure_dir(path)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, sort_keys=True, indent=2, ignore_nan=True)
            f.write("\n")
        LOG.info("Wrote %r to %s", self, path)
        return path

    def write_csv(self, path):
        _ensure_dir(path)
        with open(path, "w", encoding="utf-8", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for c in self.cells.values():
                w.writerow(["+".join(c.surrogates), c.victim, c.loss, c.targets, c.checkpoint,
                            int(c.white_box), c.success, c.total, repr(c.rate)])
        return path

    def write(self, out_dir, name=None):
        """
        Write <name>.json and <name>.csv into out_dir.
        :return: (json path, csv path)
        """
        name = name or self.experiment
        return (self.write_json(os.path.join(out_dir, "%s.json" % name)),
                self.write_csv(os.path.join(out_dir, "%s.csv" % name)))

    def table(self):
        """
        Console rendering: one row per (surrogates, victim, loss, targets),
        one rate column per checkpoint.
        """
        checkpoints = self.checkpoints()
        rows = OrderedDict()
        for c in self.cells.values():
            key = ("+".join(c.surrogates), c.victim + (" (white-box)" if c.white_box else ""), c.loss, c.targets)
            rows.setdefault(key, dict())[c.checkpoint] = "%.1f" % (100.0 * c.rate)
        table = [list(k) + [v.get(cp, "-") for cp in checkpoints] for k, v in rows.items()]
        headers = ["Surrogates", "Victim", "Loss", "Targets"] + ["@%d (%%)" % cp for cp in checkpoints]
        return tabulate(table, headers=headers, tablefmt="grid")


def _ensure_dir(path):
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
