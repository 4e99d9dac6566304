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
Directional reproduction runs on the desk-scale zoo. They train four
models and attack hundreds of images, so they only run with
LOGITCAL_LONG_TESTS=1.
"""
import shutil
import tempfile
import unittest
import numpy as np

from logitcal.test.base import LONG_TESTS
from logitcal.bench import experiments
from logitcal.bench.plan import ExperimentPlan
from logitcal.losses import parse_loss


@unittest.skipUnless(LONG_TESTS, "set LOGITCAL_LONG_TESTS=1 to run the desk-scale reproduction")
class testDeskReproduction(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.out_dir = tempfile.mkdtemp(prefix="logitcal-long-")
        cls.base = ExperimentPlan(workers=4)
        train, cls.test = experiments.load_dataset(cls.base)
        cls.zoo = experiments.load_or_train_zoo(cls.base, cls.out_dir, train)

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.out_dir, ignore_errors=True)

    def _plan(self, **kwargs):
        d = dict(architectures=self.base.architectures, workers=4)
        d.update(kwargs)
        return ExperimentPlan(**d)

    def testWhiteBox(self):
        plan = self._plan(surrogates=["cnn-a"], victims=["cnn-a"], losses=[parse_loss("ce")],
                          images=100, repetitions=1)
        report = experiments.run_single_model_transfer(plan, self.zoo, self.test)
        self.assertGreaterEqual(report.rate(["cnn-a"], "cnn-a", "ce", 300), 0.95)

    def testTrajectoryShape(self):
        plan = self._plan(surrogates=["cnn-a"], images=50,
                          losses=[parse_loss("ce"), parse_loss("ce-margin"), parse_loss("ce-temperature:5")])
        aggregates, summaries = experiments.run_trajectory_study(plan, self.zoo, self.test)
        ce = summaries["ce"]
        t5 = summaries["ce-temperature:5"]
        self.assertEqual(len(aggregates["ce"]), 300)
        self.assertLess(ce["plateau_slope"], 0.1 * ce["initial_slope"])
        self.assertGreaterEqual(t5["final_margin"], 1.5 * ce["final_margin"])
        self.assertGreaterEqual(summaries["ce-margin"]["final_margin"], ce["final_margin"])
        self.assertLessEqual(ce["plateau_slope"], min(s["plateau_slope"] for s in summaries.values()))

    def testTransferOrdering(self):
        plan = self._plan(surrogates=["cnn-a"], images=100, repetitions=5)
        report = experiments.run_temperature_sweep(plan, self.zoo, self.test, temperatures=[1, 5, 100])
        ce = report.mean_rate("ce", 300)
        self.assertGreaterEqual(report.mean_rate("ce-temperature:5", 300), ce)
        self.assertEqual(report.mean_rate("ce-temperature:1", 300), ce)
        self.assertLessEqual(abs(report.mean_rate("ce-temperature:100", 300) - report.mean_rate("logit", 300)), 0.05)
        self.assertGreaterEqual(report.mean_rate("ce", 300, white_box=True), ce)
        margin = experiments.run_single_model_transfer(
            self._plan(surrogates=["cnn-a"], images=100, repetitions=5,
                       losses=[parse_loss("ce"), parse_loss("ce-margin")]), self.zoo, self.test)
        self.assertGreaterEqual(margin.mean_rate("ce-margin", 300), margin.mean_rate("ce", 300))

    def testEnsemble(self):
        plan = self._plan(images=50, repetitions=1, losses=[parse_loss("ce-temperature:5")])
        report = experiments.run_ensemble_holdout(plan, self.zoo, self.test)
        gains = list()
        for held_out in plan.architectures:
            others = [a for a in plan.architectures if a != held_out]
            ensemble = report.rate(others, held_out, "ce-temperature:5", 300)
            best = max(report.rate([o], held_out, "ce-temperature:5", 300) for o in others)
            gains.append(ensemble - best)
        self.assertGreaterEqual(float(np.mean(gains)), 0.0)

    def testVariedTarget(self):
        n = self.test.class_count
        plan = self._plan(surrogates=["cnn-a"], images=100, repetitions=1, ranks=[2, n],
                          losses=[parse_loss("ce"), parse_loss("ce-temperature:5")])
        report = experiments.run_varied_target(plan, self.zoo, self.test)
        last = "rank-%d" % n
        ce_drop = report.mean_rate("ce", 300, "rank-2") - report.mean_rate("ce", 300, last)
        t5_drop = report.mean_rate("ce-temperature:5", 300, "rank-2") - report.mean_rate("ce-temperature:5", 300, last)
        self.assertGreaterEqual(ce_drop, 0.0)
        self.assertLessEqual(t5_drop, ce_drop)


if __name__ == '__main__':
    unittest.main()
