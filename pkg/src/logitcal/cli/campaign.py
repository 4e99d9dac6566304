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
from tabulate import tabulate

from logitcal.bench import experiments
from logitcal.cli import common


class CampaignCommands(object):
    """
    Transfer campaigns; each writes <out-dir>/<command>.json and .csv.
    """

    def execute_command(self, args):
        plan = common.plan_from_args(args)
        zoo, _, test = common.prepare_zoo(plan, args["out_dir"])
        # call the local method with the same name as the command arg
        report = getattr(self, args["command"].replace("-", "_"))(plan, zoo, test)
        report.write(args["out_dir"])
        print(report.table())
        return report

    def transfer(self, plan, zoo, test):
        return experiments.run_single_model_transfer(plan, zoo, test)

    def sweep_t(self, plan, zoo, test):
        return experiments.run_temperature_sweep(plan, zoo, test)

    def ensemble(self, plan, zoo, test):
        return experiments.run_ensemble_holdout(plan, zoo, test)

    def vary_target(self, plan, zoo, test):
        report = experiments.run_varied_target(plan, zoo, test)
        print(tabulate([[t, l, "%.1f" % (100.0 * r)] for t, l, r in report.summary(("targets", "loss"))],
                       headers=["Target", "Loss", "Black-box (%)"], tablefmt="grid"))
        return report

    def combos(self, plan, zoo, test):
        return experiments.run_combinations(plan, zoo, test)


parser = common.new_parser("""logitcal transfer|sweep-t|ensemble|vary-target|combos

    Examples:
    - logitcal transfer --plan plan.yml --seed 7
    - logitcal sweep-t --plan plan.yml -w 4
    - logitcal ensemble --plan plan.yml
    """, ["transfer", "sweep-t", "ensemble", "vary-target", "combos"])


def main(argv):
    args = vars(parser.parse_args(argv))
    common.setup_logging(args["verbose"])
    CampaignCommands().execute_command(args)
