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
import os
from tabulate import tabulate

from logitcal.bench.experiments import run_trajectory_study
from logitcal.cli import common
from logitcal.diagnostics.csvio import emit_csv
from logitcal.diagnostics.curves import (DEFAULT_GRID_MAX, DEFAULT_GRID_MIN, DEFAULT_GRID_STEP,
                                         margin_grid, saturation_curve)


class DiagnosticCommands(object):

    def execute_command(self, args):
        getattr(self, args["command"].replace("-", "_"))(args)

    def diag_curve(self, args):
        curve = saturation_curve(margin_grid(args["min"], args["max"], args["step"]))
        path = args.get("output") or os.path.join(args["out_dir"], "saturation-curve.csv")
        emit_csv(curve, path)
        print("%d rows written to %s" % (len(curve), path))

    def diag_trajectory(self, args):
        plan = common.plan_from_args(args)
        zoo, _, test = common.prepare_zoo(plan, args["out_dir"])
        _, summaries = run_trajectory_study(plan, zoo, test, out_dir=args["out_dir"])
        table = []
        for label, s in summaries.items():
            if s is None:
                table.append([label, "-", "-", "-", "-"])
            else:
                table.append([label, "%.3f" % s["peak_margin"], "%.3f" % s["final_margin"],
                              "%.5f" % s["initial_slope"], "%.5f" % s["plateau_slope"]])
        print(tabulate(table, headers=["Loss", "Peak margin", "Final margin", "Initial slope", "Plateau slope"],
                       tablefmt="grid"))


parser = common.new_parser("""logitcal diag-curve|diag-trajectory

    Examples:
    - logitcal diag-curve --min -10 --max 30 --step 0.5
    - logitcal diag-trajectory --plan plan.yml
    """, ["diag-curve", "diag-trajectory"])
parser.add_argument(
    "--min", dest="min", type=float, default=DEFAULT_GRID_MIN,
    help="Smallest margin of the curve grid.")
parser.add_argument(
    "--max", dest="max", type=float, default=DEFAULT_GRID_MAX,
    help="Largest margin of the curve grid.")
parser.add_argument(
    "--step", dest="step", type=float, default=DEFAULT_GRID_STEP,
    help="Margin grid spacing.")
parser.add_argument(
    "--output", dest="output",
    help="CSV path for diag-curve (default: <out-dir>/saturation-curve.csv)")


def main(argv):
    args = vars(parser.parse_args(argv))
    common.setup_logging(args["verbose"])
    DiagnosticCommands().execute_command(args)
