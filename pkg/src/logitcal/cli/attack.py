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

from logitcal.bench.experiments import run_attack_batch
from logitcal.cli import common


def attack(args):
    plan = common.plan_from_args(args)
    zoo, _, test = common.prepare_zoo(plan, args["out_dir"])
    manifest = run_attack_batch(plan, zoo, test, args["out_dir"], image_indices=args.get("image_index"))
    table = []
    for entry in manifest["losses"]:
        hits = entry["white_box_success"]
        table.append([entry["label"], len(hits), sum(hits), entry.get("images_file", "-"),
                      entry["trajectory_file"]])
    print(tabulate(table, headers=["Loss", "Images", "White-box hits", "Adversarial images", "Trajectory"],
                   tablefmt="grid"))


parser = common.new_parser("""logitcal attack

    Attacks test images with the surrogate ensemble and exports the
    adversarial images (IDX float32), targets and trajectories.

    Examples:
    - logitcal attack --plan plan.yml
    - logitcal attack --plan plan.yml -i 3 -i 17
    """, ["attack"])
parser.add_argument(
    "--image-index", "-i", dest="image_index", type=int, action="append",
    help="Test-split image to attack; repeatable (default: the plan's selection)")


def main(argv):
    args = vars(parser.parse_args(argv))
    common.setup_logging(args["verbose"])
    attack(args)
