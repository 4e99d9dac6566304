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

from logitcal.bench.experiments import load_dataset, zoo_accuracies
from logitcal.cli import common
from logitcal.zoo.datasets import export_idx
from logitcal.zoo.training import pairwise_agreement


class DataCommands(object):

    def execute_command(self, args):
        # call the local method with the same name as the command arg
        getattr(self, args["command"].replace("-", "_"))(args)

    def gen_data(self, args):
        plan = common.plan_from_args(args)
        train, test = load_dataset(plan)
        data_dir = os.path.join(args["out_dir"], "data")
        table = []
        for name, split in (("train", train), ("test", test)):
            images, labels = export_idx(split, os.path.join(data_dir, name))
            table.append([name, len(split), " ".join(str(c) for c in split.label_histogram()),
                          split.checksum()[:12], images])
        print(tabulate(table, headers=["Split", "Images", "Per class", "Checksum", "File"], tablefmt="grid"))

    def train_zoo(self, args):
        plan = common.plan_from_args(args)
        zoo, _, test = common.prepare_zoo(plan, args["out_dir"])
        acc = zoo_accuracies(zoo, test)
        agree = pairwise_agreement(list(zoo.values()), test.images)
        table = []
        for i, (arch, model) in enumerate(zoo.items()):
            table.append([arch, model.parameter_count(), "%.1f" % (100.0 * acc[arch])]
                         + ["%.2f" % a for a in agree[i]])
        print(tabulate(table, headers=["Model", "Parameters", "Test acc. (%)"] + list(zoo), tablefmt="grid"))


parser = common.new_parser("""logitcal gen-data|train-zoo

    Examples:
    - logitcal gen-data --plan plan.yml -o out
    - logitcal train-zoo --plan plan.yml -o out
    """, ["gen-data", "train-zoo"])


def main(argv):
    args = vars(parser.parse_args(argv))
    common.setup_logging(args["verbose"])
    DataCommands().execute_command(args)
