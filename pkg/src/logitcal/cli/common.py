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
Arguments and setup shared by all subcommands.
"""
import argparse
import logging
import os

from logitcal.bench.experiments import load_dataset, load_or_train_zoo
from logitcal.bench.plan import ExperimentPlan, load_plan

DEFAULT_OUT_DIR = "logitcal-out"


def add_common_arguments(parser):
    parser.add_argument(
        "--plan", "-p", dest="plan",
        help="YAML experiment plan (default: built-in desk-scale plan)")
    parser.add_argument(
        "--seed", "-s", dest="seed", type=int,
        help="Overrides the plan seed.")
    parser.add_argument(
        "--out-dir", "-o", dest="out_dir", default=DEFAULT_OUT_DIR,
        help="Output directory (default: %s)" % DEFAULT_OUT_DIR)
    parser.add_argument(
        "--workers", "-w", dest="workers", type=int,
        help="Overrides the plan worker count.")
    parser.add_argument(
        "--verbose", "-v", dest="verbose", action="store_true", default=False,
        help="Debug logging.")


def new_parser(description, commands):
    parser = argparse.ArgumentParser(description=description,
                                     formatter_class=argparse.RawTextHelpFormatter)
    parser.add_argument(
        "command",
        choices=commands,
        help="Action to be executed.")
    add_common_arguments(parser)
    return parser


def setup_logging(verbose):
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def plan_from_args(args):
    plan = load_plan(args["plan"]) if args.get("plan") else ExperimentPlan()
    if args.get("seed") is not None:
        plan = plan.with_seed(args["seed"])
    if args.get("workers") is not None:
        plan.workers = args["workers"]
        plan.validate()
    return plan


def prepare_zoo(plan, out_dir):
    """
    :return: (zoo, train split, test split)
    """
    os.makedirs(out_dir, exist_ok=True)
    train, test = load_dataset(plan)
    zoo = load_or_train_zoo(plan, out_dir, train)
    return zoo, train, test
