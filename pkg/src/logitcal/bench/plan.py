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
Experiment plans, stored as YAML documents:

    schema_version: 1
    seed: 0
    workers: 1
    dataset: {source: synthetic-shapes, class_count: 10, per_class: 200}
    zoo:
      architectures: [cnn-a, cnn-b, cnn-c, mlp-d]
      training: {epochs: 8, learning_rate: 0.02}
    surrogates: [cnn-a]
    victims: [cnn-a, cnn-b, cnn-c, mlp-d]
    losses: [ce, "ce-temperature:5", ce-margin, {loss: angle, label: Angle}]
    attack: {epsilon: 16, alpha: 2, max_iters: 300, di: {probability: 0.7}}
    images: 100
    targets: {mode: random}
    repetitions: 5
    temperatures: [0.5, 1, 2, 5, 10, 20, 50, 100]
    ranks: [2, 4, 6, 8, 10]

Every key is optional; unknown keys are rejected.
"""
import hashlib
import logging
import simplejson as json
import yaml

from logitcal import ConfigError
from logitcal.attack.config import AttackConfig
from logitcal.bench import PlanError
from logitcal.losses import parse_loss
from logitcal.zoo.architectures import list_architectures
from logitcal.zoo.datasets import DatasetSpec
from logitcal.zoo.training import TrainConfig

LOG = logging.getLogger("logitcal.bench.plan")

PLAN_SCHEMA_VERSION = 1

RANDOM_TARGETS = "random"
RANK_TARGETS = "rank"

DEFAULT_IMAGES = 100
DEFAULT_REPETITIONS = 5
DEFAULT_LOSSES = ("ce", "ce-temperature:5", "ce-margin", "angle")
DEFAULT_TEMPERATURES = (0.5, 1, 2, 5, 10, 20, 50, 100)
DEFAULT_RANK_STEP = 2

PLAN_KEYS = ("schema_version", "seed", "workers", "dataset", "zoo", "surrogates", "victims",
             "losses", "attack", "images", "targets", "repetitions", "temperatures", "ranks")
DATASET_KEYS = ("source", "class_count", "image_shape", "per_class", "test_fraction", "seed",
                "noise", "idx_images", "idx_labels")
ZOO_KEYS = ("architectures", "training")
TRAINING_KEYS = ("epochs", "batch_size", "learning_rate", "momentum", "seed")


def default_ranks(class_count):
    """
    Every second rank from 2, always ending with the lowest rank N.
    """
    return sorted(set(range(2, class_count + 1, DEFAULT_RANK_STEP)) | {class_count})


class TargetSpec(object):
    """
    How attack targets are chosen: uniformly among non-argmax classes
    (random) or as the class of a given clean-logit rank (rank, k >= 2).
    """

    def __init__(self, mode=RANDOM_TARGETS, k=None):
        self.mode = mode
        self.k = None if k is None else int(k)
        if mode not in (RANDOM_TARGETS, RANK_TARGETS):
            raise PlanError("unknown target mode %r" % mode)
        if mode == RANK_TARGETS and (self.k is None or self.k < 2):
            raise PlanError("rank targets need k >= 2")
        if mode == RANDOM_TARGETS and self.k is not None:
            raise PlanError("random targets take no k")

    @property
    def label(self):
        return RANDOM_TARGETS if self.mode == RANDOM_TARGETS else "rank-%d" % self.k

    def to_dict(self):
        return dict(mode=self.mode, k=self.k)


class ExperimentPlan(object):

    def __init__(self, dataset=None, architectures=None, training=None, surrogates=None,
                 victims=None, losses=None, attack=None, images=DEFAULT_IMAGES, targets=None,
                 repetitions=DEFAULT_REPETITIONS, seed=0, workers=1, temperatures=None, ranks=None):
        self.dataset = dataset if dataset is not None else DatasetSpec()
        self.architectures = list(architectures) if architectures else list_architectures()
        self.training = training if training is not None else TrainConfig()
        self.surrogates = list(surrogates) if surrogates else list(self.architectures)
        self.victims = list(victims) if victims else list(self.architectures)
        self.losses = list(losses) if losses else [parse_loss(t) for t in DEFAULT_LOSSES]
        self.attack = attack if attack is not None else AttackConfig()
        self.images = int(images)
        self.targets = targets if targets is not None else TargetSpec()
        self.repetitions = int(repetitions)
        self.seed = int(seed)
        self.workers = int(workers)
        self.temperatures = [float(t) for t in (temperatures or DEFAULT_TEMPERATURES)]
        self.ranks = [int(k) for k in ranks] if ranks else default_ranks(self.dataset.class_count)
        self.validate()

    def __repr__(self):
        return "ExperimentPlan(seed=%d, zoo=%s, surrogates=%s, victims=%s, losses=%s, images=%d, reps=%d)" % (
            self.seed, ",".join(self.architectures), ",".join(self.surrogates), ",".join(self.victims),
            ",".join(l.label for l in self.losses), self.images, self.repetitions)

    def validate(self):
        known = list_architectures()
        for a in self.architectures:
            if a not in known:
                raise PlanError("unknown architecture %r in zoo, expected one of %s" % (a, ", ".join(known)))
        if len(set(self.architectures)) != len(self.architectures):
            raise PlanError("zoo architectures must be distinct")
        for role, ids in (("surrogate", self.surrogates), ("victim", self.victims)):
            for a in ids:
                if a not in self.architectures:
                    raise PlanError("%s %r is not part of the zoo" % (role, a))
        if self.repetitions < 1:
            raise PlanError("repetitions must be at least 1")
        if self.images < 0:
            raise PlanError("images must be non-negative")
        if self.workers < 1:
            raise PlanError("workers must be at least 1")
        if self.seed < 0:
            raise PlanError("seed must be non-negative")
        labels = [l.label for l in self.losses]
        if len(set(labels)) != len(labels):
            raise PlanError("loss labels must be distinct: %s" % ", ".join(labels))
        if self.targets.mode == RANK_TARGETS and self.targets.k > self.dataset.class_count:
            raise PlanError("target rank %d exceeds the class count %d" % (self.targets.k, self.dataset.class_count))
        for k in self.ranks:
            if not 2 <= k <= self.dataset.class_count:
                raise PlanError("target rank %d outside [2, %d]" % (k, self.dataset.class_count))
        for t in self.temperatures:
            if not t > 0:
                raise PlanError("temperatures must be positive")

    def repetition_seeds(self):
        return [self.seed + r for r in range(self.repetitions)]

    def with_seed(self, seed):
        return ExperimentPlan(self.dataset, self.architectures, self.training, self.surrogates,
                              self.victims, self.losses, self.attack, self.images, self.targets,
                              self.repetitions, seed, self.workers, self.temperatures, self.ranks)

    def to_dict(self):
        return dict(schema_version=PLAN_SCHEMA_VERSION, seed=self.seed, workers=self.workers,
                    dataset=self.dataset.to_dict(),
                    zoo=dict(architectures=list(self.architectures), training=self.training.to_dict()),
                    surrogates=list(self.surrogates), victims=list(self.victims),
                    losses=[dict(loss=l.to_text(), label=l.label) for l in self.losses],
                    attack=self.attack.to_dict(), images=self.images, targets=self.targets.to_dict(),
                    repetitions=self.repetitions, temperatures=list(self.temperatures),
                    ranks=list(self.ranks))

    def config_hash(self):
        """
        Stable digest of everything that influences results; the worker
        count is excluded.
        """
        d = self.to_dict()
        d.pop("workers")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode("utf-8")).hexdigest()[:16]


def _mapping(d, section, known):
    if d is None:
        return dict()
    if not isinstance(d, dict):
        raise PlanError("plan section %r must be a mapping" % section)
    unknown = sorted(set(d) - set(known))
    if unknown:
        raise PlanError("unknown key(s) in plan section %r: %s" % (section, ", ".join(map(str, unknown))))
    return d


def _parse_losses(items):
    if items is None:
        return None
    if not isinstance(items, list):
        raise PlanError("plan losses must be a list")
    losses = list()
    for item in items:
        if isinstance(item, dict):
            item = _mapping(item, "losses", ("loss", "label"))
            if "loss" not in item:
                raise PlanError("loss entry without 'loss': %r" % item)
            losses.append(parse_loss(item["loss"], label=item.get("label")))
        else:
            losses.append(parse_loss(item))
    return losses


def plan_from_dict(d):
    """
    Build an ExperimentPlan from a parsed plan document.
    """
    if d is None:
        d = dict(schema_version=PLAN_SCHEMA_VERSION)
    d = _mapping(d, "plan", PLAN_KEYS)
    version = d.get("schema_version")
    if version != PLAN_SCHEMA_VERSION:
        raise PlanError("unsupported plan schema_version %r, expected %d" % (version, PLAN_SCHEMA_VERSION))
    try:
        ds = _mapping(d.get("dataset"), "dataset", DATASET_KEYS)
        zoo = _mapping(d.get("zoo"), "zoo", ZOO_KEYS)
        tr = _mapping(zoo.get("training"), "zoo.training", TRAINING_KEYS)
        tg = _mapping(d.get("targets"), "targets", ("mode", "k"))
        return ExperimentPlan(
            dataset=DatasetSpec(**ds),
            architectures=zoo.get("architectures"),
            training=TrainConfig(**tr),
            surrogates=d.get("surrogates"),
            victims=d.get("victims"),
            losses=_parse_losses(d.get("losses")),
            attack=AttackConfig.from_dict(d.get("attack")),
            images=d.get("images", DEFAULT_IMAGES),
            targets=TargetSpec(**tg),
            repetitions=d.get("repetitions", DEFAULT_REPETITIONS),
            seed=d.get("seed", 0),
            workers=d.get("workers", 1),
            temperatures=d.get("temperatures"),
            ranks=d.get("ranks"))
    except PlanError:
        raise
    except ConfigError as ex:
        raise PlanError(str(ex))
    except (TypeError, ValueError) as ex:
        raise PlanError("malformed plan: %s" % ex)


def load_plan(path):
    """
    Read and validate a YAML plan file.
    """
    try:
        with open(path, "r") as f:
            doc = yaml.safe_load(f)
    except (IOError, OSError) as ex:
        raise PlanError("cannot read plan file %s: %s" % (path, ex))
    except yaml.YAMLError as ex:
        raise PlanError("plan file %s is not valid YAML: %s" % (path, ex))
    plan = plan_from_dict(doc)
    LOG.info("Loaded %r from %s", plan, path)
    return plan
