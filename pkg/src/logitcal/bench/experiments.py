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
Experiment protocols. Every protocol attacks the same seeded image
selection per repetition; per-image targets and attack randomness are
derived from (repetition seed, image index) only, so columns that share
a seed are comparable image by image.
"""
import logging
import os
import re
import numpy as np
import simplejson as json
from collections import OrderedDict, namedtuple
from concurrent.futures import ThreadPoolExecutor

from logitcal.attack.engine import ensemble_forward, run_targeted_attack
from logitcal.bench import PlanError
from logitcal.bench.plan import RANDOM_TARGETS, RANK_TARGETS, TargetSpec
from logitcal.bench.report import TransferReport
from logitcal.diagnostics.csvio import emit_csv
from logitcal.diagnostics.trajectory import (AggregateTrajectory, TrajectoryRecord, aggregate,
                                             saturation_summary, MIN_SUMMARY_ITERATIONS)
from logitcal.losses import ANGLE, CE, CE_MARGIN, CE_TEMPERATURE, COMBO, LOGIT, LossSpec
from logitcal.tensorcore.tape import forward
from logitcal.zoo import datasets
from logitcal.zoo.architectures import build_architecture
from logitcal.zoo.training import TrainConfig, evaluate_accuracy, train_classifier
from logitcal.zoo.weights import load_weights, save_weights

LOG = logging.getLogger("logitcal.bench.experiments")

ZOO_DIR = "zoo"
ZOO_MANIFEST = "manifest.json"
ATTACK_DIR = "attack"
TRAJECTORY_DIR = "trajectories"
COMBO_TEMPERATURES = (5, 10, 20)

_Job = namedtuple("_Job", ["repetition", "seed", "group", "image"])


def select_target(clean_logits, mode, rng, k=None):
    """
    :param mode: "random" for a uniform pick among the classes other than
        the clean argmax, "rank" for the class of clean-logit rank k
        (rank 1 is the argmax, ties rank the lower index first)
    :param rng: numpy Generator, used by random mode only
    """
    z = np.asarray(clean_logits).ravel()
    n = len(z)
    if mode == RANDOM_TARGETS:
        top = int(np.argmax(z))
        pick = int(rng.integers(n - 1))
        return pick if pick < top else pick + 1
    if mode == RANK_TARGETS:
        if k is None or not 2 <= int(k) <= n:
            raise PlanError("target rank %r outside [2, %d]" % (k, n))
        return int(np.argsort(-z, kind="stable")[int(k) - 1])
    raise PlanError("unknown target mode %r" % mode)


def evaluate_success(victim, x_adv, target):
    """
    True iff the victim predicts the target; np.argmax breaks ties toward
    the lowest class index.
    """
    logits = forward(victim, x_adv)[0]
    return int(np.argmax(logits)) == int(target)


def load_dataset(plan):
    """
    :return: (train, test) split of the plan's dataset
    """
    ds = datasets.load_dataset(plan.dataset)
    if ds.class_count != plan.dataset.class_count:
        raise PlanError("dataset has %d classes, plan expects %d" % (ds.class_count, plan.dataset.class_count))
    return ds.split(plan.dataset.test_fraction, plan.dataset.seed)


def _train_config(plan, index):
    t = plan.training
    return TrainConfig(t.epochs, t.batch_size, t.learning_rate, t.momentum, t.seed + index)


def _read_manifest(path):
    if not os.path.exists(path):
        return dict()
    with open(path, "r") as f:
        return json.load(f)


def load_or_train_zoo(plan, out_dir, train):
    """
    Load the zoo from <out_dir>/zoo/<arch>.nnwt, training (and caching)
    every model whose cache entry is missing or was produced from a
    different dataset or training config.
    :return: OrderedDict arch id -> ClassifierModel, in plan order
    """
    zoo_dir = os.path.join(out_dir, ZOO_DIR)
    manifest_path = os.path.join(zoo_dir, ZOO_MANIFEST)
    manifest = _read_manifest(manifest_path)
    checksum = train.checksum()
    models = dict()
    pending = list()
    for i, arch in enumerate(plan.architectures):
        path = os.path.join(zoo_dir, "%s.nnwt" % arch)
        fingerprint = dict(dataset=checksum, class_count=train.class_count,
                           input_shape=list(train.image_shape), training=_train_config(plan, i).to_dict())
        if manifest.get(arch) == fingerprint and os.path.exists(path):
            LOG.info("Reusing cached %s from %s", arch, path)
            models[arch] = load_weights(path)
        else:
            pending.append((i, arch, path, fingerprint))

    def train_one(item):
        i, arch, _, _ = item
        cfg = _train_config(plan, i)
        model = build_architecture(arch, train.class_count, train.image_shape, seed=cfg.seed)
        return train_classifier(model, train, cfg)

    with ThreadPoolExecutor(max_workers=plan.workers) as ex:
        trained = list(ex.map(train_one, pending))
    for (i, arch, path, fingerprint), model in zip(pending, trained):
        save_weights(model, path)
        manifest[arch] = fingerprint
        models[arch] = model
    if pending:
        with open(manifest_path, "w") as f:
            json.dump(manifest, f, sort_keys=True, indent=2)
    return OrderedDict((a, models[a]) for a in plan.architectures)


def zoo_accuracies(zoo, test):
    return OrderedDict((a, evaluate_accuracy(m, test)) for a, m in zoo.items())


def _select_images(test, count, seed):
    if count > len(test):
        raise PlanError("plan asks for %d images but the test split has %d" % (count, len(test)))
    return [int(i) for i in np.random.default_rng(seed).permutation(len(test))[:count]]


def _image_randomness(seed, image):
    """
    :return: (target generator, attack seed) for one image of one repetition
    """
    target_ss, attack_ss = np.random.SeedSequence([seed, image]).spawn(2)
    return np.random.default_rng(target_ss), int(attack_ss.generate_state(1)[0])


def _metadata(plan, groups):
    return dict(seed=plan.seed, config_hash=plan.config_hash(),
                repetition_seeds=plan.repetition_seeds(), images=plan.images,
                losses=[dict(label=l.label, loss=l.to_text()) for l in plan.losses],
                attack=plan.attack.to_dict(),
                surrogate_sets=[dict(surrogates="+".join(s), victims=list(v),
                                     weights=list(w) if w else [1.0 / len(s)] * len(s))
                                for s, w, v in groups])


def _attack_image(plan, zoo, test, group, losses, target_specs, job):
    surrogates, weights, victims = group
    models = [zoo[a] for a in surrogates]
    x = test.images[job.image]
    clean = ensemble_forward(models, x, weights)[0]
    target_rng, attack_seed = _image_randomness(job.seed, job.image)
    cfg = plan.attack.with_seed(attack_seed)
    chosen = list()
    outcomes = list()
    for spec in target_specs:
        target = select_target(clean, spec.mode, target_rng, spec.k)
        chosen.append((spec.label, target))
        for loss in losses:
            result = run_targeted_attack(models, x, target, loss, cfg, weights=weights)
            for cp in sorted(result.snapshots):
                for v in victims:
                    outcomes.append((v, loss.label, spec.label, cp,
                                     evaluate_success(zoo[v], result.snapshots[cp], target)))
    return chosen, outcomes


def run_campaign(experiment, plan, zoo, test, groups, losses, target_specs):
    """
    Attack plan.images test images per repetition with every surrogate
    group, loss and target rule, then evaluate victims at the checkpoints.
    :param groups: list of (surrogate ids, fusion weights or None, victim ids)
    :return: TransferReport
    """
    report = TransferReport(experiment, plan.repetitions, _metadata(plan, groups))
    jobs = list()
    for r, seed in enumerate(plan.repetition_seeds()):
        for g in range(len(groups)):
            for image in _select_images(test, plan.images, seed):
                jobs.append(_Job(r, seed, g, image))
    LOG.info("%s: %d attack jobs, %d loss(es), %d target rule(s), %d worker(s)",
             experiment, len(jobs), len(losses), len(target_specs), plan.workers)

    def run(job):
        return _attack_image(plan, zoo, test, groups[job.group], losses, target_specs, job)

    with ThreadPoolExecutor(max_workers=plan.workers) as ex:
        results = list(ex.map(run, jobs))
    targets = list()
    for job, (chosen, outcomes) in zip(jobs, results):
        surrogates = groups[job.group][0]
        for label, target in chosen:
            targets.append(dict(repetition=job.repetition, surrogates="+".join(surrogates),
                                image=job.image, targets=label, target=target))
        for victim, loss, label, cp, success in outcomes:
            report.add(surrogates, victim, loss, label, cp, job.repetition, success)
    report.metadata["targets"] = targets
    LOG.info("%s finished: %r", experiment, report)
    return report


def run_single_model_transfer(plan, zoo, test):
    """
    Each surrogate alone against every victim; a victim that is also the
    surrogate yields a white-box cell.
    """
    for s in plan.surrogates:
        if s in plan.victims:
            LOG.warning("%s is both surrogate and victim, its cells are white-box", s)
    groups = [([s], None, list(plan.victims)) for s in plan.surrogates]
    return run_campaign("transfer", plan, zoo, test, groups, plan.losses, [plan.targets])


def temperature_losses(temperatures):
    """
    Plain CE, one temperature-calibrated CE per T and the Logit loss.
    """
    return ([LossSpec(CE)] + [LossSpec(CE_TEMPERATURE, temperature=t) for t in temperatures]
            + [LossSpec(LOGIT)])


def run_temperature_sweep(plan, zoo, test, temperatures=None):
    groups = [([s], None, list(plan.victims)) for s in plan.surrogates]
    losses = temperature_losses(temperatures or plan.temperatures)
    return run_campaign("sweep-t", plan, zoo, test, groups, losses, [plan.targets])


def run_ensemble_holdout(plan, zoo, test, with_members=True):
    """
    Each zoo model in turn is held out and attacked with the equally
    weighted ensemble of all the others.
    :param with_members: also attack the hold-out with each ensemble
        member alone, for comparison
    """
    archs = list(plan.architectures)
    if len(archs) < 2:
        raise PlanError("ensemble hold-out needs at least two zoo models")
    if len(archs) < 3:
        LOG.warning("a zoo of %d degenerates to single-model transfer", len(archs))
    groups = list()
    for held_out in archs:
        others = [a for a in archs if a != held_out]
        groups.append((others, [1.0 / len(others)] * len(others), [held_out]))
        if with_members and len(others) > 1:
            groups.extend(([o], None, [held_out]) for o in others)
    return run_campaign("ensemble", plan, zoo, test, groups, plan.losses, [plan.targets])


def run_varied_target(plan, zoo, test, ranks=None):
    """
    Targets taken at fixed clean-logit ranks, from high-ranked to low.
    """
    specs = [TargetSpec(RANK_TARGETS, k) for k in (ranks or plan.ranks)]
    for s in specs:
        if s.k > test.class_count:
            raise PlanError("target rank %d exceeds the class count %d" % (s.k, test.class_count))
    groups = [([s], None, [v for v in plan.victims if v != s]) for s in plan.surrogates]
    return run_campaign("vary-target", plan, zoo, test, groups, plan.losses, specs)


def combination_losses(temperatures=COMBO_TEMPERATURES):
    """
    Equal-weight pairs of calibrations: T + margin, T + angle and
    margin + angle.
    """
    margin = LossSpec(CE_MARGIN)
    angle = LossSpec(ANGLE)
    losses = list()
    for t in temperatures:
        ct = LossSpec(CE_TEMPERATURE, temperature=t)
        losses.append(LossSpec(COMBO, combo=[(ct, 1.0), (margin, 1.0)], label="T=%g+Margin" % t))
        losses.append(LossSpec(COMBO, combo=[(ct, 1.0), (angle, 1.0)], label="T=%g+Angle" % t))
    losses.append(LossSpec(COMBO, combo=[(margin, 1.0), (angle, 1.0)], label="Margin+Angle"))
    return losses


def run_combinations(plan, zoo, test):
    groups = [([s], None, list(plan.victims)) for s in plan.surrogates]
    return run_campaign("combos", plan, zoo, test, groups, combination_losses(), [plan.targets])


def _recorded_attack(plan, models, weights, test, losses, image):
    x = test.images[image]
    clean = ensemble_forward(models, x, weights)[0]
    target_rng, attack_seed = _image_randomness(plan.seed, image)
    target = select_target(clean, plan.targets.mode, target_rng, plan.targets.k)
    cfg = plan.attack.with_seed(attack_seed)
    results = list()
    for loss in losses:
        rec = TrajectoryRecord()
        results.append(run_targeted_attack(models, x, target, loss, cfg, recorder=rec, weights=weights))
    return target, results


def run_trajectory_study(plan, zoo, test, losses=None, out_dir=None):
    """
    Attack the images of the first repetition on the first surrogate with
    each loss, recording logits every iteration.
    :return: (OrderedDict loss label -> AggregateTrajectory,
              OrderedDict loss label -> saturation summary or None)
    """
    losses = losses or plan.losses
    models = [zoo[plan.surrogates[0]]]
    images = _select_images(test, plan.images, plan.seed)
    with ThreadPoolExecutor(max_workers=plan.workers) as ex:
        runs = list(ex.map(lambda i: _recorded_attack(plan, models, None, test, losses, i), images))
    aggregates = OrderedDict()
    summaries = OrderedDict()
    for j, loss in enumerate(losses):
        records = [results[j].trajectory for _, results in runs]
        agg = aggregate(records) if records else AggregateTrajectory.empty()
        aggregates[loss.label] = agg
        summaries[loss.label] = saturation_summary(agg) if len(agg) >= MIN_SUMMARY_ITERATIONS else None
        if out_dir is not None:
            emit_csv(agg, os.path.join(out_dir, TRAJECTORY_DIR, "%s.csv" % safe_name(loss.label)))
    return aggregates, summaries


def safe_name(label):
    return re.sub(r"[^A-Za-z0-9_.=-]+", "_", label)


def run_attack_batch(plan, zoo, test, out_dir, image_indices=None):
    """
    Attack selected test images with the surrogate ensemble (uniform
    weights) for every loss and export the adversarial images as IDX
    float32, their targets as IDX labels, one trajectory CSV per loss and
    a manifest.
    :param image_indices: explicit test-split indices, defaults to the
        plan's seeded selection
    :return: manifest dict
    """
    models = [zoo[a] for a in plan.surrogates]
    images = list(image_indices) if image_indices is not None else _select_images(test, plan.images, plan.seed)
    for i in images:
        if not 0 <= i < len(test):
            raise PlanError("image index %d outside the test split (%d images)" % (i, len(test)))
    with ThreadPoolExecutor(max_workers=plan.workers) as ex:
        runs = list(ex.map(lambda i: _recorded_attack(plan, models, None, test, plan.losses, i), images))
    attack_dir = os.path.join(out_dir, ATTACK_DIR)
    os.makedirs(attack_dir, exist_ok=True)
    targets = [t for t, _ in runs]
    manifest = OrderedDict(surrogates=list(plan.surrogates), images=images, targets=targets,
                           config_hash=plan.config_hash(), losses=list())
    for j, loss in enumerate(plan.losses):
        results = [r[j] for _, r in runs]
        name = safe_name(loss.label)
        entry = OrderedDict(label=loss.label, loss=loss.to_text(),
                            white_box_success=[bool(r.success) for r in results])
        if results:
            adv = datasets.Dataset(np.stack([r.x_adv for r in results]), targets, test.class_count)
            prefix = os.path.join(attack_dir, name)
            img_path = "%s-images.idx3-ubyte" % prefix
            lbl_path = "%s-labels.idx1-ubyte" % prefix
            datasets.write_idx_images(img_path, adv.images, as_float=True)
            datasets.write_idx_labels(lbl_path, adv.labels)
            entry["images_file"] = os.path.basename(img_path)
            entry["targets_file"] = os.path.basename(lbl_path)
            traj = aggregate([r.trajectory for r in results])
        else:
            traj = AggregateTrajectory.empty()
        entry["trajectory_file"] = os.path.basename(emit_csv(traj, os.path.join(attack_dir, "%s-trajectory.csv" % name)))
        manifest["losses"].append(entry)
    with open(os.path.join(attack_dir, "manifest.json"), "w") as f:
        json.dump(manifest, f, sort_keys=True, indent=2)
    LOG.info("Attacked %d image(s) with %d loss(es) into %s", len(images), len(plan.losses), attack_dir)
    return manifest
