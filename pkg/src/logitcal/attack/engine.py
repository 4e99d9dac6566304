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
Targeted I-FGSM against an ensemble of surrogate models.

Per iteration: optional DI on the current adversarial image, forward
through every surrogate, fuse logits, evaluate the loss, backpropagate to
the input, optional TI then MI on the gradient, signed descent step and
projection onto the eps-ball intersected with the pixel range.
"""
import logging
import numpy as np

from logitcal import ConfigError
from logitcal.attack import (PIXEL_MIN, PIXEL_MAX, AttackDivergedError,
                             ConstraintViolationError, EnsembleMismatchError)
from logitcal.attack.transforms import gaussian_kernel, ti_smooth, mi_accumulate, di_transform
from logitcal.losses import ANGLE
from logitcal.losses.calibration import combine, evaluate_loss
from logitcal.tensorcore import DTYPE, check_finite
from logitcal.tensorcore.tape import forward, backward

LOG = logging.getLogger("logitcal.attack.engine")

WEIGHT_SUM_TOLERANCE = 1e-6
# slack for float32 rounding when re-checking the eps-ball
CONSTRAINT_TOLERANCE = 1e-3


class AttackState(object):
    """
    Mutable per-run state: original image, current adversarial image,
    momentum buffer and iteration counter.
    """

    def __init__(self, x_orig):
        self.x_orig = np.array(x_orig, dtype=DTYPE)
        self.x_adv = self.x_orig.copy()
        self.momentum = np.zeros_like(self.x_orig)
        self.iteration = 0


class AttackResult(object):
    """
    :param x_adv: final adversarial image
    :param snapshots: dict iteration -> adversarial image at that checkpoint
    :param trajectory: recorder passed to the run, or None
    :param success: white-box success on the surrogate set (fused argmax == target)
    :param final_logits: fused surrogate logits of x_adv
    """

    def __init__(self, x_adv, snapshots, target, loss_label, final_logits, trajectory=None):
        self.x_adv = x_adv
        self.snapshots = snapshots
        self.target = int(target)
        self.loss_label = loss_label
        self.final_logits = final_logits
        self.success = int(np.argmax(final_logits)) == self.target
        self.trajectory = trajectory

    def __repr__(self):
        return "AttackResult(target=%d, loss=%s, success=%s, checkpoints=%r)" % (
            self.target, self.loss_label, self.success, sorted(self.snapshots))


def ifgsm_step(state, grad, cfg):
    """
    Signed descent step, then clip to [x_orig - eps, x_orig + eps] and
    to the pixel range.
    """
    x = state.x_adv - cfg.alpha * np.sign(grad)
    x = np.clip(x, state.x_orig - cfg.epsilon, state.x_orig + cfg.epsilon)
    state.x_adv = np.clip(x, PIXEL_MIN, PIXEL_MAX).astype(DTYPE, copy=False)
    state.iteration += 1
    return state


def check_constraints(state, epsilon):
    dist = float(np.max(np.abs(state.x_adv.astype(np.float64) - state.x_orig.astype(np.float64))))
    if dist > epsilon + CONSTRAINT_TOLERANCE:
        raise ConstraintViolationError("iteration %d: L_inf distance %.6f exceeds eps %.6f" % (
            state.iteration, dist, epsilon))
    if state.x_adv.min() < PIXEL_MIN or state.x_adv.max() > PIXEL_MAX:
        raise ConstraintViolationError("iteration %d: pixels outside [%g, %g]" % (
            state.iteration, PIXEL_MIN, PIXEL_MAX))


def ensemble_weights(models, weights=None):
    """
    Validate the surrogate set and return its fusion weights, uniform by
    default.
    """
    if not models:
        raise ConfigError("the surrogate set is empty")
    n = models[0].class_count
    for m in models[1:]:
        if m.class_count != n:
            raise EnsembleMismatchError("surrogates disagree on the class count: %s has %d, %s has %d" % (
                models[0].arch_id, n, m.arch_id, m.class_count))
    if weights is None:
        return [1.0 / len(models)] * len(models)
    weights = [float(w) for w in weights]
    if len(weights) != len(models):
        raise ConfigError("%d ensemble weights given for %d surrogates" % (len(weights), len(models)))
    if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > WEIGHT_SUM_TOLERANCE:
        raise ConfigError("ensemble weights must be non-negative and sum to 1, got %r" % weights)
    return weights


def ensemble_forward(models, x, weights=None):
    """
    Forward x through every surrogate and fuse the logits as the
    weighted sum.
    :return: (fused logits, per-model features, per-model tapes)
    """
    weights = ensemble_weights(models, weights)
    fused = None
    features = list()
    tapes = list()
    for m, w in zip(models, weights):
        logits, feature, tape = forward(m, x)
        fused = w * logits if fused is None else fused + w * logits
        features.append(feature)
        tapes.append(tape)
    return fused, features, tapes


def ensemble_loss(spec, fused, target, features, models, weights, reference_logits=None):
    """
    Evaluate a loss on the ensemble. Logit-space terms see the fused
    logits; angle terms are taken per surrogate with its own final
    weights and scaled by the fusion weight.
    :return: (loss value, d fused logits or None, per-model d feature or None)
    """
    value = 0.0
    logit_terms = list()
    d_features = [None] * len(models)
    for member, mw in spec.members():
        if member.kind != ANGLE:
            r = evaluate_loss(member, fused, target, reference_logits=reference_logits)
            value += mw * r.value
            logit_terms.append((r, mw))
            continue
        # feature dimensions differ across surrogates, gradients stay per model
        for k, (m, w) in enumerate(zip(models, weights)):
            r = evaluate_loss(member, fused, target, feature=features[k], final_weights=m.final_weights)
            value += mw * w * r.value
            g = (mw * w) * r.d_feature
            d_features[k] = g if d_features[k] is None else d_features[k] + g
    d_logits = None
    if len(logit_terms) == 1 and logit_terms[0][1] == 1.0:
        d_logits = logit_terms[0][0].d_logits
    elif logit_terms:
        d_logits = combine(logit_terms).d_logits
    return value, d_logits, d_features


def ensemble_backward(tapes, weights, d_logits, d_features):
    """
    Sum of per-surrogate input gradients; the fused-logit gradient reaches
    surrogate k scaled by its fusion weight.
    """
    grad = None
    for tape, w, d_feat in zip(tapes, weights, d_features):
        g = backward(tape, d_logits=None if d_logits is None else w * d_logits, d_feature=d_feat)
        grad = g if grad is None else grad + g
    return grad


def run_targeted_attack(models, x, target, loss, cfg, recorder=None, weights=None):
    """
    Run the targeted attack on one image.
    :param models: surrogate ClassifierModel or list of them
    :param x: clean image (C, H, W) with pixels in [0, 255]
    :param target: target class index
    :param loss: LossSpec
    :param cfg: AttackConfig
    :param recorder: optional object with record_iteration(logits, target),
        called once per iteration with the fused logits of the updated,
        untransformed adversarial image
    :param weights: ensemble fusion weights, uniform by default
    :return: AttackResult
    """
    if not isinstance(models, (list, tuple)):
        models = [models]
    models = list(models)
    weights = ensemble_weights(models, weights)
    x = check_finite(np.asarray(x, dtype=DTYPE), "attack input")
    if x.min() < PIXEL_MIN or x.max() > PIXEL_MAX:
        raise ConfigError("attack input must have pixels in [%g, %g]" % (PIXEL_MIN, PIXEL_MAX))
    rng = np.random.default_rng(cfg.seed)
    kernel = gaussian_kernel(cfg.ti.kernel_side, cfg.ti.sigma) if cfg.ti.enabled else None
    state = AttackState(x)
    snapshots = dict()
    LOG.debug("attack target=%d loss=%s surrogates=%s %r", target, loss.label,
              [m.arch_id for m in models], cfg)
    for it in range(1, cfg.max_iters + 1):
        x_in = di_transform(state.x_adv, rng, cfg.di.probability, cfg.di.min_scale) \
            if cfg.di.enabled else state.x_adv
        fused, features, tapes = ensemble_forward(models, x_in, weights)
        if x_in is state.x_adv:
            clean = fused
        else:
            clean = ensemble_forward(models, state.x_adv, weights)[0]
        if recorder is not None and it > 1:
            # clean logits of the image produced by the previous iteration
            recorder.record_iteration(clean, target)
        value, d_logits, d_features = ensemble_loss(loss, fused, target, features, models, weights,
                                                    reference_logits=clean)
        grad = ensemble_backward(tapes, weights, d_logits, d_features)
        if not np.all(np.isfinite(grad)):
            raise AttackDivergedError("non-finite input gradient at iteration %d (loss %s, target %d, surrogates %s)" % (
                it, loss.label, target, ",".join(m.arch_id for m in models)))
        if kernel is not None:
            grad = ti_smooth(grad, kernel)
        if cfg.mi.enabled:
            state.momentum = mi_accumulate(state.momentum, grad, cfg.mi.decay)
            grad = state.momentum
        ifgsm_step(state, grad, cfg)
        if cfg.check_constraints:
            check_constraints(state, cfg.epsilon)
        if it in cfg.checkpoints:
            snapshots[it] = state.x_adv.copy()
        if it % 50 == 0:
            LOG.debug("iteration %d loss=%.6f", it, value)
    final_logits = ensemble_forward(models, state.x_adv, weights)[0]
    if recorder is not None:
        recorder.record_iteration(final_logits, target)
    return AttackResult(state.x_adv, snapshots, target, loss.label, final_logits, trajectory=recorder)
