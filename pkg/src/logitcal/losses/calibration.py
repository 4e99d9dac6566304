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
Cross-entropy, Logit loss and the three logit calibrations (temperature,
margin, angle), plus their weighted combination.
"""
import operator
import numpy as np
from scipy.special import logsumexp, softmax
from logitcal.tensorcore import check_finite
from logitcal.losses import (LossResult, InvalidTargetError, ZeroNormError, LossSpecError,
                             CE, LOGIT, CE_TEMPERATURE, CE_MARGIN, ANGLE, COMBO)

# floor of the Top-1/Top-2 gap used as margin-calibration scale
MARGIN_FLOOR = 1e-6


def _check_target(logits, target):
    n = np.shape(logits)[-1]
    try:
        if isinstance(target, bool):
            raise TypeError(target)
        t = operator.index(target)
    except TypeError:
        raise InvalidTargetError("target %r is not an integer class index" % (target,))
    if not 0 <= t < n:
        raise InvalidTargetError("target %r outside [0, %d)" % (target, n))
    return t



def _one_hot(n, target, dtype):
    e = np.zeros(n, dtype=dtype)
    e[target] = 1
    return e


def ce_loss(logits, target):
    """
    -log softmax(z)_t, stabilized by max subtraction inside logsumexp.
    """
    z = check_finite(logits, "logits")
    t = _check_target(z, target)
    value = logsumexp(z) - z[t]
    d = softmax(z) - _one_hot(len(z), t, z.dtype)
    return LossResult(value, d_logits=d.astype(z.dtype, copy=False))


def logit_loss(logits, target):
    """
    -z_t.
    """
    z = check_finite(logits, "logits")
    t = _check_target(z, target)
    return LossResult(-z[t], d_logits=-_one_hot(len(z), t, z.dtype))


def temperature_ce(logits, target, temperature):
    """
    CE on z / T. The gradient is taken w.r.t. the original logits,
    (softmax(z / T) - one_hot) / T.
    """
    if not temperature > 0:
        raise LossSpecError("temperature must be positive, got %r" % (temperature,))
    z = check_finite(logits, "logits")
    scaled = ce_loss(z / temperature, target)
    return LossResult(scaled.value, d_logits=scaled.d_logits / temperature)


def margin_scale(logits):
    """
    Top-1 minus Top-2 logit, floored at MARGIN_FLOOR.
    """
    top2 = np.sort(np.asarray(logits))[-2:]
    return max(float(top2[1] - top2[0]), MARGIN_FLOOR)


def margin_calibrated_ce(logits, target, reference_logits=None):
    """
    Temperature CE whose temperature is the current Top-1/Top-2 logit gap.
    The scale is a constant of the differentiation.
    :param reference_logits: logits the scale is measured on, defaults to logits
    """
    z = check_finite(logits, "logits")
    ref = z if reference_logits is None else check_finite(reference_logits, "reference logits")
    return temperature_ce(z, target, margin_scale(ref))


def angle_loss(feature, target_weights):
    """
    Negative cosine between the feature and the target class weights.
    The class bias does not take part.
    """
    f = check_finite(feature, "feature")
    w = check_finite(target_weights, "target weights")
    nf = np.linalg.norm(f)
    nw = np.linalg.norm(w)
    if nf == 0 or nw == 0:
        raise ZeroNormError("angle loss undefined for zero-norm %s" % (
            "feature" if nf == 0 else "target weights"))
    cos = float(f @ w) / (nf * nw)
    d = -(w / (nw * nf) - cos * f / (nf * nf))
    return LossResult(-cos, d_feature=d.astype(f.dtype, copy=False))


def _accumulate(total, term):
    if term is None:
        return total
    return term if total is None else total + term


def combine(results):
    """
    Weighted sum of loss results. Gradient slots are summed separately,
    absent slots count as zero.
    :param results: list of (LossResult, weight) pairs or bare LossResults
    """
    if not results:
        raise LossSpecError("combine needs at least one loss result")
    value = 0.0
    d_logits = None
    d_feature = None
    for item in results:
        r, w = item if isinstance(item, tuple) else (item, 1.0)
        value += w * r.value
        d_logits = _accumulate(d_logits, None if r.d_logits is None else w * r.d_logits)
        d_feature = _accumulate(d_feature, None if r.d_feature is None else w * r.d_feature)
    return LossResult(value, d_logits=d_logits, d_feature=d_feature)


def logit_space_loss(spec, logits, target, reference_logits=None):
    """
    Evaluate a non-angle, non-combo LossSpec on logits.
    """
    if spec.kind == CE:
        return ce_loss(logits, target)
    if spec.kind == LOGIT:
        return logit_loss(logits, target)
    if spec.kind == CE_TEMPERATURE:
        return temperature_ce(logits, target, spec.temperature)
    if spec.kind == CE_MARGIN:
        return margin_calibrated_ce(logits, target, reference_logits)
    raise LossSpecError("%s is not a logit-space loss" % spec.kind)


def evaluate_loss(spec, logits, target, feature=None, final_weights=None, reference_logits=None):
    """
    Evaluate any LossSpec for one model.
    :param feature: penultimate feature, needed by angle terms
    :param final_weights: (N, D) class weights, needed by angle terms
    """
    if spec.kind == COMBO:
        return combine([(evaluate_loss(m, logits, target, feature, final_weights, reference_logits), w)
                        for m, w in spec.combo])
    if spec.kind == ANGLE:
        if feature is None or final_weights is None:
            raise LossSpecError("angle loss needs the feature and the final weights")
        t = _check_target(logits, target)
        return angle_loss(feature, np.asarray(final_weights)[t])
    return logit_space_loss(spec, logits, target, reference_logits)
