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
Closed forms behind the calibration losses: the CE feature gradient, the
two-class saturation curve and the large-temperature limit.
"""
import math
import numpy as np
from scipy.special import expit
from logitcal.tensorcore import check_finite
from logitcal.losses import ProbabilityVectorError, LossSpecError

PROBABILITY_TOLERANCE = 1e-5


def feature_gradient(final_weights, d_logits):
    """
    Push a logit gradient through the final dense layer: W^T g.
    """
    return np.asarray(d_logits) @ np.asarray(final_weights)


def ce_feature_gradient_closed_form(p, final_weights, target):
    """
    sum_i -p_i (W_t - W_i), the CE gradient w.r.t. the penultimate
    feature. Vanishes when p saturates at one_hot(target).
    """
    p = check_finite(p, "probability vector")
    if abs(float(np.sum(p)) - 1.0) > PROBABILITY_TOLERANCE or np.any(p < 0):
        raise ProbabilityVectorError("p must be a probability vector (sum %r)" % float(np.sum(p)))
    w = np.asarray(final_weights)
    return np.sum(-p[:, np.newaxis] * (w[int(target)] - w), axis=0)


def margin_gradient(final_weights, target, nontarget):
    """
    Gradient of z_t - z_nt w.r.t. the feature: W_t - W_nt.
    """
    w = np.asarray(final_weights)
    return w[int(target)] - w[int(nontarget)]


def two_class_prob(margin):
    """
    Softmax over two classes separated by margin = z_t - z_nt.
    :return: (p_t, p_nt)
    """
    if not math.isfinite(margin):
        raise ValueError("margin must be finite")
    return float(expit(margin)), float(expit(-margin))


def large_T_limit_direction(final_weights, target, temperature):
    """
    Uniform-probability limit of the temperature-CE feature gradient,
    -(W_t - mean_i W_i) / T.
    """
    if not temperature > 0:
        raise LossSpecError("temperature must be positive")
    w = np.asarray(final_weights)
    return -(w[int(target)] - w.mean(axis=0)) / temperature


def cosine_similarity(a, b):
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))
