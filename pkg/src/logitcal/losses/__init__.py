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
Targeted attack objectives. Every loss is minimized by the attack and
returns its value together with gradients on the logits and/or on the
penultimate feature.
"""
import math
import numpy as np
from logitcal import ConfigError, LogitcalError
from logitcal.tensorcore import check_finite

CE = "ce"
LOGIT = "logit"
CE_TEMPERATURE = "ce-temperature"
CE_MARGIN = "ce-margin"
ANGLE = "angle"
COMBO = "combo"

LOSS_KINDS = (CE, LOGIT, CE_TEMPERATURE, CE_MARGIN, ANGLE, COMBO)


class LossSpecError(ConfigError):
    pass


class InvalidTargetError(LogitcalError):
    pass


class ZeroNormError(LogitcalError):
    pass


class ProbabilityVectorError(LogitcalError):
    pass


class LossSpec(object):
    """
    Declarative attack objective.
    :param kind: one of LOSS_KINDS
    :param temperature: T for ce-temperature
    :param combo: list of (LossSpec, weight) for combo
    :param label: display name, defaults to the compact notation
    """

    def __init__(self, kind, temperature=None, combo=None, label=None):
        self.kind = kind
        self.temperature = None if temperature is None else float(temperature)
        self.combo = [(m, float(w)) for m, w in combo] if combo else None
        self.validate()
        self.label = label if label else self.to_text()

    def __repr__(self):
        return "LossSpec(%s)" % self.to_text()

    def __eq__(self, other):
        return isinstance(other, LossSpec) and self.to_text() == other.to_text()

    def __hash__(self):
        return hash(self.to_text())

    def validate(self):
        if self.kind not in LOSS_KINDS:
            raise LossSpecError("unknown loss kind %r, expected one of %s" % (
                self.kind, ", ".join(LOSS_KINDS)))
        if self.kind == CE_TEMPERATURE:
            if self.temperature is None or not self.temperature > 0 or math.isinf(self.temperature):
                raise LossSpecError("ce-temperature needs a finite temperature T > 0")
        elif self.temperature is not None:
            raise LossSpecError("temperature only applies to ce-temperature")
        if self.kind == COMBO:
            if not self.combo:
                raise LossSpecError("combo needs at least one member")
            for member, weight in self.combo:
                if member.kind == COMBO:
                    raise LossSpecError("combo members cannot be combos")
                if not math.isfinite(weight):
                    raise LossSpecError("combo weights must be finite")
        elif self.combo:
            raise LossSpecError("only combo losses take members")

    def members(self):
        """
        (LossSpec, weight) terms; a plain loss is its own single term.
        """
        return list(self.combo) if self.kind == COMBO else [(self, 1.0)]

    def uses_feature(self):
        return any(m.kind == ANGLE for m, _ in self.members())

    def to_text(self):
        if self.kind == CE_TEMPERATURE:
            return "%s:%s" % (self.kind, _fmt_number(self.temperature))
        if self.kind == COMBO:
            parts = list()
            for member, weight in self.combo:
                text = member.to_text()
                if weight != 1.0:
                    text += "@%s" % _fmt_number(weight)
                parts.append(text)
            return "combo:" + "+".join(parts)
        return self.kind


def _fmt_number(v):
    return "%d" % v if float(v).is_integer() else repr(float(v))


def parse_loss(text, label=None):
    """
    Parse the compact loss notation:
        ce | logit | ce-margin | angle | ce-temperature:<T>
        combo:<member>[@<weight>]+<member>[@<weight>]...
    """
    text = str(text).strip()
    if text.startswith("combo:"):
        members = list()
        for part in text[len("combo:"):].split("+"):
            weight = 1.0
            if "@" in part:
                part, w = part.rsplit("@", 1)
                try:
                    weight = float(w)
                except ValueError:
                    raise LossSpecError("bad combo weight %r" % w)
            members.append((parse_loss(part), weight))
        return LossSpec(COMBO, combo=members, label=label)
    if text.startswith(CE_TEMPERATURE):
        _, _, t = text.partition(":")
        try:
            return LossSpec(CE_TEMPERATURE, temperature=float(t), label=label)
        except ValueError:
            raise LossSpecError("bad temperature in %r" % text)
    return LossSpec(text, label=label)


class LossResult(object):
    """
    Scalar loss value with its gradient on the logits and/or the feature.
    """

    def __init__(self, value, d_logits=None, d_feature=None):
        if d_logits is None and d_feature is None:
            raise LogitcalError("a loss result needs at least one gradient")
        self.value = float(value)
        self.d_logits = None if d_logits is None else check_finite(d_logits, "loss gradient (logits)")
        self.d_feature = None if d_feature is None else check_finite(d_feature, "loss gradient (feature)")

    def __repr__(self):
        return "LossResult(value=%r, d_logits=%s, d_feature=%s)" % (
            self.value,
            None if self.d_logits is None else np.shape(self.d_logits),
            None if self.d_feature is None else np.shape(self.d_feature))
