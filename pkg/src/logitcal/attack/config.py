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
Attack configuration. Defaults follow the common targeted transfer setup
on the 8-bit pixel scale: L_inf budget 16, step 2, 300 iterations with
MI, TI (5x5 Gaussian) and DI enabled.
"""
import logging
from logitcal import ConfigError

LOG = logging.getLogger("logitcal.attack.config")

DEFAULT_EPSILON = 16.0
DEFAULT_ALPHA = 2.0
DEFAULT_MAX_ITERS = 300
DEFAULT_CHECKPOINTS = (20, 100, 300)
DEFAULT_MI_DECAY = 1.0
DEFAULT_TI_KERNEL_SIDE = 5
DEFAULT_TI_SIGMA = 1.5
DEFAULT_DI_PROBABILITY = 0.7
DEFAULT_DI_MIN_SCALE = 0.875


def _take(d, key, default):
    return d[key] if d is not None and key in d else default


def _reject_unknown(section, d, known):
    unknown = sorted(set(d or {}) - set(known))
    if unknown:
        raise ConfigError("unknown %s option(s): %s" % (section, ", ".join(unknown)))


class MomentumConfig(object):

    def __init__(self, enabled=True, decay=DEFAULT_MI_DECAY):
        self.enabled = bool(enabled)
        self.decay = float(decay)
        if self.decay < 0:
            raise ConfigError("momentum decay must be non-negative")

    def to_dict(self):
        return dict(enabled=self.enabled, decay=self.decay)


class TranslationConfig(object):

    def __init__(self, enabled=True, kernel_side=DEFAULT_TI_KERNEL_SIDE, sigma=DEFAULT_TI_SIGMA):
        self.enabled = bool(enabled)
        self.kernel_side = int(kernel_side)
        self.sigma = float(sigma)
        if self.kernel_side < 1 or self.kernel_side % 2 == 0:
            raise ConfigError("TI kernel side must be a positive odd number, got %d" % self.kernel_side)
        if not self.sigma > 0:
            raise ConfigError("TI sigma must be positive")

    def to_dict(self):
        return dict(enabled=self.enabled, kernel_side=self.kernel_side, sigma=self.sigma)


class DiverseInputConfig(object):

    def __init__(self, enabled=True, probability=DEFAULT_DI_PROBABILITY,
                 min_scale=DEFAULT_DI_MIN_SCALE):
        self.enabled = bool(enabled)
        self.probability = float(probability)
        self.min_scale = float(min_scale)
        if not 0.0 <= self.probability <= 1.0:
            raise ConfigError("DI probability must lie in [0, 1]")
        if not 0.0 < self.min_scale <= 1.0:
            raise ConfigError("DI min scale must lie in (0, 1]")

    def to_dict(self):
        return dict(enabled=self.enabled, probability=self.probability, min_scale=self.min_scale)


class AttackConfig(object):
    """
    :param epsilon: L_inf budget in pixel units
    :param alpha: step size
    :param max_iters: iteration budget
    :param checkpoints: iterations at which snapshots are taken; when
        omitted the default schedule is clipped to max_iters
    :param check_constraints: verify the eps-ball and pixel range after
        every iteration
    """

    def __init__(self, epsilon=DEFAULT_EPSILON, alpha=DEFAULT_ALPHA, max_iters=DEFAULT_MAX_ITERS,
                 checkpoints=None, mi=None, ti=None, di=None, seed=0, check_constraints=False):
        self.epsilon = float(epsilon)
        self.alpha = float(alpha)
        self.max_iters = int(max_iters)
        self.mi = mi if mi is not None else MomentumConfig()
        self.ti = ti if ti is not None else TranslationConfig()
        self.di = di if di is not None else DiverseInputConfig()
        self.seed = int(seed)
        self.check_constraints = bool(check_constraints)
        if checkpoints is None:
            checkpoints = [c for c in DEFAULT_CHECKPOINTS if c <= self.max_iters]
            if self.max_iters not in checkpoints:
                checkpoints.append(self.max_iters)
            LOG.debug("using checkpoints %r for %d iterations", checkpoints, self.max_iters)
        self.checkpoints = tuple(sorted(set(int(c) for c in checkpoints)))
        self.validate()

    def __repr__(self):
        return "AttackConfig(eps=%g, alpha=%g, iters=%d, checkpoints=%r, mi=%s, ti=%s, di=%s, seed=%d)" % (
            self.epsilon, self.alpha, self.max_iters, self.checkpoints,
            self.mi.enabled, self.ti.enabled, self.di.enabled, self.seed)

    def validate(self):
        if self.epsilon < 0:
            raise ConfigError("epsilon must be non-negative")
        if not self.alpha > 0:
            raise ConfigError("alpha must be positive")
        if self.epsilon > 0 and self.alpha > self.epsilon:
            raise ConfigError("alpha (%g) must not exceed epsilon (%g)" % (self.alpha, self.epsilon))
        if self.max_iters < 1:
            raise ConfigError("max_iters must be at least 1")
        for c in self.checkpoints:
            if not 1 <= c <= self.max_iters:
                raise ConfigError("checkpoint %d outside [1, %d]" % (c, self.max_iters))

    def with_seed(self, seed):
        return AttackConfig(self.epsilon, self.alpha, self.max_iters, self.checkpoints,
                            self.mi, self.ti, self.di, seed, self.check_constraints)

    def to_dict(self):
        return dict(epsilon=self.epsilon, alpha=self.alpha, max_iters=self.max_iters,
                    checkpoints=list(self.checkpoints), mi=self.mi.to_dict(),
                    ti=self.ti.to_dict(), di=self.di.to_dict(), seed=self.seed,
                    check_constraints=self.check_constraints)

    @classmethod
    def from_dict(cls, d):
        """
        Build from a plan-file mapping; absent keys take the defaults.
        """
        d = d or dict()
        _reject_unknown("attack", d, ("epsilon", "alpha", "max_iters", "checkpoints",
                                      "mi", "ti", "di", "seed", "check_constraints"))
        for section, known in (("mi", ("enabled", "decay")),
                               ("ti", ("enabled", "kernel_side", "sigma")),
                               ("di", ("enabled", "probability", "min_scale"))):
            _reject_unknown("attack.%s" % section, d.get(section), known)
        mi = d.get("mi")
        ti = d.get("ti")
        di = d.get("di")
        try:
            return cls(
                epsilon=_take(d, "epsilon", DEFAULT_EPSILON),
                alpha=_take(d, "alpha", DEFAULT_ALPHA),
                max_iters=_take(d, "max_iters", DEFAULT_MAX_ITERS),
                checkpoints=_take(d, "checkpoints", None),
                mi=MomentumConfig(_take(mi, "enabled", True), _take(mi, "decay", DEFAULT_MI_DECAY)),
                ti=TranslationConfig(_take(ti, "enabled", True), _take(ti, "kernel_side", DEFAULT_TI_KERNEL_SIDE),
                                     _take(ti, "sigma", DEFAULT_TI_SIGMA)),
                di=DiverseInputConfig(_take(di, "enabled", True), _take(di, "probability", DEFAULT_DI_PROBABILITY),
                                      _take(di, "min_scale", DEFAULT_DI_MIN_SCALE)),
                seed=_take(d, "seed", 0),
                check_constraints=_take(d, "check_constraints", False))
        except (TypeError, ValueError) as ex:
            raise ConfigError("malformed attack section: %s" % ex)
