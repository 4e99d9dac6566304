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
Two-class saturation curve: p_t and p_nt as functions of the margin.
"""
import math
import numpy as np

from logitcal import ConfigError
from logitcal.losses.analysis import two_class_prob

CURVE_COLUMNS = ("margin", "p_t", "p_nt")

DEFAULT_GRID_MIN = -10.0
DEFAULT_GRID_MAX = 30.0
DEFAULT_GRID_STEP = 0.5


class CurveTable(object):

    columns = CURVE_COLUMNS

    def __init__(self, margins, p_t, p_nt):
        self.data = dict(margin=np.asarray(margins, dtype=np.float64),
                         p_t=np.asarray(p_t, dtype=np.float64),
                         p_nt=np.asarray(p_nt, dtype=np.float64))

    def __len__(self):
        return len(self.data["margin"])

    def column(self, name):
        return self.data[name]

    def rows(self):
        for i in range(len(self)):
            yield tuple(float(self.data[c][i]) for c in self.columns)


def margin_grid(lo=DEFAULT_GRID_MIN, hi=DEFAULT_GRID_MAX, step=DEFAULT_GRID_STEP):
    """
    Evenly spaced margins from lo to hi inclusive.
    """
    if not step > 0 or hi < lo:
        raise ConfigError("margin grid needs step > 0 and max >= min (got %r..%r step %r)" % (lo, hi, step))
    # tolerance keeps exact divisions like 40/0.5 from losing their endpoint
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n, dtype=np.float64)


def saturation_curve(margins):
    m = [float(v) for v in margins]
    probs = [two_class_prob(v) for v in m]
    return CurveTable(m, [p[0] for p in probs], [p[1] for p in probs])
