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
Dense float32 tensor arithmetic and reverse-mode differentiation for the
small feed-forward classifiers of the model zoo.

Tensors are plain numpy arrays. Every value crossing a module boundary is
expected to be finite; check_finite() turns NaN/Inf into an error instead
of letting it propagate.
"""
import numpy as np
from logitcal import LogitcalError

# working precision of models, attacks and losses
DTYPE = np.float32


class ShapeMismatchError(LogitcalError):
    pass


class NonFiniteTensorError(LogitcalError):
    pass


class TapeMismatchError(LogitcalError):
    pass


class KernelShapeError(LogitcalError):
    pass


def check_finite(a, what="tensor"):
    """
    Raise NonFiniteTensorError if a contains NaN or Inf.
    :param a: array-like
    :param what: name used in the error message
    :return: a as numpy array
    """
    a = np.asarray(a)
    if not np.all(np.isfinite(a)):
        bad = int(np.size(a) - np.count_nonzero(np.isfinite(a)))
        raise NonFiniteTensorError(
            "%s contains %d non-finite value(s) (shape %r)" % (what, bad, a.shape))
    return a


def frozen(a, dtype=DTYPE):
    """
    Read-only contiguous copy of a. Model parameters are stored this way.
    """
    arr = np.array(a, dtype=dtype, copy=True, order="C")
    arr.setflags(write=False)
    return arr
