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
Gradient and input transforms used on top of I-FGSM:
translation invariance (TI), momentum (MI) and diverse inputs (DI).
"""
import math
import numpy as np

from logitcal.tensorcore import KernelShapeError
from logitcal.tensorcore.ops import depthwise_convolve


def gaussian_kernel(side, sigma):
    """
    Normalized 2-D Gaussian, k[i,j] ~ exp(-((i-c)^2 + (j-c)^2) / (2 sigma^2)).
    :param side: odd kernel side
    :param sigma: standard deviation in pixels
    """
    side = int(side)
    if side < 1 or side % 2 == 0:
        raise KernelShapeError("Gaussian kernel side must be odd and positive, got %d" % side)
    if not sigma > 0:
        raise KernelShapeError("Gaussian kernel sigma must be positive")
    r = side // 2
    y, x = np.ogrid[-r:r + 1, -r:r + 1]
    k = np.exp(-(x * x + y * y) / (2.0 * sigma * sigma))
    return (k / k.sum()).astype(np.float32)


def ti_smooth(grad, kernel):
    """
    Per-channel zero-padded convolution of the input gradient.
    """
    return depthwise_convolve(grad, kernel)


def mi_accumulate(momentum, grad, decay):
    """
    g <- decay * g + grad / ||grad||_1. An all-zero gradient adds nothing.
    """
    l1 = np.abs(grad).sum()
    step = grad / l1 if l1 > 0 else np.zeros_like(grad)
    return decay * momentum + step


def di_transform(x, rng, probability, min_scale):
    """
    With the given probability, resize x (C, H, W) to a random size in
    [ceil(min_scale * H), H] by nearest neighbour and zero-pad back to
    (H, W) at a random offset. Otherwise return x unchanged.
    :param rng: numpy Generator, the only source of randomness
    """
    if rng.random() >= probability:
        return x
    _, h, w = x.shape
    rh = int(rng.integers(int(math.ceil(min_scale * h)), h + 1))
    rw = rh if h == w else max(1, int(round(rh * w / float(h))))
    rows = (np.arange(rh) * h) // rh
    cols = (np.arange(rw) * w) // rw
    resized = x[:, rows][:, :, cols]
    top = int(rng.integers(0, h - rh + 1))
    left = int(rng.integers(0, w - rw + 1))
    out = np.zeros_like(x)
    out[:, top:top + rh, left:left + rw] = resized
    return out
