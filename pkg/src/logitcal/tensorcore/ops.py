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
Free-standing tensor operations: per-channel convolution used for
gradient smoothing, and the central-difference gradient oracle.
"""
import numpy as np
from scipy import ndimage
from logitcal.tensorcore import KernelShapeError, ShapeMismatchError
from logitcal.tensorcore.tape import forward


def depthwise_convolve(image, kernel):
    """
    Convolve every channel of a (C, H, W) image with the same 2-D kernel.
    Zero padding keeps the output shape equal to the input shape.
    :param image: (C, H, W) tensor
    :param kernel: 2-D kernel with odd extents
    :return: (C, H, W) tensor in the image's dtype
    """
    kernel = np.asarray(kernel)
    image = np.asarray(image)
    if kernel.ndim != 2 or kernel.shape[0] % 2 == 0 or kernel.shape[1] % 2 == 0:
        raise KernelShapeError("kernel must be 2-D with odd extents, got %r" % (kernel.shape,))
    if image.ndim != 3:
        raise ShapeMismatchError("depthwise_convolve expects (C, H, W), got %r" % (image.shape,))
    out = ndimage.convolve(image, kernel[np.newaxis].astype(np.float64),
                           mode="constant", cval=0.0)
    return out.astype(image.dtype, copy=False)


def finite_difference_gradient(model, x, loss_fn, h=1e-3):
    """
    Central-difference estimate of dLoss/dx, evaluated in float64.

    With a model, loss_fn receives (logits, feature) of model(x); with
    model=None it receives x itself. Only used as a test oracle.
    :param model: ClassifierModel or None
    :param x: point of evaluation
    :param loss_fn: scalar-valued function
    :param h: step, > 0
    :return: float64 array shaped like x
    """
    if h <= 0:
        raise ValueError("finite difference step must be positive")

    def f(v):
        if model is None:
            return float(loss_fn(v))
        logits, feature, _ = forward(model, v)
        return float(loss_fn(logits, feature))

    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        up = f(x)
        flat[i] = orig - h
        down = f(x)
        flat[i] = orig
        gflat[i] = (up - down) / (2.0 * h)
    return grad
