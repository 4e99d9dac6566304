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
Layer operations of the zoo classifiers.

Every layer works on batched activations (leading batch axis) and
implements its own forward and reverse-mode rule. Layers are immutable:
parameters are stored as read-only arrays and training builds new layer
objects through with_parameters().
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from logitcal.tensorcore import DTYPE, ShapeMismatchError, frozen

DENSE = "dense"
CONV2D = "conv2d"
RELU = "relu"
MAXPOOL2D = "maxpool2d"
AVGPOOL2D = "avgpool2d"
FLATTEN = "flatten"
RESCALE = "rescale"

# rescale maps pixel values [0, 255] onto [-1, 1]
PIXEL_HALF_RANGE = 127.5


class LayerOp(object):
    """
    Base class of all layer kinds.
    """
    kind = None
    param_names = ()

    def __init__(self):
        self._params = dict()

    def __repr__(self):
        return "%s(%s)" % (self.__class__.__name__, ", ".join(
            "%s=%r" % (k, v) for k, v in self.hyperparameters().items()))

    def hyperparameters(self):
        """
        Integer hyperparameters in serialization order.
        :return: dict
        """
        return dict()

    def parameters(self):
        return [self._params[n] for n in self.param_names]

    def with_parameters(self, params):
        """
        Copy of this layer carrying the given parameter arrays.
        :param params: list of arrays ordered like param_names
        :return: new LayerOp
        """
        if len(params) != len(self.param_names):
            raise ShapeMismatchError("%s expects %d parameter tensors, got %d" % (
                self.kind, len(self.param_names), len(params)))
        for old, new in zip(self.parameters(), params):
            if np.shape(old) != np.shape(new):
                raise ShapeMismatchError("%s parameter shape %r does not match %r" % (
                    self.kind, np.shape(new), np.shape(old)))
        return self._rebuild([frozen(p, dtype=np.asarray(p).dtype) for p in params])

    def astype(self, dtype):
        return self._rebuild([frozen(p, dtype=dtype) for p in self.parameters()])

    def _rebuild(self, params):
        return self.__class__(*params, **self.hyperparameters())

    def output_shape(self, in_shape):
        """
        Shape of one output sample for one input sample of in_shape.
        Raises ShapeMismatchError for inconsistent inputs.
        """
        return tuple(in_shape)

    def forward(self, x):
        """
        :param x: batched input
        :return: (output, cache)
        """
        raise NotImplementedError()

    def backward(self, g, x, cache):
        """
        :param g: gradient w.r.t. the output
        :param x: the input recorded during forward
        :param cache: the cache returned by forward
        :return: (gradient w.r.t. x, list of parameter gradients)
        """
        raise NotImplementedError()


class Dense(LayerOp):
    """
    y = x W^T + b with W stored as (out, in).
    """
    kind = DENSE
    param_names = ("weight", "bias")

    def __init__(self, weight, bias):
        super(Dense, self).__init__()
        weight = np.asarray(weight)
        bias = np.asarray(bias)
        if weight.ndim != 2 or bias.shape != (weight.shape[0],):
            raise ShapeMismatchError("dense weight %r / bias %r inconsistent" % (
                weight.shape, bias.shape))
        self._params["weight"] = frozen(weight, dtype=weight.dtype if weight.dtype.kind == "f" else DTYPE)
        self._params["bias"] = frozen(bias, dtype=self._params["weight"].dtype)

    @property
    def weight(self):
        return self._params["weight"]

    @property
    def bias(self):
        return self._params["bias"]

    def output_shape(self, in_shape):
        if tuple(in_shape) != (self.weight.shape[1],):
            raise ShapeMismatchError("dense expects input (%d,), got %r" % (
                self.weight.shape[1], tuple(in_shape)))
        return (self.weight.shape[0],)

    def forward(self, x):
        return x @ self.weight.T + self.bias, None

    def backward(self, g, x, cache):
        return g @ self.weight, [g.T @ x, g.sum(axis=0)]


class Conv2d(LayerOp):
    """
    2-D cross-correlation over (C, H, W) inputs with zero padding.
    Weight is stored as (out_channels, in_channels, kh, kw).
    """
    kind = CONV2D
    param_names = ("weight", "bias")

    def __init__(self, weight, bias, stride=1, pad=0):
        super(Conv2d, self).__init__()
        weight = np.asarray(weight)
        bias = np.asarray(bias)
        if weight.ndim != 4 or bias.shape != (weight.shape[0],):
            raise ShapeMismatchError("conv2d weight %r / bias %r inconsistent" % (
                weight.shape, bias.shape))
        if stride < 1 or pad < 0:
            raise ShapeMismatchError("conv2d stride must be >= 1 and pad >= 0")
        self.stride = int(stride)
        self.pad = int(pad)
        self._params["weight"] = frozen(weight, dtype=weight.dtype if weight.dtype.kind == "f" else DTYPE)
        self._params["bias"] = frozen(bias, dtype=self._params["weight"].dtype)

    @property
    def weight(self):
        return self._params["weight"]

    @property
    def bias(self):
        return self._params["bias"]

    def hyperparameters(self):
        return dict(stride=self.stride, pad=self.pad)

    def output_shape(self, in_shape):
        out_c, in_c, kh, kw = self.weight.shape
        if len(in_shape) != 3 or in_shape[0] != in_c:
            raise ShapeMismatchError("conv2d expects (%d, H, W) input, got %r" % (
                in_c, tuple(in_shape)))
        h = in_shape[1] + 2 * self.pad - kh
        w = in_shape[2] + 2 * self.pad - kw
        if h < 0 or w < 0:
            raise ShapeMismatchError("conv2d kernel %dx%d larger than padded input %r" % (
                kh, kw, tuple(in_shape)))
        return (out_c, h // self.stride + 1, w // self.stride + 1)

    def forward(self, x):
        out_c, in_c, kh, kw = self.weight.shape
        p = self.pad
        xp = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p))) if p else x
        win = sliding_window_view(xp, (kh, kw), axis=(2, 3))[:, :, ::self.stride, ::self.stride]
        b, _, ho, wo = win.shape[:4]
        cols = win.transpose(0, 2, 3, 1, 4, 5).reshape(b, ho, wo, in_c * kh * kw)
        y = cols @ self.weight.reshape(out_c, -1).T + self.bias
        return y.transpose(0, 3, 1, 2), (cols, xp.shape)

    def backward(self, g, x, cache):
        cols, padded_shape = cache
        out_c, in_c, kh, kw = self.weight.shape
        s = self.stride
        gt = g.transpose(0, 2, 3, 1)
        b, ho, wo = gt.shape[:3]
        dw = np.tensordot(gt, cols, axes=([0, 1, 2], [0, 1, 2])).reshape(self.weight.shape)
        db = g.sum(axis=(0, 2, 3))
        dcols = (gt @ self.weight.reshape(out_c, -1)).reshape(b, ho, wo, in_c, kh, kw)
        dxp = np.zeros(padded_shape, dtype=dcols.dtype)
        for i in range(kh):
            for j in range(kw):
                dxp[:, :, i:i + s * (ho - 1) + 1:s, j:j + s * (wo - 1) + 1:s] += \
                    dcols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
        p = self.pad
        dx = dxp[:, :, p:padded_shape[2] - p, p:padded_shape[3] - p] if p else dxp
        return dx, [dw, db]


class Relu(LayerOp):
    kind = RELU

    def forward(self, x):
        return np.maximum(x, 0), None

    def backward(self, g, x, cache):
        return g * (x > 0), []


class _Pool2d(LayerOp):
    """
    Pooling with a square window. Windows must tile the input exactly
    under the declared stride.
    """

    def __init__(self, kernel=2, stride=None):
        super(_Pool2d, self).__init__()
        self.kernel = int(kernel)
        self.stride = int(stride if stride is not None else kernel)
        if self.kernel < 1 or self.stride < 1:
            raise ShapeMismatchError("%s kernel and stride must be >= 1" % self.kind)

    def hyperparameters(self):
        return dict(kernel=self.kernel, stride=self.stride)

    def output_shape(self, in_shape):
        if len(in_shape) != 3:
            raise ShapeMismatchError("%s expects (C, H, W) input, got %r" % (
                self.kind, tuple(in_shape)))
        c, h, w = in_shape
        k, s = self.kernel, self.stride
        if h < k or w < k or (h - k) % s or (w - k) % s:
            raise ShapeMismatchError("%s window %d/stride %d does not tile %dx%d" % (
                self.kind, k, s, h, w))
        return (c, (h - k) // s + 1, (w - k) // s + 1)

    def _windows(self, x):
        k, s = self.kernel, self.stride
        win = sliding_window_view(x, (k, k), axis=(2, 3))[:, :, ::s, ::s]
        return win.reshape(win.shape[:4] + (k * k,))

    def _scatter(self, dwin, x_shape):
        # dwin: (B, C, Ho, Wo, k*k) gradient per window position
        k, s = self.kernel, self.stride
        ho, wo = dwin.shape[2:4]
        dx = np.zeros(x_shape, dtype=dwin.dtype)
        for i in range(k):
            for j in range(k):
                dx[:, :, i:i + s * (ho - 1) + 1:s, j:j + s * (wo - 1) + 1:s] += dwin[..., i * k + j]
        return dx


class MaxPool2d(_Pool2d):
    kind = MAXPOOL2D

    def forward(self, x):
        win = self._windows(x)
        # ties resolve to the first window position
        idx = np.argmax(win, axis=-1)
        y = np.take_along_axis(win, idx[..., None], axis=-1)[..., 0]
        return y, idx

    def backward(self, g, x, cache):
        idx = cache
        dwin = np.zeros(idx.shape + (self.kernel * self.kernel,), dtype=g.dtype)
        np.put_along_axis(dwin, idx[..., None], g[..., None], axis=-1)
        return self._scatter(dwin, x.shape), []


class AvgPool2d(_Pool2d):
    kind = AVGPOOL2D

    def forward(self, x):
        return self._windows(x).mean(axis=-1, dtype=x.dtype), None

    def backward(self, g, x, cache):
        area = self.kernel * self.kernel
        dwin = np.repeat((g / area)[..., None], area, axis=-1)
        return self._scatter(dwin, x.shape), []


class Flatten(LayerOp):
    kind = FLATTEN

    def output_shape(self, in_shape):
        return (int(np.prod(in_shape)),)

    def forward(self, x):
        return x.reshape(x.shape[0], -1), None

    def backward(self, g, x, cache):
        return g.reshape(x.shape), []


class Rescale(LayerOp):
    """
    Fixed pixel normalization x / 127.5 - 1.
    """
    kind = RESCALE

    def forward(self, x):
        return x / PIXEL_HALF_RANGE - 1, None

    def backward(self, g, x, cache):
        return g / PIXEL_HALF_RANGE, []


LAYER_CLASSES = {
    DENSE: Dense,
    CONV2D: Conv2d,
    RELU: Relu,
    MAXPOOL2D: MaxPool2d,
    AVGPOOL2D: AvgPool2d,
    FLATTEN: Flatten,
    RESCALE: Rescale,
}
