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
Forward evaluation with an activation tape and the reverse-mode passes
that run over it.
"""
import numpy as np
from logitcal.tensorcore import ShapeMismatchError, TapeMismatchError, check_finite


class TapeEntry(object):

    def __init__(self, layer, x, cache):
        self.layer = layer
        self.x = x
        self.cache = cache


class Tape(object):
    """
    Ordered record of the layers executed by one forward call together
    with their cached input activations.
    """

    def __init__(self, model, x, batched):
        self.model = model
        self.input = x
        self.batched = batched
        self.entries = list()
        self.output = None

    def __len__(self):
        return len(self.entries)

    @property
    def feature(self):
        """
        Batched input of the final dense layer.
        """
        return self.entries[-1].x

    def replay(self):
        """
        Re-run the recorded layers on the recorded input.
        :return: batched output, equal to self.output bit for bit
        """
        a = self.entries[0].x if self.entries else self.input
        for e in self.entries:
            a, _ = e.layer.forward(a)
        return a


def forward(model, x):
    """
    Evaluate model on x and record a tape.

    x is either one sample of model.input_shape or a batch of them with a
    leading batch axis; logits and feature follow the same convention.
    :param model: ClassifierModel
    :param x: input tensor
    :return: (logits, feature, tape)
    """
    x = check_finite(x, "model input")
    in_shape = tuple(model.input_shape)
    if x.shape == in_shape:
        batched = False
        a = x[np.newaxis]
    elif x.shape[1:] == in_shape:
        batched = True
        a = x
    else:
        raise ShapeMismatchError("model %r expects input %r, got %r" % (
            model.arch_id, in_shape, x.shape))
    tape = Tape(model, x, batched)
    for i, layer in enumerate(model.layers):
        try:
            layer.output_shape(a.shape[1:])
        except ShapeMismatchError as ex:
            raise ShapeMismatchError("layer %d (%s) of %r: %s" % (
                i, layer.kind, model.arch_id, ex))
        y, cache = layer.forward(a)
        tape.entries.append(TapeEntry(layer, a, cache))
        a = y
    tape.output = a
    if batched:
        return a, tape.feature, tape
    return a[0], tape.feature[0], tape


def _batched_grad(tape, g, expected, what):
    g = np.asarray(g)
    if not tape.batched:
        g = g[np.newaxis]
    if g.shape != expected:
        raise TapeMismatchError("%s gradient shape %r does not match tape %r" % (
            what, g.shape if tape.batched else g.shape[1:],
            expected if tape.batched else expected[1:]))
    return g


def backward(tape, d_logits=None, d_feature=None, with_weights=False):
    """
    Reverse pass over a tape.

    Gradients on the logits and on the penultimate feature may be given
    separately or together; they meet at the final dense layer.
    :param tape: Tape from forward()
    :param d_logits: dLoss/dLogits or None
    :param d_feature: dLoss/dFeature or None
    :param with_weights: also return per-layer parameter gradients
    :return: dLoss/dx, or (dLoss/dx, per-layer gradient lists)
    """
    if d_logits is None and d_feature is None:
        raise TapeMismatchError("backward needs d_logits or d_feature")
    entries = tape.entries
    param_grads = [[] for _ in entries]
    last = entries[-1]
    if d_logits is not None:
        g = _batched_grad(tape, d_logits, tape.output.shape, "logit")
        g, param_grads[-1] = last.layer.backward(g, last.x, last.cache)
    else:
        g = np.zeros_like(last.x)
        param_grads[-1] = [np.zeros_like(p) for p in last.layer.parameters()]
    if d_feature is not None:
        g = g + _batched_grad(tape, d_feature, last.x.shape, "feature")
    for i in range(len(entries) - 2, -1, -1):
        e = entries[i]
        g, param_grads[i] = e.layer.backward(g, e.x, e.cache)
    dx = g if tape.batched else g[0]
    if with_weights:
        return dx, param_grads
    return dx


def backward_to_input(tape, d_logits):
    """
    dLoss/dx for a gradient on the logits.
    """
    return backward(tape, d_logits=d_logits)


def backward_to_weights(tape, d_logits):
    """
    Per-layer parameter gradients for a gradient on the logits.
    :return: list (one entry per layer) of gradient lists ordered like
             the layer's param_names; empty for parameter-free layers
    """
    return backward(tape, d_logits=d_logits, with_weights=True)[1]
