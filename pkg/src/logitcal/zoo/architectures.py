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
The four zoo topologies. They differ in depth, kernel sizes and pooling
style; mlp-d has no convolution at all.
"""
import logging
import numpy as np
from logitcal.tensorcore import DTYPE
from logitcal.tensorcore.layers import Dense, Conv2d, Relu, MaxPool2d, AvgPool2d, Flatten, Rescale
from logitcal.zoo import ClassifierModel, UnknownArchitectureError

LOG = logging.getLogger("logitcal.zoo.architectures")

DEFAULT_INPUT_SHAPE = (1, 32, 32)
DEFAULT_CLASS_COUNT = 10

# ("conv", out_channels, kernel, stride, pad) / ("dense", width) / parameter-free kinds;
# a trailing ("dense", None) is the classifier with N outputs
ARCHITECTURES = {
    "cnn-a": [
        ("rescale",),
        ("conv", 8, 3, 1, 1), ("relu",), ("maxpool", 2),
        ("conv", 16, 3, 1, 1), ("relu",), ("maxpool", 2),
        ("flatten",),
        ("dense", 64), ("relu",),
        ("dense", None),
    ],
    "cnn-b": [
        ("rescale",),
        ("conv", 6, 5, 1, 2), ("relu",), ("avgpool", 2),
        ("conv", 12, 5, 1, 2), ("relu",), ("avgpool", 2),
        ("conv", 16, 3, 1, 1), ("relu",),
        ("flatten",),
        ("dense", 48), ("relu",),
        ("dense", None),
    ],
    "cnn-c": [
        ("rescale",),
        ("conv", 12, 3, 2, 1), ("relu",),
        ("conv", 24, 3, 1, 1), ("relu",), ("maxpool", 2),
        ("flatten",),
        ("dense", 32), ("relu",),
        ("dense", None),
    ],
    "mlp-d": [
        ("rescale",),
        ("flatten",),
        ("dense", 128), ("relu",),
        ("dense", 64), ("relu",),
        ("dense", None),
    ],
}


def list_architectures():
    return sorted(ARCHITECTURES.keys())


def _he_normal(rng, shape, fan_in, gain=2.0):
    return (rng.standard_normal(shape) * np.sqrt(gain / fan_in)).astype(DTYPE)


def build_architecture(arch_id, class_count=DEFAULT_CLASS_COUNT,
                       input_shape=DEFAULT_INPUT_SHAPE, seed=0):
    """
    Create a randomly initialized (untrained) zoo model.
    :param arch_id: one of list_architectures()
    :param class_count: number of classes N
    :param input_shape: (C, H, W)
    :param seed: initialization seed
    :return: ClassifierModel
    """
    if arch_id not in ARCHITECTURES:
        raise UnknownArchitectureError("unknown architecture %r, expected one of %s" % (
            arch_id, ", ".join(list_architectures())))
    rng = np.random.default_rng(seed)
    shape = tuple(input_shape)
    layers = list()
    for spec in ARCHITECTURES[arch_id]:
        kind = spec[0]
        if kind == "conv":
            _, out_c, k, stride, pad = spec
            fan_in = shape[0] * k * k
            layer = Conv2d(_he_normal(rng, (out_c, shape[0], k, k), fan_in),
                           np.zeros(out_c, dtype=DTYPE), stride=stride, pad=pad)
        elif kind == "dense":
            width = spec[1] if spec[1] is not None else class_count
            gain = 2.0 if spec[1] is not None else 1.0
            layer = Dense(_he_normal(rng, (width, shape[0]), shape[0], gain=gain),
                          np.zeros(width, dtype=DTYPE))
        elif kind == "maxpool":
            layer = MaxPool2d(spec[1])
        elif kind == "avgpool":
            layer = AvgPool2d(spec[1])
        elif kind == "relu":
            layer = Relu()
        elif kind == "flatten":
            layer = Flatten()
        else:
            layer = Rescale()
        shape = layer.output_shape(shape)
        layers.append(layer)
    model = ClassifierModel(arch_id, layers, input_shape)
    LOG.debug("Built %r with %d parameters (seed=%d)", model, model.parameter_count(), seed)
    return model
