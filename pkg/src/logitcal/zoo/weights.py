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
NNWT weight files.

Little-endian layout:
    magic "NNWT" | version u32 | arch id (u16 length + UTF-8)
    | input shape (u8 ndim + u32 extents) | layer count u32
    per layer: kind tag u8 | hyperparameters (u32 each, kind dependent)
               | per parameter tensor: ndim u8 + u32 extents + raw f32
"""
import logging
import os
import struct
import numpy as np
from logitcal import LogitcalError
from logitcal.tensorcore import ShapeMismatchError
from logitcal.tensorcore import layers as L
from logitcal.zoo import ClassifierModel

LOG = logging.getLogger("logitcal.zoo.weights")

MAGIC = b"NNWT"
FORMAT_VERSION = 1

KIND_TAGS = {
    L.DENSE: 1,
    L.CONV2D: 2,
    L.RELU: 3,
    L.MAXPOOL2D: 4,
    L.AVGPOOL2D: 5,
    L.FLATTEN: 6,
    L.RESCALE: 7,
}
TAG_KINDS = dict((v, k) for k, v in KIND_TAGS.items())

# names of the u32 hyperparameters stored per kind
HYPER_FIELDS = {
    L.CONV2D: ("stride", "pad", "kernel_h", "kernel_w"),
    L.MAXPOOL2D: ("kernel", "stride"),
    L.AVGPOOL2D: ("kernel", "stride"),
}


class WeightFileError(LogitcalError):
    pass


class BadMagicError(WeightFileError):
    pass


class VersionMismatchError(WeightFileError):
    pass


class LayerDescriptorError(WeightFileError):
    pass


class TruncatedFileError(WeightFileError):
    pass


def _hyper_values(layer):
    if layer.kind == L.CONV2D:
        kh, kw = layer.weight.shape[2:]
        return (layer.stride, layer.pad, kh, kw)
    if layer.kind in (L.MAXPOOL2D, L.AVGPOOL2D):
        return (layer.kernel, layer.stride)
    return ()


def header_size(model):
    arch = model.arch_id.encode("utf-8")
    return 4 + 4 + 2 + len(arch) + 1 + 4 * len(model.input_shape) + 4


def expected_file_size(model):
    """
    Header plus, per layer, tag, hyperparameters and tensor descriptors
    and data.
    """
    size = header_size(model)
    for layer in model.layers:
        size += 1 + 4 * len(HYPER_FIELDS.get(layer.kind, ()))
        for p in layer.parameters():
            size += 1 + 4 * p.ndim + 4 * p.size
    return size


def save_weights(model, path):
    """
    Write model to path in NNWT format.
    """
    arch = model.arch_id.encode("utf-8")
    chunks = [MAGIC, struct.pack("<I", FORMAT_VERSION),
              struct.pack("<H", len(arch)), arch,
              struct.pack("<B", len(model.input_shape)),
              struct.pack("<%dI" % len(model.input_shape), *model.input_shape),
              struct.pack("<I", len(model.layers))]
    for layer in model.layers:
        chunks.append(struct.pack("<B", KIND_TAGS[layer.kind]))
        hyper = _hyper_values(layer)
        chunks.append(struct.pack("<%dI" % len(hyper), *hyper))
        for p in layer.parameters():
            chunks.append(struct.pack("<B", p.ndim))
            chunks.append(struct.pack("<%dI" % p.ndim, *p.shape))
            chunks.append(np.ascontiguousarray(p, dtype="<f4").tobytes())
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "wb") as f:
        f.write(b"".join(chunks))
    LOG.info("Saved %r to %s", model, path)


class _Reader(object):

    def __init__(self, raw, path):
        self.raw = raw
        self.path = path
        self.pos = 0

    def take(self, n, what):
        if self.pos + n > len(self.raw):
            raise TruncatedFileError("%s: truncated while reading %s at byte %d" % (
                self.path, what, self.pos))
        b = self.raw[self.pos:self.pos + n]
        self.pos += n
        return b

    def unpack(self, fmt, what):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def load_weights(path):
    """
    Read an NNWT file.
    :return: ClassifierModel
    """
    with open(path, "rb") as f:
        r = _Reader(f.read(), path)
    magic = r.take(4, "magic")
    if magic != MAGIC:
        raise BadMagicError("%s: bad magic, expected %r, got %r" % (path, MAGIC, magic))
    version = r.unpack("<I", "version")[0]
    if version != FORMAT_VERSION:
        raise VersionMismatchError("%s: format version %d, supported %d" % (
            path, version, FORMAT_VERSION))
    arch_len = r.unpack("<H", "arch id length")[0]
    try:
        arch_id = r.take(arch_len, "arch id").decode("utf-8")
    except UnicodeDecodeError:
        raise LayerDescriptorError("%s: arch id is not valid UTF-8" % path)
    ndim = r.unpack("<B", "input rank")[0]
    input_shape = r.unpack("<%dI" % ndim, "input shape")
    n_layers = r.unpack("<I", "layer count")[0]
    layers = list()
    for i in range(n_layers):
        tag = r.unpack("<B", "layer %d tag" % i)[0]
        if tag not in TAG_KINDS:
            raise LayerDescriptorError("%s: layer %d has unknown kind tag %d" % (path, i, tag))
        kind = TAG_KINDS[tag]
        fields = HYPER_FIELDS.get(kind, ())
        hyper = dict(zip(fields, r.unpack("<%dI" % len(fields), "layer %d hyperparameters" % i)))
        params = list()
        for name in L.LAYER_CLASSES[kind].param_names:
            pdim = r.unpack("<B", "layer %d %s rank" % (i, name))[0]
            shape = r.unpack("<%dI" % pdim, "layer %d %s shape" % (i, name))
            count = int(np.prod(shape))
            data = np.frombuffer(r.take(4 * count, "layer %d %s data" % (i, name)), dtype="<f4")
            params.append(data.reshape(shape).astype(np.float32))
        layers.append(_build_layer(path, i, kind, hyper, params))
    if r.pos != len(r.raw):
        raise LayerDescriptorError("%s: %d trailing bytes after last layer" % (
            path, len(r.raw) - r.pos))
    try:
        model = ClassifierModel(arch_id, layers, input_shape)
    except ShapeMismatchError as ex:
        raise LayerDescriptorError("%s: inconsistent layer shapes: %s" % (path, ex))
    LOG.info("Loaded %r from %s", model, path)
    return model


def _build_layer(path, i, kind, hyper, params):
    try:
        if kind == L.CONV2D:
            w = params[0]
            if w.ndim != 4 or (hyper["kernel_h"], hyper["kernel_w"]) != w.shape[2:]:
                raise LayerDescriptorError("%s: layer %d kernel extents %r do not match weight %r" % (
                    path, i, (hyper["kernel_h"], hyper["kernel_w"]), w.shape))
            return L.Conv2d(params[0], params[1], stride=hyper["stride"], pad=hyper["pad"])
        return L.LAYER_CLASSES[kind](*params, **hyper)
    except ShapeMismatchError as ex:
        raise LayerDescriptorError("%s: layer %d (%s): %s" % (path, i, kind, ex))
