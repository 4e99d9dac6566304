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
Datasets for zoo training: the procedural synthetic-shapes set and IDX
file ingestion / export.
"""
import hashlib
import logging
import os
import struct
import numpy as np
from logitcal import ConfigError
from logitcal.tensorcore import DTYPE
from logitcal.zoo import IdxFormatError

LOG = logging.getLogger("logitcal.zoo.datasets")

SYNTHETIC_SHAPES = "synthetic-shapes"
IDX_FILES = "idx-files"

# IDX magic numbers: 0x00 0x00 <type> <ndim>
IDX_UBYTE = 0x08
IDX_FLOAT32 = 0x0D
IDX_IMAGES_MAGIC = 0x00000803
IDX_FLOAT_IMAGES_MAGIC = 0x00000D03
IDX_LABELS_MAGIC = 0x00000801

SHAPE_NAMES = ("hbar", "vbar", "diagonal", "antidiagonal", "disk", "ring",
               "cross", "xcross", "checker", "frame", "square", "triangle")

# standard deviation of the additive pixel noise
DEFAULT_NOISE = 24.0


class DatasetSpec(object):
    """
    Declarative description of a dataset.
    """

    def __init__(self, source=SYNTHETIC_SHAPES, class_count=10, image_shape=(1, 32, 32),
                 per_class=200, test_fraction=0.2, seed=0, noise=DEFAULT_NOISE,
                 idx_images=None, idx_labels=None):
        self.source = source
        self.class_count = int(class_count)
        self.image_shape = tuple(int(d) for d in image_shape)
        self.per_class = int(per_class)
        self.test_fraction = float(test_fraction)
        self.seed = int(seed)
        self.noise = float(noise)
        self.idx_images = idx_images
        self.idx_labels = idx_labels
        self.validate()

    def __repr__(self):
        return "DatasetSpec(%s, N=%d, shape=%r, per_class=%d, seed=%d)" % (
            self.source, self.class_count, self.image_shape, self.per_class, self.seed)

    def validate(self):
        if self.source not in (SYNTHETIC_SHAPES, IDX_FILES):
            raise ConfigError("unknown dataset source %r" % self.source)
        if self.source == SYNTHETIC_SHAPES:
            if not 2 <= self.class_count <= len(SHAPE_NAMES):
                raise ConfigError("synthetic-shapes supports 2..%d classes, got %d" % (
                    len(SHAPE_NAMES), self.class_count))
            if len(self.image_shape) != 3 or self.image_shape[0] != 1:
                raise ConfigError("synthetic-shapes renders (1, H, W) images")
            if self.per_class < 1:
                raise ConfigError("per_class must be positive")
        elif not (self.idx_images and self.idx_labels):
            raise ConfigError("idx-files source needs idx_images and idx_labels paths")
        if not 0.0 <= self.test_fraction < 1.0:
            raise ConfigError("test_fraction must lie in [0, 1)")

    def to_dict(self):
        return dict(source=self.source, class_count=self.class_count,
                    image_shape=list(self.image_shape), per_class=self.per_class,
                    test_fraction=self.test_fraction, seed=self.seed, noise=self.noise,
                    idx_images=self.idx_images, idx_labels=self.idx_labels)


class Dataset(object):
    """
    Images (n, C, H, W) in [0, 255] and integer labels in [0, N).
    """

    def __init__(self, images, labels, class_count=None):
        self.images = np.asarray(images, dtype=DTYPE)
        self.labels = np.asarray(labels, dtype=np.int64)
        if self.images.ndim != 4 or len(self.images) != len(self.labels):
            raise ConfigError("dataset needs (n, C, H, W) images and n labels, got %r / %r" % (
                self.images.shape, self.labels.shape))
        if class_count is None:
            class_count = int(self.labels.max()) + 1 if len(self.labels) else 0
        self.class_count = int(class_count)
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.class_count):
            raise ConfigError("labels must lie in [0, %d)" % self.class_count)

    def __len__(self):
        return len(self.labels)

    def __repr__(self):
        return "Dataset(n=%d, N=%d, shape=%r)" % (len(self), self.class_count, self.image_shape)

    @property
    def image_shape(self):
        return tuple(self.images.shape[1:])

    def subset(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.images[indices], self.labels[indices], self.class_count)

    def split(self, test_fraction, seed=0):
        """
        Deterministic train/test split.
        :return: (train, test)
        """
        perm = np.random.default_rng(seed).permutation(len(self))
        n_test = int(round(len(self) * test_fraction))
        return self.subset(np.sort(perm[n_test:])), self.subset(np.sort(perm[:n_test]))

    def label_histogram(self):
        return np.bincount(self.labels, minlength=self.class_count)

    def checksum(self):
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.images).tobytes())
        h.update(np.ascontiguousarray(self.labels).tobytes())
        return h.hexdigest()


def _render_shape(name, h, w, cy, cx, r, t):
    y, x = np.ogrid[0:h, 0:w]
    dy = y - cy
    dx = x - cx
    dist = np.sqrt(dy * dy + dx * dx)
    u = (dy - dx) / np.sqrt(2.0)
    v = (dy + dx) / np.sqrt(2.0)
    hbar = (np.abs(dy) < t) & (np.abs(dx) < r)
    vbar = (np.abs(dx) < t) & (np.abs(dy) < r)
    diag = (np.abs(u) < t) & (np.abs(v) < r)
    anti = (np.abs(v) < t) & (np.abs(u) < r)
    box = (np.abs(dy) < r) & (np.abs(dx) < r)
    if name == "hbar":
        return hbar
    if name == "vbar":
        return vbar
    if name == "diagonal":
        return diag
    if name == "antidiagonal":
        return anti
    if name == "disk":
        return dist < r
    if name == "ring":
        return np.abs(dist - r) < t
    if name == "cross":
        return hbar | vbar
    if name == "xcross":
        return diag | anti
    if name == "checker":
        cell = max(2.0, r / 2.0)
        parity = (np.floor((dy + r) / cell) + np.floor((dx + r) / cell)) % 2 == 0
        return box & parity
    if name == "frame":
        m = np.maximum(np.abs(dy), np.abs(dx))
        return (m < r) & (m >= r - t)
    if name == "square":
        return box
    # triangle pointing up
    return (dy < r) & (dy > -r) & (np.abs(dx) < (dy + r) / 2.0)


def generate_synthetic_dataset(spec):
    """
    Procedural image set: one geometric primitive per class at a random
    position and scale plus Gaussian pixel noise, quantized to integers
    in [0, 255]. Same spec, same bits.
    :param spec: DatasetSpec with source synthetic-shapes
    :return: Dataset with class_count * per_class images
    """
    if spec.source != SYNTHETIC_SHAPES:
        raise ConfigError("generate_synthetic_dataset needs a synthetic-shapes spec")
    _, h, w = spec.image_shape
    rng = np.random.default_rng(spec.seed)
    labels = rng.permutation(np.repeat(np.arange(spec.class_count), spec.per_class))
    images = np.empty((len(labels), 1, h, w), dtype=DTYPE)
    side = float(min(h, w))
    for i, label in enumerate(labels):
        cy = rng.uniform(0.35, 0.65) * h
        cx = rng.uniform(0.35, 0.65) * w
        r = rng.uniform(0.18, 0.3) * side
        t = max(1.5, 0.22 * r)
        fg = rng.uniform(160.0, 255.0)
        bg = rng.uniform(0.0, 60.0)
        mask = _render_shape(SHAPE_NAMES[label], h, w, cy, cx, r, t)
        img = bg + mask * (fg - bg) + rng.normal(0.0, spec.noise, size=(h, w))
        images[i, 0] = np.rint(np.clip(img, 0.0, 255.0))
    ds = Dataset(images, labels, spec.class_count)
    LOG.info("Generated synthetic-shapes dataset: %r (sha256 %s)", ds, ds.checksum()[:12])
    return ds


def _read_idx(path, expected_magics):
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < 4:
        raise IdxFormatError("%s: truncated header" % path)
    magic = struct.unpack(">I", raw[:4])[0]
    if magic not in expected_magics:
        raise IdxFormatError("%s: bad magic, expected %s, got 0x%08X" % (
            path, " or ".join("0x%08X" % m for m in expected_magics), magic))
    ndim = magic & 0xFF
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise IdxFormatError("%s: truncated header" % path)
    dims = struct.unpack(">%dI" % ndim, raw[4:header])
    dtype = np.dtype(">f4") if (magic >> 8) & 0xFF == IDX_FLOAT32 else np.dtype("u1")
    count = int(np.prod(dims))
    payload = raw[header:]
    if len(payload) < count * dtype.itemsize:
        raise IdxFormatError("%s: truncated payload, expected %d bytes, got %d" % (
            path, count * dtype.itemsize, len(payload)))
    return np.frombuffer(payload, dtype=dtype, count=count).reshape(dims)


def ingest_idx(paths, class_count=None):
    """
    Read an IDX image file and its label file.
    :param paths: (images_path, labels_path)
    :return: Dataset with (n, 1, H, W) images
    """
    images_path, labels_path = paths
    images = _read_idx(images_path, (IDX_IMAGES_MAGIC, IDX_FLOAT_IMAGES_MAGIC))
    labels = _read_idx(labels_path, (IDX_LABELS_MAGIC,))
    if len(images) != len(labels):
        raise IdxFormatError("count mismatch: %d images in %s, %d labels in %s" % (
            len(images), images_path, len(labels), labels_path))
    ds = Dataset(images.astype(DTYPE)[:, np.newaxis], labels.astype(np.int64), class_count)
    LOG.info("Ingested %r from %s", ds, images_path)
    return ds


def write_idx_images(path, images, as_float=False):
    """
    Write (n, 1, H, W) or (n, H, W) images as IDX. Unsigned-byte output
    requires integer pixel values in [0, 255].
    """
    images = np.asarray(images)
    if images.ndim == 4:
        if images.shape[1] != 1:
            raise ConfigError("IDX export supports single-channel images only")
        images = images[:, 0]
    if as_float:
        magic, data = IDX_FLOAT_IMAGES_MAGIC, images.astype(">f4")
    else:
        if np.any(images != np.rint(images)) or images.min(initial=0) < 0 or images.max(initial=0) > 255:
            raise ConfigError("unsigned-byte IDX needs integer pixels in [0, 255]; use as_float")
        magic, data = IDX_IMAGES_MAGIC, images.astype("u1")
    with open(path, "wb") as f:
        f.write(struct.pack(">I", magic))
        f.write(struct.pack(">%dI" % data.ndim, *data.shape))
        f.write(data.tobytes())


def write_idx_labels(path, labels):
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 0 or labels.max() > 255):
        raise ConfigError("IDX labels are unsigned bytes, got values in [%s, %s]" % (labels.min(), labels.max()))
    labels = labels.astype("u1")
    with open(path, "wb") as f:
        f.write(struct.pack(">II", IDX_LABELS_MAGIC, len(labels)))
        f.write(labels.tobytes())


def export_idx(dataset, prefix):
    """
    Export a dataset as <prefix>-images.idx3-ubyte / <prefix>-labels.idx1-ubyte.
    :return: (images_path, labels_path)
    """
    images_path = "%s-images.idx3-ubyte" % prefix
    labels_path = "%s-labels.idx1-ubyte" % prefix
    d = os.path.dirname(images_path)
    if d:
        os.makedirs(d, exist_ok=True)
    write_idx_images(images_path, dataset.images)
    write_idx_labels(labels_path, dataset.labels)
    LOG.info("Exported %r to %s", dataset, images_path)
    return images_path, labels_path


def load_dataset(spec):
    """
    Materialize a DatasetSpec.
    """
    if spec.source == SYNTHETIC_SHAPES:
        return generate_synthetic_dataset(spec)
    return ingest_idx((spec.idx_images, spec.idx_labels), spec.class_count)
