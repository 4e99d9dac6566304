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
import os
import struct
import unittest
import numpy as np

from logitcal import ConfigError
from logitcal.test.base import ToyNetTestCase
from logitcal.tensorcore.layers import CONV2D, Dense, Flatten
from logitcal.tensorcore.tape import forward
from logitcal.zoo import ClassifierModel, IdxFormatError, TrainingDivergedError, UnknownArchitectureError
from logitcal.zoo.architectures import build_architecture, list_architectures
from logitcal.zoo.datasets import (Dataset, DatasetSpec, IDX_IMAGES_MAGIC, IDX_LABELS_MAGIC, export_idx,
                                   generate_synthetic_dataset, ingest_idx, write_idx_images, write_idx_labels)
from logitcal.zoo.training import TrainConfig, evaluate_accuracy, pairwise_agreement, predict, train_classifier
from logitcal.zoo.weights import (BadMagicError, LayerDescriptorError, TruncatedFileError, VersionMismatchError,
                                  expected_file_size, load_weights, save_weights)


class testArchitectures(ToyNetTestCase):

    def testZooIsDiverse(self):
        self.assertEqual(list_architectures(), ["cnn-a", "cnn-b", "cnn-c", "mlp-d"])
        models = [build_architecture(a) for a in list_architectures()]
        kinds = [tuple(m.layer_kinds()) for m in models]
        self.assertEqual(len(set(kinds)), len(kinds))
        self.assertNotEqual(len(models[0].layers), len(models[1].layers))
        self.assertNotIn(CONV2D, build_architecture("mlp-d").layer_kinds())

    def testUnknownArchitecture(self):
        with self.assertRaises(UnknownArchitectureError):
            build_architecture("resnet-50")

    def testSeededInitialization(self):
        a = build_architecture("cnn-c", seed=4)
        b = build_architecture("cnn-c", seed=4)
        c = build_architecture("cnn-c", seed=5)
        self.assertTrue(all(np.array_equal(p, q) for ps, qs in zip(a.parameters(), b.parameters())
                            for p, q in zip(ps, qs)))
        self.assertFalse(np.array_equal(a.final_weights, c.final_weights))

    def testLogitFeatureDecomposition(self):
        x = self.randomImage((1, 32, 32))
        for arch in list_architectures():
            m = build_architecture(arch)
            self.assertEqual(m.class_count, 10)
            logits, feature, _ = forward(m, x)
            np.testing.assert_allclose(logits, m.final_weights @ feature + m.final_bias, rtol=1e-5, atol=1e-5)

    def testSmallInputs(self):
        for arch in list_architectures():
            m = build_architecture(arch, class_count=4, input_shape=(1, 16, 16))
            self.assertEqual(forward(m, self.randomImage((1, 16, 16)))[0].shape, (4,))

    def testModelNeedsFinalDense(self):
        with self.assertRaises(Exception):
            ClassifierModel("x", [Flatten()], (1, 2, 2))


class testDatasets(ToyNetTestCase):

    def testSyntheticSize(self):
        ds = generate_synthetic_dataset(DatasetSpec())
        self.assertEqual(len(ds), 2000)
        self.assertEqual(ds.image_shape, (1, 32, 32))
        np.testing.assert_array_equal(ds.label_histogram(), [200] * 10)
        self.assertGreaterEqual(ds.images.min(), 0)
        self.assertLessEqual(ds.images.max(), 255)
        np.testing.assert_array_equal(ds.images, np.rint(ds.images))

    def testSyntheticDeterminism(self):
        spec = DatasetSpec(class_count=4, image_shape=(1, 16, 16), per_class=5, seed=3)
        self.assertEqual(generate_synthetic_dataset(spec).checksum(), generate_synthetic_dataset(spec).checksum())
        other = DatasetSpec(class_count=4, image_shape=(1, 16, 16), per_class=5, seed=4)
        self.assertNotEqual(generate_synthetic_dataset(spec).checksum(), generate_synthetic_dataset(other).checksum())

    def testSpecValidation(self):
        with self.assertRaises(ConfigError):
            DatasetSpec(class_count=13)
        with self.assertRaises(ConfigError):
            DatasetSpec(source="imagenet")
        with self.assertRaises(ConfigError):
            DatasetSpec(source="idx-files")

    def testSplit(self):
        ds = generate_synthetic_dataset(DatasetSpec(class_count=4, image_shape=(1, 16, 16), per_class=5))
        train, test = ds.split(0.2, seed=1)
        self.assertEqual((len(train), len(test)), (16, 4))
        again = ds.split(0.2, seed=1)[1]
        np.testing.assert_array_equal(test.labels, again.labels)

    def _writeFixture(self, d, n=4, magic=IDX_IMAGES_MAGIC, labels=None, truncate=0):
        images_path = os.path.join(d, "img.idx")
        labels_path = os.path.join(d, "lbl.idx")
        pixels = (np.arange(n * 28 * 28) % 256).astype(np.uint8).tobytes()
        with open(images_path, "wb") as f:
            f.write(struct.pack(">IIII", magic, n, 28, 28))
            f.write(pixels[:len(pixels) - truncate])
        labels = list(range(n)) if labels is None else labels
        with open(labels_path, "wb") as f:
            f.write(struct.pack(">II", IDX_LABELS_MAGIC, len(labels)))
            f.write(bytes(labels))
        return images_path, labels_path

    def testIngestFixture(self):
        ds = ingest_idx(self._writeFixture(self.createTmpDir()))
        self.assertEqual(len(ds), 4)
        self.assertEqual(ds.image_shape, (1, 28, 28))
        self.assertEqual(float(ds.images[0, 0, 0, 5]), 5.0)
        np.testing.assert_array_equal(ds.labels, [0, 1, 2, 3])

    def testIngestWrongMagic(self):
        paths = self._writeFixture(self.createTmpDir(), magic=0x00000802)
        with self.assertRaises(IdxFormatError) as ctx:
            ingest_idx(paths)
        self.assertIn("0x00000803", str(ctx.exception))
        self.assertIn("0x00000802", str(ctx.exception))

    def testIngestTruncated(self):
        with self.assertRaises(IdxFormatError):
            ingest_idx(self._writeFixture(self.createTmpDir(), truncate=10))

    def testIngestCountMismatch(self):
        with self.assertRaises(IdxFormatError):
            ingest_idx(self._writeFixture(self.createTmpDir(), labels=[0, 1, 2]))

    def testExportRoundTrip(self):
        spec = DatasetSpec(class_count=4, image_shape=(1, 16, 16), per_class=3)
        ds = generate_synthetic_dataset(spec)
        paths = export_idx(ds, os.path.join(self.createTmpDir(), "data", "train"))
        back = ingest_idx(paths, class_count=4)
        np.testing.assert_array_equal(back.images, ds.images)
        np.testing.assert_array_equal(back.labels, ds.labels)

    def testFloatImages(self):
        d = self.createTmpDir()
        images = np.random.default_rng(0).uniform(0, 255, (3, 1, 8, 8)).astype(np.float32)
        write_idx_images(os.path.join(d, "adv.idx"), images, as_float=True)
        write_idx_labels(os.path.join(d, "adv-labels.idx"), [2, 0, 1])
        back = ingest_idx((os.path.join(d, "adv.idx"), os.path.join(d, "adv-labels.idx")))
        np.testing.assert_array_equal(back.images, images)
        with self.assertRaises(ConfigError):
            write_idx_images(os.path.join(d, "bad.idx"), images)

    def testLabelsOutOfByteRange(self):
        d = self.createTmpDir()
        for labels in ([0, 256], [-1, 3]):
            with self.assertRaises(ConfigError):
                write_idx_labels(os.path.join(d, "bad-labels.idx"), labels)
        path = os.path.join(d, "edge-labels.idx")
        write_idx_labels(path, [0, 255])
        with open(path, "rb") as f:
            self.assertEqual(f.read(), struct.pack(">II", IDX_LABELS_MAGIC, 2) + bytes([0, 255]))


class testWeights(ToyNetTestCase):

    def testRoundTripAllArchitectures(self):
        d = self.createTmpDir()
        x = self.randomImage((1, 32, 32))
        for arch in list_architectures():
            m = build_architecture(arch, seed=2)
            path = os.path.join(d, "%s.nnwt" % arch)
            save_weights(m, path)
            self.assertEqual(os.path.getsize(path), expected_file_size(m))
            back = load_weights(path)
            self.assertEqual(back.arch_id, arch)
            self.assertEqual(back.layer_kinds(), m.layer_kinds())
            self.assertEqual(forward(back, x)[0].tobytes(), forward(m, x)[0].tobytes())

    def testLogRecordsKeepArguments(self):
        path = os.path.join(self.createTmpDir(), "m.nnwt")
        m = build_architecture("mlp-d")
        with self.assertLogs("logitcal.zoo.weights", level="INFO") as cm:
            save_weights(m, path)
            load_weights(path)
        self.assertEqual(len(cm.records), 2)
        for record in cm.records:
            self.assertEqual(record.args[-1], path)
            self.assertIn(path, record.getMessage())

    def _saved(self):
        path = os.path.join(self.createTmpDir(), "m.nnwt")
        save_weights(build_architecture("cnn-a"), path)
        with open(path, "rb") as f:
            return path, bytearray(f.read())

    def _rewrite(self, path, raw):
        with open(path, "wb") as f:
            f.write(bytes(raw))

    def testBadMagic(self):
        path, raw = self._saved()
        raw[0:4] = b"XXXX"
        self._rewrite(path, raw)
        with self.assertRaises(BadMagicError):
            load_weights(path)

    def testVersionMismatch(self):
        path, raw = self._saved()
        raw[4:8] = struct.pack("<I", 99)
        self._rewrite(path, raw)
        with self.assertRaises(VersionMismatchError):
            load_weights(path)

    def testTruncated(self):
        path, raw = self._saved()
        self._rewrite(path, raw[:-7])
        with self.assertRaises(TruncatedFileError):
            load_weights(path)

    def testUnknownLayerTag(self):
        path, raw = self._saved()
        # first layer tag follows magic, version, arch id, input shape and layer count
        pos = 4 + 4 + 2 + len("cnn-a") + 1 + 3 * 4 + 4
        raw[pos] = 200
        self._rewrite(path, raw)
        with self.assertRaises(LayerDescriptorError):
            load_weights(path)

    def testTrailingBytes(self):
        path, raw = self._saved()
        self._rewrite(path, raw + b"\x00\x00")
        with self.assertRaises(LayerDescriptorError):
            load_weights(path)


class testTraining(ToyNetTestCase):

    def _data(self, per_class=6):
        return generate_synthetic_dataset(DatasetSpec(class_count=4, image_shape=(1, 16, 16), per_class=per_class))

    def testOverfitOneBatch(self):
        ds = self._data(per_class=2)
        self.assertEqual(len(ds), 8)
        m = build_architecture("mlp-d", class_count=4, input_shape=(1, 16, 16), seed=0)
        trained = train_classifier(m, ds, TrainConfig(epochs=200, batch_size=8, learning_rate=0.01))
        self.assertEqual(evaluate_accuracy(trained, ds), 1.0)

    def testSeedReproducibility(self):
        ds = self._data()
        cfg = TrainConfig(epochs=1, batch_size=8, seed=7)
        m = build_architecture("cnn-a", class_count=4, input_shape=(1, 16, 16))
        a = train_classifier(m, ds, cfg)
        b = train_classifier(m, ds, cfg)
        for ps, qs in zip(a.parameters(), b.parameters()):
            for p, q in zip(ps, qs):
                self.assertEqual(float(np.max(np.abs(p - q))) if p.size else 0.0, 0.0)
        # the untrained model is left untouched
        self.assertFalse(np.array_equal(a.final_weights, m.final_weights))

    def testDivergence(self):
        ds = self._data()
        m = ClassifierModel("lin", [Flatten(), Dense(np.zeros((4, 256), dtype=np.float32), np.zeros(4, dtype=np.float32))], (1, 16, 16))
        with np.errstate(all="ignore"):
            with self.assertRaises(TrainingDivergedError) as ctx:
                train_classifier(m, ds, TrainConfig(epochs=3, batch_size=8, learning_rate=1e36))
        self.assertIn("smaller learning rate", str(ctx.exception))

    def testConfigValidation(self):
        with self.assertRaises(ConfigError):
            TrainConfig(epochs=0)
        with self.assertRaises(ConfigError):
            TrainConfig(learning_rate=-1)

    def testPairwiseAgreement(self):
        ds = self._data(per_class=2)
        models = [build_architecture(a, class_count=4, input_shape=(1, 16, 16)) for a in ("cnn-a", "mlp-d")]
        agree = pairwise_agreement(models, ds.images)
        self.assertEqual(agree.shape, (2, 2))
        np.testing.assert_array_equal(np.diag(agree), [1.0, 1.0])
        self.assertAlmostEqual(agree[0, 1], float(np.mean(predict(models[0], ds.images) == predict(models[1], ds.images))))

    def testEmptyDatasetRejected(self):
        m = build_architecture("mlp-d", class_count=4, input_shape=(1, 16, 16))
        empty = Dataset(np.zeros((0, 1, 16, 16)), np.zeros(0), 4)
        with self.assertRaises(ConfigError):
            train_classifier(m, empty, TrainConfig())


if __name__ == '__main__':
    unittest.main()
