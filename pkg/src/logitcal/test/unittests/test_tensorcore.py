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
import unittest
import numpy as np

from logitcal.test.base import ToyNetTestCase
from logitcal.tensorcore import NonFiniteTensorError, ShapeMismatchError, TapeMismatchError, KernelShapeError
from logitcal.tensorcore.layers import Dense, Relu, Conv2d, MaxPool2d, Flatten
from logitcal.tensorcore.ops import depthwise_convolve, finite_difference_gradient
from logitcal.tensorcore.tape import backward, backward_to_input, backward_to_weights, forward
from logitcal.zoo import ClassifierModel


def _rel_err(a, b):
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(a) + np.linalg.norm(b), 1e-12))


class testForward(ToyNetTestCase):

    def testIdentityDense(self):
        m = ClassifierModel("id", [Dense(np.eye(3), np.zeros(3))], (3,))
        logits, feature, _ = forward(m, np.array([1.0, 2.0, 3.0], dtype=np.float32))
        np.testing.assert_array_equal(logits, [1, 2, 3])
        np.testing.assert_array_equal(feature, [1, 2, 3])

    def testRelu(self):
        y, _ = Relu().forward(np.array([[-1.0, 0.0, 2.0]]))
        np.testing.assert_array_equal(y[0], [0, 0, 2])

    def testScalarLoopReference(self):
        """
        Two-layer toy net against an explicit scalar loop.
        """
        m = self.createDenseNet(sizes=(4, 3, 2), seed=0, dtype=np.float64)
        x = np.array([0.5, -1.0, 2.0, 0.25])
        w1, b1 = m.layers[0].parameters()
        w2, b2 = m.layers[2].parameters()
        hidden = []
        for j in range(3):
            s = b1[j]
            for i in range(4):
                s += w1[j, i] * x[i]
            hidden.append(max(s, 0.0))
        expected = []
        for k in range(2):
            s = b2[k]
            for j in range(3):
                s += w2[k, j] * hidden[j]
            expected.append(s)
        logits, feature, _ = forward(m, x)
        np.testing.assert_allclose(logits, expected, rtol=1e-12)
        np.testing.assert_allclose(feature, hidden, rtol=1e-12)

    def testDeterminism(self):
        m = self.createConvNet()
        x = self.randomImage()
        a = forward(m, x)[0]
        b = forward(m, x)[0]
        self.assertEqual(a.tobytes(), b.tobytes())

    def testBatchMatchesSingle(self):
        m = self.createConvNet()
        xs = np.stack([self.randomImage(seed=s) for s in range(3)])
        batch = forward(m, xs)[0]
        for i in range(3):
            np.testing.assert_allclose(batch[i], forward(m, xs[i])[0], rtol=1e-5, atol=1e-5)

    def testFeatureDecomposition(self):
        m = self.createConvNet()
        logits, feature, _ = forward(m, self.randomImage())
        np.testing.assert_allclose(logits, m.final_weights @ feature + m.final_bias, atol=1e-5)

    def testReplay(self):
        m = self.createConvNet(pool="avg")
        _, _, tape = forward(m, self.randomImage())
        self.assertEqual(tape.replay().tobytes(), tape.output.tobytes())

    def testShapeMismatchNamesLayer(self):
        m = self.createDenseNet(sizes=(6, 5, 4))
        with self.assertRaises(ShapeMismatchError) as ctx:
            forward(m, np.zeros(5, dtype=np.float32))
        self.assertIn("toy-dense", str(ctx.exception))
        with self.assertRaises(ShapeMismatchError) as ctx:
            ClassifierModel("bad", [Flatten(), Dense(np.zeros((2, 5)), np.zeros(2))], (1, 2, 2))
        self.assertIn("layer 1 (dense)", str(ctx.exception))

    def testNonFiniteInput(self):
        m = self.createDenseNet()
        x = np.zeros(6, dtype=np.float32)
        x[2] = np.nan
        with self.assertRaises(NonFiniteTensorError):
            forward(m, x)

    def testPoolTiling(self):
        with self.assertRaises(ShapeMismatchError):
            MaxPool2d(2).output_shape((1, 5, 5))


class testBackward(ToyNetTestCase):

    def testDenseTransposeRule(self):
        m = ClassifierModel("d", [Dense(np.array([[2.0, 0.0], [0.0, 3.0]]), np.zeros(2))], (2,))
        _, _, tape = forward(m, np.array([1.0, 1.0]))
        np.testing.assert_array_equal(backward_to_input(tape, np.array([1.0, 1.0])), [2, 3])

    def testReluMask(self):
        m = ClassifierModel("r", [Relu(), Dense(np.eye(2), np.zeros(2))], (2,))
        _, _, tape = forward(m, np.array([-1.0, 2.0]))
        np.testing.assert_array_equal(backward_to_input(tape, np.array([5.0, 5.0])), [0, 5])

    def testWeightOuterProduct(self):
        m = ClassifierModel("d", [Dense(np.eye(2), np.zeros(2))], (2,))
        _, _, tape = forward(m, np.array([1.0, 2.0]))
        grads = backward_to_weights(tape, np.array([1.0, 0.0]))
        dw, db = grads[0]
        np.testing.assert_array_equal(dw, [[1, 2], [0, 0]])
        np.testing.assert_array_equal(db, [1, 0])

    def testLinearity(self):
        m = self.createConvNet()
        _, _, tape = forward(m, self.randomImage())
        rng = np.random.default_rng(1)
        g1 = rng.normal(size=4).astype(np.float32)
        g2 = rng.normal(size=4).astype(np.float32)
        lhs = backward_to_input(tape, 2.0 * g1 - 0.5 * g2)
        rhs = 2.0 * backward_to_input(tape, g1) - 0.5 * backward_to_input(tape, g2)
        np.testing.assert_allclose(lhs, rhs, atol=1e-5)

    def testFeatureGradientEntersAtFinalLayer(self):
        m = self.createConvNet()
        _, feature, tape = forward(m, self.randomImage())
        d_logits = np.ones(4, dtype=np.float32)
        via_feature = backward(tape, d_feature=d_logits @ m.final_weights)
        np.testing.assert_allclose(via_feature, backward_to_input(tape, d_logits), rtol=1e-5, atol=1e-6)

    def testTapeMismatch(self):
        m = self.createDenseNet()
        _, _, tape = forward(m, np.ones(6, dtype=np.float32))
        with self.assertRaises(TapeMismatchError):
            backward_to_input(tape, np.ones(3))
        with self.assertRaises(TapeMismatchError):
            backward(tape)

    def testInputGradientMatchesFiniteDifferences(self):
        """
        Reverse mode against central differences on float64 toy nets.
        """
        for seed in range(20):
            m = self.createConvNet(seed=seed, dtype=np.float64, pool="max" if seed % 2 else "avg")
            x = self.randomImage(seed=100 + seed).astype(np.float64)
            rng = np.random.default_rng(seed)
            g = rng.normal(size=4)
            _, _, tape = forward(m, x)
            analytic = backward_to_input(tape, g)
            numeric = finite_difference_gradient(m, x, lambda z, f: float(z @ g), h=1e-4)
            self.assertLess(_rel_err(analytic, numeric), 1e-3)

    def testDenseNetFiniteDifferences(self):
        for seed in range(100):
            m = self.createDenseNet(sizes=(5, 7, 3), seed=seed, dtype=np.float64)
            x = np.random.default_rng(seed).normal(size=5)
            g = np.random.default_rng(seed + 1).normal(size=3)
            _, _, tape = forward(m, x)
            analytic = backward_to_input(tape, g)
            numeric = finite_difference_gradient(m, x, lambda z, f: float(z @ g), h=1e-5)
            self.assertLess(_rel_err(analytic, numeric), 1e-3)

    def testWeightGradientMatchesFiniteDifferences(self):
        m = self.createDenseNet(sizes=(3, 4, 2), seed=3, dtype=np.float64)
        x = np.array([0.3, -0.7, 1.1])
        g = np.array([1.0, -2.0])
        _, _, tape = forward(m, x)
        dw = backward_to_weights(tape, g)[0][0]
        w = m.layers[0].weight.copy()
        h = 1e-6
        for i in range(w.shape[0]):
            for j in range(w.shape[1]):
                up = w.copy()
                up[i, j] += h
                down = w.copy()
                down[i, j] -= h
                params = m.parameters()
                params[0] = [up, m.layers[0].bias]
                f_up = forward(m.with_parameters(params), x)[0] @ g
                params[0] = [down, m.layers[0].bias]
                f_down = forward(m.with_parameters(params), x)[0] @ g
                self.assertAlmostEqual(dw[i, j], (f_up - f_down) / (2 * h), places=5)


class testOps(unittest.TestCase):

    def testImpulseResponse(self):
        img = np.zeros((2, 7, 7), dtype=np.float32)
        img[:, 3, 3] = 1.0
        k = np.arange(9, dtype=np.float32).reshape(3, 3) / 36.0
        out = depthwise_convolve(img, k)
        for c in range(2):
            np.testing.assert_allclose(out[c, 2:5, 2:5], k, rtol=1e-6)
            self.assertAlmostEqual(float(out[c].sum()), 1.0, places=5)

    def testIdentityKernel(self):
        img = np.random.default_rng(0).normal(size=(3, 5, 6)).astype(np.float32)
        np.testing.assert_array_equal(depthwise_convolve(img, np.ones((1, 1))), img)

    def testUniformInterior(self):
        img = np.full((1, 9, 9), 7.0, dtype=np.float32)
        k = np.full((3, 3), 1.0 / 9.0)
        out = depthwise_convolve(img, k)
        np.testing.assert_allclose(out[0, 1:-1, 1:-1], 7.0, rtol=1e-6)
        # zero padding at the border
        self.assertLess(out[0, 0, 0], 7.0)

    def testEvenKernelRejected(self):
        with self.assertRaises(KernelShapeError):
            depthwise_convolve(np.zeros((1, 4, 4)), np.ones((2, 2)))

    def testQuadraticFiniteDifference(self):
        g = finite_difference_gradient(None, np.array([3.0]), lambda v: float(v[0] ** 2), h=1e-3)
        self.assertAlmostEqual(float(g[0]), 6.0, delta=1e-5)

    def testZeroFunction(self):
        g = finite_difference_gradient(None, np.ones((2, 3)), lambda v: 0.0)
        np.testing.assert_array_equal(g, np.zeros((2, 3)))

    def testBadStep(self):
        with self.assertRaises(ValueError):
            finite_difference_gradient(None, np.ones(2), lambda v: 0.0, h=0.0)

    def testConvStrideShape(self):
        conv = Conv2d(np.zeros((2, 1, 3, 3)), np.zeros(2), stride=2, pad=1)
        self.assertEqual(conv.output_shape((1, 8, 8)), (2, 4, 4))


if __name__ == '__main__':
    unittest.main()
