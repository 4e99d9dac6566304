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
Desk-scale classifiers used as surrogates and victims.
"""
import numpy as np
from logitcal import LogitcalError
from logitcal.tensorcore import ShapeMismatchError
from logitcal.tensorcore.layers import Dense


class UnknownArchitectureError(LogitcalError):
    pass


class TrainingDivergedError(LogitcalError):
    pass


class IdxFormatError(LogitcalError):
    pass


class ClassifierModel(object):
    """
    Immutable layer stack. The last layer is dense; its parameters are the
    class weights W (N x D) and biases b used by the calibrated losses.
    """

    def __init__(self, arch_id, layers, input_shape):
        self.arch_id = str(arch_id)
        self.layers = tuple(layers)
        self.input_shape = tuple(int(d) for d in input_shape)
        if not self.layers or not isinstance(self.layers[-1], Dense):
            raise ShapeMismatchError("model %r must end with a dense layer" % self.arch_id)
        # shape inference doubles as consistency check of all parameters
        shape = self.input_shape
        for i, layer in enumerate(self.layers):
            try:
                shape = layer.output_shape(shape)
            except ShapeMismatchError as ex:
                raise ShapeMismatchError("layer %d (%s) of %r: %s" % (
                    i, layer.kind, self.arch_id, ex))
        if self.class_count < 2:
            raise ShapeMismatchError("model %r needs at least 2 classes" % self.arch_id)

    def __repr__(self):
        return "ClassifierModel(%s, N=%d, D=%d, layers=%d)" % (
            self.arch_id, self.class_count, self.feature_dim, len(self.layers))

    @property
    def final_weights(self):
        return self.layers[-1].weight

    @property
    def final_bias(self):
        return self.layers[-1].bias

    @property
    def class_count(self):
        return self.final_weights.shape[0]

    @property
    def feature_dim(self):
        return self.final_weights.shape[1]

    @property
    def dtype(self):
        return self.final_weights.dtype

    def layer_kinds(self):
        return [layer.kind for layer in self.layers]

    def parameters(self):
        """
        :return: list (per layer) of parameter array lists
        """
        return [layer.parameters() for layer in self.layers]

    def with_parameters(self, params):
        """
        New model with the same topology and the given parameters.
        :param params: nested list shaped like parameters()
        """
        layers = [layer.with_parameters(p) if layer.param_names else layer
                  for layer, p in zip(self.layers, params)]
        return ClassifierModel(self.arch_id, layers, self.input_shape)

    def astype(self, dtype):
        """
        Copy of the model computing in another float width.
        """
        layers = [layer.astype(dtype) if layer.param_names else layer
                  for layer in self.layers]
        return ClassifierModel(self.arch_id, layers, self.input_shape)

    def parameter_count(self):
        return int(sum(np.size(p) for ps in self.parameters() for p in ps))
