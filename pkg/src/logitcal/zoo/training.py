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
SGD-with-momentum training of zoo models on the cross-entropy objective,
plus the evaluation helpers used to check the zoo.
"""
import logging
import numpy as np
from scipy.special import log_softmax
from logitcal import ConfigError
from logitcal.tensorcore.tape import forward, backward_to_weights
from logitcal.zoo import TrainingDivergedError

LOG = logging.getLogger("logitcal.zoo.training")
LOG.setLevel(logging.DEBUG)

EVAL_BATCH_SIZE = 256


class TrainConfig(object):

    def __init__(self, epochs=8, batch_size=32, learning_rate=0.02, momentum=0.9, seed=0):
        self.epochs = int(epochs)
        self.batch_size = int(batch_size)
        self.learning_rate = float(learning_rate)
        self.momentum = float(momentum)
        self.seed = int(seed)
        self.validate()

    def __repr__(self):
        return "TrainConfig(epochs=%d, batch_size=%d, lr=%g, momentum=%g, seed=%d)" % (
            self.epochs, self.batch_size, self.learning_rate, self.momentum, self.seed)

    def validate(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be positive")
        if not self.learning_rate > 0 or not self.momentum > 0:
            raise ConfigError("learning_rate and momentum must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")

    def to_dict(self):
        return dict(epochs=self.epochs, batch_size=self.batch_size,
                    learning_rate=self.learning_rate, momentum=self.momentum, seed=self.seed)


def batch_cross_entropy(logits, labels):
    """
    Mean CE over a batch and its gradient w.r.t. the logits.
    """
    logp = log_softmax(logits, axis=1)
    n = len(labels)
    loss = -float(np.mean(logp[np.arange(n), labels]))
    d = np.exp(logp)
    d[np.arange(n), labels] -= 1
    return loss, (d / n).astype(logits.dtype)


def train_classifier(model, dataset, cfg):
    """
    Train a model with mini-batch SGD and momentum.
    The seed fixes batch order, so equal configs give equal weights.
    :param model: untrained ClassifierModel
    :param dataset: training Dataset
    :param cfg: TrainConfig
    :return: trained ClassifierModel
    """
    if len(dataset) == 0:
        raise ConfigError("cannot train on an empty dataset")
    if dataset.image_shape != model.input_shape:
        raise ConfigError("dataset images %r do not match model input %r" % (
            dataset.image_shape, model.input_shape))
    rng = np.random.default_rng(cfg.seed)
    params = model.parameters()
    velocity = [[np.zeros_like(p) for p in ps] for ps in params]
    lr = np.asarray(cfg.learning_rate, dtype=model.dtype)
    mu = np.asarray(cfg.momentum, dtype=model.dtype)
    step = 0
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(dataset))
        losses = list()
        for start in range(0, len(order), cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            current = model.with_parameters(params)
            logits, _, tape = forward(current, dataset.images[idx])
            loss, d_logits = batch_cross_entropy(logits, dataset.labels[idx])
            if not np.isfinite(loss):
                raise TrainingDivergedError(
                    "loss became non-finite at epoch %d step %d (lr=%g); "
                    "try a smaller learning rate" % (epoch, step, cfg.learning_rate))
            grads = backward_to_weights(tape, d_logits)
            velocity = [[mu * v + g for v, g in zip(vs, gs)] for vs, gs in zip(velocity, grads)]
            params = [[p - lr * v for p, v in zip(ps, vs)] for ps, vs in zip(params, velocity)]
            losses.append(loss)
            step += 1
        LOG.debug("%s epoch %d/%d: mean loss %.4f",
                  model.arch_id, epoch + 1, cfg.epochs, float(np.mean(losses)))
    trained = model.with_parameters(params)
    LOG.info("Trained %r with %r", trained, cfg)
    return trained


def predict_logits(model, images):
    """
    Logits of a batch of images, evaluated in chunks.
    """
    images = np.asarray(images)
    out = [forward(model, images[i:i + EVAL_BATCH_SIZE])[0]
           for i in range(0, len(images), EVAL_BATCH_SIZE)]
    if not out:
        return np.zeros((0, model.class_count), dtype=model.dtype)
    return np.concatenate(out, axis=0)


def predict(model, images):
    return np.argmax(predict_logits(model, images), axis=1)


def evaluate_accuracy(model, dataset):
    if len(dataset) == 0:
        return 0.0
    return float(np.mean(predict(model, dataset.images) == dataset.labels))


def pairwise_agreement(models, images):
    """
    Fraction of images on which each pair of models predicts the same class.
    :return: (k, k) matrix
    """
    preds = [predict(m, images) for m in models]
    k = len(models)
    agree = np.ones((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            agree[i, j] = agree[j, i] = float(np.mean(preds[i] == preds[j]))
    return agree
