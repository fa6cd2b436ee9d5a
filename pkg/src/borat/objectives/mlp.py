"""One-hidden-layer ReLU classifier with hand-written backpropagation."""

from __future__ import annotations

import copy

import numpy as np

from ..errors import NumericalError
from .base import ObjectiveMetadata, StochasticObjective

LOSSES = ("ce", "hinge")


def make_blobs(n: int, n_classes: int = 2, spread: float = 1.0, seed: int = 0):
    rng = np.random.default_rng(seed)
    angles = 2 * np.pi * np.arange(n_classes) / n_classes
    centers = 2.0 * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    y = rng.integers(0, n_classes, size=n)
    x = centers[y] + spread * rng.standard_normal((n, 2))
    return x, y


def make_moons(n: int, noise: float = 0.1, seed: int = 0):
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, size=n)
    t = np.pi * rng.uniform(size=n)
    x = np.where(y[:, None] == 0,
                 np.stack([np.cos(t), np.sin(t)], axis=1),
                 np.stack([1 - np.cos(t), 0.5 - np.sin(t)], axis=1))
    return x + noise * rng.standard_normal((n, 2)), y


DATASETS = {"blobs": make_blobs, "moons": make_moons}


class MlpObjective(StochasticObjective):
    """Average classification loss of ``W2 relu(W1 x + b1) + b2``.

    Parameters are flattened as ``[W1, b1, W2, b2]`` (row-major).
    """

    name = "mlp"

    def __init__(self, x, y, x_test, y_test, n_classes, hidden=64, loss="ce", seed=0):
        if loss not in LOSSES:
            raise ValueError(f"loss must be one of {LOSSES}, got {loss!r}")
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=int)
        self.x_test = np.asarray(x_test, dtype=float)
        self.y_test = np.asarray(y_test, dtype=int)
        self.n_classes = int(n_classes)
        self.n_in = self.x.shape[1]
        self.hidden = int(hidden)
        self.loss = loss
        self.seed = seed
        shapes = [(self.hidden, self.n_in), (self.hidden,),
                  (self.n_classes, self.hidden), (self.n_classes,)]
        self._shapes = shapes
        self._sizes = [int(np.prod(s)) for s in shapes]
        super().__init__(sum(self._sizes), self.x.shape[0], ObjectiveMetadata(convex=False))

    def unpack(self, w):
        parts, start = [], 0
        for shape, size in zip(self._shapes, self._sizes):
            parts.append(w[start:start + size].reshape(shape))
            start += size
        return parts

    def initial_point(self):
        rng = np.random.default_rng(self.seed)
        w1 = rng.standard_normal((self.hidden, self.n_in)) * np.sqrt(2.0 / self.n_in)
        w2 = rng.standard_normal((self.n_classes, self.hidden)) * np.sqrt(2.0 / self.hidden)
        return np.concatenate([w1.ravel(), np.zeros(self.hidden), w2.ravel(), np.zeros(self.n_classes)])

    def _forward(self, x, w, ids):
        w1, b1, w2, b2 = self.unpack(w)
        pre = x @ w1.T + b1
        act = np.maximum(pre, 0.0)
        scores = act @ w2.T + b2
        bad = ~np.all(np.isfinite(scores), axis=1)
        if np.any(bad):
            raise NumericalError(f"non-finite forward pass for sample id {int(ids[np.argmax(bad)])}")
        return pre, act, scores

    def _losses(self, scores, y):
        rows = np.arange(len(y))
        if self.loss == "ce":
            shifted = scores - scores.max(axis=1, keepdims=True)
            log_norm = np.log(np.exp(shifted).sum(axis=1))
            return log_norm - shifted[rows, y]
        margins = 1.0 + scores - scores[rows, y][:, None]
        margins[rows, y] = 0.0
        return np.maximum(margins.max(axis=1), 0.0)

    def _score_grad(self, scores, y):
        rows = np.arange(len(y))
        if self.loss == "ce":
            shifted = scores - scores.max(axis=1, keepdims=True)
            probs = np.exp(shifted)
            probs /= probs.sum(axis=1, keepdims=True)
            probs[rows, y] -= 1.0
            return probs
        margins = 1.0 + scores - scores[rows, y][:, None]
        margins[rows, y] = -np.inf
        worst = np.argmax(margins, axis=1)
        active = margins[rows, worst] > 0
        out = np.zeros_like(scores)
        out[rows[active], worst[active]] += 1.0
        out[rows[active], y[active]] -= 1.0
        return out

    def loss_and_grad(self, batch, w):
        batch = np.asarray(batch)
        x, y = self.x[batch], self.y[batch]
        pre, act, scores = self._forward(x, w, batch)
        loss = float(np.mean(self._losses(scores, y)))
        d_scores = self._score_grad(scores, y) / len(batch)
        _, _, w2, _ = self.unpack(w)
        d_w2 = d_scores.T @ act
        d_b2 = d_scores.sum(axis=0)
        d_pre = (d_scores @ w2) * (pre > 0)
        d_w1 = d_pre.T @ x
        d_b1 = d_pre.sum(axis=0)
        return loss, np.concatenate([d_w1.ravel(), d_b1, d_w2.ravel(), d_b2])

    def sample_losses(self, w):
        _, _, scores = self._forward(self.x, w, self.all_ids())
        return self._losses(scores, self.y)

    def accuracy(self, w, split: str = "train") -> float:
        x, y = (self.x, self.y) if split == "train" else (self.x_test, self.y_test)
        _, _, scores = self._forward(x, w, np.arange(len(y)))
        return float(np.mean(np.argmax(scores, axis=1) == y))

    def with_labels(self, y):
        clone = copy.copy(self)
        clone.y = np.asarray(y, dtype=int)
        return clone


def make_mlp_objective(dataset: str = "blobs", n_train: int = 256, n_test: int = 256,
                       hidden: int = 64, loss: str = "ce", seed: int = 0, n_classes: int = 2,
                       noise: float = 0.5):
    """Classifier on a synthetic 2D dataset.

    ``noise`` is the blob spread or the moon jitter.  The default (two blobs,
    spread 0.5) is separable by the network even inside an l2 ball of
    squared radius 100, which the moons data is not.
    """
    if n_train > 512:
        raise ValueError("keep synthetic training sets at 512 points or fewer")
    if dataset == "moons":
        x, y = make_moons(n_train, noise, seed)
        xt, yt = make_moons(n_test, noise, seed + 10_000)
        n_classes = 2
    elif dataset == "blobs":
        x, y = make_blobs(n_train, n_classes, noise, seed)
        xt, yt = make_blobs(n_test, n_classes, noise, seed + 10_000)
    else:
        raise ValueError(f"unknown dataset {dataset!r}")
    obj = MlpObjective(x, y, xt, yt, n_classes, hidden, loss, seed)
    return obj, obj.metadata


def add_label_noise(objective: MlpObjective, p: float, seed: int = 0) -> MlpObjective:
    """Copy of ``objective`` where each training label is, with probability
    ``p``, replaced by a uniformly drawn *different* class."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    y = objective.y.copy()
    flip = rng.uniform(size=y.shape) < p
    shift = rng.integers(1, objective.n_classes, size=y.shape)
    y[flip] = (y[flip] + shift[flip]) % objective.n_classes
    return objective.with_labels(y)
