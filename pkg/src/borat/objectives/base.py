from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class ObjectiveMetadata:
    """Analytic constants known for an objective (None when unknown)."""

    convex: bool = False
    beta: Optional[float] = None
    lipschitz_c: Optional[float] = None
    rsi_mu: Optional[float] = None
    strong_convexity: Optional[float] = None
    minimizer: Optional[np.ndarray] = None
    notes: dict = field(default_factory=dict)


class StochasticObjective:
    """Finite-sum objective ``f(w) = mean_z loss_z(w)``.

    Subclasses implement :meth:`sample_losses` and :meth:`loss_and_grad`.
    A *batch* is an integer array of sample ids; losses and gradients on a
    batch are averages over its members.
    """

    name = "objective"
    lower_bound = 0.0

    def __init__(self, dim: int, n_samples: int, metadata: ObjectiveMetadata):
        self.dim = int(dim)
        self.n_samples = int(n_samples)
        self.metadata = metadata

    def loss_and_grad(self, batch, w: np.ndarray) -> tuple:
        raise NotImplementedError

    def sample_losses(self, w: np.ndarray) -> np.ndarray:
        """Per-sample losses at ``w`` for every sample id."""
        raise NotImplementedError

    def full_objective(self, w: np.ndarray) -> float:
        return float(np.mean(self.sample_losses(w)))

    def initial_point(self) -> np.ndarray:
        return np.zeros(self.dim)

    def all_ids(self) -> np.ndarray:
        return np.arange(self.n_samples)

    def sample(self, rng: np.random.Generator, batch_size: int = 1) -> np.ndarray:
        """Draw ``batch_size`` ids uniformly without replacement."""
        return rng.choice(self.n_samples, size=min(batch_size, self.n_samples), replace=False)


class BatchSampler:
    """Shuffled passes over the sample ids, ``batch_size`` ids at a time.

    Every id is visited once per epoch; the last batch of an epoch may be
    smaller.
    """

    def __init__(self, n_samples: int, batch_size: int, rng: np.random.Generator):
        if batch_size < 1:
            raise ValueError("batch_size must be positive")
        self.n_samples = n_samples
        self.batch_size = min(batch_size, n_samples)
        self.rng = rng
        self.epoch = 0
        self.batches_drawn = 0
        self._queue = []

    @property
    def batches_per_epoch(self) -> int:
        return -(-self.n_samples // self.batch_size)

    def next(self) -> np.ndarray:
        if not self._queue:
            perm = self.rng.permutation(self.n_samples)
            self._queue = [perm[i:i + self.batch_size]
                           for i in range(0, self.n_samples, self.batch_size)]
            self._queue.reverse()
            if self.batches_drawn:
                self.epoch += 1
        self.batches_drawn += 1
        return self._queue.pop()

    @property
    def epochs_completed(self) -> float:
        return self.batches_drawn / self.batches_per_epoch


def write_dataset_csv(path, features: np.ndarray, labels: np.ndarray, label_name: str = "label"):
    """One sample per line, header row, label in the last column."""
    features = np.atleast_2d(features)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i + 1}" for i in range(features.shape[1])] + [label_name])
        for x, y in zip(features, labels):
            writer.writerow([repr(float(v)) for v in x] + [y.item() if hasattr(y, "item") else y])
