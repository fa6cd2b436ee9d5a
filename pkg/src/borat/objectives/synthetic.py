"""Small analytic objectives with known minimisers and constants."""

from __future__ import annotations

import numpy as np

from .base import ObjectiveMetadata, StochasticObjective

# min over u != 0 of sin(2u)/u, i.e. twice the minimum of sin(t)/t (t ~ 4.4934)
_SIN_RATIO_MIN = -0.4344672564224433


class InterpLeastSquares(StochasticObjective):
    """``loss_z(w) = 1/2 (x_z . w - y_z)^2`` with targets from a planted ``w*``."""

    name = "lsq"

    def __init__(self, features, targets, metadata):
        super().__init__(features.shape[1], features.shape[0], metadata)
        self.features = features
        self.targets = targets

    def _residuals(self, batch, w):
        x = self.features[batch]
        return x, x @ w - self.targets[batch]

    def loss_and_grad(self, batch, w):
        x, r = self._residuals(batch, w)
        return float(np.mean(0.5 * r * r)), x.T @ r / len(batch)

    def sample_losses(self, w):
        r = self.features @ w - self.targets
        return 0.5 * r * r


def make_interp_least_squares(n_samples: int = 10, d: int = 100, seed: int = 0):
    if d < n_samples:
        raise ValueError("need d >= n_samples so that the planted system is consistent")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n_samples, d)) / np.sqrt(d)
    w_star = rng.standard_normal(d)
    y = x @ w_star
    # f restricted to w0 + span(x) is strongly convex with the smallest
    # nonzero eigenvalue of the averaged Hessian
    eig = np.linalg.eigvalsh(x @ x.T / n_samples)
    meta = ObjectiveMetadata(
        convex=True,
        beta=float(np.max(np.sum(x * x, axis=1))),
        strong_convexity=float(eig[0]),
        minimizer=w_star,
        notes={"strong_convexity": "restricted to the row span of the design"},
    )
    obj = InterpLeastSquares(x, y, meta)
    return obj, meta


class SeparableHinge(StochasticObjective):
    """Binary hinge loss ``max(0, 1 - y_z x_z . w)`` on separable data.

    The subgradient is taken as zero wherever the margin is at least one.
    """

    name = "hinge"

    def __init__(self, features, labels, metadata):
        super().__init__(features.shape[1], features.shape[0], metadata)
        self.features = features
        self.labels = labels

    def loss_and_grad(self, batch, w):
        x, y = self.features[batch], self.labels[batch]
        slack = 1.0 - y * (x @ w)
        active = slack > 0
        loss = float(np.mean(np.where(active, slack, 0.0)))
        grad = -(x.T @ (y * active)) / len(batch)
        return loss, grad

    def sample_losses(self, w):
        return np.maximum(0.0, 1.0 - self.labels * (self.features @ w))


def make_separable_hinge(n_samples: int = 20, d: int = 50, margin: float = 0.1, seed: int = 0):
    if not margin > 0:
        raise ValueError("margin must be positive")
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(d)
    u /= np.linalg.norm(u)
    rows = []
    while len(rows) < n_samples:
        x = rng.standard_normal(d) / np.sqrt(d)
        if abs(x @ u) >= margin:
            rows.append(x)
    x = np.array(rows)
    y = np.sign(x @ u)
    w_star = u / np.min(y * (x @ u))
    meta = ObjectiveMetadata(
        convex=True,
        lipschitz_c=float(np.max(np.linalg.norm(x, axis=1))),
        minimizer=w_star,
    )
    return SeparableHinge(x, y, meta), meta


class Oscillation1D(StochasticObjective):
    """Even, nonconvex 1D loss on which capped Polyak steps can cycle.

    ``|w| <= a``: ``k w^2 / 2``; ``a < |w| < b``: cubic Hermite bridge;
    ``|w| >= b``: the line ``slope |w| + intercept``.  The line passes
    through ``(3/5, 0.144)`` with slope ``0.12`` so that a Polyak step from
    ``+-3/5`` lands exactly on ``-+3/5`` and the capped step coincides with it
    once ``eta >= 10``.
    """

    name = "osc1d"
    k = 2.0
    a = 0.1
    b = 0.4
    slope = 0.12
    intercept = 0.144 - 0.12 * 0.6

    def __init__(self, metadata):
        super().__init__(1, 1, metadata)

    def _even(self, u):
        k, a, b = self.k, self.a, self.b
        if u <= a:
            return 0.5 * k * u * u, k * u
        if u >= b:
            return self.slope * u + self.intercept, self.slope
        h = b - a
        p0, m0 = 0.5 * k * a * a, k * a
        p1, m1 = self.slope * b + self.intercept, self.slope
        t = (u - a) / h
        val = ((2 * t**3 - 3 * t**2 + 1) * p0 + (t**3 - 2 * t**2 + t) * h * m0
               + (-2 * t**3 + 3 * t**2) * p1 + (t**3 - t**2) * h * m1)
        der = ((6 * t**2 - 6 * t) / h * p0 + (3 * t**2 - 4 * t + 1) * m0
               + (-6 * t**2 + 6 * t) / h * p1 + (3 * t**2 - 2 * t) * m1)
        return val, der

    def value_and_derivative(self, w: float):
        v, d = self._even(abs(w))
        return v, d * np.sign(w)

    def loss_and_grad(self, batch, w):
        v, d = self.value_and_derivative(float(w[0]))
        return float(v), np.array([d])

    def sample_losses(self, w):
        return np.array([self.value_and_derivative(float(w[0]))[0]])

    def initial_point(self):
        return np.array([0.6])


def make_oscillation_1d():
    meta = ObjectiveMetadata(
        convex=False,
        minimizer=np.zeros(1),
        notes={"k": Oscillation1D.k, "a": Oscillation1D.a, "b": Oscillation1D.b,
               "slope": Oscillation1D.slope, "intercept": Oscillation1D.intercept,
               "cycle": [0.6, -0.6]},
    )
    return Oscillation1D(meta), meta


class RsiObjective(StochasticObjective):
    """``loss_z(w) = e^T M_z e / 2 + c * sum_i sin^2(e_i)``, ``e = w - w*``.

    With ``2c`` above the smallest eigenvalue of ``M_z`` the loss is
    nonconvex, yet ``<grad, e> >= (lambda_min(M_z) + c * m) ||e||^2`` where
    ``m = min sin(2u)/u``, so the restricted secant inequality holds on all
    of R^d.
    """

    name = "rsi"

    def __init__(self, mats, w_star, c, metadata):
        super().__init__(w_star.shape[0], mats.shape[0], metadata)
        self.mats = mats
        self.w_star = w_star
        self.c = c

    def loss_and_grad(self, batch, w):
        e = w - self.w_star
        m = self.mats[batch].mean(axis=0) if len(batch) > 1 else self.mats[batch[0]]
        me = m @ e
        loss = 0.5 * e @ me + self.c * np.sum(np.sin(e) ** 2)
        return float(loss), me + self.c * np.sin(2.0 * e)

    def sample_losses(self, w):
        e = w - self.w_star
        quad = 0.5 * np.einsum("i,zij,j->z", e, self.mats, e)
        return quad + self.c * np.sum(np.sin(e) ** 2)


def make_rsi_objective(d: int = 10, seed: int = 0, n_samples: int = 8, eig_range=(0.4, 0.8),
                       c: float = 0.3, audit_radius: float = 10.0, audit_samples: int = 10_000):
    rng = np.random.default_rng(seed)
    lo, hi = eig_range
    mats = []
    for _ in range(n_samples):
        q, _ = np.linalg.qr(rng.standard_normal((d, d)))
        eig = rng.uniform(lo, hi, size=d)
        eig[0], eig[-1] = lo, hi
        mats.append((q * eig) @ q.T)
    mats = np.array(mats)
    w_star = 2.0 * rng.standard_normal(d)
    mu = float(lo + c * _SIN_RATIO_MIN)
    beta = float(hi + 2.0 * c)
    obj = RsiObjective(mats, w_star, c, None)
    audit = audit_rsi(obj, audit_radius, audit_samples, np.random.default_rng(seed + 1))
    obj.metadata = ObjectiveMetadata(
        convex=False,
        beta=beta,
        rsi_mu=mu,
        minimizer=w_star,
        notes={"rsi_audit_radius": audit_radius, "rsi_audit_samples": audit_samples,
               "rsi_audit_min_ratio": audit, "nonconvex": 2.0 * c > lo},
    )
    return obj, obj.metadata


def audit_rsi(obj: RsiObjective, radius: float, samples: int, rng) -> float:
    """Smallest ``<grad_z(w), w - w*> / ||w - w*||^2`` over points drawn uniformly
    from the ball of the given radius around ``w*``, over all sample ids."""
    e = rng.standard_normal((samples, obj.dim))
    e *= (radius * rng.uniform(size=samples) ** (1.0 / obj.dim)
          / np.linalg.norm(e, axis=1))[:, None]
    sq = np.sum(e * e, axis=1)
    worst = np.inf
    for m in obj.mats:
        g = e @ m + obj.c * np.sin(2.0 * e)
        worst = min(worst, float(np.min(np.sum(g * e, axis=1) / sq)))
    return worst
