"""Piecewise-linear local models of the loss around an anchor point.

A bundle holds linearisations ``<g_n, w - anchor> + b_n`` of sampled losses
plus a constant row encoding the known lower bound.  Losses are stored
shifted by the bound, so internally the bound row is always ``(0, 0)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ContractViolation, InvalidInputError
from .simplex_qp import MAX_ROWS, DualProblem, build_dual_problem


@dataclass(frozen=True)
class LowerBound:
    value: float = 0.0


@dataclass(frozen=True)
class Linearization:
    gradient: np.ndarray
    offset: float
    site: np.ndarray
    # loss at ``site`` minus the bound value
    loss_at_site: float
    is_bound: bool = False


@dataclass(frozen=True)
class Bundle:
    anchor: np.ndarray
    eta: float
    rows: tuple
    capacity: int
    bound: LowerBound = LowerBound()

    @property
    def size(self) -> int:
        return len(self.rows)

    @property
    def bound_index(self) -> int:
        return len(self.rows) - 1

    def gradients(self) -> list:
        return [row.gradient for row in self.rows]

    def offsets(self) -> np.ndarray:
        return np.array([row.offset for row in self.rows])

    def dual_problem(self) -> DualProblem:
        return build_dual_problem(self.gradients(), self.offsets(), self.eta)


def _vec(x) -> np.ndarray:
    return np.asarray(x, dtype=float).reshape(-1)


def _shift(loss: float, bound: LowerBound) -> float:
    if loss < bound.value:
        raise ContractViolation(
            f"sampled loss {loss!r} is below the lower bound {bound.value!r}")
    return float(loss) - bound.value


def offset_for(site, loss_at_site: float, grad_at_site, anchor) -> float:
    """Constant term of the linearisation at ``site`` re-expressed around ``anchor``."""
    site, grad, anchor = _vec(site), _vec(grad_at_site), _vec(anchor)
    if not site.shape == grad.shape == anchor.shape:
        raise InvalidInputError("site, gradient and anchor must share one dimension")
    return float(loss_at_site - grad @ (site - anchor))


def init_bundle(anchor, eta: float, loss: float, grad, bound: LowerBound = LowerBound(),
                capacity: int = 2) -> Bundle:
    anchor = _vec(anchor).copy()
    grad = _vec(grad).copy()
    if grad.shape != anchor.shape:
        raise InvalidInputError("gradient and anchor dimensions differ")
    if not eta > 0:
        raise InvalidInputError(f"eta must be positive, got {eta}")
    if not 2 <= capacity <= MAX_ROWS:
        raise InvalidInputError(f"capacity must lie in [2, {MAX_ROWS}], got {capacity}")
    shifted = _shift(loss, bound)
    first = Linearization(grad, shifted, anchor, shifted)
    zero = np.zeros_like(anchor)
    bound_row = Linearization(zero, 0.0, anchor, 0.0, is_bound=True)
    return Bundle(anchor, float(eta), (first, bound_row), int(capacity), bound)


def bundle_minimizer(bundle: Bundle, alpha) -> np.ndarray:
    """``anchor - eta * sum_n alpha_n g_n``."""
    a = _vec(getattr(alpha, "alpha", alpha))
    if a.shape != (bundle.size,):
        raise InvalidInputError(f"alpha has length {a.size}, bundle has {bundle.size} rows")
    return bundle.anchor - bundle.eta * direction(bundle, a)


def direction(bundle: Bundle, alpha) -> np.ndarray:
    """The convex combination ``A^T alpha`` of the bundle's gradients."""
    a = _vec(getattr(alpha, "alpha", alpha))
    out = np.zeros_like(bundle.anchor)
    for weight, row in zip(a, bundle.rows):
        if weight != 0.0 and not row.is_bound:
            out += weight * row.gradient
    return out


def add_linearization(bundle: Bundle, loss_at_min: float, grad_at_min, current_min) -> Bundle:
    """Insert a linearisation taken at ``current_min`` just before the bound row."""
    if bundle.size >= bundle.capacity:
        raise InvalidInputError(f"bundle already holds {bundle.capacity} rows")
    site = _vec(current_min).copy()
    grad = _vec(grad_at_min).copy()
    shifted = _shift(loss_at_min, bundle.bound)
    row = Linearization(grad, offset_for(site, shifted, grad, bundle.anchor), site, shifted)
    rows = bundle.rows[:-1] + (row, bundle.rows[-1])
    return replace(bundle, rows=rows)


def model_value(bundle: Bundle, point) -> float:
    """Proximal bundle objective at ``point`` (in shifted loss units)."""
    point = _vec(point)
    if point.shape != bundle.anchor.shape:
        raise InvalidInputError("point and anchor dimensions differ")
    delta = point - bundle.anchor
    pieces = [row.gradient @ delta + row.offset for row in bundle.rows]
    return float(delta @ delta / (2.0 * bundle.eta) + max(pieces))


def linear_part(bundle: Bundle, point) -> float:
    """The max-of-linear model without the proximal term."""
    delta = _vec(point) - bundle.anchor
    return float(max(row.gradient @ delta + row.offset for row in bundle.rows))
