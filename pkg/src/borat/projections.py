"""Feasible regions and Euclidean projections onto them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

UNCONSTRAINED = "unconstrained"
L2_BALL = "l2_ball"


@dataclass(frozen=True)
class FeasibleRegion:
    """Either all of R^d or the ball ``{w : ||w||^2 <= r}``.

    The radius parameter bounds the *squared* norm.
    """

    kind: str = UNCONSTRAINED
    r: float = float("inf")

    def __post_init__(self):
        if self.kind not in (UNCONSTRAINED, L2_BALL):
            raise InvalidInputError(f"unknown region kind {self.kind!r}")
        if self.kind == L2_BALL and not (np.isfinite(self.r) and self.r > 0):
            raise InvalidInputError(f"l2 ball needs a finite r > 0, got {self.r}")

    @classmethod
    def parse(cls, text: str) -> "FeasibleRegion":
        """Parse ``none`` or ``l2:<r>``."""
        text = text.strip().lower()
        if text in ("none", "", UNCONSTRAINED):
            return cls()
        if text.startswith("l2:"):
            try:
                r = float(text[3:])
            except ValueError:
                raise InvalidInputError(f"bad l2 radius in {text!r}") from None
            return cls(L2_BALL, r)
        raise InvalidInputError(f"constraint must be 'none' or 'l2:<r>', got {text!r}")

    def __str__(self):
        return "none" if self.kind == UNCONSTRAINED else f"l2:{self.r:.17g}"


def project(region: FeasibleRegion, w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if not np.all(np.isfinite(w)):
        raise InvalidInputError("cannot project a non-finite vector")
    if region.kind == UNCONSTRAINED:
        return w
    sq = float(w @ w)
    if sq <= region.r:
        return w
    factor = np.sqrt(region.r / sq)
    out = w * factor
    # rounding can leave ||out||^2 a few ulps above r; shrink until the
    # result is a fixed point of the projection
    while float(out @ out) > region.r:
        factor = np.nextafter(factor, 0.0)
        out = w * factor
    return out


def contains(region: FeasibleRegion, w: np.ndarray, tol: float = 1e-9) -> bool:
    if region.kind == UNCONSTRAINED:
        return True
    w = np.asarray(w, dtype=float)
    return float(w @ w) <= region.r + tol
