"""Exact solver for small concave quadratics over the probability simplex.

The problem solved here is

    max_{alpha in simplex}  D(alpha) = -1/2 alpha^T Q alpha + alpha^T b

where ``Q = eta * A A^T`` is the (scaled) Gram matrix of the bundle's gradient
rows and ``b`` holds the bundle offsets.  At an optimum, the partial
derivatives ``b - Q alpha`` coincide on every coordinate where ``alpha`` is
positive.  Guessing the support ``I`` therefore turns the problem into a
square linear system

    [[Q_II, 1], [1^T, 0]] [phi; c] = [b_I; 1]

and enumerating every nonempty support (there are ``2^N - 1``) and keeping
the best nonnegative solution yields the exact maximiser.

Subset indices are 0-based throughout.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numba
import numpy as np

from .errors import InvalidInputError

logger = logging.getLogger(__name__)

MAX_ROWS = 10
FEASIBILITY_SLACK = 1e-9
PIVOT_RTOL = 1e-12
# relative tolerance under which two candidate values count as tied
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class DualProblem:
    """Quadratic data ``(Q, b)`` of a bundle dual, ``Q`` already scaled by eta."""

    q_matrix: np.ndarray
    b_vector: np.ndarray

    def __post_init__(self):
        q = np.array(self.q_matrix, dtype=float)
        b = np.array(self.b_vector, dtype=float).reshape(-1)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise InvalidInputError(f"q_matrix must be square, got shape {q.shape}")
        n = q.shape[0]
        if b.shape != (n,):
            raise InvalidInputError(f"b_vector has length {b.size}, expected {n}")
        if not 2 <= n <= MAX_ROWS:
            raise InvalidInputError(f"bundle size must lie in [2, {MAX_ROWS}], got {n}")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(b))):
            raise InvalidInputError("dual problem data must be finite")
        scale = max(np.max(np.abs(q)), 1e-300)
        if np.max(np.abs(q - q.T)) > 1e-12 * scale:
            raise InvalidInputError("q_matrix is not symmetric")
        trace = float(np.trace(q))
        if np.min(np.linalg.eigvalsh(q)) < -1e-9 * max(trace, 0.0):
            raise InvalidInputError("q_matrix is not positive semidefinite")
        q.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "q_matrix", q)
        object.__setattr__(self, "b_vector", b)

    @property
    def n(self) -> int:
        return self.b_vector.shape[0]

    def dump(self, precision: int = 6) -> str:
        """Plain-text block with the Q matrix followed by the b column."""
        width = precision + 8
        lines = [f"DualProblem N={self.n}"]
        for i in range(self.n):
            row = " ".join(f"{v:{width}.{precision}g}" for v in self.q_matrix[i])
            lines.append(f"  {row} | {self.b_vector[i]:{width}.{precision}g}")
        return "\n".join(lines)


@dataclass(frozen=True)
class SubsetCandidate:
    """Solution of one support subsystem, lifted to all N coordinates."""

    subset: tuple
    psi: np.ndarray
    feasible: bool
    value: float
    multiplier_c: float


@dataclass(frozen=True)
class DualSolution:
    alpha: np.ndarray
    value: float
    support: tuple
    multiplier_c: float
    # set when no subsystem produced a feasible point and e_N was returned
    fallback: bool = False
    candidates: tuple = field(default=(), repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.alpha.shape[0]


def build_dual_problem(rows: Sequence[Sequence[float]], offsets: Sequence[float], eta: float) -> DualProblem:
    """Form ``Q[i, j] = eta * <rows[i], rows[j]>`` and ``b = offsets``."""
    if not eta > 0:
        raise InvalidInputError(f"eta must be positive, got {eta}")
    vecs = [np.asarray(r, dtype=float).reshape(-1) for r in rows]
    if len(vecs) < 2:
        raise InvalidInputError("a bundle needs at least two rows")
    dims = {v.shape[0] for v in vecs}
    if len(dims) != 1:
        raise InvalidInputError(f"gradient rows have mismatched dimensions {sorted(dims)}")
    if len(offsets) != len(vecs):
        raise InvalidInputError("offsets must have one entry per row")
    return DualProblem(gram_matrix(vecs, eta), np.asarray(offsets, dtype=float))


def gram_matrix(vecs: Sequence[np.ndarray], eta: float) -> np.ndarray:
    # Entry-wise dots keep each Q[i, j] independent of how many rows exist,
    # which the incremental solver relies on for bitwise reproducibility.
    n = len(vecs)
    q = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            q[i, j] = q[j, i] = eta * float(np.dot(vecs[i], vecs[j]))
    return q


def dual_value(problem: DualProblem, alpha: Sequence[float]) -> float:
    a = np.asarray(alpha, dtype=float)
    if a.shape != (problem.n,):
        raise InvalidInputError(f"alpha has length {a.size}, expected {problem.n}")
    return float(-0.5 * a @ problem.q_matrix @ a + a @ problem.b_vector)


def gauss_solve(a: np.ndarray, rhs: np.ndarray, rtol: float = PIVOT_RTOL) -> Optional[np.ndarray]:
    """Solve ``a x = rhs`` by Gaussian elimination with partial pivoting.

    Returns None when a pivot falls below ``rtol * max|a|``.
    """
    m = np.array(a, dtype=float)
    x = np.array(rhs, dtype=float)
    n = x.shape[0]
    threshold = rtol * np.max(np.abs(m))
    for k in range(n):
        p = k + int(np.argmax(np.abs(m[k:, k])))
        if abs(m[p, k]) <= threshold:
            return None
        if p != k:
            m[[k, p]] = m[[p, k]]
            x[[k, p]] = x[[p, k]]
        factors = m[k + 1:, k] / m[k, k]
        m[k + 1:, k:] -= np.outer(factors, m[k, k:])
        x[k + 1:] -= factors * x[k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - m[k, k + 1:] @ x[k + 1:]) / m[k, k]
    return x


def _subset_value(problem: DualProblem, subset: tuple, phi: np.ndarray) -> float:
    q = problem.q_matrix[np.ix_(subset, subset)]
    return float(-0.5 * phi @ q @ phi + phi @ problem.b_vector[list(subset)])


def solve_subsystem(problem: DualProblem, subset: Iterable[int]) -> Optional[SubsetCandidate]:
    """Candidate point for the support ``subset``, or None if singular."""
    idx = tuple(sorted(set(int(i) for i in subset)))
    if not idx:
        raise InvalidInputError("subset must be nonempty")
    if idx[0] < 0 or idx[-1] >= problem.n:
        raise InvalidInputError(f"subset {idx} out of range for N={problem.n}")
    k = len(idx)
    if k == 1:
        # a vertex of the simplex: weight exactly one, shared partial b_i - Q_ii
        i = idx[0]
        psi = np.zeros(problem.n)
        psi[i] = 1.0
        q_ii, b_i = float(problem.q_matrix[i, i]), float(problem.b_vector[i])
        return SubsetCandidate(idx, psi, True, b_i - 0.5 * q_ii, b_i - q_ii)
    block = problem.q_matrix[np.ix_(idx, idx)]
    # Bring the Q block to unit size by an exact power of two so that the
    # pivot test does not mistake tiny curvature (late in training) for
    # singularity against the unit border.  Weights are unchanged; the
    # multiplier scales back.
    peak = float(np.max(np.abs(block)))
    scale = math.ldexp(1.0, -min(max(math.frexp(peak)[1], -1000), 1000)) if peak > 0 else 1.0
    system = np.ones((k + 1, k + 1))
    system[:k, :k] = block * scale
    system[k, k] = 0.0
    rhs = np.append(problem.b_vector[list(idx)] * scale, 1.0)
    x = gauss_solve(system, rhs)
    if x is None:
        return None
    x[k] /= scale
    phi = x[:k]
    psi = np.zeros(problem.n)
    psi[list(idx)] = phi
    feasible = bool(np.all(phi >= -FEASIBILITY_SLACK))
    return SubsetCandidate(
        subset=idx,
        psi=psi,
        feasible=feasible,
        value=_subset_value(problem, idx, phi),
        multiplier_c=float(x[k]),
    )


def _all_subsets(n: int, containing: Optional[int] = None):
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            if containing is None or containing in subset:
                yield subset


def _canonical(subset: tuple, n: int):
    # smallest support first; within a size the bound row (index n - 1) wins,
    # as the enumeration starts from that vertex and only moves on strict gains
    return (len(subset), (n - 1) not in subset, subset)


def _kkt_residual(problem: DualProblem, cand: SubsetCandidate) -> float:
    """How far coordinates outside the support exceed the shared partial derivative."""
    outside = [i for i in range(problem.n) if i not in cand.subset]
    if not outside:
        return 0.0
    partial = problem.b_vector[outside] - problem.q_matrix[outside] @ cand.psi
    return max(0.0, float(np.max(partial)) - cand.multiplier_c)


def _select(problem: DualProblem, candidates: list) -> DualSolution:
    candidates = sorted(candidates, key=lambda c: _canonical(c.subset, problem.n))
    feasible = [c for c in candidates if c.feasible]
    best = None
    if feasible:
        top = max(c.value for c in feasible)
        tied = [c for c in feasible if c.value >= top - TIE_RTOL * max(1.0, abs(top))]
        # values near a tie cannot separate the weights much better than
        # sqrt(eps), so settle them by the optimality residual, then by the
        # smallest support in canonical order
        residuals = [_kkt_residual(problem, c) for c in tied]
        # relative to the data so that tiny losses are still told apart
        scale = max(float(np.max(np.abs(problem.b_vector))), float(np.max(np.abs(problem.q_matrix))))
        floor = min(residuals) + TIE_RTOL * scale
        best = next(c for c, r in zip(tied, residuals) if r <= floor)
    if best is None:
        logger.warning("no feasible subsystem found; falling back to the lower-bound row")
        alpha = np.zeros(problem.n)
        alpha[-1] = 1.0
        return DualSolution(alpha, dual_value(problem, alpha), (problem.n - 1,), 0.0,
                            fallback=True, candidates=tuple(candidates))
    alpha = np.array(best.psi, dtype=float)
    if np.any(alpha < 0.0):
        # only renormalise when something was clipped so exact solutions keep their bits
        alpha = np.clip(alpha, 0.0, None)
        alpha /= alpha.sum()
    support = tuple(i for i in best.subset if alpha[i] > FEASIBILITY_SLACK)
    return DualSolution(alpha, dual_value(problem, alpha), support, best.multiplier_c,
                        candidates=tuple(candidates))


def solve_dual(problem: DualProblem) -> DualSolution:
    """Maximise the dual over the simplex by support enumeration.

    Ties within a relative 1e-12 go to the smallest optimality residual, then
    the smallest support, then supports holding the bound row, then the
    lexicographically first subset.
    """
    candidates = []
    for subset in _all_subsets(problem.n):
        cand = solve_subsystem(problem, subset)
        if cand is not None:
            candidates.append(cand)
    return _select(problem, candidates)


def _reindex(cand: SubsetCandidate, new_index: int, n: int) -> SubsetCandidate:
    subset = tuple(i if i < new_index else i + 1 for i in cand.subset)
    psi = np.zeros(n)
    psi[list(subset)] = cand.psi[list(cand.subset)]
    return SubsetCandidate(subset, psi, cand.feasible, cand.value, cand.multiplier_c)


def solve_dual_incremental(problem: DualProblem, cached: Sequence[SubsetCandidate], new_index: int) -> DualSolution:
    """Re-solve after inserting row ``new_index``, reusing cached subsystems.

    ``cached`` holds the candidates of the problem without that row (as
    returned in ``DualSolution.candidates``); only the ``2^(N-1)`` supports
    that contain the new row are solved here.
    """
    n = problem.n
    if not 0 <= new_index < n:
        raise InvalidInputError(f"new_index {new_index} out of range for N={n}")
    seen = set()
    for cand in cached:
        if cand.psi.shape != (n - 1,) or not cand.subset or cand.subset[-1] >= n - 1:
            raise InvalidInputError("cached candidates do not match an (N-1)-row problem")
        if cand.subset in seen:
            raise InvalidInputError(f"duplicate cached subset {cand.subset}")
        seen.add(cand.subset)
    candidates = [_reindex(c, new_index, n) for c in cached]
    for subset in _all_subsets(n, containing=new_index):
        cand = solve_subsystem(problem, subset)
        if cand is not None:
            candidates.append(cand)
    return _select(problem, candidates)


def solve_dual_closed_form_n2(loss: float, grad_norm_sq: float, eta: float) -> float:
    """Weight on the gradient row of a two-row bundle (the other row is the bound)."""
    if not eta > 0:
        raise InvalidInputError(f"eta must be positive, got {eta}")
    if grad_norm_sq <= 0.0:
        # zero gradient: the step is zero whatever the weight, so put it on the
        # gradient row whenever there is loss left
        return 1.0 if loss > 0 else 0.0
    return min(loss / (eta * grad_norm_sq), 1.0)


def kkt_check(problem: DualProblem, solution, tol: float = 1e-7) -> bool:
    """First-order optimality of ``solution`` over the simplex."""
    alpha = np.asarray(getattr(solution, "alpha", solution), dtype=float)
    partial = problem.b_vector - problem.q_matrix @ alpha
    on = alpha > tol
    if not np.any(on):
        return False
    shared = partial[on]
    c = float(np.max(shared))
    if c - float(np.min(shared)) > tol:
        return False
    return bool(np.all(partial[~on] <= c + tol))


def project_simplex(y: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row of ``y`` onto the probability simplex."""
    y = np.asarray(y, dtype=float)
    u = -np.sort(-y, axis=-1)
    css = np.cumsum(u, axis=-1) - 1.0
    ks = np.arange(1, y.shape[-1] + 1)
    cond = u - css / ks > 0
    rho = y.shape[-1] - 1 - np.argmax(cond[..., ::-1], axis=-1)
    theta = np.take_along_axis(css, rho[..., None], axis=-1) / (rho[..., None] + 1)
    return np.maximum(y - theta, 0.0)


def default_oracle_step(q: np.ndarray) -> np.ndarray:
    """Step ``1/L`` with ``L`` the largest eigenvalue of Q (batched)."""
    lmax = np.linalg.eigvalsh(q)[..., -1]
    return 1.0 / np.maximum(lmax, 1e-12)


@numba.njit(cache=True)
def _project_simplex_inplace(v, work):
    n = v.shape[0]
    # insertion sort: n is at most a handful of coordinates
    for i in range(n):
        x = v[i]
        j = i - 1
        while j >= 0 and work[j] > x:
            work[j + 1] = work[j]
            j -= 1
        work[j + 1] = x
    css = 0.0
    theta = 0.0
    for k in range(n):
        u = work[n - 1 - k]
        css += u
        t = (css - 1.0) / (k + 1)
        if u - t > 0:
            theta = t
    for i in range(n):
        v[i] = max(v[i] - theta, 0.0)


@numba.njit(cache=True)
def _ascent_kernel(q, b, iterations, steps, best, best_val):
    batch, n = b.shape
    alpha = np.empty(n)
    grad = np.empty(n)
    work = np.empty(n)
    for p in range(batch):
        for i in range(n):
            alpha[i] = 1.0 / n
        best_val[p] = -np.inf
        for it in range(iterations + 1):
            val = 0.0
            for i in range(n):
                qa = 0.0
                for j in range(n):
                    qa += q[p, i, j] * alpha[j]
                grad[i] = b[p, i] - qa
                val += alpha[i] * (b[p, i] - 0.5 * qa)
            if val > best_val[p]:
                best_val[p] = val
                for i in range(n):
                    best[p, i] = alpha[i]
            if it == iterations:
                break
            for i in range(n):
                alpha[i] += steps[p] * grad[i]
            _project_simplex_inplace(alpha, work)


def brute_force_dual_batch(q: np.ndarray, b: np.ndarray, iterations: int, step) -> tuple:
    """Projected gradient ascent on a stack of duals, from the barycenter.

    ``q`` has shape (B, N, N), ``b`` (B, N) and ``step`` is a scalar or (B,).
    Returns the best iterate per problem and its value.
    """
    q = np.ascontiguousarray(q, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    batch, n = b.shape
    steps = np.ascontiguousarray(np.broadcast_to(np.asarray(step, dtype=float), (batch,)))
    best = np.empty((batch, n))
    best_val = np.empty(batch)
    _ascent_kernel(q, b, int(iterations), steps, best, best_val)
    return best, best_val


def brute_force_dual(problem: DualProblem, iterations: int = 100_000, step: Optional[float] = None) -> DualSolution:
    """Independent iterative oracle for :func:`solve_dual`.

    Plain projected gradient ascent; with ``step=None`` uses ``1/lambda_max(Q)``.
    """
    q = problem.q_matrix[None]
    if step is None:
        step = default_oracle_step(q)
    alpha, value = brute_force_dual_batch(q, problem.b_vector[None], iterations, step)
    alpha = alpha[0]
    partial = problem.b_vector - problem.q_matrix @ alpha
    support = tuple(int(i) for i in np.flatnonzero(alpha > FEASIBILITY_SLACK))
    c = float(np.mean(partial[list(support)])) if support else 0.0
    return DualSolution(alpha, float(value[0]), support, c)
