"""Stochastic bundle optimiser and its two-row closed-form special case.

Each step builds a bundle at the current parameters: one linearisation of a
sampled loss, the lower-bound row, and up to ``N - 2`` extra linearisations
taken at successive bundle minimisers.  The dual over the simplex gives the
step ``-eta * A^T alpha``, followed by optional Nesterov momentum and
projection onto the feasible region.
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .bundle import LowerBound, add_linearization, bundle_minimizer, direction, init_bundle
from .errors import InvalidInputError, NumericalError
from .objectives.base import BatchSampler, StochasticObjective
from .projections import FeasibleRegion, contains, project
from .simplex_qp import (
    MAX_ROWS,
    DualSolution,
    dual_value,
    solve_dual,
    solve_dual_closed_form_n2,
    solve_dual_incremental,
)
from .trace import RunTrace, StepRecord

logger = logging.getLogger(__name__)

OPTIMIZERS = ("borat", "alig")

# 0-based support -> label, three-row bundles only
_N3_LABELS = {
    (0,): "SGD",
    (1,): "SEGD",
    (2,): "ZERO",
    (1, 2): "EALIG",
    (0, 2): "ALIG",
    (0, 1): "MAX2",
    (0, 1, 2): "MAX3",
}


@dataclass
class BoratConfig:
    eta: float
    bundle_size: int = 2
    momentum: float = 0.0
    region: FeasibleRegion = field(default_factory=FeasibleRegion)
    resample: bool = True
    max_steps: Optional[int] = None
    max_epochs: Optional[float] = None
    batch_size: int = 1
    seed: int = 0
    lower_bound: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.eta) and self.eta > 0):
            raise InvalidInputError(f"eta must be positive and finite, got {self.eta}")
        if not 2 <= self.bundle_size <= MAX_ROWS:
            raise InvalidInputError(f"bundle_size must lie in [2, {MAX_ROWS}], got {self.bundle_size}")
        if not 0.0 <= self.momentum < 1.0:
            raise InvalidInputError(f"momentum must lie in [0, 1), got {self.momentum}")
        if self.batch_size < 1:
            raise InvalidInputError("batch_size must be at least 1")
        if self.max_steps is None and self.max_epochs is None:
            raise InvalidInputError("set max_steps or max_epochs")
        if self.max_steps is not None and self.max_steps < 0:
            raise InvalidInputError("max_steps must be nonnegative")
        if self.max_epochs is not None and self.max_epochs < 0:
            raise InvalidInputError("max_epochs must be nonnegative")

    def describe(self) -> dict:
        out = asdict(self)
        out["region"] = str(self.region)
        return out


@dataclass
class OptimizerState:
    params: np.ndarray
    velocity: np.ndarray = None
    step_index: int = 0

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float).copy()
        if self.velocity is None:
            self.velocity = np.zeros_like(self.params)
        elif np.shape(self.velocity) != self.params.shape:
            raise InvalidInputError("velocity and params dimensions differ")


@dataclass
class StepReport:
    alpha: DualSolution
    step_type: str
    dual_value: float
    losses: tuple
    grad_norms: tuple
    batches_consumed: int
    # gradient-row weight of the two-row (bound + first gradient) subproblem
    gamma: float = 1.0
    # <g at w_t, g at the first bundle minimiser>, None for two-row bundles
    alignment: Optional[float] = None
    degenerate: bool = False

    @property
    def sampled_loss(self) -> float:
        return self.losses[0]


def classify_step(alpha, n: int) -> str:
    """Label a step by the support of its dual weights.

    Three-row bundles get the named taxonomy; other sizes get the 1-based
    support written as a set, e.g. ``{1,3}``.
    """
    support = getattr(alpha, "support", None)
    if support is None:
        a = np.asarray(alpha, dtype=float)
        support = tuple(int(i) for i in np.flatnonzero(a > 1e-9))
    support = tuple(sorted(support))
    if n == 3 and support in _N3_LABELS:
        return _N3_LABELS[support]
    return "{" + ",".join(str(i + 1) for i in support) + "}"


def _sampler_for(rng, objective, config):
    if isinstance(rng, BatchSampler):
        return rng
    if rng is None:
        rng = np.random.default_rng(config.seed)
    return BatchSampler(objective.n_samples, config.batch_size, rng)


def _evaluate(objective, batch, w):
    loss, grad = objective.loss_and_grad(batch, w)
    grad = np.asarray(grad, dtype=float)
    if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
        raise NumericalError(f"non-finite loss or gradient on batch {np.asarray(batch).tolist()}")
    return float(loss), grad


def _apply_update(state: OptimizerState, config: BoratConfig, move: np.ndarray):
    """``move`` is the plain step ``-eta * A^T alpha``."""
    if config.momentum > 0:
        state.velocity = config.momentum * state.velocity + move
        raw = state.params + config.momentum * state.velocity + move
    else:
        raw = state.params + move
    if not np.all(np.isfinite(raw)):
        raise NumericalError(f"non-finite parameters after step {state.step_index + 1}")
    state.params = project(config.region, raw)
    state.step_index += 1


def step(state: OptimizerState, objective: StochasticObjective, config: BoratConfig,
         rng=None) -> StepReport:
    """Advance ``state`` by one bundle step in place and report on it.

    ``rng`` may be a ``numpy.random.Generator`` or a ``BatchSampler``; pass the
    same sampler across calls to get epoch-style sampling without replacement.
    """
    if state.params.shape != (objective.dim,):
        raise InvalidInputError(f"params have shape {state.params.shape}, objective has dim {objective.dim}")
    sampler = _sampler_for(rng, objective, config)
    bound = LowerBound(config.lower_bound)
    w = state.params

    batch = sampler.next()
    loss, grad = _evaluate(objective, batch, w)
    bundle = init_bundle(w, config.eta, loss, grad, bound, config.bundle_size)
    losses, norms = [loss], [float(np.linalg.norm(grad))]

    solution = solve_dual(bundle.dual_problem())
    gamma = float(solution.alpha[0])
    alignment = None
    while bundle.size < config.bundle_size:
        site = bundle_minimizer(bundle, solution)
        if config.resample:
            batch = sampler.next()
        site_loss, site_grad = _evaluate(objective, batch, site)
        if alignment is None:
            alignment = float(grad @ site_grad)
        new_index = bundle.size - 1
        bundle = add_linearization(bundle, site_loss, site_grad, site)
        solution = solve_dual_incremental(bundle.dual_problem(), solution.candidates, new_index)
        losses.append(site_loss)
        norms.append(float(np.linalg.norm(site_grad)))

    _apply_update(state, config, -config.eta * direction(bundle, solution))
    return StepReport(
        alpha=solution,
        step_type=classify_step(solution, config.bundle_size),
        dual_value=solution.value,
        losses=tuple(losses),
        grad_norms=tuple(norms),
        batches_consumed=config.bundle_size - 1,
        gamma=gamma,
        alignment=alignment,
    )


def alig_step(state: OptimizerState, objective: StochasticObjective, config: BoratConfig,
              rng=None) -> StepReport:
    """Two-row step with the closed-form weight ``min(loss / (eta |g|^2), 1)``."""
    if config.bundle_size != 2:
        raise InvalidInputError("alig_step needs bundle_size = 2")
    if state.params.shape != (objective.dim,):
        raise InvalidInputError(f"params have shape {state.params.shape}, objective has dim {objective.dim}")
    sampler = _sampler_for(rng, objective, config)
    batch = sampler.next()
    loss, grad = _evaluate(objective, batch, state.params)
    bundle = init_bundle(state.params, config.eta, loss, grad, LowerBound(config.lower_bound), 2)
    shifted = bundle.rows[0].offset
    grad_sq = float(grad @ grad)
    weight = solve_dual_closed_form_n2(shifted, grad_sq, config.eta)
    degenerate = grad_sq == 0.0 and shifted > 0
    if degenerate:
        logger.warning("zero gradient with positive loss %r at step %d", loss, state.step_index)

    alpha = np.array([weight, 1.0 - weight])
    support = tuple(i for i in range(2) if alpha[i] > 1e-9)
    problem = bundle.dual_problem()
    solution = DualSolution(alpha, dual_value(problem, alpha), support, 0.0)
    _apply_update(state, config, -config.eta * direction(bundle, alpha))
    return StepReport(
        alpha=solution,
        step_type=classify_step(solution, 2),
        dual_value=solution.value,
        losses=(loss,),
        grad_norms=(float(np.sqrt(grad_sq)),),
        batches_consumed=1,
        gamma=weight,
        degenerate=degenerate,
    )


def _log_points(total: Optional[int], log_every: Optional[int]):
    if log_every is not None:
        return max(1, int(log_every))
    if total is None:
        return 1
    return max(1, total // 200)


def train(objective: StochasticObjective, config: BoratConfig,
          logger_fn: Optional[Callable[[StepRecord], None]] = None,
          optimizer: str = "borat", log_every: Optional[int] = None,
          timing: bool = True, track_average: bool = False,
          initial_params=None, header: Optional[dict] = None,
          on_start: Optional[Callable[[dict], None]] = None) -> RunTrace:
    """Run steps until the step or epoch budget is spent.

    Every step yields a ``StepRecord``; every ``log_every`` steps (and at the
    last one) the record also carries the full objective.  ``logger_fn`` is
    called with each record as soon as it exists, so a crash or interrupt
    leaves everything up to that point on disk.  Record ``t`` describes the
    parameters after ``t`` updates.  ``on_start`` receives the final header
    before the first step, which is when a streaming writer should open.
    """
    if optimizer not in OPTIMIZERS:
        raise InvalidInputError(f"optimizer must be one of {OPTIMIZERS}")
    if optimizer == "alig" and config.bundle_size != 2:
        raise InvalidInputError("the alig optimizer uses bundle_size = 2")
    update = alig_step if optimizer == "alig" else step

    rng = np.random.default_rng(config.seed)
    sampler = BatchSampler(objective.n_samples, config.batch_size, rng)
    start = objective.initial_point() if initial_params is None else initial_params
    state = OptimizerState(project(config.region, np.asarray(start, dtype=float)))

    steps_per_epoch = sampler.batches_per_epoch / (config.bundle_size - 1)
    budget = config.max_steps
    if config.max_epochs is not None:
        by_epochs = int(np.ceil(config.max_epochs * steps_per_epoch))
        budget = by_epochs if budget is None else min(budget, by_epochs)
    every = _log_points(budget, log_every)

    is_classifier = hasattr(objective, "accuracy")
    header = {
        **(header or {}),
        "problem": getattr(objective, "name", type(objective).__name__),
        "optimizer": optimizer,
        "dim": objective.dim,
        "n_samples": objective.n_samples,
        "total_steps": budget,
        "log_every": every,
        **config.describe(),
    }
    trace = RunTrace(header)
    if on_start is not None:
        on_start(header)
    trace.initial_objective = objective.full_objective(state.params)
    running_sum = state.params.copy() if track_average else None

    t0 = time.perf_counter()
    try:
        for t in range(1, budget + 1):
            report = update(state, objective, config, sampler)
            if not contains(config.region, state.params):
                raise NumericalError("projection left the iterate outside the feasible region")
            full, acc = None, None
            if t % every == 0 or t == budget:
                full = objective.full_objective(state.params)
                if not np.isfinite(full):
                    raise NumericalError(f"full objective is {full} after step {t}")
                if is_classifier:
                    acc = objective.accuracy(state.params)
            if track_average:
                running_sum += state.params
            rec = StepRecord(
                step=t,
                sampled_loss=report.sampled_loss,
                dual_value=report.dual_value,
                step_type=report.step_type,
                alpha=tuple(float(a) for a in report.alpha.alpha),
                param_norm_sq=float(state.params @ state.params),
                full_obj=full,
                elapsed_s=(time.perf_counter() - t0) if timing else None,
                accuracy=acc,
                gamma=report.gamma,
            )
            trace.records.append(rec)
            if logger_fn is not None:
                logger_fn(rec)
    except KeyboardInterrupt:
        trace.status = "interrupted"
        logger.warning("interrupted after %d steps", state.step_index)
    except NumericalError as exc:
        trace.status = "diverged"
        trace.final_params = state.params
        exc.trace = trace
        raise
    trace.final_params = state.params
    if track_average:
        trace.average_params = running_sum / (state.step_index + 1)
    return trace
