"""Invariant and convergence checks shared by ``verify`` and the test suite.

Each check returns a :class:`CheckResult` holding a verdict plus the
numbers it was based on, so failures can be diagnosed from the JSON report.
Sizes default to the full acceptance settings; ``quick=True`` variants
are chosen by the CLI for smoke runs.
"""

from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..bundle import add_linearization, bundle_minimizer, init_bundle, model_value
from ..objectives import (
    make_interp_least_squares,
    make_mlp_objective,
    make_objective,
    make_oscillation_1d,
    make_rsi_objective,
    make_separable_hinge,
)
from ..objectives.base import BatchSampler
from ..optimizer import BoratConfig, OptimizerState, step, train
from ..projections import FeasibleRegion
from ..simplex_qp import (
    brute_force_dual_batch,
    build_dual_problem,
    default_oracle_step,
    kkt_check,
    solve_dual,
    solve_dual_closed_form_n2,
    solve_dual_incremental,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail.get('summary', '')}"

    def to_json(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "seconds": round(self.seconds, 3),
                "detail": _jsonable(self.detail)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        result = fn(*args, **kwargs)
        result.seconds = time.perf_counter() - t0
        return result

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# --- random dual problems -------------------------------------------------

QP_SIZES = (2, 3, 4, 5)
QP_ETAS = (0.01, 0.1, 1.0)


def random_bundle_rows(rng, n: int, d: int = 20):
    """``n - 1`` standard-normal gradient rows with ``|normal|`` offsets, then
    the zero bound row with offset zero."""
    rows = [rng.standard_normal(d) for _ in range(n - 1)]
    offsets = list(np.abs(rng.standard_normal(n - 1)))
    return rows + [np.zeros(d)], offsets + [0.0]


def qp_suite(n_problems: int, seed: int = 0):
    """Deterministic list of ``(N, eta, DualProblem)`` cycling through sizes and etas."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n_problems):
        n = QP_SIZES[k % len(QP_SIZES)]
        eta = QP_ETAS[(k // len(QP_SIZES)) % len(QP_ETAS)]
        rows, offsets = random_bundle_rows(rng, n)
        out.append((n, eta, build_dual_problem(rows, offsets, eta)))
    return out


@_timed
def check_qp_oracle(n_problems: int = 1000, iterations: int = 100_000, tol: float = 1e-6,
                    seed: int = 0) -> CheckResult:
    """Exact dual solver against projected gradient ascent."""
    suite = qp_suite(n_problems, seed)
    gaps = np.zeros(len(suite))
    # positive when the exact solver is beaten by the iterative one
    deficits = np.zeros(len(suite))
    for n in QP_SIZES:
        idx = [k for k, (m, _, _) in enumerate(suite) if m == n]
        if not idx:
            continue
        q = np.stack([suite[k][2].q_matrix for k in idx])
        b = np.stack([suite[k][2].b_vector for k in idx])
        _, oracle_vals = brute_force_dual_batch(q, b, iterations, default_oracle_step(q))
        for k, ov in zip(idx, oracle_vals):
            exact = solve_dual(suite[k][2]).value
            gaps[k] = abs(exact - ov)
            deficits[k] = ov - exact
    passed = int(np.sum((gaps <= tol) & (deficits <= 1e-9)))
    return CheckResult("qp-oracle", passed == len(suite), {
        "summary": f"{passed}/{len(suite)} within {tol:g} (max gap {gaps.max():.3g}, "
                   f"max oracle excess {deficits.max():.3g})",
        "passed": passed, "total": len(suite), "max_gap": float(gaps.max()),
        "max_oracle_excess": float(deficits.max()),
        "iterations": iterations,
    })


@_timed
def check_kkt(n_problems: int = 1000, tol: float = 1e-7, seed: int = 0) -> CheckResult:
    suite = qp_suite(n_problems, seed)
    bad = [k for k, (_, _, p) in enumerate(suite) if not kkt_check(p, solve_dual(p), tol)]
    return CheckResult("kkt", not bad, {
        "summary": f"{len(suite) - len(bad)}/{len(suite)} pass KKT at tol {tol:g}",
        "failures": bad[:20],
    })


@_timed
def check_incremental(n_problems: int = 500, seed: int = 0) -> CheckResult:
    """Incremental re-solve after adding a row equals a from-scratch solve bit for bit."""
    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(n_problems):
        n = int(rng.integers(3, 8))
        rows, offsets = random_bundle_rows(rng, n)
        eta = float(rng.choice(QP_ETAS))
        small = build_dual_problem(rows[:n - 2] + rows[-1:], offsets[:n - 2] + offsets[-1:], eta)
        full = build_dual_problem(rows, offsets, eta)
        inc = solve_dual_incremental(full, solve_dual(small).candidates, n - 2)
        ref = solve_dual(full)
        if not (np.array_equal(inc.alpha, ref.alpha) and inc.value == ref.value):
            mismatches += 1
    return CheckResult("incremental", mismatches == 0, {
        "summary": f"{n_problems - mismatches}/{n_problems} bitwise equal",
        "mismatches": mismatches,
    })


@_timed
def check_closed_form(trials: int = 10_000, tol: float = 1e-9, seed: int = 1) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(trials):
        d = int(rng.integers(1, 21))
        g = 10.0 ** rng.uniform(-3, 2) * rng.standard_normal(d)
        if k % 500 == 0:
            g = np.zeros(d)
        loss = 10.0 ** rng.uniform(-4, 2)
        eta = 10.0 ** rng.uniform(-3, 1)
        exact = solve_dual(build_dual_problem([g, np.zeros(d)], [loss, 0.0], eta)).alpha[0]
        worst = max(worst, abs(exact - solve_dual_closed_form_n2(loss, float(g @ g), eta)))
    return CheckResult("closed-form", worst <= tol, {
        "summary": f"max |alpha_1 difference| {worst:.3g} over {trials} bundles (tol {tol:g})",
        "max_diff": worst,
    })


def _random_bundle(rng, n: int, d: int, eta: float):
    """A bundle grown the way the optimiser grows it, with random loss values."""
    anchor = rng.standard_normal(d)
    bundle = init_bundle(anchor, eta, rng.uniform(0.1, 2.0), rng.standard_normal(d), capacity=10)
    while bundle.size < n:
        site = bundle_minimizer(bundle, solve_dual(bundle.dual_problem()))
        site = site + 0.1 * rng.standard_normal(d)
        bundle = add_linearization(bundle, rng.uniform(0.0, 2.0), rng.standard_normal(d), site)
    return bundle


@_timed
def check_monotonicity(trials: int = 10_000, tol: float = 1e-9, seed: int = 2) -> CheckResult:
    """Adding a row to a bundle never lowers the dual optimum."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 6))
        d = int(rng.integers(1, 11))
        bundle = _random_bundle(rng, n, d, 10.0 ** rng.uniform(-2, 1))
        before = solve_dual(bundle.dual_problem())
        grown = add_linearization(bundle, rng.uniform(0.0, 2.0), rng.standard_normal(d),
                                  bundle.anchor + rng.standard_normal(d))
        after = solve_dual(grown.dual_problem())
        worst = max(worst, before.value - after.value)
    return CheckResult("monotonicity", worst <= tol, {
        "summary": f"largest decrease {worst:.3g} over {trials} trials (tol {tol:g})",
        "max_decrease": worst,
    })


@_timed
def check_duality(trials: int = 1000, rtol: float = 1e-7, seed: int = 3) -> CheckResult:
    """Primal model value at the bundle minimiser equals the dual optimum."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 11))
        d = int(rng.integers(1, 21))
        bundle = _random_bundle(rng, n, d, 10.0 ** rng.uniform(-2, 1))
        sol = solve_dual(bundle.dual_problem())
        primal = model_value(bundle, bundle_minimizer(bundle, sol))
        worst = max(worst, abs(primal - sol.value) / max(1.0, abs(sol.value)))
    return CheckResult("duality", worst <= rtol, {
        "summary": f"max relative primal-dual gap {worst:.3g} over {trials} bundles (tol {rtol:g})",
        "max_gap": worst,
    })


# --- convergence rates ------------------------------------------------------

@_timed
def check_convex_rate(horizons=(100, 1000, 10_000), eta: float = 1.0, sizes=(2, 3),
                      seed: int = 0) -> CheckResult:
    """Averaged iterate on separable hinge data against the convex Lipschitz bound."""
    obj, meta = make_separable_hinge(n_samples=20, d=50, seed=seed)
    dist_sq = float(np.sum((obj.initial_point() - meta.minimizer) ** 2))
    rows, ok = [], True
    for n in sizes:
        for horizon in horizons:
            cfg = BoratConfig(eta=eta, bundle_size=n, resample=False, max_steps=horizon, seed=seed)
            trace = train(obj, cfg, log_every=horizon, timing=False, track_average=True)
            gap = obj.full_objective(trace.average_params)
            bound = (meta.lipschitz_c * math.sqrt(dist_sq / (horizon + 1))
                     + dist_sq / (eta * (horizon + 1)))
            ok &= gap <= bound
            rows.append({"n": n, "T": horizon, "gap": gap, "bound": bound})
    return CheckResult("rate-convex", bool(ok), {
        "summary": "; ".join(f"N={r['n']} T={r['T']}: {r['gap']:.3g} <= {r['bound']:.3g}" for r in rows),
        "rows": rows,
    })


def resolution_floor(obj) -> float:
    """Smallest least-squares objective doubles can resolve: half the square of
    a residual of 16 ulps of the largest target.  The envelope keeps
    shrinking past this, the computed objective cannot."""
    return 0.5 * (16 * np.finfo(float).eps * float(np.max(np.abs(obj.targets)))) ** 2


@_timed
def check_strong_rate(max_steps: int = 10_000, sizes=(2, 3), log_every: int = 10, seed: int = 0,
                      target: float = 1e-8) -> CheckResult:
    """Least squares with eta = 1/(2 beta): linear envelope and final objective."""
    obj, meta = make_interp_least_squares(seed=seed)
    eta = 1.0 / (2.0 * meta.beta)
    dist_sq = float(np.sum((obj.initial_point() - meta.minimizer) ** 2))
    floor = resolution_floor(obj)
    rows, ok = [], True
    for n in sizes:
        cfg = BoratConfig(eta=eta, bundle_size=n, resample=False, max_steps=max_steps, seed=seed)
        trace = train(obj, cfg, log_every=log_every, timing=False)
        violations = 0
        for s, f in trace.logged():
            envelope = 0.5 * meta.beta * math.exp(-meta.strong_convexity * eta * (s - 1) / 2.0) * dist_sq
            violations += f > envelope + floor
        final = trace.logged()[-1][1]
        ok &= violations == 0 and final < target
        rows.append({"n": n, "violations": violations, "final": final})
    return CheckResult("rate-strongly-convex", bool(ok), {
        "summary": "; ".join(f"N={r['n']}: {r['violations']} envelope violations, final {r['final']:.3g}"
                             for r in rows),
        "rows": rows, "eta": eta, "alpha": meta.strong_convexity, "beta": meta.beta,
        "floor": floor,
    })


@_timed
def check_rsi_rate(max_steps: int = 2000, log_every: int = 20, seed: int = 0) -> CheckResult:
    """Same-batch three-row bundles on the RSI objective under the exponential envelope."""
    obj, meta = make_rsi_objective(seed=seed)
    beta, mu = meta.beta, meta.rsi_mu
    eta = min(1.0 / (4 * beta), 1.0 / (4 * mu), mu / (2 * beta**2))
    dist_sq = float(np.sum((obj.initial_point() - meta.minimizer) ** 2))
    cfg = BoratConfig(eta=eta, bundle_size=3, resample=False, max_steps=max_steps, seed=seed)
    trace = train(obj, cfg, log_every=log_every, timing=False)
    violations, worst = 0, 0.0
    for s, f in trace.logged():
        envelope = math.exp(-(3.0 / 8.0) * eta * mu * (s - 1)) * dist_sq
        violations += f > envelope
        worst = max(worst, f / envelope)
    return CheckResult("rate-rsi", violations == 0, {
        "summary": f"{violations} envelope violations at {len(trace.logged())} checkpoints, "
                   f"max ratio {worst:.3g}, final {trace.logged()[-1][1]:.3g}",
        "eta": eta, "mu": mu, "beta": beta, "audit_min_ratio": meta.notes["rsi_audit_min_ratio"],
    })


# --- step structure on smooth objectives ------------------------------------

FORBIDDEN_N3 = ("ALIG", "EALIG", "MAX3")


@_timed
def check_step_structure(steps: int = 10_000, seed: int = 0) -> CheckResult:
    """On smooth objectives with eta = 1/(2 beta) and same-batch N=3:
    inner weight is 1 at positive loss, forbidden step types never occur and
    consecutive gradients never point against each other."""
    problems = [make_interp_least_squares(seed=seed), make_rsi_objective(seed=seed)]
    rows, ok = [], True
    for obj, meta in problems:
        cfg = BoratConfig(eta=1.0 / (2.0 * meta.beta), bundle_size=3, resample=False,
                          max_steps=steps, seed=seed)
        state = OptimizerState(obj.initial_point())
        sampler = BatchSampler(obj.n_samples, 1, np.random.default_rng(seed))
        counts, gamma_bad, align_min = {}, 0, math.inf
        for _ in range(steps):
            rep = step(state, obj, cfg, sampler)
            counts[rep.step_type] = counts.get(rep.step_type, 0) + 1
            if rep.sampled_loss > 0 and rep.gamma != 1.0:
                gamma_bad += 1
            if rep.alignment is not None:
                align_min = min(align_min, rep.alignment)
        forbidden = sum(counts.get(k, 0) for k in FORBIDDEN_N3)
        ok &= forbidden == 0 and gamma_bad == 0 and align_min >= -1e-9
        rows.append({"problem": obj.name, "counts": counts, "gamma_not_one": gamma_bad,
                     "min_alignment": align_min})
    return CheckResult("step-structure", bool(ok), {
        "summary": "; ".join(f"{r['problem']}: types {r['counts']}, gamma!=1 x{r['gamma_not_one']}, "
                             f"min <g,g'> {r['min_alignment']:.3g}" for r in rows),
        "rows": rows,
    })


@_timed
def check_smooth_bound(probes: int = 10_000, seed: int = 4) -> CheckResult:
    """``loss >= |grad|^2 / (2 beta)`` on the smooth objectives."""
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for obj, meta in (make_interp_least_squares(seed=seed), make_rsi_objective(seed=seed)):
        for _ in range(probes // 2):
            w = meta.minimizer + rng.standard_normal(obj.dim) * 10.0 ** rng.uniform(-3, 1)
            loss, g = obj.loss_and_grad([int(rng.integers(obj.n_samples))], w)
            worst = max(worst, float(g @ g) / (2 * meta.beta) - loss)
    return CheckResult("smooth-bound", worst <= 1e-9, {
        "summary": f"max (|g|^2/(2 beta) - loss) = {worst:.3g} over {probes} probes",
        "max_excess": worst,
    })


# --- robustness -------------------------------------------------------------

OSC_ETAS = (0.01, 0.1, 1.0, 10.0)
SWEEP_ETAS = (0.01, 0.1, 1.0, 10.0)
SWEEP_RADII = (50.0, 100.0, 150.0, 200.0, 250.0)


def reaches(trace, threshold_sq: float) -> bool:
    return any(r.param_norm_sq < threshold_sq for r in trace.records)


@_timed
def check_osc_robustness(steps: int = 1000) -> CheckResult:
    obj, _ = make_oscillation_1d()
    alig = train(obj, BoratConfig(eta=10.0, bundle_size=2, max_steps=steps), optimizer="alig", timing=False)
    alig_ok = not reaches(alig, 1e-6)
    borat = {}
    for eta in OSC_ETAS:
        trace = train(obj, BoratConfig(eta=eta, bundle_size=3, max_steps=steps), timing=False)
        borat[eta] = reaches(trace, 1e-6)
    ok = alig_ok and all(borat.values())
    return CheckResult("robustness-osc1d", ok, {
        "summary": f"ALI-G eta=10 stuck: {alig_ok} (final w {alig.final_params[0]:.3g}); "
                   f"N=3 reaches |w|<1e-3 for eta {[e for e, v in borat.items() if v]}",
        "alig_stuck": alig_ok, "borat_converged": borat,
    })


def mlp_sweep_counts(epochs: float = 100, batch_size: int = 8, target: float = 1e-2, seed: int = 1,
                     workers: int = 1):
    """Count sweep cells reaching ``target`` train loss for N=2 and N=3."""
    from .config import RunConfig
    from .runner import sweep

    out = {}
    for n in (2, 3):
        cfg = RunConfig("mlp", BoratConfig(eta=1.0, bundle_size=n, max_epochs=epochs,
                                           batch_size=batch_size, seed=seed), timing=False)
        grid = sweep(cfg, SWEEP_ETAS, SWEEP_RADII, workers=workers)
        out[n] = (grid.count_below(target), grid.final_obj)
    return out


@_timed
def check_mlp_robustness(epochs: float = 100, target: float = 1e-2, workers: int = 1) -> CheckResult:
    counts = mlp_sweep_counts(epochs=epochs, target=target, workers=workers)
    c2, c3 = counts[2][0], counts[3][0]
    return CheckResult("robustness-mlp", c3 >= c2, {
        "summary": f"cells below {target:g}: N=3 {c3}/20, N=2 {c2}/20 ({epochs:g} epochs)",
        "n3": c3, "n2": c2, "grid_n2": counts[2][1], "grid_n3": counts[3][1],
    })


# --- objectives -------------------------------------------------------------

def gradient_objectives(seed: int = 0):
    yield "lsq", make_interp_least_squares(seed=seed)[0]
    yield "hinge", make_separable_hinge(seed=seed)[0]
    yield "osc1d", make_oscillation_1d()[0]
    yield "rsi", make_rsi_objective(seed=seed, audit_samples=100)[0]
    yield "mlp-ce", make_mlp_objective(n_train=64, seed=seed)[0]
    yield "mlp-hinge", make_mlp_objective(n_train=64, loss="hinge", seed=seed)[0]


def fd_gradient(obj, batch, w, h: float = 1e-6) -> np.ndarray:
    out = np.empty_like(w)
    for i in range(w.size):
        e = np.zeros_like(w)
        e[i] = h
        out[i] = (obj.loss_and_grad(batch, w + e)[0] - obj.loss_and_grad(batch, w - e)[0]) / (2 * h)
    return out


@_timed
def check_gradients(probes: int = 100, seed: int = 5) -> CheckResult:
    """Central differences against analytic gradients, tol ``max(1e-5, 1e-3 |g|)``."""
    rng = np.random.default_rng(seed)
    failures = {}
    for name, obj in gradient_objectives():
        bad = 0
        for _ in range(probes):
            w = obj.initial_point() + rng.standard_normal(obj.dim) * rng.uniform(0.1, 1.0)
            batch = obj.sample(rng, int(rng.integers(1, 4)))
            _, g = obj.loss_and_grad(batch, w)
            err = float(np.max(np.abs(fd_gradient(obj, batch, w) - g)))
            bad += err > max(1e-5, 1e-3 * float(np.linalg.norm(g)))
        failures[name] = bad
    total = sum(failures.values())
    return CheckResult("gradients", total == 0, {
        "summary": f"{total} failing probes ({probes} per objective): {failures}",
        "failures": failures,
    })


@_timed
def check_objective_contracts(probes: int = 100_000, seed: int = 6) -> CheckResult:
    """Nonnegative losses everywhere probed; zero full objective at planted minimisers."""
    rng = np.random.default_rng(seed)
    min_loss, interp = math.inf, {}
    for name in ("lsq", "hinge", "osc1d", "rsi", "mlp"):
        kwargs = {"audit_samples": 100} if name == "rsi" else {}
        obj, meta = make_objective(name, seed=0, **kwargs)
        per = probes // 5
        chunk = 1000 if name != "mlp" else 100
        for _ in range(per // chunk):
            ws = obj.initial_point() + rng.standard_normal((chunk, obj.dim)) * 10.0 ** rng.uniform(-2, 1)
            for w in ws:
                min_loss = min(min_loss, float(np.min(obj.sample_losses(w))))
        if meta.minimizer is not None:
            interp[name] = obj.full_objective(meta.minimizer)
    ok = min_loss >= 0.0 and all(v <= 1e-12 for v in interp.values())
    return CheckResult("objective-contracts", ok, {
        "summary": f"min loss {min_loss:.3g}; f(w*) = {interp}",
        "min_loss": min_loss, "interpolation": interp,
    })


# --- determinism ------------------------------------------------------------

@_timed
def check_determinism(seed: int = 11) -> CheckResult:
    """Run and sweep twice each; compare every numeric trace field."""
    from ..trace import read_trace
    from .config import RunConfig
    from .runner import run, sweep

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        runs = []
        for k in range(2):
            cfg = RunConfig("mlp", BoratConfig(eta=1.0, bundle_size=3, max_steps=200, batch_size=8,
                                               seed=seed, momentum=0.9,
                                               region=FeasibleRegion("l2_ball", 100.0)),
                            out=tmp / f"run{k}.csv", log_every=10)
            run(cfg)
            runs.append(read_trace(tmp / f"run{k}.csv").numeric_rows())
        run_same = runs[0] == runs[1] and len(runs[0]) == 200
        grids = []
        for k in range(2):
            cfg = RunConfig("lsq", BoratConfig(eta=1.0, bundle_size=3, max_steps=100, seed=seed))
            grid = sweep(cfg, (0.1, 1.0), (10.0, 100.0), out_dir=tmp / f"sweep{k}")
            rows = [read_trace(p).numeric_rows() for line in grid.traces for p in line]
            grids.append((grid.final_obj.tolist(), rows))
        sweep_same = grids[0] == grids[1]
    return CheckResult("determinism", run_same and sweep_same, {
        "summary": f"run traces identical: {run_same}; sweep traces identical: {sweep_same}",
    })


SUITES = {
    "qp-oracle": [check_qp_oracle],
    "kkt": [check_kkt, check_incremental],
    "closed-form": [check_closed_form],
    "monotonicity": [check_monotonicity],
    "duality": [check_duality],
    "rates": [check_convex_rate, check_strong_rate, check_rsi_rate],
    "step-structure": [check_step_structure, check_smooth_bound],
    "robustness": [check_osc_robustness, check_mlp_robustness],
    "gradients": [check_gradients, check_objective_contracts],
    "determinism": [check_determinism],
}

# reduced sizes for `verify --quick`
QUICK = {
    "check_qp_oracle": {"n_problems": 100, "iterations": 20_000},
    "check_kkt": {"n_problems": 100},
    "check_incremental": {"n_problems": 50},
    "check_closed_form": {"trials": 1000},
    "check_monotonicity": {"trials": 500},
    "check_duality": {"trials": 100},
    "check_convex_rate": {"horizons": (100, 1000)},
    "check_strong_rate": {"max_steps": 3000, "sizes": (2,)},
    "check_rsi_rate": {"max_steps": 500},
    "check_step_structure": {"steps": 1000},
    "check_smooth_bound": {"probes": 1000},
    "check_osc_robustness": {},
    "check_mlp_robustness": {"epochs": 20},
    "check_gradients": {"probes": 10},
    "check_objective_contracts": {"probes": 5000},
    "check_determinism": {},
}


def run_suites(names, quick: bool = False, on_result=None) -> list:
    if "all" in names:
        names = list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)} or 'all'")
    results = []
    for name in names:
        for check in SUITES[name]:
            kwargs = QUICK.get(check.__name__, {}) if quick else {}
            res = check(**kwargs)
            results.append(res)
            if on_result is not None:
                on_result(res)
    return results
