import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from borat.errors import ContractViolation, InvalidInputError
from borat.objectives import make_interp_least_squares, make_objective, make_separable_hinge
from borat.objectives.base import ObjectiveMetadata, StochasticObjective
from borat.optimizer import BoratConfig, OptimizerState, alig_step, classify_step, step, train
from borat.projections import L2_BALL, FeasibleRegion


class HalfSquare(StochasticObjective):
    """``w^2 / 2`` summed over coordinates, optionally plus a constant."""

    name = "half_square"

    def __init__(self, dim=1, shift=0.0):
        super().__init__(dim, 1, ObjectiveMetadata(convex=True, beta=1.0))
        self.shift = shift

    def loss_and_grad(self, batch, w):
        return float(0.5 * w @ w + self.shift), w.copy()

    def sample_losses(self, w):
        return np.array([0.5 * w @ w + self.shift])


def one_step(w, n=2, eta=1.0, objective=None, **kwargs):
    objective = objective or HalfSquare(len(w))
    state = OptimizerState(np.array(w, dtype=float))
    cfg = BoratConfig(eta=eta, bundle_size=n, max_steps=1, **kwargs)
    report = step(state, objective, cfg, np.random.default_rng(0))
    return state, report


# --- configuration ------------------------------------------------------------

@pytest.mark.parametrize("kwargs", [
    {"eta": 0.0}, {"eta": float("nan")}, {"bundle_size": 1}, {"bundle_size": 11},
    {"momentum": 1.0}, {"momentum": -0.1}, {"batch_size": 0}, {"max_steps": None},
    {"max_steps": -1},
])
def test_config_rejects_bad_values(kwargs):
    base = {"eta": 1.0, "max_steps": 10, **kwargs}
    with pytest.raises(InvalidInputError):
        BoratConfig(**base)


def test_describe_is_plain_data():
    d = BoratConfig(eta=0.5, region=FeasibleRegion(L2_BALL, 3.0), max_steps=1).describe()
    assert d["region"] == "l2:3" and d["eta"] == 0.5


# --- step classification ------------------------------------------------------

@pytest.mark.parametrize("alpha, label", [
    ([1, 0, 0], "SGD"), ([0, 1, 0], "SEGD"), ([0, 0, 1], "ZERO"), ([0.5, 0, 0.5], "ALIG"),
    ([0, 0.5, 0.5], "EALIG"), ([0.5, 0.5, 0], "MAX2"), ([0.2, 0.3, 0.5], "MAX3"),
])
def test_three_row_labels(alpha, label):
    assert classify_step(np.array(alpha, dtype=float), 3) == label


def test_other_sizes_use_support_sets():
    assert classify_step(np.array([1.0, 0.0]), 2) == "{1}"
    assert classify_step(np.array([0.0, 0.5, 0.0, 0.5]), 4) == "{2,4}"


# --- single steps -------------------------------------------------------------

def test_two_row_step_on_half_square():
    state, report = one_step([1.0])
    assert report.alpha.alpha[0] == pytest.approx(0.5)
    np.testing.assert_allclose(state.params, [0.5])
    assert report.step_type == "{1,2}"
    assert state.step_index == 1


def test_zero_loss_leaves_params_unchanged():
    for n in (2, 3, 4):
        state, report = one_step([0.0, 0.0], n=n)
        np.testing.assert_array_equal(state.params, [0.0, 0.0])
        assert report.alpha.alpha[-1] == 1.0


def test_projection_lands_on_the_sphere():
    obj = HalfSquare(3, shift=0.0)
    state = OptimizerState(np.array([3.0, 4.0, 0.0]))
    cfg = BoratConfig(eta=0.01, bundle_size=3, max_steps=1, region=FeasibleRegion(L2_BALL, 2.0))
    step(state, obj, cfg, np.random.default_rng(0))
    assert abs(float(state.params @ state.params) - 2.0) <= 1e-9


def test_momentum_carries_velocity():
    obj = HalfSquare(1)
    state = OptimizerState(np.array([1.0]))
    cfg = BoratConfig(eta=1.0, bundle_size=2, momentum=0.5, max_steps=1)
    step(state, obj, cfg, np.random.default_rng(0))
    # v = -0.5, w = 1 + 0.5 * (-0.5) - 0.5
    np.testing.assert_allclose(state.velocity, [-0.5])
    np.testing.assert_allclose(state.params, [0.25])


def test_loss_below_bound_is_a_contract_violation():
    with pytest.raises(ContractViolation):
        one_step([1.0], lower_bound=5.0)


def test_lower_bound_shifts_the_target():
    # loss w^2/2 + 1 with bound 1 behaves exactly like w^2/2 with bound 0
    state, _ = one_step([1.0], objective=HalfSquare(1, shift=1.0), lower_bound=1.0)
    np.testing.assert_allclose(state.params, [0.5])


def test_params_shape_is_checked():
    with pytest.raises(InvalidInputError):
        one_step([1.0, 2.0], objective=HalfSquare(3))


def test_growth_uses_the_unconstrained_minimizer():
    _, report = one_step([1.0], n=3)
    # second linearisation is taken at 0.5 where the loss is 0.125
    assert report.losses == (0.5, 0.125)
    assert report.alignment == pytest.approx(0.5)
    assert report.batches_consumed == 2


# --- closed form --------------------------------------------------------------

def test_alig_step_on_half_square():
    state = OptimizerState(np.array([1.0]))
    report = alig_step(state, HalfSquare(1), BoratConfig(eta=1.0, max_steps=1), np.random.default_rng(0))
    assert report.gamma == 0.5
    np.testing.assert_allclose(state.params, [0.5])


def test_alig_caps_at_sgd():
    state = OptimizerState(np.array([1.0]))
    report = alig_step(state, HalfSquare(1), BoratConfig(eta=0.1, max_steps=1), np.random.default_rng(0))
    assert report.gamma == 1.0 and report.step_type == "{1}"
    np.testing.assert_allclose(state.params, [0.9])


def test_alig_zero_gradient_with_positive_loss_is_flagged():
    state = OptimizerState(np.array([0.0]))
    report = alig_step(state, HalfSquare(1, shift=1.0), BoratConfig(eta=1.0, max_steps=1),
                       np.random.default_rng(0))
    assert report.degenerate and report.gamma == 1.0
    np.testing.assert_array_equal(state.params, [0.0])


def test_alig_needs_two_rows():
    with pytest.raises(InvalidInputError):
        alig_step(OptimizerState(np.array([1.0])), HalfSquare(1),
                  BoratConfig(eta=1.0, bundle_size=3, max_steps=1))


@pytest.mark.parametrize("seed", range(100))
def test_alig_matches_two_row_bundle(seed):
    rng = np.random.default_rng(seed)
    problem = ("lsq", "hinge", "rsi")[seed % 3]
    obj, _ = make_objective(problem, seed=seed)
    eta = float(rng.choice([0.01, 0.1, 1.0, 10.0]))
    cfg = BoratConfig(eta=eta, bundle_size=2, max_steps=1)
    w = obj.initial_point() + rng.standard_normal(obj.dim)
    a, b = OptimizerState(w), OptimizerState(w)
    for _ in range(20):
        # twin generators so both paths see the same sample
        batch_seed = int(rng.integers(1 << 31))
        step(a, obj, cfg, np.random.default_rng(batch_seed))
        alig_step(b, obj, cfg, np.random.default_rng(batch_seed))
    np.testing.assert_allclose(a.params, b.params, rtol=1e-12, atol=1e-12)


# --- training -----------------------------------------------------------------

def test_train_records_and_budget():
    obj, _ = make_interp_least_squares(seed=0)
    cfg = BoratConfig(eta=1.0, bundle_size=3, max_steps=50, seed=0)
    trace = train(obj, cfg, log_every=10, timing=False)
    assert [r.step for r in trace.records] == list(range(1, 51))
    assert [s for s, _ in trace.logged()] == [10, 20, 30, 40, 50]
    assert all(r.elapsed_s is None for r in trace.records)
    assert trace.status == "complete"


def test_epoch_budget_counts_sampled_batches():
    obj, _ = make_interp_least_squares(n_samples=10, seed=0)
    trace = train(obj, BoratConfig(eta=1.0, bundle_size=3, max_epochs=4, batch_size=2), timing=False)
    # five batches per epoch and two batches per step
    assert len(trace.records) == 10


def test_train_is_deterministic():
    obj, _ = make_interp_least_squares(seed=3)
    cfg = BoratConfig(eta=0.5, bundle_size=4, max_steps=200, seed=9, momentum=0.3)
    one = train(obj, cfg, timing=False)
    two = train(obj, cfg, timing=False)
    assert one.numeric_rows() == two.numeric_rows()
    np.testing.assert_array_equal(one.final_params, two.final_params)


def test_strongly_convex_lsq_converges():
    obj, meta = make_interp_least_squares(seed=0)
    cfg = BoratConfig(eta=1.0 / (2.0 * meta.beta), bundle_size=3, max_steps=10_000, seed=0)
    trace = train(obj, cfg, log_every=1000, timing=False)
    assert trace.logged()[-1][1] < 1e-8


def test_hinge_average_obeys_lipschitz_bound():
    obj, meta = make_separable_hinge(seed=0)
    eta, horizon = 1.0, 1000
    trace = train(obj, BoratConfig(eta=eta, bundle_size=3, max_steps=horizon, seed=0),
                  timing=False, track_average=True)
    dist_sq = float(np.sum((obj.initial_point() - meta.minimizer) ** 2))
    bound = meta.lipschitz_c * np.sqrt(dist_sq / (horizon + 1)) + dist_sq / (eta * (horizon + 1))
    assert obj.full_objective(trace.average_params) <= bound


@given(st.integers(0, 10_000), st.integers(2, 5), st.sampled_from([0.1, 1.0, 10.0]))
@settings(max_examples=20, deadline=None)
def test_dual_value_bounded_by_sampled_loss(seed, n, eta):
    obj, _ = make_interp_least_squares(seed=seed)
    # on one convex sample every linearisation underestimates the loss at the anchor
    cfg = BoratConfig(eta=eta, bundle_size=n, max_steps=20, seed=seed, resample=False)
    trace = train(obj, cfg, timing=False)
    for r in trace.records:
        assert -1e-12 <= r.dual_value <= r.sampled_loss + 1e-12
        assert abs(sum(r.alpha) - 1.0) <= 1e-12
