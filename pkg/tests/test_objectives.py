import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from borat.harness.checks import fd_gradient
from borat.objectives import (
    BatchSampler,
    add_label_noise,
    dataset_arrays,
    make_interp_least_squares,
    make_mlp_objective,
    make_objective,
    make_oscillation_1d,
    make_rsi_objective,
    make_separable_hinge,
    write_dataset_csv,
)
from borat.optimizer import BoratConfig, OptimizerState, alig_step, step, train
from borat.projections import L2_BALL, FeasibleRegion


# --- least squares ------------------------------------------------------------

def test_lsq_interpolates_at_planted_point():
    obj, meta = make_interp_least_squares(seed=4)
    assert obj.full_objective(meta.minimizer) <= 1e-28
    for z in range(obj.n_samples):
        _, g = obj.loss_and_grad(np.array([z]), meta.minimizer)
        assert np.max(np.abs(g)) <= 1e-12
    assert meta.convex and meta.beta == pytest.approx(np.max(np.sum(obj.features ** 2, axis=1)))


def test_lsq_needs_overparameterisation():
    with pytest.raises(ValueError):
        make_interp_least_squares(n_samples=20, d=10)


# --- hinge --------------------------------------------------------------------

def test_hinge_planted_separator_has_zero_loss():
    obj, meta = make_separable_hinge(seed=2)
    assert np.all(obj.sample_losses(meta.minimizer) == 0.0)


def test_hinge_subgradient_vanishes_with_slack():
    obj, meta = make_separable_hinge(seed=2)
    _, g = obj.loss_and_grad(obj.all_ids(), 2.0 * meta.minimizer)
    np.testing.assert_array_equal(g, np.zeros(obj.dim))


def test_hinge_needs_positive_margin():
    with pytest.raises(ValueError):
        make_separable_hinge(margin=0.0)


# --- oscillation --------------------------------------------------------------

def test_oscillation_is_even_with_minimum_at_zero():
    obj, _ = make_oscillation_1d()
    assert obj.value_and_derivative(0.6)[0] == obj.value_and_derivative(-0.6)[0]
    assert obj.value_and_derivative(0.0) == (0.0, 0.0)
    grid = np.linspace(-3, 3, 2001)
    values = np.array([obj.value_and_derivative(w)[0] for w in grid])
    assert np.all(values >= 0.0)


def test_oscillation_is_continuously_differentiable():
    obj, _ = make_oscillation_1d()
    for knot in (obj.a, obj.b):
        lo, hi = obj.value_and_derivative(knot - 1e-9), obj.value_and_derivative(knot + 1e-9)
        assert lo[0] == pytest.approx(hi[0], abs=1e-8)
        assert lo[1] == pytest.approx(hi[1], abs=1e-7)


def test_oscillation_is_nonconvex():
    obj, _ = make_oscillation_1d()
    f = lambda w: obj.value_and_derivative(w)[0]
    assert f(0.3) > 0.5 * (f(0.1) + f(0.5))


def test_capped_polyak_step_cycles():
    obj, _ = make_oscillation_1d()
    state = OptimizerState(obj.initial_point())
    cfg = BoratConfig(eta=10.0, max_steps=1)
    for expected in (-0.6, 0.6, -0.6):
        alig_step(state, obj, cfg, np.random.default_rng(0))
        assert state.params[0] == pytest.approx(expected, abs=1e-9)


def test_three_row_bundle_escapes_the_cycle():
    obj, _ = make_oscillation_1d()
    state = OptimizerState(obj.initial_point())
    cfg = BoratConfig(eta=10.0, bundle_size=3, max_steps=1)
    sizes = [abs(state.params[0])]
    for _ in range(20):
        step(state, obj, cfg, np.random.default_rng(0))
        sizes.append(abs(state.params[0]))
    assert sizes[1] < sizes[0]
    assert sizes[-1] < 1e-6


# --- restricted secant objective ----------------------------------------------

def test_rsi_audit_and_constants():
    obj, meta = make_rsi_objective(seed=0)
    assert meta.notes["rsi_audit_min_ratio"] >= meta.rsi_mu - 1e-9
    assert meta.rsi_mu > 0 and meta.beta > meta.rsi_mu
    assert meta.notes["nonconvex"]
    assert obj.full_objective(meta.minimizer) == 0.0


@given(st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_rsi_inequality_on_random_points(seed):
    obj, meta = make_rsi_objective(seed=0)
    rng = np.random.default_rng(seed)
    w = meta.minimizer + 5.0 * rng.standard_normal(obj.dim)
    e = w - meta.minimizer
    for z in range(obj.n_samples):
        _, g = obj.loss_and_grad(np.array([z]), w)
        assert g @ e >= meta.rsi_mu * (e @ e) - 1e-9


# --- mlp ----------------------------------------------------------------------

@pytest.mark.parametrize("dataset, loss", [("blobs", "ce"), ("moons", "ce"), ("blobs", "hinge")])
def test_mlp_gradient_matches_finite_differences(dataset, loss):
    obj, _ = make_mlp_objective(dataset=dataset, loss=loss, n_train=32, hidden=8, seed=1)
    rng = np.random.default_rng(0)
    for _ in range(5):
        w = obj.initial_point() + 0.1 * rng.standard_normal(obj.dim)
        batch = rng.choice(obj.n_samples, size=4, replace=False)
        _, g = obj.loss_and_grad(batch, w)
        fd = fd_gradient(obj, batch, w)
        assert np.linalg.norm(g - fd) <= 1e-4 * max(np.linalg.norm(fd), 1e-8)


def test_mlp_losses_are_nonnegative():
    for loss in ("ce", "hinge"):
        obj, _ = make_mlp_objective(loss=loss, n_train=64, seed=3)
        w = 5.0 * np.random.default_rng(1).standard_normal(obj.dim)
        assert np.all(obj.sample_losses(w) >= 0.0)


def test_mlp_rejects_large_or_unknown_datasets():
    with pytest.raises(ValueError):
        make_mlp_objective(n_train=1000)
    with pytest.raises(ValueError):
        make_mlp_objective(dataset="mnist")


def test_label_noise_extremes():
    obj, _ = make_mlp_objective(n_train=64, seed=0)
    w = obj.initial_point()
    np.testing.assert_array_equal(add_label_noise(obj, 0.0).sample_losses(w), obj.sample_losses(w))
    flipped = add_label_noise(obj, 1.0, seed=5)
    assert np.all(flipped.y != obj.y)
    assert np.all(obj.y == make_mlp_objective(n_train=64, seed=0)[0].y)
    with pytest.raises(ValueError):
        add_label_noise(obj, 1.5)


def test_label_noise_picks_other_classes():
    obj, _ = make_mlp_objective(n_train=300, n_classes=4, seed=0)
    noisy = add_label_noise(obj, 1.0, seed=1)
    assert np.all(noisy.y != obj.y)
    assert set(np.unique(noisy.y)) <= set(range(4))


def test_alig_fits_blobs_inside_the_ball():
    obj, _ = make_mlp_objective(seed=0)
    cfg = BoratConfig(eta=1.0, bundle_size=2, max_epochs=200, batch_size=8,
                      region=FeasibleRegion(L2_BALL, 100.0), seed=0)
    trace = train(obj, cfg, optimizer="alig", log_every=100, timing=False)
    assert min(v for _, v in trace.logged()) < 1e-3


# --- sampling and dataset export ----------------------------------------------

def test_sampler_visits_every_id_once_per_epoch():
    sampler = BatchSampler(10, 3, np.random.default_rng(0))
    seen = np.concatenate([sampler.next() for _ in range(sampler.batches_per_epoch)])
    assert sorted(seen.tolist()) == list(range(10))
    assert sampler.epochs_completed == 1.0


def test_dataset_csv_has_header_and_rows(tmp_path):
    obj, _ = make_objective("hinge", seed=0)
    x, y = dataset_arrays(obj)
    path = tmp_path / "data.csv"
    write_dataset_csv(path, x, y)
    lines = path.read_text().splitlines()
    assert lines[0].split(",")[-1] == "label"
    assert len(lines) == obj.n_samples + 1
    assert dataset_arrays(make_oscillation_1d()[0]) is None


def test_unknown_problem_name():
    with pytest.raises(ValueError):
        make_objective("cifar")
