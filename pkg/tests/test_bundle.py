import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from borat.bundle import (
    LowerBound,
    add_linearization,
    bundle_minimizer,
    direction,
    init_bundle,
    linear_part,
    model_value,
    offset_for,
)
from borat.errors import ContractViolation, InvalidInputError
from borat.simplex_qp import solve_dual, solve_dual_closed_form_n2


def simple_bundle(eta=1.0, capacity=3):
    return init_bundle([0.0, 0.0], eta, 0.5, [1.0, 0.0], LowerBound(), capacity)


def random_bundle(seed, n, d=5):
    rng = np.random.default_rng(seed)
    anchor = rng.standard_normal(d)
    b = init_bundle(anchor, float(rng.choice([0.1, 1.0, 3.0])), float(rng.uniform(0, 2)),
                    rng.standard_normal(d), capacity=n)
    while b.size < n:
        site = anchor + rng.standard_normal(d)
        b = add_linearization(b, float(rng.uniform(0, 2)), rng.standard_normal(d), site)
    return b


def test_init_rows():
    b = simple_bundle()
    assert b.size == 2 and b.bound_index == 1
    np.testing.assert_array_equal(b.rows[0].gradient, [1.0, 0.0])
    assert b.rows[0].offset == 0.5
    np.testing.assert_array_equal(b.rows[1].gradient, [0.0, 0.0])
    assert b.rows[1].offset == 0.0 and b.rows[1].is_bound


def test_init_with_zero_loss_gives_zero_step():
    b = init_bundle([1.0, 2.0], 1.0, 0.0, [3.0, -1.0])
    p = b.dual_problem()
    weight = solve_dual_closed_form_n2(0.0, float(p.q_matrix[0, 0]), 1.0)
    np.testing.assert_array_equal(bundle_minimizer(b, [weight, 1.0 - weight]), b.anchor)


def test_init_shifts_by_lower_bound():
    b = init_bundle([0.0], 1.0, 1.5, [1.0], LowerBound(1.0))
    assert b.rows[0].offset == 0.5


def test_init_rejects_loss_below_bound():
    with pytest.raises(ContractViolation):
        init_bundle([0.0], 1.0, 0.5, [1.0], LowerBound(1.0))


@pytest.mark.parametrize("kwargs", [{"eta": 0.0}, {"capacity": 1}, {"capacity": 11}, {"grad": [1.0]}])
def test_init_rejects_bad_arguments(kwargs):
    args = {"anchor": [0.0, 0.0], "eta": 1.0, "loss": 0.5, "grad": [1.0, 0.0], "capacity": 2, **kwargs}
    with pytest.raises(InvalidInputError):
        init_bundle(args["anchor"], args["eta"], args["loss"], args["grad"], capacity=args["capacity"])


def test_offset_examples():
    assert offset_for([1.0, 2.0], 0.7, [3.0, 4.0], [1.0, 2.0]) == 0.7
    assert offset_for([1.0, 0.0], 3.0, [2.0, 0.0], [0.0, 0.0]) == 1.0
    # half w^2 linearised at 0.5 and read at the anchor 1
    assert offset_for([0.5], 0.125, [0.5], [1.0]) == pytest.approx(0.375)


def test_minimizer_examples():
    b = simple_bundle()
    np.testing.assert_array_equal(bundle_minimizer(b, [0.0, 1.0]), b.anchor)
    np.testing.assert_array_equal(bundle_minimizer(b, [1.0, 0.0]), [-1.0, 0.0])
    np.testing.assert_array_equal(bundle_minimizer(b, [0.5, 0.5]), [-0.5, 0.0])
    with pytest.raises(InvalidInputError):
        bundle_minimizer(b, [1.0, 0.0, 0.0])


def test_growth_on_half_square():
    # loss w^2 / 2 at w = 1: the two-row minimiser is 0.5
    b = init_bundle([1.0], 1.0, 0.5, [1.0], capacity=3)
    sol = solve_dual(b.dual_problem())
    site = bundle_minimizer(b, sol)
    np.testing.assert_allclose(site, [0.5])
    grown = add_linearization(b, 0.125, site, site)
    assert grown.size == 3 and grown.rows[-1].is_bound
    np.testing.assert_allclose(grown.rows[1].gradient, [0.5])
    assert grown.rows[1].offset == pytest.approx(0.375)


def test_growth_respects_capacity_and_bound():
    b = simple_bundle(capacity=2)
    with pytest.raises(InvalidInputError):
        add_linearization(b, 0.1, [0.0, 0.0], [0.0, 0.0])
    b = init_bundle([0.0], 1.0, 2.0, [1.0], LowerBound(1.0), 3)
    with pytest.raises(ContractViolation):
        add_linearization(b, 0.5, [1.0], [0.0])


@given(st.integers(0, 100_000), st.integers(2, 5))
@settings(max_examples=50, deadline=None)
def test_duplicate_linearization_keeps_dual_optimum(seed, n):
    b = random_bundle(seed, n)
    cap = type(b)(b.anchor, b.eta, b.rows, n + 1, b.bound)
    first = b.rows[0]
    grown = add_linearization(cap, first.loss_at_site, first.gradient, first.site)
    assert solve_dual(grown.dual_problem()).value == pytest.approx(
        solve_dual(b.dual_problem()).value, abs=1e-9)


def test_model_at_anchor_is_largest_offset():
    b = random_bundle(3, 4)
    assert model_value(b, b.anchor) == pytest.approx(max(b.offsets()))
    assert model_value(b, b.anchor) >= 0.0


def test_bound_only_model_is_proximal_term():
    b = init_bundle([1.0, -1.0], 0.5, 0.0, [0.0, 0.0])
    point = np.array([2.0, 1.0])
    assert model_value(b, point) == pytest.approx(np.sum((point - b.anchor) ** 2) / (2 * 0.5))


@given(st.integers(0, 100_000), st.integers(2, 6))
@settings(max_examples=100, deadline=None)
def test_primal_minimum_equals_dual_maximum(seed, n):
    b = random_bundle(seed, n)
    sol = solve_dual(b.dual_problem())
    primal = model_value(b, bundle_minimizer(b, sol))
    assert primal == pytest.approx(sol.value, rel=1e-7, abs=1e-9)


@given(st.integers(0, 100_000), st.integers(2, 5), st.floats(0, 1))
@settings(max_examples=100, deadline=None)
def test_model_is_convex_along_segments(seed, n, t):
    b = random_bundle(seed, n)
    rng = np.random.default_rng(seed + 1)
    x, y = rng.standard_normal((2, b.anchor.size))
    mid = model_value(b, t * x + (1 - t) * y)
    assert mid <= t * model_value(b, x) + (1 - t) * model_value(b, y) + 1e-9


@given(st.integers(0, 100_000), st.integers(2, 6))
@settings(max_examples=50, deadline=None)
def test_bound_row_stays_last_and_model_stays_nonnegative(seed, n):
    b = random_bundle(seed, n)
    assert b.rows[-1].is_bound and not any(r.is_bound for r in b.rows[:-1])
    rng = np.random.default_rng(seed)
    for _ in range(10):
        assert linear_part(b, b.anchor + 3.0 * rng.standard_normal(b.anchor.size)) >= 0.0


def test_direction_ignores_bound_row():
    b = simple_bundle()
    np.testing.assert_array_equal(direction(b, [0.25, 0.75]), [0.25, 0.0])
