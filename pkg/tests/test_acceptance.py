"""Acceptance criteria 1-12, each reported as a single PASS/FAIL line.

The heavy lifting lives in ``borat.harness.checks`` (also reachable through
``borat verify``); these tests run the checks at full size and tolerance.
"""

import numpy as np
import pytest

from borat.harness import checks
from borat.harness.cli import main
from borat.trace import read_trace
from conftest import ACCEPTANCE_LINES


def report(number, title, results):
    passed = all(r.passed for r in results)
    detail = "; ".join(r.detail.get("summary", "") for r in results)
    seconds = sum(r.seconds for r in results)
    line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'} {title}: {detail} [{seconds:.1f}s]"
    ACCEPTANCE_LINES[number] = line
    print(line)
    assert passed, line


def test_criterion_01_oracle_equivalence():
    report(1, "dual solver vs projected-gradient oracle", [checks.check_qp_oracle()])


def test_criterion_02_closed_form():
    report(2, "two-row closed form", [checks.check_closed_form()])


def test_criterion_03_kkt():
    report(3, "KKT conditions on the oracle suite", [checks.check_kkt(), checks.check_incremental()])


def test_criterion_04_monotonicity():
    report(4, "appending a row never lowers the dual optimum", [checks.check_monotonicity()])


def test_criterion_05_strong_duality():
    report(5, "primal model value equals dual optimum", [checks.check_duality()])


def test_criterion_06_convex_lipschitz_rate():
    report(6, "averaged iterate on separable hinge", [checks.check_convex_rate()])


def test_criterion_07_strongly_convex_rate():
    report(7, "interpolating least squares envelope", [checks.check_strong_rate()])


def test_criterion_08_rsi_rate():
    report(8, "restricted secant envelope", [checks.check_rsi_rate()])


def test_criterion_09_step_structure():
    report(9, "gamma = 1 and infeasible step types",
           [checks.check_step_structure(), checks.check_smooth_bound()])


def test_criterion_10_robustness():
    report(10, "osc1d and mlp eta x radius sweep",
           [checks.check_osc_robustness(), checks.check_mlp_robustness()])


def test_criterion_11_gradients():
    report(11, "finite-difference gradients", [checks.check_gradients(), checks.check_objective_contracts()])


def _cli_numeric(paths):
    return [read_trace(p).numeric_rows() for p in paths]


def test_criterion_12_determinism(tmp_path):
    api = checks.check_determinism()
    run_args = ["run", "--problem", "mlp", "--n", "3", "--eta", "1", "--constraint", "l2:100",
                "--momentum", "0.9", "--epochs", "3", "--batch-size", "8", "--seed", "5"]
    sweep_args = ["sweep", "--problem", "hinge", "--n", "3", "--steps", "200", "--seed", "5",
                  "--etas", "0.1,1", "--radii", "50,100"]
    for k in range(2):
        assert main(run_args + ["--out", str(tmp_path / f"run{k}.csv")]) == 0
        assert main(sweep_args + ["--out", str(tmp_path / f"sweep{k}")]) == 0
    runs = _cli_numeric([tmp_path / "run0.csv", tmp_path / "run1.csv"])
    cells = [sorted((tmp_path / f"sweep{k}" / "cells").iterdir()) for k in range(2)]
    sweeps = [_cli_numeric(c) for c in cells]
    grids = [(tmp_path / f"sweep{k}" / "grid.csv").read_text() for k in range(2)]
    cli_same = runs[0] == runs[1] and sweeps[0] == sweeps[1] and grids[0] == grids[1]
    api.detail["summary"] += f"; CLI run and sweep traces identical: {cli_same}"
    api.passed = api.passed and cli_same
    report(12, "repeated runs and sweeps", [api])
