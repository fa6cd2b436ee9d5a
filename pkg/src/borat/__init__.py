"""Stochastic bundle optimisation with an exact simplex-constrained dual solver."""

__version__ = "0.1.0"

from .errors import ContractViolation, InvalidInputError, NumericalError
from .optimizer import BoratConfig, OptimizerState, StepReport, alig_step, classify_step, step, train
from .projections import FeasibleRegion, project
from .simplex_qp import DualProblem, DualSolution, build_dual_problem, solve_dual, solve_dual_incremental

__all__ = [
    "ContractViolation", "InvalidInputError", "NumericalError", "BoratConfig", "OptimizerState",
    "StepReport", "alig_step", "classify_step", "step", "train", "FeasibleRegion", "project",
    "DualProblem", "DualSolution", "build_dual_problem", "solve_dual", "solve_dual_incremental",
]
