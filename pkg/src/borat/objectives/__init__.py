from .base import BatchSampler, ObjectiveMetadata, StochasticObjective, write_dataset_csv
from .mlp import MlpObjective, add_label_noise, make_mlp_objective
from .synthetic import (
    InterpLeastSquares,
    Oscillation1D,
    RsiObjective,
    SeparableHinge,
    make_interp_least_squares,
    make_oscillation_1d,
    make_rsi_objective,
    make_separable_hinge,
)

PROBLEMS = ("lsq", "hinge", "osc1d", "rsi", "mlp")


def make_objective(problem: str, seed: int = 0, **params):
    """Build an objective by name; ``params`` go to the matching factory."""
    if problem == "lsq":
        return make_interp_least_squares(seed=seed, **params)
    if problem == "hinge":
        return make_separable_hinge(seed=seed, **params)
    if problem == "osc1d":
        return make_oscillation_1d(**params)
    if problem == "rsi":
        return make_rsi_objective(seed=seed, **params)
    if problem == "mlp":
        label_noise = params.pop("label_noise", 0.0)
        obj, meta = make_mlp_objective(seed=seed, **params)
        if label_noise:
            obj = add_label_noise(obj, label_noise, seed)
        return obj, obj.metadata
    raise ValueError(f"unknown problem {problem!r}; expected one of {PROBLEMS}")


def dataset_arrays(objective):
    """``(features, labels)`` of an objective's training set, if it has one."""
    if isinstance(objective, InterpLeastSquares):
        return objective.features, objective.targets
    if isinstance(objective, SeparableHinge):
        return objective.features, objective.labels.astype(int)
    if isinstance(objective, MlpObjective):
        return objective.x, objective.y
    return None


__all__ = [
    "BatchSampler", "ObjectiveMetadata", "StochasticObjective", "write_dataset_csv",
    "MlpObjective", "add_label_noise", "make_mlp_objective", "InterpLeastSquares",
    "Oscillation1D", "RsiObjective", "SeparableHinge", "make_interp_least_squares",
    "make_oscillation_1d", "make_rsi_objective", "make_separable_hinge",
    "make_objective", "dataset_arrays", "PROBLEMS",
]
