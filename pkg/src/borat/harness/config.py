"""Run configuration and seed derivation for the command-line harness."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from ..errors import InvalidInputError
from ..objectives import PROBLEMS, make_objective
from ..optimizer import OPTIMIZERS, BoratConfig
from ..projections import FeasibleRegion
from ..trace import FORMATS

OUTPUT_DIR_ENV = "BORAT_OUTPUT_DIR"
MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One round of the SplitMix64 output function (Steele, Lea and Flood)."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def cell_seed(base: int, row: int, col: int) -> int:
    """Seed for sweep cell ``(row, col)``: ``splitmix64(splitmix64(base ^ row) ^ col)``.

    Depends only on the base seed and the cell position, never on the order
    in which cells happen to run.
    """
    return splitmix64(splitmix64((base & MASK64) ^ row) ^ col)


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "borat_out"))


@dataclass
class RunConfig:
    problem: str
    optimizer: BoratConfig
    optimizer_name: str = "borat"
    problem_params: dict = field(default_factory=dict)
    out: Optional[Path] = None
    log_every: Optional[int] = None
    fmt: str = "csv"
    timing: bool = True
    dump_data: Optional[Path] = None

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise InvalidInputError(f"unknown problem {self.problem!r}; choose from {', '.join(PROBLEMS)}")
        if self.optimizer_name not in OPTIMIZERS:
            raise InvalidInputError(f"optimizer must be one of {OPTIMIZERS}")
        if self.optimizer_name == "alig" and self.optimizer.bundle_size != 2:
            raise InvalidInputError("--optimizer alig implies --n 2")
        if self.fmt not in FORMATS:
            raise InvalidInputError(f"format must be one of {FORMATS}")
        if self.log_every is not None and self.log_every < 1:
            raise InvalidInputError("log cadence must be at least 1")

    @property
    def seed(self) -> int:
        return self.optimizer.seed

    def build_objective(self):
        try:
            obj, _ = make_objective(self.problem, seed=self.seed, **self.problem_params)
        except TypeError as exc:
            raise InvalidInputError(f"bad parameters for {self.problem}: {exc}") from None
        return obj

    def with_cell(self, eta: float, radius: float, seed: int, out: Optional[Path]) -> "RunConfig":
        opt = replace(self.optimizer, eta=eta, region=FeasibleRegion("l2_ball", radius), seed=seed)
        return replace(self, optimizer=opt, out=out, dump_data=None)

    def header(self) -> dict:
        from .. import __version__

        return {
            "version": __version__,
            "problem": self.problem,
            "problem_params": self.problem_params,
            "optimizer": self.optimizer_name,
            **self.optimizer.describe(),
        }
