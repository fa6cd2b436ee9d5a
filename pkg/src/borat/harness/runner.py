"""Single runs and eta x radius sweeps."""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import ContractViolation, InvalidInputError, NumericalError
from ..objectives import dataset_arrays, write_dataset_csv
from ..optimizer import train
from ..trace import RunTrace, TraceParseError, TraceWriter
from .config import RunConfig, cell_seed

logger = logging.getLogger(__name__)

GRID_CORNER = "r\\eta"


def dump_dataset(config: RunConfig, objective) -> Optional[Path]:
    arrays = dataset_arrays(objective)
    if arrays is None:
        logger.warning("problem %s has no dataset to dump", config.problem)
        return None
    label = "target" if config.problem == "lsq" else "label"
    write_dataset_csv(config.dump_data, arrays[0], arrays[1], label)
    return config.dump_data


def run(config: RunConfig) -> RunTrace:
    """Train once, streaming the trace to ``config.out`` when it is set.

    A numerical failure leaves the records written so far on disk and
    re-raises with ``exc.trace`` attached.
    """
    objective = config.build_objective()
    if config.dump_data is not None:
        dump_dataset(config, objective)
    writer = None

    def open_writer(header):
        nonlocal writer
        if config.out is not None:
            Path(config.out).parent.mkdir(parents=True, exist_ok=True)
            writer = TraceWriter(config.out, header, config.fmt)

    def emit(rec):
        writer.write(rec)

    try:
        return train(objective, config.optimizer,
                     logger_fn=emit if config.out is not None else None,
                     optimizer=config.optimizer_name, log_every=config.log_every,
                     timing=config.timing, header=config.header(), on_start=open_writer)
    finally:
        if writer is not None:
            writer.close()


@dataclass
class SweepGrid:
    etas: list
    radii: list
    final_obj: np.ndarray
    accuracy: Optional[np.ndarray] = None
    traces: list = field(default_factory=list)
    header: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = (len(self.radii), len(self.etas))
        self.final_obj = np.asarray(self.final_obj, dtype=float)
        if self.final_obj.shape != shape:
            raise InvalidInputError(f"grid values have shape {self.final_obj.shape}, expected {shape}")
        if self.accuracy is not None:
            self.accuracy = np.asarray(self.accuracy, dtype=float)
            if self.accuracy.shape != shape:
                raise InvalidInputError("accuracy grid shape mismatch")

    def count_below(self, target: float) -> int:
        """Cells whose final objective is below ``target`` (NaN cells never count)."""
        with np.errstate(invalid="ignore"):
            return int(np.sum(self.final_obj < target))


def _fmt_cell(v: float) -> str:
    return "nan" if math.isnan(v) else repr(float(v))


def grid_to_csv(etas, radii, values, header: dict) -> str:
    lines = ["# " + json.dumps(header, sort_keys=True),
             ",".join([GRID_CORNER] + [repr(float(e)) for e in etas])]
    for r, row in zip(radii, values):
        lines.append(",".join([repr(float(r))] + [_fmt_cell(v) for v in row]))
    return "\n".join(lines) + "\n"


def parse_grid(text: str) -> SweepGrid:
    """Inverse of :func:`grid_to_csv`; errors name the offending line."""
    lines = text.splitlines()
    if not lines:
        raise TraceParseError("empty grid file", 1)
    idx = 0
    header = {}
    if lines[0].startswith("# "):
        try:
            header = json.loads(lines[0][2:])
        except json.JSONDecodeError as exc:
            raise TraceParseError(f"bad header json: {exc}", 1) from None
        idx = 1
    if idx >= len(lines):
        raise TraceParseError("missing eta row", idx + 1)
    cols = lines[idx].split(",")
    if cols[0] != GRID_CORNER or len(cols) < 2:
        raise TraceParseError(f"expected '{GRID_CORNER},eta...' header", idx + 1)
    try:
        etas = [float(c) for c in cols[1:]]
    except ValueError as exc:
        raise TraceParseError(str(exc), idx + 1) from None
    radii, values = [], []
    for lineno, line in enumerate(lines[idx + 1:], start=idx + 2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(etas) + 1:
            raise TraceParseError(f"expected {len(etas) + 1} cells, got {len(cells)}", lineno)
        try:
            radii.append(float(cells[0]))
            values.append([float(c) for c in cells[1:]])
        except ValueError as exc:
            raise TraceParseError(str(exc), lineno) from None
    if not radii:
        raise TraceParseError("grid has no rows", len(lines))
    return SweepGrid(etas, radii, np.array(values), header=header)


def read_grid(path) -> SweepGrid:
    with open(path) as fh:
        return parse_grid(fh.read())


def _run_cell(args):
    config, row, col = args
    try:
        trace = run(config)
    except (NumericalError, ContractViolation, FloatingPointError) as exc:
        logger.warning("cell (%d, %d) failed: %s", row, col, exc)
        return row, col, math.nan, math.nan, str(exc)
    last = trace.records[-1] if trace.records else None
    obj = last.full_obj if last is not None and last.full_obj is not None else trace.initial_objective
    acc = last.accuracy if last is not None and last.accuracy is not None else math.nan
    if trace.status != "complete":
        return row, col, math.nan, math.nan, trace.status
    return row, col, float(obj), float(acc), None


def sweep(base: RunConfig, etas, radii, out_dir: Optional[Path] = None,
          workers: int = 1) -> SweepGrid:
    """Run every ``(radius, eta)`` cell with its own derived seed.

    Cells write their traces under ``out_dir/cells``.  Results do not
    depend on ``workers`` or on completion order.
    """
    etas, radii = [float(e) for e in etas], [float(r) for r in radii]
    if not etas or not radii:
        raise InvalidInputError("eta and radius lists must be nonempty")
    for e in etas:
        if not (math.isfinite(e) and e > 0):
            raise InvalidInputError(f"eta values must be positive, got {e}")
    for r in radii:
        if not (math.isfinite(r) and r > 0):
            raise InvalidInputError(f"radius values must be positive, got {r}")
    if workers < 1:
        raise InvalidInputError("workers must be at least 1")

    jobs, paths = [], [[None] * len(etas) for _ in radii]
    for i, r in enumerate(radii):
        for j, e in enumerate(etas):
            path = None
            if out_dir is not None:
                path = Path(out_dir) / "cells" / f"r{r:g}_eta{e:g}.{base.fmt}"
                paths[i][j] = str(path)
            jobs.append((base.with_cell(e, r, cell_seed(base.seed, i, j), path), i, j))

    if workers == 1 or len(jobs) == 1:
        results = [_run_cell(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, jobs))

    obj = np.full((len(radii), len(etas)), math.nan)
    acc = np.full_like(obj, math.nan)
    failures = {}
    for i, j, value, accuracy, err in results:
        obj[i, j], acc[i, j] = value, accuracy
        if err is not None:
            failures[f"{radii[i]:g},{etas[j]:g}"] = err
    header = {**base.header(), "metric": "final_full_objective", "failures": failures}
    header.pop("eta", None)
    header.pop("region", None)
    grid = SweepGrid(etas, radii, obj, None if np.all(np.isnan(acc)) else acc, paths, header)

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "grid.csv").write_text(grid_to_csv(etas, radii, obj, header))
        if grid.accuracy is not None:
            acc_header = {**header, "metric": "final_train_accuracy"}
            (out_dir / "grid_accuracy.csv").write_text(grid_to_csv(etas, radii, acc, acc_header))
    return grid
