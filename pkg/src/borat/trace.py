"""Run traces: per-step records plus a header, serialised as CSV or JSONL.

CSV layout: a first line ``# <header json>``, then a column row, then one
line per record.  Columns are ``step, sampled_loss, full_obj, dual_value,
step_type, alpha_1..alpha_N, param_norm_sq, elapsed_s, accuracy, gamma``.
Optional cells are left empty rather than written as zero.  Floats are
written with ``repr`` so parsing and re-serialising is the identity.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional

FORMATS = ("csv", "jsonl")


class TraceParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class StepRecord:
    step: int
    sampled_loss: float
    dual_value: float
    step_type: str
    alpha: tuple
    param_norm_sq: float
    full_obj: Optional[float] = None
    elapsed_s: Optional[float] = None
    accuracy: Optional[float] = None
    gamma: Optional[float] = None

    NUMERIC = ("step", "sampled_loss", "full_obj", "dual_value", "alpha",
               "param_norm_sq", "accuracy", "gamma")

    def numeric_fields(self) -> tuple:
        """Every numeric field except wall-clock time."""
        return tuple(getattr(self, name) for name in self.NUMERIC)


@dataclass
class RunTrace:
    header: dict
    records: list = field(default_factory=list)
    initial_objective: Optional[float] = None
    final_params: object = None
    average_params: object = None
    status: str = "complete"

    @property
    def bundle_size(self) -> int:
        return int(self.header.get("bundle_size", 2))

    def logged(self):
        """``(step, full_obj)`` pairs for records carrying a full evaluation."""
        return [(r.step, r.full_obj) for r in self.records if r.full_obj is not None]

    def numeric_rows(self) -> list:
        return [r.numeric_fields() for r in self.records]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _opt_float(text: str) -> Optional[float]:
    return None if text == "" else float(text)


def csv_columns(n_alpha: int) -> list:
    return (["step", "sampled_loss", "full_obj", "dual_value", "step_type"]
            + [f"alpha_{i + 1}" for i in range(n_alpha)]
            + ["param_norm_sq", "elapsed_s", "accuracy", "gamma"])


def header_line(header: dict) -> str:
    return "# " + json.dumps(header, sort_keys=True)


def record_to_csv_row(rec: StepRecord) -> list:
    return ([_fmt(rec.step), _fmt(rec.sampled_loss), _fmt(rec.full_obj), _fmt(rec.dual_value),
             rec.step_type] + [_fmt(a) for a in rec.alpha]
            + [_fmt(rec.param_norm_sq), _fmt(rec.elapsed_s), _fmt(rec.accuracy), _fmt(rec.gamma)])


def record_to_json(rec: StepRecord) -> str:
    data = {
        "step": rec.step, "sampled_loss": rec.sampled_loss, "full_obj": rec.full_obj,
        "dual_value": rec.dual_value, "step_type": rec.step_type, "alpha": list(rec.alpha),
        "param_norm_sq": rec.param_norm_sq, "elapsed_s": rec.elapsed_s,
        "accuracy": rec.accuracy, "gamma": rec.gamma,
    }
    return json.dumps(data)


class TraceWriter:
    """Streams records to disk as they are produced."""

    def __init__(self, path, header: dict, fmt: str = "csv"):
        if fmt not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        self.fmt = fmt
        self.n_alpha = int(header.get("bundle_size", 2))
        self._fh = open(path, "w", newline="")
        if fmt == "csv":
            self._fh.write(header_line(header) + "\n")
            self._csv = csv.writer(self._fh, lineterminator="\n")
            self._csv.writerow(csv_columns(self.n_alpha))
        else:
            self._fh.write(json.dumps({"header": header}, sort_keys=True) + "\n")

    def write(self, rec: StepRecord):
        if self.fmt == "csv":
            self._csv.writerow(record_to_csv_row(rec))
        else:
            self._fh.write(record_to_json(rec) + "\n")

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def dumps(trace: RunTrace, fmt: str = "csv") -> str:
    buf = io.StringIO()
    if fmt == "csv":
        buf.write(header_line(trace.header) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(csv_columns(trace.bundle_size))
        for rec in trace.records:
            writer.writerow(record_to_csv_row(rec))
    else:
        buf.write(json.dumps({"header": trace.header}, sort_keys=True) + "\n")
        for rec in trace.records:
            buf.write(record_to_json(rec) + "\n")
    return buf.getvalue()


def _parse_csv(lines: list) -> RunTrace:
    if not lines or not lines[0].startswith("# "):
        raise TraceParseError("missing '# {header}' line", 1)
    try:
        header = json.loads(lines[0][2:])
    except json.JSONDecodeError as exc:
        raise TraceParseError(f"bad header json: {exc}", 1) from None
    if len(lines) < 2:
        raise TraceParseError("missing column row", 2)
    reader = csv.reader(lines[1:])
    columns = next(reader)
    n_alpha = sum(1 for c in columns if c.startswith("alpha_"))
    if columns != csv_columns(n_alpha):
        raise TraceParseError("unexpected column layout", 2)
    records = []
    for offset, row in enumerate(reader):
        lineno = offset + 3
        if len(row) != len(columns):
            raise TraceParseError(f"expected {len(columns)} cells, got {len(row)}", lineno)
        try:
            cells = dict(zip(columns, row))
            records.append(StepRecord(
                step=int(cells["step"]),
                sampled_loss=float(cells["sampled_loss"]),
                full_obj=_opt_float(cells["full_obj"]),
                dual_value=float(cells["dual_value"]),
                step_type=cells["step_type"],
                alpha=tuple(float(cells[f"alpha_{i + 1}"]) for i in range(n_alpha)),
                param_norm_sq=float(cells["param_norm_sq"]),
                elapsed_s=_opt_float(cells["elapsed_s"]),
                accuracy=_opt_float(cells["accuracy"]),
                gamma=_opt_float(cells["gamma"]),
            ))
        except ValueError as exc:
            raise TraceParseError(str(exc), lineno) from None
    return RunTrace(header, records)


def _parse_jsonl(lines: list) -> RunTrace:
    try:
        header = json.loads(lines[0])["header"]
    except (json.JSONDecodeError, KeyError, TypeError):
        raise TraceParseError("first line must be {\"header\": ...}", 1) from None
    records = []
    for offset, line in enumerate(lines[1:]):
        lineno = offset + 2
        if not line.strip():
            continue
        try:
            d = json.loads(line)
            records.append(StepRecord(
                step=int(d["step"]), sampled_loss=float(d["sampled_loss"]),
                full_obj=d["full_obj"], dual_value=float(d["dual_value"]),
                step_type=str(d["step_type"]), alpha=tuple(float(a) for a in d["alpha"]),
                param_norm_sq=float(d["param_norm_sq"]), elapsed_s=d["elapsed_s"],
                accuracy=d["accuracy"], gamma=d["gamma"],
            ))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise TraceParseError(str(exc), lineno) from None
    return RunTrace(header, records)


def loads(text: str) -> RunTrace:
    lines = text.splitlines()
    if not lines:
        raise TraceParseError("empty trace", 1)
    if lines[0].startswith("{"):
        return _parse_jsonl(lines)
    return _parse_csv(lines)


def read_trace(path) -> RunTrace:
    with open(path) as fh:
        return loads(fh.read())
