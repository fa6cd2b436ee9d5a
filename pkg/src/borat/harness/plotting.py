"""SVG rendering of traces and sweep grids (matplotlib, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import InvalidInputError
from ..trace import TraceParseError, loads
from .runner import GRID_CORNER, parse_grid


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _is_grid(text: str) -> bool:
    lines = text.splitlines()
    first = lines[1] if lines and lines[0].startswith("# ") and len(lines) > 1 else (lines[0] if lines else "")
    return first.startswith(GRID_CORNER)


def plot_trace(trace, out: Path, title: str = ""):
    if not trace.records:
        raise InvalidInputError("trace has no records; nothing to plot")
    logged = trace.logged()
    if logged:
        steps, values, label = [s for s, _ in logged], [v for _, v in logged], "full objective"
    else:
        steps = [r.step for r in trace.records]
        values = [r.sampled_loss for r in trace.records]
        label = "sampled loss"
    values = np.maximum(np.asarray(values, dtype=float), np.finfo(float).tiny)
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(steps, values, lw=1.2)
    ax.set_xlabel("step")
    ax.set_ylabel(label)
    h = trace.header
    ax.set_title(title or f"{h.get('problem', '?')} / {h.get('optimizer', '?')} "
                          f"N={h.get('bundle_size', '?')} eta={h.get('eta', '?')}")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, format="svg")
    plt.close(fig)


def plot_grid(grid, out: Path, title: str = ""):
    plt = _pyplot()
    values = np.asarray(grid.final_obj, dtype=float)
    shown = np.log10(np.maximum(values, 1e-12))
    fig, ax = plt.subplots(figsize=(1.2 * len(grid.etas) + 2, 0.8 * len(grid.radii) + 1.5))
    im = ax.imshow(np.ma.masked_invalid(shown), cmap="viridis_r", aspect="auto")
    ax.set_xticks(range(len(grid.etas)), [f"{e:g}" for e in grid.etas])
    ax.set_yticks(range(len(grid.radii)), [f"{r:g}" for r in grid.radii])
    ax.set_xlabel("eta")
    ax.set_ylabel("r")
    for i in range(values.shape[0]):
        for j in range(values.shape[1]):
            text = "fail" if np.isnan(values[i, j]) else f"{values[i, j]:.2g}"
            ax.text(j, i, text, ha="center", va="center", color="w", fontsize=8)
    fig.colorbar(im, ax=ax, label="log10 " + grid.header.get("metric", "value"))
    ax.set_title(title or grid.header.get("problem", ""))
    fig.tight_layout()
    fig.savefig(out, format="svg")
    plt.close(fig)


def plot_file(path, out) -> Path:
    """Render a trace or grid file; nothing is written if the input is unusable."""
    path, out = Path(path), Path(out)
    text = path.read_text()
    if not text.strip():
        raise TraceParseError("empty input", 1)
    if _is_grid(text):
        plot_grid(parse_grid(text), out)
    else:
        plot_trace(loads(text), out)
    return out
