"""Wall-clock time per epoch as a function of bundle size."""

from __future__ import annotations

import time
from dataclasses import replace

from ..optimizer import train
from .config import RunConfig


def bench(base: RunConfig, sizes=(2, 3, 4, 5), epochs: float = 2.0) -> list:
    """Average seconds per epoch for each bundle size.

    Absolute numbers depend on the machine; only the trend across sizes
    is meaningful.
    """
    objective = base.build_objective()
    rows = []
    for n in sizes:
        cfg = replace(base.optimizer, bundle_size=int(n), max_epochs=epochs, max_steps=None)
        name = "alig" if base.optimizer_name == "alig" and n == 2 else "borat"
        t0 = time.perf_counter()
        trace = train(objective, cfg, optimizer=name, log_every=10**9, timing=False)
        seconds = time.perf_counter() - t0
        rows.append({"bundle_size": int(n), "epochs": epochs, "steps": len(trace.records),
                     "seconds_per_epoch": seconds / epochs})
    return rows
