from .config import RunConfig, cell_seed, splitmix64
from .runner import SweepGrid, read_grid, run, sweep

__all__ = ["RunConfig", "cell_seed", "splitmix64", "SweepGrid", "read_grid", "run", "sweep"]
