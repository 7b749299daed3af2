"""Figure rendering for trajectory CSVs produced by the simulator."""

from pcl_plots.csvio import SchemaError, TrajectoryTable, read_sweep, read_trajectory
from pcl_plots.render import render_bloch, render_sweep, render_timeseries

__all__ = [
    "SchemaError",
    "TrajectoryTable",
    "read_trajectory",
    "read_sweep",
    "render_timeseries",
    "render_bloch",
    "render_sweep",
]

__version__ = "0.1.0"
