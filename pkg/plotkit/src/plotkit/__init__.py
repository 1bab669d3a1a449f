"""Figure rendering for the casimir-sim CLI's CSV outputs."""

from .csvio import (
    SWEEP_COLUMNS,
    TRAJECTORY_COLUMNS,
    PlotInputError,
    read_sidecar,
    read_table,
)
from .recipes import KINDS, FigureRecipe
from .render import render

__version__ = "0.1.0"

__all__ = [
    "FigureRecipe",
    "KINDS",
    "PlotInputError",
    "SWEEP_COLUMNS",
    "TRAJECTORY_COLUMNS",
    "read_sidecar",
    "read_table",
    "render",
    "__version__",
]
