"""Figure rendering for modlab CSV outputs.

This package never computes domain quantities: slopes come from the fits CSV
the solver wrote, data comes from the documented sweep/trace schemas, and the
output is deterministic vector graphics (fixed styles, no timestamps).
"""

__version__ = "0.1.0"

from .render import PlotJob, SchemaError, render
