"""Figure rendering for thinspec CSV datasets (schema consumers only)."""

from .jobs import PlotJob
from .schema import SchemaError

__version__ = "0.1.0"
