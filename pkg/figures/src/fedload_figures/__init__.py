"""Figure rendering for fedload CSV artifacts (presentation layer only)."""

from .render import KINDS, FigureRequest, SchemaMismatchError, read_table, render

__version__ = "0.1.0"

__all__ = ["KINDS", "FigureRequest", "SchemaMismatchError", "read_table", "render", "__version__"]
