"""Figure rendering for qwblow CSV outputs."""

from .figures import FIGURE_KINDS, SchemaError, render

__all__ = ["FIGURE_KINDS", "SchemaError", "render"]
__version__ = "0.1.0"
