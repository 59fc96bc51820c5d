"""CSV-to-image figure scripts for the antenna-state selection simulator."""

from .render import FIGURES, SchemaError, render_figure

__all__ = ["FIGURES", "SchemaError", "render_figure"]
