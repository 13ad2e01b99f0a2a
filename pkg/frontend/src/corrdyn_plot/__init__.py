"""Render the corrdyn reproduction figures from their CSV outputs."""

from .figures import FIGURE_SCHEMAS, FigureSpec, render_figure

__version__ = "0.1.0"

__all__ = ["FIGURE_SCHEMAS", "FigureSpec", "render_figure"]
