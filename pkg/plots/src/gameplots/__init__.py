"""Publication-style figures from dirgame summary CSVs."""

__version__ = "0.1.0"

from .render import FigureSpec, render  # noqa: F401
