"""Charts from traffic-signal experiment summaries.

Reads the harness summary CSV (one row per experiment cell) and renders
average-delay comparison charts: delay versus entry flow or versus the
slow-vehicle fraction, one series per controller, with 95% confidence
error bars. Rendering is deterministic: identical input produces an
identical image byte stream.
"""

from .data import SummaryRow, load_summary
from .render import FigureSpec, RenderResult, render

__all__ = ["SummaryRow", "load_summary", "FigureSpec", "RenderResult", "render"]
