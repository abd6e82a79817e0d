"""
Command-line interface: config-driven commands, verification, CSV export and SVG charts
"""
from .export import Exporter
from .main import build_parser, main
from .plotting import line_chart, plot_csv, plot_frame
from .verify import VerifySuite, run_checks, summarize

__all__ = [
    "Exporter",
    "VerifySuite",
    "build_parser",
    "line_chart",
    "main",
    "plot_csv",
    "plot_frame",
    "run_checks",
    "summarize",
]
