"""Static report renderer for bouslp harness outputs (CSV/JSON/snapshots)."""

__version__ = "0.1.0"

from bouslp_report.report import render_fields, render_report  # noqa: F401
