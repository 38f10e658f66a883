"""CSV and SVG output with byte-stable formatting."""

from __future__ import annotations

import csv
import io as _io
from pathlib import Path

import numpy as np

from .domain import GridFunction

REPORT_COLUMNS = ("estimate", "kind", "alpha", "beta", "n", "y_layers", "level", "sample",
                  "lhs", "rhs", "ratio", "flag", "factors")


def fmt(v) -> str:
    """17 significant digits for floats, plain text otherwise, empty for None."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def report_row(r) -> list[str]:
    c = r.config
    factors = ";".join(f"{k}={fmt(v)}" for k, v in r.rhs_factors.items())
    return [r.estimate, fmt(c.get("kind")), fmt(c.get("alpha")), fmt(c.get("beta")), fmt(c.get("n")),
            fmt(c.get("y_layers")), fmt(c.get("level")), fmt(c.get("sample")),
            fmt(r.lhs), fmt(r.rhs), fmt(r.ratio), r.flag, factors]


def reports_csv(reports) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in reports:
        w.writerow(report_row(r))
    return buf.getvalue()


def write_reports_csv(path, reports) -> None:
    Path(path).write_bytes(reports_csv(reports).encode("utf-8"))


def write_grid_function_csv(path, u: GridFunction) -> None:
    """Columns ``x1[, x2], value``."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{k + 1}" for k in range(u.grid.dim)] + ["value"])
    for x, v in zip(u.grid.nodes, u.values):
        w.writerow([fmt(c) for c in x] + [fmt(v)])
    Path(path).write_bytes(buf.getvalue().encode("utf-8"))


def write_extension_field_csv(path, field) -> None:
    """Columns ``x1[, x2], y, value``; one row per (node, layer)."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    d = field.xgrid.dim
    w.writerow([f"x{k + 1}" for k in range(d)] + ["y", "value"])
    y = field.ygrid.nodes
    for x, row in zip(field.xgrid.nodes, field.values):
        xs = [fmt(c) for c in x]
        for yk, v in zip(y, row):
            w.writerow(xs + [fmt(yk), fmt(v)])
    Path(path).write_bytes(buf.getvalue().encode("utf-8"))


def line_chart_svg(path, series: dict, title: str, xlabel: str, ylabel: str, loglog: bool = True) -> None:
    """Self-contained SVG line chart; ``series`` maps label -> (x, y)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "fraclap", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6, 4.2))
        for label, (x, y) in series.items():
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            ok = (x > 0) & (y > 0) if loglog else np.isfinite(y)
            ax.plot(x[ok], y[ok], marker="o", label=label)
        if loglog:
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if series:
            ax.legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
