"""Deterministic chart rendering from summary rows."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .data import SummaryRow, load_summary

# Fixed style so a rerender is byte-identical under a fixed library version.
_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "reportplots",
}

_SERIES_ORDER = ("SOTL", "SOC", "SOC_2", "SOC_M", "SOC_2M")
_MARKERS = ("o", "s", "^", "d", "v", "x", "*")


@dataclass(frozen=True)
class FigureSpec:
    """One chart: delay against q or f, filtered to a scenario and a fixed
    value of the other sweep variable."""

    x_axis: str  # "q" or "f"
    scenario: str  # "RVD" or "VSN"
    fixed: float  # value of the other sweep variable
    controllers: Optional[tuple[str, ...]] = None  # None: all present

    def __post_init__(self) -> None:
        if self.x_axis not in ("q", "f"):
            raise ValueError("x_axis must be 'q' or 'f'")
        object.__setattr__(self, "scenario", self.scenario.upper())
        if self.scenario not in ("RVD", "VSN"):
            raise ValueError("scenario must be RVD or VSN")


@dataclass
class RenderResult:
    written: list[str] = field(default_factory=list)
    series: dict[str, int] = field(default_factory=dict)  # controller -> points
    skipped: bool = False
    message: str = ""


def _series_sort_key(name: str):
    try:
        return (0, _SERIES_ORDER.index(name))
    except ValueError:
        return (1, name)


def select_series(rows: list[SummaryRow], spec: FigureSpec) -> dict[str, list[tuple[float, float, float]]]:
    """Group filtered rows into per-controller (x, mean, ci) point lists."""
    other = "f" if spec.x_axis == "q" else "q"
    picked: dict[str, list[tuple[float, float, float]]] = {}
    for row in rows:
        if row.scenario != spec.scenario:
            continue
        if getattr(row, other) != spec.fixed:
            continue
        if spec.controllers is not None and row.controller not in spec.controllers:
            continue
        if row.mean_delay_s is None:
            continue
        picked.setdefault(row.controller, []).append(
            (getattr(row, spec.x_axis), row.mean_delay_s, row.ci95_half_width_s or 0.0)
        )
    if spec.controllers is not None:
        missing = [c for c in spec.controllers if c not in picked]
        if missing:
            raise ValueError(f"controllers not present in the summary: {', '.join(missing)}")
    for points in picked.values():
        points.sort()
    return picked


def render(summary_path: str, spec: FigureSpec, out_dir: str) -> RenderResult:
    """Render one chart as PNG and SVG; skip with a warning when empty."""
    rows = load_summary(summary_path)
    series = select_series(rows, spec)
    result = RenderResult(series={name: len(pts) for name, pts in series.items()})
    if not series:
        result.skipped = True
        result.message = (
            f"no rows for scenario={spec.scenario} {('f' if spec.x_axis == 'q' else 'q')}"
            f"={spec.fixed:g}; figure skipped"
        )
        return result

    os.makedirs(out_dir, exist_ok=True)
    other = "f" if spec.x_axis == "q" else "q"
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for idx, name in enumerate(sorted(series, key=_series_sort_key)):
            pts = series[name]
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            errs = [p[2] for p in pts]
            ax.errorbar(
                xs, ys, yerr=errs, label=name, marker=_MARKERS[idx % len(_MARKERS)],
                capsize=3, linewidth=1.2, markersize=4,
            )
        if spec.x_axis == "q":
            ax.set_xlabel("traffic flow volume [veh/h per entry]")
        else:
            ax.set_xlabel("slow-vehicle fraction")
        ax.set_ylabel("average delay [s/vehicle]")
        ax.set_title(
            f"{spec.scenario}, {other} = {spec.fixed:g}",
        )
        ax.legend()
        fig.tight_layout()
        stem = f"delay_vs_{spec.x_axis}_{spec.scenario.lower()}_{other}{spec.fixed:g}"
        for ext in ("png", "svg"):
            path = os.path.join(out_dir, f"{stem}.{ext}")
            fig.savefig(path, metadata={"Date": None} if ext == "svg" else None)
            result.written.append(path)
        plt.close(fig)
    return result
