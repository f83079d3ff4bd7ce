"""
SVG Plots

Multi-panel line plots rendered from a Jinja2 template. Each plotted series
is one <polyline>; nothing time-dependent is embedded, so a plot is a pure
function of its data.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from jinja2 import Environment, FileSystemLoader, select_autoescape

from delaycal.consistency.schemas import BatchStats, TrialTrace

logger = logging.getLogger(__name__)

PANEL_WIDTH = 640.0
PANEL_HEIGHT = 160.0
MARGIN_LEFT = 70.0
MARGIN_TOP = 40.0
PANEL_GAP = 50.0


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    color: str = "#1f77b4"
    dashed: bool = False
    points: str = ""


@dataclass
class Panel:
    title: str
    series: List[Series] = field(default_factory=list)
    top: float = 0.0
    y_min: float = 0.0
    y_max: float = 1.0


def _finite_range(panel: Panel):
    values = [v for s in panel.series for v in s.y if math.isfinite(v)]
    if not values:
        return 0.0, 1.0
    lo, hi = min(values), max(values)
    if hi - lo < 1e-12:
        pad = max(abs(hi), 1.0) * 0.5
        return lo - pad, hi + pad
    return lo, hi


def layout(panels: List[Panel]) -> List[Panel]:
    """Assign panel positions and convert each series into polyline points."""
    for i, panel in enumerate(panels):
        panel.top = MARGIN_TOP + i * (PANEL_HEIGHT + PANEL_GAP)
        panel.y_min, panel.y_max = _finite_range(panel)
        xs = [v for s in panel.series for v in s.x]
        x_min, x_max = (min(xs), max(xs)) if xs else (0.0, 1.0)
        x_span = (x_max - x_min) or 1.0
        y_span = panel.y_max - panel.y_min
        for series in panel.series:
            coords = []
            for x, y in zip(series.x, series.y):
                if not math.isfinite(y):
                    continue
                px = MARGIN_LEFT + (x - x_min) / x_span * PANEL_WIDTH
                py = panel.top + PANEL_HEIGHT - (y - panel.y_min) / y_span * PANEL_HEIGHT
                coords.append(f"{px:.2f},{py:.2f}")
            series.points = " ".join(coords)
    return panels


class PlotRenderer:
    """Jinja2 renderer for the figure template."""

    def __init__(self, templates_dir: Optional[str] = None):
        if templates_dir is None:
            templates_dir = str(Path(__file__).parent / "templates")
        self.env = Environment(
            loader=FileSystemLoader(templates_dir),
            autoescape=select_autoescape(["svg.j2", "svg", "xml"]),
            trim_blocks=True,
            lstrip_blocks=True,
        )
        self.env.filters["num"] = lambda value: f"{value:.4g}"

    def render(self, title: str, panels: List[Panel]) -> str:
        panels = layout(panels)
        height = MARGIN_TOP + len(panels) * (PANEL_HEIGHT + PANEL_GAP)
        template = self.env.get_template("figure.svg.j2")
        return template.render(
            title=title,
            panels=panels,
            width=MARGIN_LEFT + PANEL_WIDTH + 30.0,
            height=height,
            panel_width=PANEL_WIDTH,
            panel_height=PANEL_HEIGHT,
            margin_left=MARGIN_LEFT,
        )

    def write(self, title: str, panels: List[Panel], path: Path) -> Path:
        path = Path(path)
        path.write_text(self.render(title, panels), encoding="utf-8")
        logger.info(f"Wrote {path}")
        return path


def _bounds(values: np.ndarray, variances: np.ndarray, label: str, x: List[float]) -> List[Series]:
    sigma3 = 3.0 * np.sqrt(np.maximum(variances, 0.0))
    return [
        Series(label, x, values.tolist()),
        Series(f"+3σ {label}", x, sigma3.tolist(), color="#d62728", dashed=True),
        Series(f"-3σ {label}", x, (-sigma3).tolist(), color="#d62728", dashed=True),
    ]


def trace_panels(trace: TrialTrace) -> List[Panel]:
    """Error curves with 3-sigma bounds, then NIS and NEES."""
    steps = trace.k.astype(float).tolist()
    panels = [Panel("Position error [m]", _bounds(trace.e_x[:, 0], trace.P[:, 0, 0], "e_x", steps))]
    if trace.dim == 2:
        panels.append(
            Panel("Delay error [s]", _bounds(trace.e_x[:, 1], trace.P[:, 1, 1], "e_tau", steps))
        )
    panels.append(Panel("NIS", [Series("NIS", steps, trace.nis.tolist(), color="#2ca02c")]))
    panels.append(Panel("NEES", [Series("NEES", steps, trace.nees.tolist(), color="#9467bd")]))
    return panels


def batch_panels(stats: BatchStats) -> List[Panel]:
    """RMS errors, ANEES against its interval, and 3-sigma containment."""
    steps = stats.steps.astype(float).tolist()
    n = len(steps)
    panels = [Panel("RMS position error [m]", [Series("rms_position", steps, stats.rms_position.tolist())])]
    if stats.rms_delay_ms is not None:
        panels.append(
            Panel("RMS delay error [ms]", [Series("rms_delay", steps, stats.rms_delay_ms.tolist())])
        )
    lo, hi = stats.anees_interval
    panels.append(
        Panel(
            "ANEES",
            [
                Series("anees", steps, stats.anees.tolist(), color="#9467bd"),
                Series("95% lower", steps, [lo] * n, color="#7f7f7f", dashed=True),
                Series("95% upper", steps, [hi] * n, color="#7f7f7f", dashed=True),
            ],
        )
    )
    containment = [Series("position", steps, stats.containment_position.tolist())]
    if stats.containment_delay is not None:
        containment.append(Series("delay", steps, stats.containment_delay.tolist(), color="#ff7f0e"))
    panels.append(Panel("3σ containment fraction", containment))
    return panels
