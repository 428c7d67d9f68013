"""
Static SVG rendering of a rate region
"""

import io
import logging
from pathlib import Path
import time
from typing import Any, Dict, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..errors import SpecFileError
from ..regions.analytic import analytic_erasure_region, analytic_phase_flip_region
from ..regions.geometry import RateRegion
from .base import BaseCommand
from .files import load_region, write_atomic, write_manifest

logger = logging.getLogger(__name__)

DEFAULT_HASHSALT = "qmac-capacity"


def oracle_region(spec: str) -> RateRegion:
    """Parse ``erasure:<d>`` or ``phase_flip:<p>`` into the closed-form region."""
    name, _, value = spec.partition(":")
    try:
        if name == "erasure":
            return analytic_erasure_region(int(value or 2))
        if name == "phase_flip":
            return analytic_phase_flip_region(float(value or 0.1))
    except ValueError as e:
        raise SpecFileError(f"Invalid oracle parameter '{value}': {e}", field="oracle") from e
    raise SpecFileError(f"Unknown oracle '{spec}' (use erasure:<d> or phase_flip:<p>)", field="oracle")


def _polyline(region: RateRegion):
    return [p.rate1 for p in region.frontier], [p.rate2 for p in region.frontier]


def render_region_svg(region: RateRegion, oracle: Optional[RateRegion] = None,
                      title: str = "", hashsalt: str = DEFAULT_HASHSALT) -> bytes:
    """SVG bytes of the frontier (and optional oracle curve); identical inputs give identical bytes."""
    with plt.rc_context({"svg.hashsalt": hashsalt, "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5, 5))
        if region.frontier:
            xs, ys = _polyline(region)
            ax.plot(xs, ys, color="tab:blue", linewidth=1.8, label=f"computed (k={region.k})")
            ax.fill_between(xs, ys, step=None, alpha=0.15, color="tab:blue")
        if oracle is not None and oracle.frontier:
            xs, ys = _polyline(oracle)
            ax.plot(xs, ys, color="tab:red", linestyle="--", linewidth=1.2, label="analytic")
        ax.set_xlim(left=0)
        ax.set_ylim(bottom=0)
        ax.set_xlabel("rate 1 (bits per channel use)")
        ax.set_ylabel("rate 2 (bits per channel use)")
        if title:
            ax.set_title(title)
        if ax.get_legend_handles_labels()[0]:
            ax.legend(loc="upper right")
        ax.grid(True, linewidth=0.3)
        buffer = io.BytesIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None})
        plt.close(fig)
    return buffer.getvalue()


class PlotCommand(BaseCommand):
    name: str = "plot"
    description: str = "Renders a region file as a static SVG, optionally with a closed-form overlay."

    def _run(self, region_path: Path, out: Path, oracle: Optional[str] = None,
             hashsalt: str = DEFAULT_HASHSALT) -> Dict[str, Any]:
        started = time.perf_counter()
        region = load_region(region_path)
        overlay = oracle_region(oracle) if oracle else None
        title = str(region.metadata.get("channel", ""))
        svg_path = write_atomic(out, render_region_svg(region, overlay, title, hashsalt))
        manifest = write_manifest(out, self.name, {"region": str(region_path), "oracle": oracle},
                                  region.metadata.get("seed"), [svg_path], started)
        return {"svg": str(svg_path), "manifest": str(manifest), "frontier_points": len(region.frontier)}
