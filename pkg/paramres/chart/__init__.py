"""Parameter-plane stability charts (Arnold tongues) and their boundaries."""

from paramres.chart.family import (
    SweepFamily,
    KickedFamily,
    MathieuFamily,
    CustomFamily,
    register_family,
    get_registered_families,
    build_family,
)
from paramres.chart.sweep import (
    Axis,
    SweepSpec,
    ChartCell,
    BoundaryPoint,
    ChartSweep,
    sweep,
    tongue_boundaries,
)

__all__ = [
    "SweepFamily",
    "KickedFamily",
    "MathieuFamily",
    "CustomFamily",
    "register_family",
    "get_registered_families",
    "build_family",
    "Axis",
    "SweepSpec",
    "ChartCell",
    "BoundaryPoint",
    "ChartSweep",
    "sweep",
    "tongue_boundaries",
]
