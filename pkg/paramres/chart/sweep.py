"""Stability chart sweeps and boundary polylines.

Cells are laid out row-major: axis 2 is the outer (row) index, axis 1 the
inner one. Parallel schedules assemble results in that order, so the output
does not depend on the worker count.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from paramres.chart.family import SweepFamily, build_family
from paramres.core.classical import DEFAULT_BAND, classify
from paramres.core.types import Regime
from paramres.errors import ParamresError, ValidationError

log = logging.getLogger(__name__)

ERROR_CLASS = "error"


@dataclass(frozen=True)
class Axis:
    """One swept parameter: name, closed range and resolution."""
    name: str
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError(f"axis '{self.name}' needs resolution >= 2, got {self.n}")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.lo == self.hi:
            raise ValidationError(f"axis '{self.name}' has a degenerate range [{self.lo}, {self.hi}]")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep: a family, two axes, fixed parameters and the marginal band."""
    family: str
    axis1: Axis
    axis2: Axis
    fixed: Dict[str, Any] = field(default_factory=dict)
    band: float = DEFAULT_BAND

    def __post_init__(self):
        if not self.band >= 0:
            raise ValidationError(f"band must be non-negative, got {self.band}")
        if self.axis1.name == self.axis2.name:
            raise ValidationError(f"both axes sweep '{self.axis1.name}'")


@dataclass(frozen=True)
class ChartCell:
    """Classification of one grid point."""
    param1: float
    param2: float
    cls: str
    exponent: float
    trace: float
    message: str = ""

    @property
    def is_error(self) -> bool:
        return self.cls == ERROR_CLASS

    @property
    def regime(self) -> Optional[Regime]:
        if self.is_error:
            return None
        if self.cls.startswith("hyperbolic"):
            return Regime.HYPERBOLIC
        return Regime[self.cls.upper()]


@dataclass(frozen=True)
class BoundaryPoint:
    """A refined boundary point, tagged with the trace sign it sits on."""
    param1: float
    param2: float
    sign: int


Polyline = List[BoundaryPoint]


class ChartSweep:
    """Sweeps a family over a parameter grid and extracts its boundaries.

    Usable directly by the CLI and the self-test; per-cell failures become
    error-tagged cells instead of aborting the sweep.
    """

    def __init__(self, spec: SweepSpec, workers: int = 1):
        if workers < 1:
            raise ValidationError(f"workers must be >= 1, got {workers}")
        self.spec = spec
        self.workers = workers
        self.family: SweepFamily = build_family(spec.family, spec.fixed)
        names = {spec.axis1.name, spec.axis2.name}
        if names != set(self.family.param_names):
            raise ValidationError(
                f"family '{spec.family}' sweeps {self.family.param_names}, "
                f"got axes ({spec.axis1.name}, {spec.axis2.name})"
            )
        self._cells: Optional[List[ChartCell]] = None

    def _values(self, p1: float, p2: float) -> Dict[str, float]:
        return {self.spec.axis1.name: float(p1), self.spec.axis2.name: float(p2)}

    def _cell(self, point: Tuple[float, float]) -> ChartCell:
        p1, p2 = point
        try:
            M = self.family.build(self._values(p1, p2))
            cls = classify(M, self.spec.band)
        except ParamresError as e:
            log.debug("cell (%g, %g) failed: %s", p1, p2, e)
            return ChartCell(float(p1), float(p2), ERROR_CLASS, math.nan, math.nan, str(e))
        return ChartCell(float(p1), float(p2), cls.label, float(cls.exponent), M.trace)

    def run(self) -> List[ChartCell]:
        """All cells, row-major (axis 2 outer, axis 1 inner)."""
        if self._cells is None:
            points = [(p1, p2) for p2 in self.spec.axis2.values for p1 in self.spec.axis1.values]
            log.debug("sweeping %s: %d cells on %d worker(s)",
                      self.spec.family, len(points), self.workers)
            if self.workers == 1:
                self._cells = [self._cell(p) for p in points]
            else:
                with ThreadPoolExecutor(max_workers=self.workers) as pool:
                    self._cells = list(pool.map(self._cell, points))
            errors = sum(c.is_error for c in self._cells)
            if errors:
                log.warning("%d of %d cells could not be computed", errors, len(self._cells))
        return self._cells

    def cell_at(self, i: int, j: int) -> ChartCell:
        """Cell with axis-1 index i and axis-2 index j."""
        return self.run()[j * self.spec.axis1.n + i]

    # --- Boundaries ---

    def _refine(self, a: ChartCell, b: ChartCell, tol: float) -> Optional[BoundaryPoint]:
        if a.param2 == b.param2:
            axis, lo, hi = self.spec.axis1.name, a.param1, b.param1
            other = {self.spec.axis2.name: a.param2}
        else:
            axis, lo, hi = self.spec.axis2.name, a.param2, b.param2
            other = {self.spec.axis1.name: a.param1}
        if lo > hi:
            lo, hi = hi, lo
        try:
            root = self.family.refine_edge(axis, lo, hi, other, tol)
        except ParamresError as e:
            log.debug("edge refinement on %s in [%g, %g] failed: %s", axis, lo, hi, e)
            return None
        if root is None:
            return None
        if axis == self.spec.axis1.name:
            return BoundaryPoint(root.value, a.param2, root.sign)
        return BoundaryPoint(a.param1, root.value, root.sign)

    def boundary_points(self, tol: float = 1e-12) -> Dict[Tuple, BoundaryPoint]:
        """Refined points keyed by grid edge.

        Edge keys are ("h", i, j) between (i, j) and (i+1, j), and
        ("v", i, j) between (i, j) and (i, j+1).
        """
        n1, n2 = self.spec.axis1.n, self.spec.axis2.n
        points: Dict[Tuple, BoundaryPoint] = {}
        for j in range(n2):
            for i in range(n1):
                here = self.cell_at(i, j)
                for key, (ii, jj) in ((("h", i, j), (i + 1, j)), (("v", i, j), (i, j + 1))):
                    if ii >= n1 or jj >= n2:
                        continue
                    there = self.cell_at(ii, jj)
                    if not _crosses(here, there):
                        continue
                    point = self._refine(here, there, tol)
                    if point is not None:
                        points[key] = point
        return points

    def boundaries(self, tol: float = 1e-12) -> List[Polyline]:
        """Boundary points chained into polylines.

        Points on edges of a common grid square are adjacent; chains are cut
        at junctions where more than two neighbours meet.
        """
        points = self.boundary_points(tol)
        keys = sorted(points)
        adjacency: Dict[Tuple, set] = {k: set() for k in keys}
        for j in range(self.spec.axis2.n - 1):
            for i in range(self.spec.axis1.n - 1):
                square = [k for k in (("h", i, j), ("h", i, j + 1), ("v", i, j), ("v", i + 1, j))
                          if k in points]
                for a in square:
                    for b in square:
                        if a != b:
                            adjacency[a].add(b)
        chains = _chain(keys, adjacency)
        return [[points[k] for k in chain] for chain in chains]


def _crosses(a: ChartCell, b: ChartCell) -> bool:
    regimes = {a.regime, b.regime}
    return regimes == {Regime.ELLIPTIC, Regime.HYPERBOLIC}


def _chain(keys: List[Tuple], adjacency: Dict[Tuple, set]) -> List[List[Tuple]]:
    """Split a graph of max degree d into paths between non-degree-2 nodes, then cycles."""
    used = set()
    chains: List[List[Tuple]] = []

    def edge(a, b):
        return (a, b) if a < b else (b, a)

    def walk(start, nxt):
        path = [start, nxt]
        used.add(edge(start, nxt))
        current = nxt
        while len(adjacency[current]) == 2:
            candidates = [n for n in sorted(adjacency[current]) if edge(current, n) not in used]
            if not candidates:
                break
            step = candidates[0]
            used.add(edge(current, step))
            path.append(step)
            current = step
        return path

    for k in keys:
        if len(adjacency[k]) == 0:
            chains.append([k])
        elif len(adjacency[k]) != 2:
            for n in sorted(adjacency[k]):
                if edge(k, n) not in used:
                    chains.append(walk(k, n))
    for k in keys:
        if len(adjacency[k]) == 2:
            for n in sorted(adjacency[k]):
                if edge(k, n) not in used:
                    chains.append(walk(k, n))
    return chains


def sweep(spec: SweepSpec, workers: int = 1) -> List[ChartCell]:
    """Classify every grid point of spec, row-major by axis 2 then axis 1."""
    return ChartSweep(spec, workers).run()


def tongue_boundaries(spec: SweepSpec, tol: float = 1e-12, workers: int = 1) -> List[Polyline]:
    """Refined instability-boundary polylines of a sweep (empty if none)."""
    return ChartSweep(spec, workers).boundaries(tol)
