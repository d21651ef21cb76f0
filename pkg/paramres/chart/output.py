"""CSV and JSON serialization of chart cells and boundary polylines.

Cell CSV schema, one row per cell in sweep order:

    param1,param2,class,exponent,trace

class is one of elliptic, hyperbolic, hyperbolic_reflected, marginal, error;
floats are written with 17 significant digits (nan for error cells).
"""

import json
import math
from typing import Any, Dict, List, Optional, TextIO

from paramres.chart.sweep import ERROR_CLASS, BoundaryPoint, ChartCell, Polyline
from paramres.errors import ValidationError

CELL_HEADER = ("param1", "param2", "class", "exponent", "trace")
BOUNDARY_HEADER = ("polyline", "index", "param1", "param2", "sign")
CLASS_LABELS = ("elliptic", "hyperbolic", "hyperbolic_reflected", "marginal", ERROR_CLASS)


def fmt_float(x: float, digits: int = 17) -> str:
    return f"{x:.{digits}g}"


def _json_float(x: float) -> Optional[float]:
    return None if math.isnan(x) else x


def write_cells_csv(cells: List[ChartCell], out: TextIO, digits: int = 17) -> None:
    out.write(",".join(CELL_HEADER) + "\n")
    for c in cells:
        out.write(",".join((
            fmt_float(c.param1, digits), fmt_float(c.param2, digits), c.cls,
            fmt_float(c.exponent, digits), fmt_float(c.trace, digits),
        )) + "\n")


def cells_to_json(cells: List[ChartCell], meta: Optional[Dict[str, Any]] = None) -> str:
    doc: Dict[str, Any] = dict(meta or {})
    doc["cells"] = [
        {
            "param1": c.param1,
            "param2": c.param2,
            "class": c.cls,
            "exponent": _json_float(c.exponent),
            "trace": _json_float(c.trace),
        }
        for c in cells
    ]
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def write_cells_json(cells: List[ChartCell], out: TextIO,
                     meta: Optional[Dict[str, Any]] = None) -> None:
    out.write(cells_to_json(cells, meta))


def write_boundaries_csv(polylines: List[Polyline], out: TextIO, digits: int = 17) -> None:
    out.write(",".join(BOUNDARY_HEADER) + "\n")
    for k, line in enumerate(polylines):
        for i, p in enumerate(line):
            out.write(f"{k},{i},{fmt_float(p.param1, digits)},{fmt_float(p.param2, digits)},{p.sign}\n")


def write_boundaries_json(polylines: List[Polyline], out: TextIO) -> None:
    doc = {
        "polylines": [
            [{"param1": p.param1, "param2": p.param2, "sign": p.sign} for p in line]
            for line in polylines
        ]
    }
    out.write(json.dumps(doc, indent=2) + "\n")


def read_cells_csv(text: str) -> List[ChartCell]:
    """Parse cell CSV written by write_cells_csv()."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or tuple(f.strip() for f in lines[0].split(",")) != CELL_HEADER:
        raise ValidationError(f"expected header '{','.join(CELL_HEADER)}'")
    cells = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != len(CELL_HEADER):
            raise ValidationError(f"line {lineno}: expected {len(CELL_HEADER)} columns")
        if fields[2] not in CLASS_LABELS:
            raise ValidationError(f"line {lineno}: unknown class '{fields[2]}'")
        try:
            p1, p2, exponent, trace = (float(fields[i]) for i in (0, 1, 3, 4))
        except ValueError:
            raise ValidationError(f"line {lineno}: not a number") from None
        cells.append(ChartCell(p1, p2, fields[2], exponent, trace))
    return cells


def read_boundaries_csv(text: str) -> List[Polyline]:
    """Parse boundary CSV written by write_boundaries_csv()."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or tuple(f.strip() for f in lines[0].split(",")) != BOUNDARY_HEADER:
        raise ValidationError(f"expected header '{','.join(BOUNDARY_HEADER)}'")
    polylines: List[Polyline] = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            k, _, p1, p2, sign = line.split(",")
            k = int(k)
            point = BoundaryPoint(float(p1), float(p2), int(sign))
        except ValueError:
            raise ValidationError(f"line {lineno}: malformed boundary row") from None
        while len(polylines) <= k:
            polylines.append([])
        polylines[k].append(point)
    return polylines
