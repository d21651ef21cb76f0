"""Sampled frequency profiles and their CSV format.

The format is plain text with a required header and two columns:

    t,omega_sq
    0.0,1.0
    0.5,1.3
    ...
    6.283185307179586,1.0

t starts at 0, increases strictly and ends at the period T; the first and
last omega^2 must agree so the profile is periodic. Blank lines and lines
starting with '#' are skipped. Errors report the 1-based line number.
"""

import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np

from paramres.errors import ProfileFormatError, ValidationError
from paramres.profiles.base import FrequencyProfile

log = logging.getLogger(__name__)

HEADER = ("t", "omega_sq")

# Relative tolerance for the periodic endpoint condition.
_ENDPOINT_RTOL = 1e-12


class SampledProfile(FrequencyProfile):
    """Piecewise-linear omega^2(t) through (t, omega^2) samples on [0, T]."""

    kind = "sampled"

    def __init__(self, samples: Sequence[Tuple[float, float]]):
        data = np.asarray(samples, dtype=float)
        if data.ndim != 2 or data.shape[1] != 2:
            raise ValidationError("samples must be a sequence of (t, omega_sq) pairs")
        _check_samples(data[:, 0], data[:, 1])
        self._t = data[:, 0].copy()
        self._w = data[:, 1].copy()

    @property
    def period(self) -> float:
        return float(self._t[-1])

    @property
    def samples(self) -> List[Tuple[float, float]]:
        return [(float(t), float(w)) for t, w in zip(self._t, self._w)]

    def omega_sq(self, t):
        phase = np.mod(np.asarray(t, dtype=float), self.period)
        return np.interp(phase, self._t, self._w)

    def params(self) -> Dict[str, Any]:
        return {"samples": self.samples}

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "SampledProfile":
        if "path" in params:
            if len(params) > 1:
                raise ValidationError("sampled profile takes either 'path' or 'samples'")
            return load_profile_csv(params["path"])
        return super().from_params(params)


def _check_samples(t: np.ndarray, w: np.ndarray) -> None:
    if len(t) < 2:
        raise ValidationError("a sampled profile needs at least two samples")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(w))):
        raise ValidationError("samples must be finite")
    if t[0] != 0.0:
        raise ValidationError(f"samples must start at t = 0, got {t[0]!r}")
    if np.any(np.diff(t) <= 0):
        raise ValidationError("sample times must increase strictly")
    if not math.isclose(w[0], w[-1], rel_tol=_ENDPOINT_RTOL, abs_tol=_ENDPOINT_RTOL):
        raise ValidationError(
            f"profile is not periodic: omega_sq(0) = {w[0]!r}, omega_sq(T) = {w[-1]!r}"
        )


# =============================================================================
# CSV CODEC
# =============================================================================

def parse_profile_csv(text: str) -> SampledProfile:
    """Parse the CSV text of a sampled profile.

    Raises:
        ProfileFormatError: With the offending line number.
    """
    header_seen = False
    rows: List[Tuple[float, float]] = []
    lines: List[int] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]

        if not header_seen:
            if tuple(f.lower() for f in fields) != HEADER:
                raise ProfileFormatError(
                    f"expected header '{','.join(HEADER)}', got '{line}'", lineno
                )
            header_seen = True
            continue

        if len(fields) != 2:
            raise ProfileFormatError(f"expected 2 columns, got {len(fields)}", lineno)
        try:
            t, w = float(fields[0]), float(fields[1])
        except ValueError:
            raise ProfileFormatError(f"not a number: '{line}'", lineno) from None
        if not (math.isfinite(t) and math.isfinite(w)):
            raise ProfileFormatError(f"non-finite value: '{line}'", lineno)
        if rows and t <= rows[-1][0]:
            raise ProfileFormatError(
                f"time {t!r} does not increase (previous {rows[-1][0]!r})", lineno
            )
        rows.append((t, w))
        lines.append(lineno)

    if not header_seen:
        raise ProfileFormatError("empty profile: header 't,omega_sq' is missing")
    if len(rows) < 2:
        raise ProfileFormatError("a sampled profile needs at least two samples")
    if rows[0][0] != 0.0:
        raise ProfileFormatError(f"samples must start at t = 0, got {rows[0][0]!r}", lines[0])
    if not math.isclose(rows[0][1], rows[-1][1], rel_tol=_ENDPOINT_RTOL, abs_tol=_ENDPOINT_RTOL):
        raise ProfileFormatError(
            f"profile is not periodic: last omega_sq {rows[-1][1]!r} != first {rows[0][1]!r}",
            lines[-1],
        )

    log.debug("parsed %d profile samples, period %g", len(rows), rows[-1][0])
    return SampledProfile(rows)


def load_profile_csv(path: Union[str, Path]) -> SampledProfile:
    """Read a sampled profile from a CSV file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ProfileFormatError(f"cannot read profile {path}: {e}") from e
    return parse_profile_csv(text)


def dump_profile_csv(profile: SampledProfile) -> str:
    """CSV text of a sampled profile; parse_profile_csv() reads it back exactly."""
    out = [",".join(HEADER)]
    for t, w in profile.samples:
        out.append(f"{t:.17g},{w:.17g}")
    return "\n".join(out) + "\n"


def sample_profile(profile: FrequencyProfile, n: int) -> SampledProfile:
    """Tabulate any profile at n + 1 equally spaced times on [0, T]."""
    if n < 1:
        raise ValidationError(f"need at least one interval, got {n}")
    t = np.linspace(0.0, profile.period, n + 1)
    w = np.asarray(profile.omega_sq(t), dtype=float)
    w[-1] = w[0]
    return SampledProfile(np.column_stack([t, w]))
