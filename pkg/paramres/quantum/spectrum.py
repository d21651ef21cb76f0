"""Quasi-energy spectra of the Floquet operator in the three regimes.

- Elliptic: the effective Hamiltonian is an oscillator with frequency Omega,
  eps_n = Omega T (n + 1/2) mod 2*pi. For rational Omega T / 2*pi = r/s only s
  values occur, and the levels split into s classes n mod s.
- Marginal: a free particle; the spectrum is continuous and the momenta
  +-sqrt(P0^2 + (2 hbar / T) 2 pi k) share one Floquet phase.
- Hyperbolic: an inverted oscillator; continuous spectrum. At resonance
  (a pure dilation) every quasi phase is carried by the comb states of
  each label in the fundamental interval.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from paramres.core.classical import DEFAULT_BAND, classify
from paramres.core.effective import heff_from_monodromy
from paramres.core.types import Elliptic, Hyperbolic, Monodromy2, Regime
from paramres.errors import NumericalError, ValidationError

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

DEFAULT_RATIONAL_TOL = 1e-9
DEFAULT_DENOMINATOR_CAP = 10 ** 6
# Partner winding numbers must be integers to this, relative to the phase in turns.
PHASE_TOL = 1e-12
# Off-diagonal entries below this, relative to the diagonal, count as a pure dilation.
DILATION_TOL = 1e-12


@dataclass(frozen=True)
class QuasiEnergySpectrum:
    """Quasi energies of one Floquet operator.

    Attributes:
        regime: Stability regime.
        values: eps_n for n = 0..n_max (elliptic only).
        classes: Level indices grouped by equal quasi energy.
        distinct: One quasi energy per class, in class order.
        rational: (r, s) when Omega T / 2*pi = r/s was detected.
        continuous: True for the marginal and hyperbolic regimes.
        partners: Degenerate momenta (marginal).
        comb_labels: Sampled degenerate (x0, mu) labels (resonant hyperbolic).
        omega_t: Rotation angle per period (elliptic).
        reflected: A -I factor was split off the map.
    """
    regime: Regime
    values: Tuple[float, ...] = ()
    classes: Tuple[Tuple[int, ...], ...] = ()
    distinct: Tuple[float, ...] = ()
    rational: Optional[Tuple[int, int]] = None
    continuous: bool = False
    partners: Tuple[float, ...] = ()
    comb_labels: Tuple[Tuple[float, float], ...] = ()
    omega_t: Optional[float] = None
    reflected: bool = False

    @property
    def degeneracy(self) -> str:
        if self.continuous:
            return "countable"
        return "finite" if self.rational else "none"

    @property
    def max_gap(self) -> float:
        """Largest gap between neighbouring quasi energies on the circle."""
        if not self.distinct:
            return TWO_PI
        pts = np.sort(np.mod(np.asarray(self.distinct), TWO_PI))
        gaps = np.diff(np.append(pts, pts[0] + TWO_PI))
        return float(np.max(gaps))


def rational_approximation(x: float, tol: float = DEFAULT_RATIONAL_TOL,
                           cap: int = DEFAULT_DENOMINATOR_CAP) -> Optional[Tuple[int, int]]:
    """First continued-fraction convergent p/q of x with |x - p/q| <= tol/q.

    Returns None when no convergent with q <= cap qualifies.
    """
    if not math.isfinite(x):
        raise ValidationError(f"cannot approximate {x!r}")
    if not tol > 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    # Exact binary value of x; the expansion terminates.
    rest = Fraction(x)
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    while True:
        a = math.floor(rest)
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        if k > cap:
            return None
        if abs(x - h / k) <= tol / k:
            return h, k
        frac = rest - a
        if frac == 0:
            return None
        rest = 1 / frac


def elliptic_spectrum(omega_t: float, n_max: int, tol: float = DEFAULT_RATIONAL_TOL,
                      cap: int = DEFAULT_DENOMINATOR_CAP,
                      orientation: int = 1) -> QuasiEnergySpectrum:
    """Quasi energies eps_n = orientation * Omega T (n + 1/2) mod 2*pi.

    Args:
        omega_t: Omega T > 0.
        n_max: Highest level index.
        tol: Rationality tolerance for Omega T / 2*pi.
        cap: Largest denominator tried.
        orientation: -1 when the effective Hamiltonian is negative definite.
    """
    if not omega_t > 0:
        raise ValidationError(f"Omega*T must be positive, got {omega_t}")
    if n_max < 0:
        raise ValidationError(f"n_max must be non-negative, got {n_max}")
    if orientation not in (1, -1):
        raise ValidationError(f"orientation must be +1 or -1, got {orientation}")

    n = np.arange(n_max + 1)
    values = np.mod(orientation * omega_t * (n + 0.5), TWO_PI)
    rational = rational_approximation(omega_t / TWO_PI, tol, cap)

    if rational is None:
        classes = tuple((int(i),) for i in n)
        distinct = tuple(float(v) for v in values)
    else:
        s = rational[1]
        classes = tuple(tuple(int(i) for i in range(c, n_max + 1, s))
                        for c in range(min(s, n_max + 1)))
        distinct = tuple(float(values[c[0]]) for c in classes)
        log.debug("Omega*T/2pi = %d/%d: %d quasi-energy classes", rational[0], s, len(classes))

    return QuasiEnergySpectrum(
        regime=Regime.ELLIPTIC,
        values=tuple(float(v) for v in values),
        classes=classes,
        distinct=distinct,
        rational=rational,
        omega_t=omega_t,
    )


def floquet_phase(P: float, T: float, hbar: float = 1.0) -> complex:
    """exp(-i P^2 T / (2 hbar)), the free-particle Floquet eigenvalue."""
    return cmath.exp(-1j * P * P * T / (2.0 * hbar))


def marginal_partners(P0: float, T: float, hbar: float = 1.0, k_max: int = 1,
                      include_trivial: bool = False) -> List[float]:
    """Momenta sharing the Floquet phase of P0 in the marginal regime.

    Returns +-sqrt(P0^2 + (2 hbar / T) 2 pi k) for k = 1..k_max, preceded by
    +-P0 when include_trivial is set.

    Raises:
        NumericalError: If a partner does not wind its phase by a whole
            number of turns relative to P0.
    """
    if not T > 0:
        raise ValidationError(f"period must be positive, got {T}")
    if not hbar > 0:
        raise ValidationError(f"hbar must be positive, got {hbar}")
    if k_max < 0:
        raise ValidationError(f"k_max must be non-negative, got {k_max}")

    turns = T / (2.0 * TWO_PI * hbar)
    partners: List[float] = []
    for k in range(0 if include_trivial else 1, k_max + 1):
        p = math.sqrt(P0 * P0 + (2.0 * hbar / T) * TWO_PI * k)
        winding = (p * p - P0 * P0) * turns
        if abs(winding - k) > PHASE_TOL * max(1.0, p * p * turns):
            raise NumericalError(
                f"partner {p!r} winds by {winding!r} turns, expected {k}"
            )
        partners.extend((p, -p))
    return partners


def floquet_spectrum(M: Monodromy2, T: float, hbar: float = 1.0,
                     band: float = DEFAULT_BAND, n_max: int = 16,
                     tol: float = DEFAULT_RATIONAL_TOL,
                     cap: int = DEFAULT_DENOMINATOR_CAP,
                     p0: float = 0.0, k_max: int = 4,
                     mu: float = 0.0, n_labels: int = 4) -> QuasiEnergySpectrum:
    """Quasi-energy spectrum of the Floquet operator whose classical map is M.

    Elliptic maps go through the effective generator; marginal maps report
    the continuous free-particle spectrum with the partners of p0; hyperbolic
    maps report a continuous spectrum and, when M is a pure dilation, comb
    labels (x0, mu) sampled from the fundamental interval.
    """
    if not T > 0:
        raise ValidationError(f"period must be positive, got {T}")
    cls = classify(M, band)
    gen = heff_from_monodromy(M, T, hbar, band)

    if isinstance(cls, Elliptic):
        angle = math.sqrt(-gen.exponent_sq)
        orientation = 1 if gen.u > 0 else -1
        return elliptic_spectrum(angle, n_max, tol, cap, orientation)

    if isinstance(cls, Hyperbolic):
        labels: Tuple[Tuple[float, float], ...] = ()
        size = max(abs(M.m11), abs(M.m22))
        if max(abs(M.m12), abs(M.m21)) <= DILATION_TOL * size:
            alpha = math.log(abs(M.m11))
            edge = math.exp(abs(alpha))
            xs = [1.0 + j * (edge - 1.0) / n_labels for j in range(n_labels)]
            xs += [-edge + j * (edge - 1.0) / n_labels for j in range(n_labels)]
            labels = tuple((x, mu % TWO_PI) for x in xs)
        return QuasiEnergySpectrum(
            regime=Regime.HYPERBOLIC,
            continuous=True,
            comb_labels=labels,
            reflected=gen.reflection_factor,
        )

    return QuasiEnergySpectrum(
        regime=Regime.MARGINAL,
        continuous=True,
        partners=tuple(marginal_partners(p0, T, hbar, k_max, include_trivial=True)),
        reflected=gen.reflection_factor,
    )
