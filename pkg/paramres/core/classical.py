"""One-period classical maps of the kicked oscillator and their stability.

The kicked oscillator is a harmonic oscillator that receives an impulsive
dilation kick (x, p) -> (e^a x, e^-a p) once per period. Its one-period map is
M = M0 @ Mk, a real 2x2 matrix of unit determinant. Everything about its
stability follows from Tr M / 2.
"""

import logging
import math
from enum import Enum, auto
from typing import List, Optional, Union

import numpy as np

from paramres.core.types import (
    MAX_EXPONENT, BoundaryRoot, EigenPair, Elliptic, Hyperbolic, KickedParams, Marginal,
    Monodromy2, QuadraticFormCoeffs, StabilityClass,
)
from paramres.errors import ValidationError

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

DEFAULT_BAND = 1e-9
DEFAULT_DET_TOL = 1e-8
DEFAULT_SHEAR_TOL = 1e-12

# Below this |exponent^2| the closed-form exponential switches to its series.
_EXP_SERIES_CUTOFF = 1e-4


# =============================================================================
# MAP CONSTRUCTION
# =============================================================================

def kick_matrix(alpha: float) -> Monodromy2:
    """Instantaneous dilation kick diag(e^alpha, e^-alpha)."""
    if not math.isfinite(alpha):
        raise ValidationError(f"kick strength must be finite, got {alpha}")
    if abs(alpha) > MAX_EXPONENT:
        raise ValidationError(f"kick strength |alpha| = {abs(alpha)} overflows e^alpha")
    return Monodromy2(math.exp(alpha), 0.0, 0.0, math.exp(-alpha))


def free_matrix(m: float, omega: float, T: float) -> Monodromy2:
    """Harmonic evolution over a time T.

    For omega = 0 this is the free-particle shear [[1, T/m], [0, 1]].
    """
    if not m > 0:
        raise ValidationError(f"mass must be positive, got {m}")
    if not T >= 0:
        raise ValidationError(f"time must be non-negative, got {T}")
    if omega == 0.0:
        return Monodromy2(1.0, T / m, 0.0, 1.0)
    phase = omega * T
    c, s = math.cos(phase), math.sin(phase)
    return Monodromy2(c, s / (m * omega), -m * omega * s, c)


def monodromy_kicked(params: KickedParams) -> Monodromy2:
    """Kick followed by free motion: M = M0 @ Mk."""
    return free_matrix(params.m, params.omega, params.T) @ kick_matrix(params.alpha)


# =============================================================================
# SPECTRAL DATA
# =============================================================================

def require_unit_det(M: Monodromy2, tol: float) -> None:
    if abs(M.det - 1.0) > tol:
        raise ValidationError(
            f"map is not area preserving: det = {M.det!r} (tolerance {tol:g})"
        )


def eigenvalue_pair(M: Monodromy2, det_tol: float = DEFAULT_DET_TOL) -> EigenPair:
    """Eigenvalues (lambda+, lambda-) of a unit-determinant map.

    On the real branches lambda+ is the eigenvalue of larger modulus and
    lambda- = 1 / lambda+, so the product is 1 to rounding. On the complex
    branch lambda+ has positive imaginary part.
    """
    require_unit_det(M, det_tol)
    h = M.half_trace
    disc = h * h - 1.0
    if disc >= 0.0:
        root = math.sqrt(disc)
        lam = h + root if h >= 0.0 else h - root
        return complex(lam, 0.0), complex(1.0 / lam, 0.0)
    root = math.sqrt(-disc)
    return complex(h, root), complex(h, -root)


def classify(M: Monodromy2, band: float = DEFAULT_BAND,
             det_tol: float = DEFAULT_DET_TOL,
             shear_tol: float = DEFAULT_SHEAR_TOL) -> StabilityClass:
    """Classify a one-period map by |Tr M| / 2.

    Args:
        M: Unit-determinant map.
        band: Half-width of the marginal band around |Tr M| / 2 = 1.
        det_tol: Accepted deviation of det M from 1.
        shear_tol: Entry tolerance for recognising M = +-I among marginal maps.

    Returns:
        Elliptic with the rotation angle in (0, 2*pi), Hyperbolic with the
        growth exponent, or Marginal.
    """
    if band < 0:
        raise ValidationError(f"band must be non-negative, got {band}")
    require_unit_det(M, det_tol)

    h = M.half_trace
    a = abs(h)
    if a < 1.0 - band:
        omega = math.acos(max(-1.0, min(1.0, h)))
        if M.m12 < 0.0:
            omega = TWO_PI - omega
        return Elliptic(omega)
    if a > 1.0 + band:
        return Hyperbolic(math.acosh(a), reflected=h < 0.0)

    sign = 1 if h > 0.0 else -1
    unit = Monodromy2(float(sign), 0.0, 0.0, float(sign))
    return Marginal(sign, shearing=M.max_deviation(unit) > shear_tol)


def quadratic_form(M: Monodromy2) -> QuadraticFormCoeffs:
    """Invariant form Q(z) = z^T L M z with L = [[0, 1], [-1, 0]].

    Q(Mz) = Q(z) holds for any symplectic M.
    """
    return QuadraticFormCoeffs(q_pp=-M.m12, q_xx=M.m21, q_xp=M.m22 - M.m11)


def form_discriminant(q: QuadraticFormCoeffs) -> float:
    """q_xp^2 - 4 q_xx q_pp; equals (Tr M)^2 - 4 for the invariant form of M.

    Negative for definite (elliptic) forms, positive for indefinite
    (hyperbolic) ones, zero for perfect squares (marginal).
    """
    return q.q_xp * q.q_xp - 4.0 * q.q_xx * q.q_pp


def marginal_form_check(params: KickedParams) -> float:
    """Relative deviation of the invariant form from a perfect square (P +- X)^2.

    Works in the rescaled variables (m = omega = 1) and then in
    X = e^(a/2) x, P = e^(-a/2) p. On the marginal line
    cos(omega T) = +-1/cosh(a), sin(omega T) = +-tanh(a), the form becomes
    -sin(omega T) (X +- P)^2 and the returned value vanishes to rounding.
    """
    q = quadratic_form(monodromy_kicked(params.rescaled()))
    scale = math.exp(params.alpha)
    pp = q.q_pp * scale
    xx = q.q_xx / scale
    xp = q.q_xp
    size = max(abs(pp), abs(xx), abs(xp))
    if size == 0.0:
        return 0.0
    return max(abs(xx - pp), abs(abs(xp) - 2.0 * abs(pp))) / size


# =============================================================================
# BOUNDARIES AND RESONANCES
# =============================================================================

def _sech(alpha: float) -> float:
    t = math.exp(-abs(alpha))
    return 2.0 * t / (1.0 + t * t)


def stability_boundary_kicked(alpha: float) -> List[BoundaryRoot]:
    """omega*T values in [0, 2*pi) on |cosh(alpha) cos(omega T)| = 1.

    Roots on the Tr M = +2 boundary carry sign +1, those on Tr M = -2 carry
    -1. For alpha = 0 the stable region only touches the boundary at the
    isolated points 0 and pi, which are reported instead.
    """
    if not math.isfinite(alpha):
        raise ValidationError(f"kick strength must be finite, got {alpha}")
    if alpha == 0.0:
        log.debug("alpha = 0: boundary degenerates to omega*T = k*pi")
        return [BoundaryRoot(0.0, 1), BoundaryRoot(math.pi, -1)]

    theta = math.acos(_sech(alpha))
    roots = [
        BoundaryRoot(theta, 1),
        BoundaryRoot(math.pi - theta, -1),
        BoundaryRoot(math.pi + theta, -1),
        BoundaryRoot(TWO_PI - theta, 1),
    ]
    return sorted(roots, key=lambda r: r.value)


def marginal_kick_strength(omega_t: float, sign: int = 1) -> float:
    """Kick strength placing omega*T on the marginal line.

    Solves |cosh(alpha) cos(omega T)| = 1 for alpha, returning
    sign * arccosh(1 / |cos(omega T)|).
    """
    if sign not in (1, -1):
        raise ValidationError(f"sign must be +1 or -1, got {sign}")
    c = abs(math.cos(omega_t))
    if c < 1e-15:
        raise ValidationError(
            f"cos(omega*T) vanishes at omega*T = {omega_t!r}; no finite kick is marginal"
        )
    return sign * math.acosh(max(1.0, 1.0 / c))


class ResonanceKind(Enum):
    """Special values of omega*T where the free map is +-I."""
    NONE = auto()
    RESONANT = auto()               # omega*T = 2*pi*k, M0 = I
    RESONANT_REFLECTION = auto()    # omega*T = 2*pi*(k + 1/2), M0 = -I


def resonance_kind(omega_t: float, tol: float = 1e-12) -> ResonanceKind:
    """Tag omega*T by the free map it produces."""
    ratio = omega_t / math.pi
    k = round(ratio)
    if abs(ratio - k) > tol:
        return ResonanceKind.NONE
    return ResonanceKind.RESONANT if k % 2 == 0 else ResonanceKind.RESONANT_REFLECTION


# =============================================================================
# EXPONENTIAL OF A TRACELESS GENERATOR
# =============================================================================

def exp_traceless(G: Union[Monodromy2, np.ndarray],
                  exponent_sq: Optional[float] = None) -> Monodromy2:
    """Closed-form exponential of a traceless real 2x2 matrix.

    For traceless G, G @ G = k2 * I with k2 = -det G, so
    exp(G) = C(k2) I + S(k2) G with cosh/sinh for k2 > 0 and cos/sin for
    k2 < 0. Passing exponent_sq supplies k2 directly when it is known more
    accurately than -det G.
    """
    g = G.as_array() if isinstance(G, Monodromy2) else np.asarray(G, dtype=float)
    if g.shape != (2, 2):
        raise ValidationError(f"expected a 2x2 generator, got shape {g.shape}")
    k2 = -float(np.linalg.det(g)) if exponent_sq is None else float(exponent_sq)

    if abs(k2) < _EXP_SERIES_CUTOFF:
        c = 1.0 + k2 / 2.0 + k2 * k2 / 24.0 + k2 ** 3 / 720.0
        s = 1.0 + k2 / 6.0 + k2 * k2 / 120.0 + k2 ** 3 / 5040.0
    elif k2 > 0.0:
        k = math.sqrt(k2)
        c, s = math.cosh(k), math.sinh(k) / k
    else:
        k = math.sqrt(-k2)
        c, s = math.cos(k), math.sin(k) / k

    return Monodromy2.from_array(c * np.eye(2) + s * g)
