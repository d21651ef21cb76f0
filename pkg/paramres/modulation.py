"""One-period maps for arbitrary periodic omega^2(t).

The period is cut into N slices. On each slice omega^2 is frozen at its
midpoint value and the slice is propagated exactly (rotation, hyperbolic
or shear form), so every factor is exactly area preserving. The slice
product converges to the monodromy matrix with second order in 1/N.

A fixed-step RK4 integration of the fundamental matrix serves as an
independent oracle.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy import optimize

from paramres.core.classical import monodromy_kicked
from paramres.core.types import BoundaryRoot, KickedParams, Monodromy2
from paramres.errors import NoBracketError, NonConvergenceError, ValidationError
from paramres.profiles import MathieuProfile
from paramres.profiles.base import FrequencyProfile

log = logging.getLogger(__name__)

DEFAULT_START_SLICES = 64
DEFAULT_MAX_SLICES = 2 ** 20
DEFAULT_RK4_STEPS = 20000


# =============================================================================
# SLICE PRODUCTS
# =============================================================================

def slice_matrix(omega_sq: float, m: float, dt: float) -> Monodromy2:
    """Exact map of x'' + omega_sq x = 0 (p = m x') over a time dt."""
    return Monodromy2.from_array(_slice_arrays(np.array([omega_sq]), m, dt)[0])


def _slice_arrays(omega_sq: np.ndarray, m: float, dt: float) -> np.ndarray:
    """Stack of exact slice maps, shape (N, 2, 2)."""
    w = np.asarray(omega_sq, dtype=float)
    out = np.empty((len(w), 2, 2))
    out[:, 0, 0] = 1.0
    out[:, 0, 1] = dt / m
    out[:, 1, 0] = 0.0
    out[:, 1, 1] = 1.0

    pos = w > 0
    if np.any(pos):
        k = np.sqrt(w[pos])
        c, s = np.cos(k * dt), np.sin(k * dt)
        out[pos, 0, 0] = c
        out[pos, 0, 1] = s / (m * k)
        out[pos, 1, 0] = -m * k * s
        out[pos, 1, 1] = c

    neg = w < 0
    if np.any(neg):
        k = np.sqrt(-w[neg])
        c, s = np.cosh(k * dt), np.sinh(k * dt)
        out[neg, 0, 0] = c
        out[neg, 0, 1] = s / (m * k)
        out[neg, 1, 0] = m * k * s
        out[neg, 1, 1] = c
    return out


def _ordered_product(mats: np.ndarray) -> np.ndarray:
    """mats[N-1] @ ... @ mats[0] by pairwise reduction."""
    while len(mats) > 1:
        if len(mats) % 2:
            mats = np.concatenate([mats, np.eye(2)[None, :, :]])
        mats = np.matmul(mats[1::2], mats[0::2])
    return mats[0]


def monodromy_slices(profile: FrequencyProfile, m: float = 1.0, N: int = 1024) -> Monodromy2:
    """Midpoint slice product over one period with N slices."""
    if N < 1:
        raise ValidationError(f"slice count must be at least 1, got {N}")
    if not m > 0:
        raise ValidationError(f"mass must be positive, got {m}")
    T = profile.period
    dt = T / N
    midpoints = (np.arange(N) + 0.5) * dt
    mats = _slice_arrays(np.asarray(profile.omega_sq(midpoints), dtype=float), m, dt)
    return Monodromy2.from_array(_ordered_product(mats))


@dataclass(frozen=True)
class SliceProduct:
    """Converged slice product with its doubling history."""
    n_slices: int
    result: Monodromy2
    history: Tuple[Tuple[int, float], ...] = field(default=())
    policy: str = "midpoint"

    def __iter__(self):
        # Unpacks as (monodromy, slices used).
        return iter((self.result, self.n_slices))


def monodromy_converged(profile: FrequencyProfile, m: float = 1.0, tol: float = 1e-10,
                        n_start: int = DEFAULT_START_SLICES,
                        n_max: int = DEFAULT_MAX_SLICES) -> SliceProduct:
    """Double N until successive slice products agree to tol (max entry).

    Raises:
        NonConvergenceError: If N would exceed n_max.
    """
    if not tol > 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    if 2 * n_start > n_max:
        raise ValidationError(f"slice cap {n_max} leaves no room to double {n_start}")
    n = n_start
    previous = monodromy_slices(profile, m, n)
    history: List[Tuple[int, float]] = []
    while 2 * n <= n_max:
        current = monodromy_slices(profile, m, 2 * n)
        deviation = current.max_deviation(previous)
        history.append((2 * n, deviation))
        log.debug("slices %d -> %d: deviation %.3e", n, 2 * n, deviation)
        if deviation < tol:
            return SliceProduct(2 * n, current, tuple(history))
        previous = current
        n *= 2
    raise NonConvergenceError(
        f"slice product did not reach tol {tol:g} within {n_max} slices "
        f"(last deviation {history[-1][1]:.3e})"
    )


# =============================================================================
# RK4 ORACLE
# =============================================================================

def rk4_oracle(profile: FrequencyProfile, m: float = 1.0,
               steps: int = DEFAULT_RK4_STEPS) -> Monodromy2:
    """Fundamental matrix over one period by classical fixed-step RK4.

    Integrates x' = p/m, p' = -m omega^2(t) x for both unit initial
    conditions at once.
    """
    if steps < 100:
        raise ValidationError(f"RK4 oracle needs at least 100 steps, got {steps}")
    if not m > 0:
        raise ValidationError(f"mass must be positive, got {m}")
    T = profile.period
    h = T / steps
    # omega^2 on the half-step grid, as plain floats for the scalar loop
    w = np.asarray(profile.omega_sq(np.arange(2 * steps + 1) * (0.5 * h)), dtype=float).tolist()
    inv_m = 1.0 / m

    x1, p1, x2, p2 = 1.0, 0.0, 0.0, 1.0
    for i in range(steps):
        w0, wh, w1 = w[2 * i], w[2 * i + 1], w[2 * i + 2]
        mw0, mwh, mw1 = m * w0, m * wh, m * w1

        k1x1, k1p1 = p1 * inv_m, -mw0 * x1
        k1x2, k1p2 = p2 * inv_m, -mw0 * x2

        a1, b1 = x1 + 0.5 * h * k1x1, p1 + 0.5 * h * k1p1
        a2, b2 = x2 + 0.5 * h * k1x2, p2 + 0.5 * h * k1p2
        k2x1, k2p1 = b1 * inv_m, -mwh * a1
        k2x2, k2p2 = b2 * inv_m, -mwh * a2

        a1, b1 = x1 + 0.5 * h * k2x1, p1 + 0.5 * h * k2p1
        a2, b2 = x2 + 0.5 * h * k2x2, p2 + 0.5 * h * k2p2
        k3x1, k3p1 = b1 * inv_m, -mwh * a1
        k3x2, k3p2 = b2 * inv_m, -mwh * a2

        a1, b1 = x1 + h * k3x1, p1 + h * k3p1
        a2, b2 = x2 + h * k3x2, p2 + h * k3p2
        k4x1, k4p1 = b1 * inv_m, -mw1 * a1
        k4x2, k4p2 = b2 * inv_m, -mw1 * a2

        x1 += h / 6.0 * (k1x1 + 2.0 * k2x1 + 2.0 * k3x1 + k4x1)
        p1 += h / 6.0 * (k1p1 + 2.0 * k2p1 + 2.0 * k3p1 + k4p1)
        x2 += h / 6.0 * (k1x2 + 2.0 * k2x2 + 2.0 * k3x2 + k4x2)
        p2 += h / 6.0 * (k1p2 + 2.0 * k2p2 + 2.0 * k3p2 + k4p2)

    # Columns are the images of (1, 0) and (0, 1).
    return Monodromy2(x1, x2, p1, p2)


class ConvergenceReport(NamedTuple):
    """Slice-product errors against the oracle over successive doublings."""
    slices: Tuple[int, ...]
    errors: Tuple[float, ...]
    orders: Tuple[float, ...]


def convergence_order(profile: FrequencyProfile, m: float = 1.0, n_start: int = 64,
                      doublings: int = 3,
                      oracle_steps: int = DEFAULT_RK4_STEPS) -> ConvergenceReport:
    """Empirical order log2(e_N / e_2N) of the slice product."""
    if doublings < 1:
        raise ValidationError(f"need at least one doubling, got {doublings}")
    reference = rk4_oracle(profile, m, oracle_steps)
    slices = tuple(n_start * 2 ** k for k in range(doublings + 1))
    errors = tuple(monodromy_slices(profile, m, n).max_deviation(reference) for n in slices)
    orders = tuple(math.log2(a / b) for a, b in zip(errors, errors[1:]))
    log.debug("convergence orders %s", ", ".join(f"{o:.3f}" for o in orders))
    return ConvergenceReport(slices, errors, orders)


# =============================================================================
# STABILITY BOUNDARIES
# =============================================================================

class ProfileFamily:
    """A one-parameter family of one-period maps.

    Args:
        name: Family name for logs and reports.
        param_name: Name of the scanned parameter.
        build: Maps a parameter value to its monodromy matrix.
    """

    def __init__(self, name: str, param_name: str, build: Callable[[float], Monodromy2]):
        self.name = name
        self.param_name = param_name
        self._build = build

    def __call__(self, value: float) -> Monodromy2:
        return self._build(value)

    def margin(self, value: float) -> float:
        """|Tr M| / 2 - 1: negative stable, positive unstable."""
        return abs(self(value).half_trace) - 1.0

    def __repr__(self) -> str:
        return f"ProfileFamily({self.name!r}, {self.param_name!r})"


def kicked_family(alpha: float, m: float = 1.0, omega: float = 1.0) -> ProfileFamily:
    """Kicked oscillator at fixed kick strength, scanning omega*T."""
    if not omega > 0:
        raise ValidationError(f"frequency must be positive, got {omega}")

    def build(omega_t: float) -> Monodromy2:
        return monodromy_kicked(KickedParams(omega=omega, T=omega_t / omega, alpha=alpha, m=m))

    return ProfileFamily("kicked", "omega_t", build)


def mathieu_family(delta_l: float, omega0: float = 2.0, m: float = 1.0,
                   method: str = "slices", slices: int = 4096,
                   steps: int = 2000) -> ProfileFamily:
    """Mathieu profiles at fixed delta_l and omega0, scanning l.

    method selects the slice product ("slices") or the RK4 oracle ("rk4").
    """
    if method == "slices":
        def build(l: float) -> Monodromy2:
            return monodromy_slices(MathieuProfile(l, delta_l, omega0), m, slices)
    elif method == "rk4":
        def build(l: float) -> Monodromy2:
            return rk4_oracle(MathieuProfile(l, delta_l, omega0), m, steps)
    else:
        raise ValidationError(f"unknown method '{method}' (expected 'slices' or 'rk4')")
    return ProfileFamily(f"mathieu[{method}]", "l", build)


def trace_boundary(family: ProfileFamily, lo: float, hi: float, tol: float = 1e-12,
                   scan_points: int = 64) -> List[BoundaryRoot]:
    """Locate all stability boundary crossings of a family on [lo, hi].

    The interval is scanned on scan_points equal subintervals for sign
    changes of |Tr M|/2 - 1; each bracket is refined by bisection to a
    width below tol. Every root is tagged with the sign of Tr M there.

    Raises:
        NoBracketError: If no sign change is found on [lo, hi].
    """
    if not hi > lo:
        raise ValidationError(f"empty parameter range [{lo}, {hi}]")
    if not tol > 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    if scan_points < 1:
        raise ValidationError(f"need at least one scan interval, got {scan_points}")

    grid = np.linspace(lo, hi, scan_points + 1)
    values = [family.margin(float(x)) for x in grid]

    roots: List[float] = []
    for i in range(scan_points):
        a, b = float(grid[i]), float(grid[i + 1])
        fa, fb = values[i], values[i + 1]
        if fa == 0.0:
            if i == 0 or values[i - 1] != 0.0:
                roots.append(a)
            continue
        if fa * fb < 0.0:
            log.debug("%s: bracket [%.12g, %.12g]", family.name, a, b)
            roots.append(optimize.bisect(family.margin, a, b, xtol=tol,
                                         maxiter=200))
    if values[-1] == 0.0 and (len(values) < 2 or values[-2] != 0.0):
        roots.append(float(grid[-1]))

    if not roots:
        raise NoBracketError(
            f"{family.name}: |Tr M|/2 - 1 does not change sign on [{lo}, {hi}]"
        )
    return [BoundaryRoot(r, 1 if family(r).trace > 0 else -1) for r in roots]


def boundary_between(family: ProfileFamily, a: float, b: float,
                     tol: float = 1e-12) -> Optional[BoundaryRoot]:
    """Refine a single bracket [a, b]; None when the margin does not change sign."""
    fa, fb = family.margin(a), family.margin(b)
    if fa == 0.0:
        root = a
    elif fb == 0.0:
        root = b
    elif fa * fb > 0.0:
        return None
    else:
        root = optimize.bisect(family.margin, a, b, xtol=tol,
                               maxiter=200)
    return BoundaryRoot(root, 1 if family(root).trace > 0 else -1)
