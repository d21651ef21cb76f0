"""Resonant Floquet eigenstates of the dilation kick as finite delta combs.

At resonance the Floquet operator is the squeeze U_k with
U_k |x> = e^{-a/2} |e^{-a} x>. Its improper eigenstates are geometric
ladders of position states

    |x0, mu> = sum_n e^{i mu n} e^{-a n / 2} / sqrt(2 pi) |e^{-a n} x0>,

labelled by x0 in the fundamental interval [1, e^|a|) u [-e^|a|, -1) and a
quasi phase mu. Truncating the ladder to n in [-N, N] leaves a residual of
exactly two boundary entries.

Entries are compared by ladder index, never by floating position, and the
inner product pairs amplitudes only at equal normalized positions.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Tuple, Union

import numpy as np

from paramres.core.types import MAX_EXPONENT
from paramres.errors import ValidationError

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
_NORM = 1.0 / math.sqrt(TWO_PI)

# Relative tolerance for recognising an integer multiple of the ladder constant.
_KICK_RTOL = 1e-12
# Relative tolerance for interior cancellation in the eigen residual.
INTERIOR_RTOL = 1e-12


@dataclass(frozen=True)
class PositionEntry:
    """Amplitude on one position eigenstate |x>."""
    position: float
    amplitude: complex


@dataclass(frozen=True)
class MomentumEntry:
    """Amplitude on one momentum eigenstate |p>."""
    momentum: float
    amplitude: complex


@dataclass(frozen=True)
class DeltaCombState:
    """Finite ladder of position states with label (x0, mu).

    Attributes:
        x0: Label position in the fundamental interval.
        mu: Quasi phase in [0, 2*pi).
        alpha: Ladder constant (the kick strength); may be negative.
        N: Truncation half-width of the original ladder.
        indices: Ladder indices n carried by the entries.
        amplitudes: Complex amplitude per index.
    """
    x0: float
    mu: float
    alpha: float
    N: int
    indices: Tuple[int, ...]
    amplitudes: Tuple[complex, ...]

    def __post_init__(self):
        if len(self.indices) != len(self.amplitudes):
            raise ValidationError("comb indices and amplitudes differ in length")

    @property
    def positions(self) -> Tuple[float, ...]:
        """x_n = e^{-alpha n} x0, evaluated per index."""
        return tuple(math.exp(-self.alpha * n) * self.x0 for n in self.indices)

    @property
    def entries(self) -> List[Tuple[int, float, complex]]:
        return list(zip(self.indices, self.positions, self.amplitudes))

    def __len__(self) -> int:
        return len(self.indices)


def comb_amplitude(n: int, mu: float, alpha: float) -> complex:
    """e^{i mu n} e^{-alpha n / 2} / sqrt(2 pi)."""
    return complex(np.exp(1j * mu * n) * (math.exp(-0.5 * alpha * n) * _NORM))


# =============================================================================
# LABELS
# =============================================================================

def in_fundamental_interval(x0: float, alpha: float) -> bool:
    """1 <= |x0| < e^|alpha|."""
    return 1.0 <= abs(x0) < math.exp(abs(alpha))


def normalize_label(x: float, alpha: float) -> Tuple[float, int]:
    """Label (x0, n) of a nonzero position with x = e^{-alpha n} x0.

    The x = 0 state has no label; see build_origin_state().
    """
    if alpha == 0.0 or not math.isfinite(alpha):
        raise ValidationError(f"labels need a finite nonzero alpha, got {alpha}")
    if x == 0.0 or not math.isfinite(x):
        raise ValidationError(f"cannot label position {x!r}")
    a = abs(alpha)
    j = math.floor(math.log(abs(x)) / a)
    x0 = x * math.exp(-a * j)
    # log/floor rounding can leave x0 one rung off
    if abs(x0) >= math.exp(a):
        j += 1
        x0 = x * math.exp(-a * j)
    elif abs(x0) < 1.0:
        j -= 1
        x0 = x * math.exp(-a * j)
    n = -j if alpha > 0 else j
    return x0, n


def build_origin_state() -> PositionEntry:
    """The x = 0 position state, mapped to itself by every kick."""
    return PositionEntry(0.0, 1.0 + 0j)


# =============================================================================
# CONSTRUCTION AND KICKS
# =============================================================================

def build_resonant_eigenstate(x0: float, mu: float, alpha: float, N: int) -> DeltaCombState:
    """Comb with 2N + 1 entries n = -N..N.

    mu is reduced to [0, 2*pi).

    Raises:
        ValidationError: If x0 lies outside both fundamental intervals;
            normalize_label() maps any nonzero position into them.
            Also if e^(|alpha| (N + 2)) is not a finite double.
    """
    if alpha == 0.0 or not math.isfinite(alpha):
        raise ValidationError(f"comb needs a finite nonzero alpha, got {alpha}")
    if N < 1:
        raise ValidationError(f"truncation N must be at least 1, got {N}")
    if abs(alpha) * (N + 2) > MAX_EXPONENT:
        raise ValidationError(
            f"ladder positions overflow for alpha = {alpha}, N = {N}"
        )
    if not math.isfinite(mu):
        raise ValidationError(f"quasi phase must be finite, got {mu}")
    if not in_fundamental_interval(x0, alpha):
        raise ValidationError(
            f"x0 = {x0!r} is outside [1, e^|alpha|) and [-e^|alpha|, -1); "
            "use normalize_label() to map it"
        )
    mu = mu % TWO_PI
    indices = tuple(range(-N, N + 1))
    return DeltaCombState(
        x0=x0, mu=mu, alpha=alpha, N=N,
        indices=indices,
        amplitudes=tuple(comb_amplitude(n, mu, alpha) for n in indices),
    )


def _kick_multiple(comb: DeltaCombState, alpha: float) -> int:
    k = round(alpha / comb.alpha)
    if abs(alpha - k * comb.alpha) > _KICK_RTOL * max(abs(alpha), abs(comb.alpha)):
        raise ValidationError(
            f"kick {alpha!r} is not an integer multiple of the ladder constant {comb.alpha!r}"
        )
    return k


def apply_kick_to_positions(state: Union[DeltaCombState, PositionEntry],
                            alpha: float) -> Union[DeltaCombState, PositionEntry]:
    """Apply U_k |x> = e^{-alpha/2} |e^{-alpha} x>.

    A comb must be kicked by an integer multiple k of its own ladder
    constant; its entries move k rungs along the ladder.
    """
    if not math.isfinite(alpha):
        raise ValidationError(f"kick strength must be finite, got {alpha}")
    if isinstance(state, PositionEntry):
        return PositionEntry(math.exp(-alpha) * state.position,
                             math.exp(-0.5 * alpha) * state.amplitude)
    if alpha == 0.0:
        return state

    k = _kick_multiple(state, alpha)
    factor = math.exp(-0.5 * k * state.alpha)
    return DeltaCombState(
        x0=state.x0, mu=state.mu, alpha=state.alpha, N=state.N,
        indices=tuple(n + k for n in state.indices),
        amplitudes=tuple(a * factor for a in state.amplitudes),
    )


def apply_kick_to_momenta(entry: MomentumEntry, alpha: float) -> MomentumEntry:
    """Apply U_k |p> = e^{alpha/2} |e^{alpha} p>."""
    if not math.isfinite(alpha):
        raise ValidationError(f"kick strength must be finite, got {alpha}")
    return MomentumEntry(math.exp(alpha) * entry.momentum, math.exp(0.5 * alpha) * entry.amplitude)


# =============================================================================
# RESIDUAL AND OVERLAP
# =============================================================================

class EigenResidual(NamedTuple):
    """F psi - e^{-i mu} psi for a truncated comb.

    Attributes:
        residual_norm_sq: Sum of |amplitude|^2 over the surviving entries.
        boundary_terms: Number of entries that do not cancel.
        entries: (index, amplitude) of the surviving entries.
        interior_max_abs: Largest |difference| among cancelling entries.
        interior_max_rel: Same, relative to the entry modulus.
    """
    residual_norm_sq: float
    boundary_terms: int
    entries: Tuple[Tuple[int, complex], ...]
    interior_max_abs: float
    interior_max_rel: float


def eigen_residual(comb: DeltaCombState, rtol: float = INTERIOR_RTOL) -> EigenResidual:
    """Residual of the eigen equation F psi = e^{-i mu} psi, entry by entry."""
    kicked = apply_kick_to_positions(comb, comb.alpha)
    phase = np.exp(-1j * comb.mu)

    diff = {}
    scale = {}
    for n, a in zip(kicked.indices, kicked.amplitudes):
        diff[n] = diff.get(n, 0j) + a
        scale[n] = max(scale.get(n, 0.0), abs(a))
    for n, a in zip(comb.indices, comb.amplitudes):
        b = complex(phase * a)
        diff[n] = diff.get(n, 0j) - b
        scale[n] = max(scale.get(n, 0.0), abs(b))

    surviving = []
    max_abs = 0.0
    max_rel = 0.0
    for n in sorted(diff):
        d = abs(diff[n])
        rel = d / scale[n] if scale[n] > 0 else 0.0
        if rel > rtol:
            surviving.append((n, diff[n]))
        else:
            max_abs = max(max_abs, d)
            max_rel = max(max_rel, rel)

    norm_sq = float(sum(abs(a) ** 2 for _, a in surviving))
    return EigenResidual(norm_sq, len(surviving), tuple(surviving), max_abs, max_rel)


def boundary_moduli(alpha: float, N: int) -> Tuple[float, float]:
    """Moduli of the residual entries at indices -N and N + 1."""
    return math.exp(0.5 * alpha * N) * _NORM, math.exp(-0.5 * alpha * (N + 1)) * _NORM


def comb_overlap(c1: DeltaCombState, c2: DeltaCombState) -> complex:
    """Formal inner product <c1|c2> of two combs.

    Entries pair only at equal normalized positions: same label x0 and same
    index. Each pair carries the Jacobian e^{alpha n} of the delta function
    at the dilated position, so combs with a common label give the
    Dirichlet kernel sum_n e^{i (mu2 - mu1) n} / (2 pi).

    Raises:
        ValidationError: On mismatched alpha or truncation.
    """
    if c1.alpha != c2.alpha or c1.N != c2.N:
        raise ValidationError(
            f"combs differ in ladder: alpha {c1.alpha!r}/{c2.alpha!r}, N {c1.N}/{c2.N}"
        )
    if c1.x0 != c2.x0:
        return 0j
    second = dict(zip(c2.indices, c2.amplitudes))
    total = 0j
    for n, a in zip(c1.indices, c1.amplitudes):
        b = second.get(n)
        if b is not None:
            total += a.conjugate() * b * math.exp(c1.alpha * n)
    return complex(total)


def dirichlet_kernel(theta: float, N: int) -> float:
    """sum_{n=-N}^{N} e^{i theta n} / (2 pi) in closed form."""
    half = math.sin(0.5 * theta)
    if abs(half) < 1e-15:
        return (2 * N + 1) / TWO_PI
    return math.sin((N + 0.5) * theta) / (TWO_PI * half)
