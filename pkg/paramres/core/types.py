"""Core value types for one-period maps of the kicked oscillator."""

import math
import sys
from dataclasses import dataclass
from enum import Enum, auto
from typing import Optional, Tuple, Union

import numpy as np

from paramres.errors import ValidationError

# Largest x with e^x representable as a double.
MAX_EXPONENT = math.log(sys.float_info.max)


class Regime(Enum):
    """Qualitative type of the one-period motion."""
    ELLIPTIC = auto()
    HYPERBOLIC = auto()
    MARGINAL = auto()


@dataclass(frozen=True)
class KickedParams:
    """Parameters of the periodically kicked harmonic oscillator.

    Only the combinations (omega*T, alpha) matter for stability; mass and
    hbar default to 1 so that everything is dimensionless.
    """
    omega: float
    T: float
    alpha: float
    m: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not self.m > 0:
            raise ValidationError(f"mass must be positive, got {self.m}")
        if not self.T > 0:
            raise ValidationError(f"period must be positive, got {self.T}")
        if not self.hbar > 0:
            raise ValidationError(f"hbar must be positive, got {self.hbar}")
        if not self.omega >= 0:
            raise ValidationError(f"frequency must be non-negative, got {self.omega}")
        if not math.isfinite(self.alpha):
            raise ValidationError(f"kick strength must be finite, got {self.alpha}")
        if abs(self.alpha) > MAX_EXPONENT:
            raise ValidationError(
                f"kick strength |alpha| = {abs(self.alpha)} exceeds {MAX_EXPONENT:.2f}; "
                "e^alpha overflows"
            )

    @property
    def omega_t(self) -> float:
        """Phase advanced by the free oscillator over one period."""
        return self.omega * self.T

    def rescaled(self) -> "KickedParams":
        """Equivalent parameters with m = omega = 1 and T = omega*T."""
        return KickedParams(omega=1.0, T=self.omega_t, alpha=self.alpha, hbar=self.hbar)


@dataclass(frozen=True)
class Monodromy2:
    """Real 2x2 one-period map acting on z = (x, p).

    Construction does not enforce det = 1 so that arbitrary matrices can be
    inspected; operations that need symplecticity check it themselves.
    """
    m11: float
    m12: float
    m21: float
    m22: float

    @classmethod
    def identity(cls) -> "Monodromy2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, a) -> "Monodromy2":
        a = np.asarray(a, dtype=float)
        if a.shape != (2, 2):
            raise ValidationError(f"expected a 2x2 matrix, got shape {a.shape}")
        return cls(float(a[0, 0]), float(a[0, 1]), float(a[1, 0]), float(a[1, 1]))

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def trace(self) -> float:
        return self.m11 + self.m22

    @property
    def half_trace(self) -> float:
        return 0.5 * (self.m11 + self.m22)

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    def __matmul__(self, other: "Monodromy2") -> "Monodromy2":
        return Monodromy2(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def __neg__(self) -> "Monodromy2":
        return Monodromy2(-self.m11, -self.m12, -self.m21, -self.m22)

    def inverse(self) -> "Monodromy2":
        d = self.det
        return Monodromy2(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d)

    def power(self, n: int) -> "Monodromy2":
        """n-th iterate (n may be negative), by repeated squaring."""
        if n < 0:
            return self.inverse().power(-n)
        result = Monodromy2.identity()
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def apply(self, z) -> np.ndarray:
        """Image of one phase-space point (or a 2xK array of points)."""
        return self.as_array() @ np.asarray(z, dtype=float)

    def max_deviation(self, other: "Monodromy2") -> float:
        return float(np.max(np.abs(self.as_array() - other.as_array())))

    def symplectic_defect(self) -> float:
        """max |M^T L M - L| with L = [[0, 1], [-1, 0]]."""
        lam = np.array([[0.0, 1.0], [-1.0, 0.0]])
        a = self.as_array()
        return float(np.max(np.abs(a.T @ lam @ a - lam)))

    def is_symplectic(self, tol: float = 1e-12) -> bool:
        return self.symplectic_defect() < tol and abs(self.det - 1.0) < tol


# =============================================================================
# STABILITY CLASSES
# =============================================================================

@dataclass(frozen=True)
class Elliptic:
    """Stable motion, conjugate to a rotation by omega per period (0 < omega < 2*pi)."""
    omega: float

    regime = Regime.ELLIPTIC

    @property
    def exponent(self) -> float:
        return self.omega

    @property
    def label(self) -> str:
        return "elliptic"


@dataclass(frozen=True)
class Hyperbolic:
    """Unstable motion growing like exp(mu) per period.

    reflected is set when Tr M < -2: both eigenvalues are negative and orbits
    alternate between the two branches of a hyperbola.
    """
    mu: float
    reflected: bool = False

    regime = Regime.HYPERBOLIC

    @property
    def exponent(self) -> float:
        return self.mu

    @property
    def label(self) -> str:
        return "hyperbolic_reflected" if self.reflected else "hyperbolic"


@dataclass(frozen=True)
class Marginal:
    """Boundary motion with a degenerate eigenvalue sign (+1 or -1)."""
    sign: int
    shearing: bool

    regime = Regime.MARGINAL

    @property
    def exponent(self) -> float:
        return 0.0

    @property
    def label(self) -> str:
        return "marginal"


StabilityClass = Union[Elliptic, Hyperbolic, Marginal]


@dataclass(frozen=True)
class QuadraticFormCoeffs:
    """Q(x, p) = q_pp p^2 + q_xx x^2 + q_xp x p."""
    q_pp: float
    q_xx: float
    q_xp: float

    def evaluate(self, z) -> np.ndarray:
        """Q at one point (x, p) or at each column of a 2xK array."""
        z = np.asarray(z, dtype=float)
        x, p = z[0], z[1]
        return self.q_pp * p * p + self.q_xx * x * x + self.q_xp * x * p

    def as_matrix(self) -> np.ndarray:
        """Symmetric S with Q(z) = z^T S z."""
        return np.array([[self.q_xx, 0.5 * self.q_xp], [0.5 * self.q_xp, self.q_pp]])

    def as_vector(self) -> np.ndarray:
        return np.array([self.q_pp, self.q_xx, self.q_xp])

    def scaled(self, k: float) -> "QuadraticFormCoeffs":
        return QuadraticFormCoeffs(k * self.q_pp, k * self.q_xx, k * self.q_xp)


@dataclass(frozen=True)
class BoundaryRoot:
    """A stability boundary crossing, tagged with the trace sign it sits on."""
    value: float
    sign: int


EigenPair = Tuple[complex, complex]


# =============================================================================
# EFFECTIVE GENERATOR
# =============================================================================

@dataclass(frozen=True)
class DeltaValue:
    """Entangling factor delta as a function of D^2 = (Tr M / 2)^2 - 1."""
    dsq: float
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValidationError(f"delta must be positive, got {self.delta}")


@dataclass(frozen=True)
class EffectiveGenerator:
    """Traceless generator G = T*A with exp(G) = M (or -M when reflected).

    A is the Hamiltonian matrix of H = u p^2 + v x^2 + w x p, i.e.
    A = [[w, 2u], [-2v, -w]]. Only three entries are stored since G22 = -G11.

    Attributes:
        g11, g12, g21: Entries of G.
        period: Drive period T.
        hbar: Action scale used for the quantum coefficients.
        delta: Entangling factor used to build G.
        exponent_sq: -det G, kept separately so exp(G) can be evaluated
            without cancellation (mu^2 hyperbolic, -Omega^2 elliptic).
        reflection_factor: True when M = (-I) M' was split and G generates M'.
        regime: Stability regime of the original map.
    """
    g11: float
    g12: float
    g21: float
    period: float
    hbar: float
    delta: float
    exponent_sq: float
    reflection_factor: bool
    regime: Regime

    def __post_init__(self):
        if not self.period > 0:
            raise ValidationError(f"period must be positive, got {self.period}")
        if not self.hbar > 0:
            raise ValidationError(f"hbar must be positive, got {self.hbar}")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.g11, self.g12], [self.g21, -self.g11]])

    @property
    def u(self) -> float:
        """Coefficient of p^2."""
        return self.g12 / (2.0 * self.period)

    @property
    def v(self) -> float:
        """Coefficient of x^2."""
        return -self.g21 / (2.0 * self.period)

    @property
    def w(self) -> float:
        """Coefficient of the symmetrized cross term (xp + px) / 2."""
        return self.g11 / self.period

    def hamiltonian_form(self) -> QuadraticFormCoeffs:
        """Classical effective Hamiltonian u p^2 + v x^2 + w x p."""
        return QuadraticFormCoeffs(q_pp=self.u, q_xx=self.v, q_xp=self.w)

    def exponentiate(self) -> Monodromy2:
        """exp(G) in closed form, using the stored exponent."""
        from paramres.core.classical import exp_traceless
        return exp_traceless(self.matrix, self.exponent_sq)

    def quantum_coefficients(self, hbar: Optional[float] = None) -> Tuple[complex, complex, complex]:
        """Coefficients (a, b, c) of the Floquet exponent a p^2 + b x^2 + (c/2)(xp + px).

        Built from the matrix-element formulas a = (i/hbar)(delta/2) M12,
        b = -(i/hbar)(delta/2) M21, c = (i/hbar)(delta/2)(M11 - M22), which
        describe the evolution in the convention F z F^+ = M z.
        """
        h = self.hbar if hbar is None else hbar
        if not h > 0:
            raise ValidationError(f"hbar must be positive, got {h}")
        return (
            1j * self.g12 / (2.0 * h),
            -1j * self.g21 / (2.0 * h),
            1j * self.g11 / h,
        )
