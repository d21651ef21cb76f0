"""Gaussian states propagated by a one-period map.

The first and second moments of z = (x, p) evolve exactly like the classical
phase-space point: mean -> M mean, Sigma -> M Sigma M^T.

The covariance is kept in symplectic normal form

    Sigma = nu R(phi) diag(e^{2r}, e^{-2r}) R(phi)^T,   nu = sqrt(det Sigma),

so that long hyperbolic runs neither overflow early nor lose det Sigma to
cancellation: each period only updates the squeeze r and the angle phi.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from paramres.core.classical import DEFAULT_BAND, classify, require_unit_det
from paramres.core.types import Hyperbolic, Monodromy2
from paramres.errors import IndeterminateError, ValidationError

log = logging.getLogger(__name__)

# Relative slack on the uncertainty bound det Sigma >= hbar^2 / 4.
_UNCERTAINTY_RTOL = 1e-12


def _rotation(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class GaussianState:
    """Gaussian state given by its mean and normal-form covariance.

    Attributes:
        mean: (<x>, <p>).
        scale: nu = sqrt(det Sigma), at least hbar / 2.
        squeeze: r, log of the major/minor axis ratio over two.
        angle: phi, direction of the major axis.
        hbar: Action scale of the uncertainty bound.
    """
    mean: Tuple[float, float]
    scale: float
    squeeze: float = 0.0
    angle: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValidationError(f"hbar must be positive, got {self.hbar}")
        if not self.scale >= 0.5 * self.hbar * (1.0 - _UNCERTAINTY_RTOL):
            raise ValidationError(
                f"uncertainty violated: sqrt(det Sigma) = {self.scale!r} < hbar/2 = {0.5 * self.hbar!r}"
            )
        if not (math.isfinite(self.squeeze) and math.isfinite(self.angle)):
            raise ValidationError("squeeze and angle must be finite")

    @classmethod
    def vacuum(cls, hbar: float = 1.0, mean: Tuple[float, float] = (0.0, 0.0)) -> "GaussianState":
        """Minimum-uncertainty state with Sigma = (hbar/2) I."""
        return cls(mean=(float(mean[0]), float(mean[1])), scale=0.5 * hbar, hbar=hbar)

    @classmethod
    def from_covariance(cls, mean, covariance, hbar: float = 1.0) -> "GaussianState":
        """Validate a covariance matrix and convert it to normal form."""
        cov = np.asarray(covariance, dtype=float)
        if cov.shape != (2, 2):
            raise ValidationError(f"covariance must be 2x2, got shape {cov.shape}")
        size = float(np.max(np.abs(cov)))
        if abs(cov[0, 1] - cov[1, 0]) > 1e-12 * max(size, 1.0):
            raise ValidationError("covariance must be symmetric")
        eigvals, eigvecs = np.linalg.eigh(0.5 * (cov + cov.T))
        if eigvals[0] <= 0:
            raise ValidationError("covariance must be positive definite")
        small, large = float(eigvals[0]), float(eigvals[1])
        major = eigvecs[:, 1]
        return cls(
            mean=(float(mean[0]), float(mean[1])),
            scale=math.sqrt(small * large),
            squeeze=0.25 * math.log(large / small),
            angle=math.atan2(major[1], major[0]),
            hbar=hbar,
        )

    @property
    def covariance(self) -> np.ndarray:
        rot = _rotation(self.angle)
        return self.scale * rot @ np.diag([math.exp(2 * self.squeeze),
                                           math.exp(-2 * self.squeeze)]) @ rot.T

    @property
    def det(self) -> float:
        """det Sigma, exact in the normal form."""
        return self.scale * self.scale

    @property
    def log_max_eigenvalue(self) -> float:
        """ln of the largest eigenvalue of Sigma, without forming Sigma."""
        return math.log(self.scale) + 2.0 * abs(self.squeeze)

    @property
    def max_eigenvalue(self) -> float:
        return math.exp(self.log_max_eigenvalue)

    def step(self, M: Monodromy2) -> "GaussianState":
        """State after one application of M (taken as exactly area preserving)."""
        a = M.as_array()
        mean = a @ np.array(self.mean)
        w = a @ _rotation(self.angle) @ np.diag([math.exp(self.squeeze), math.exp(-self.squeeze)])
        u, s, _ = np.linalg.svd(w)
        # Minor axis from det W = det M rather than s[1].
        squeeze = math.log(s[0]) - 0.5 * math.log(abs(M.det))
        angle = math.atan2(u[1, 0], u[0, 0])
        return GaussianState(
            mean=(float(mean[0]), float(mean[1])),
            scale=self.scale,
            squeeze=squeeze,
            angle=angle,
            hbar=self.hbar,
        )


def trajectory(state: GaussianState, M: Monodromy2, n_periods: int,
               det_tol: float = 1e-8) -> List[GaussianState]:
    """States after 0, 1, ..., n_periods periods."""
    if n_periods < 0:
        raise ValidationError(f"period count must be non-negative, got {n_periods}")
    require_unit_det(M, det_tol)
    states = [state]
    for _ in range(n_periods):
        states.append(states[-1].step(M))
    return states


def propagate_gaussian(state: GaussianState, M: Monodromy2, n_periods: int,
                       det_tol: float = 1e-8) -> GaussianState:
    """State after n_periods applications of M."""
    return trajectory(state, M, n_periods, det_tol)[-1]


def variance_growth_exponent(M: Monodromy2, n_max: int = 30,
                             state: Optional[GaussianState] = None,
                             band: float = DEFAULT_BAND) -> float:
    """Growth exponent per period of the largest variance.

    Fits the slope of (1/2) ln(max eigenvalue of Sigma_n) over the last half
    of n = 1..n_max; for hyperbolic maps it converges to mu.

    Raises:
        IndeterminateError: If M is not hyperbolic.
    """
    cls = classify(M, band)
    if not isinstance(cls, Hyperbolic):
        raise IndeterminateError(
            f"growth exponent needs a hyperbolic map, got {cls.label}"
        )
    if n_max < 2:
        raise ValidationError(f"need at least two periods to fit, got {n_max}")
    states = trajectory(state or GaussianState.vacuum(), M, n_max)
    ns = np.arange(n_max // 2, n_max + 1)
    ys = np.array([0.5 * states[n].log_max_eigenvalue for n in ns])
    slope = float(np.polyfit(ns, ys, 1)[0])
    log.debug("growth fit over n = %d..%d: slope %.12g (mu = %.12g)",
              ns[0], ns[-1], slope, cls.mu)
    return slope
