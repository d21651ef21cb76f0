"""Effective generator of a one-period map.

A unit-determinant map M is written as exp(G) with a traceless G built from
the matrix elements of M and the entangling factor delta:

    G = delta * (M - (Tr M / 2) I),   delta = arcsinh(D) / D,   D^2 = (Tr M / 2)^2 - 1.

Maps with Tr M < -2 have no real logarithm; they are split as M = (-I) M'
and the generator of M' is returned with reflection_factor set.
"""

import logging
import math
from typing import Dict, NamedTuple, Optional, Tuple

import numpy as np

from paramres.core.classical import (
    DEFAULT_BAND, DEFAULT_DET_TOL, DEFAULT_SHEAR_TOL, require_unit_det,
    classify, monodromy_kicked,
)
from paramres.core.types import (
    DeltaValue, EffectiveGenerator, KickedParams, Monodromy2,
    QuadraticFormCoeffs, Regime,
)
from paramres.errors import IndeterminateError, ValidationError

log = logging.getLogger(__name__)

_SERIES_CUTOFF = 1e-4


def delta_of_dsq(dsq: float) -> float:
    """delta = arcsinh(D)/D as an even function of D, evaluated from D^2.

    Uses arcsin(|D|)/|D| for negative dsq and the series
    1 - dsq/6 + 3 dsq^2/40 close to dsq = 0.
    """
    if not dsq > -1.0:
        raise ValidationError(f"dsq must exceed -1, got {dsq}")
    if abs(dsq) < _SERIES_CUTOFF:
        return 1.0 - dsq / 6.0 + 3.0 * dsq * dsq / 40.0
    if dsq > 0.0:
        d = math.sqrt(dsq)
        return math.asinh(d) / d
    d = math.sqrt(-dsq)
    return math.asin(d) / d


def delta_value(dsq: float) -> DeltaValue:
    return DeltaValue(dsq=dsq, delta=delta_of_dsq(dsq))


def _zero_generator(T: float, hbar: float, regime: Regime, reflected: bool) -> EffectiveGenerator:
    return EffectiveGenerator(
        g11=0.0, g12=0.0, g21=0.0, period=T, hbar=hbar, delta=1.0,
        exponent_sq=0.0, reflection_factor=reflected, regime=regime,
    )


def heff_from_monodromy(M: Monodromy2, T: float, hbar: float = 1.0,
                        band: float = DEFAULT_BAND,
                        det_tol: float = DEFAULT_DET_TOL,
                        shear_tol: float = DEFAULT_SHEAR_TOL) -> EffectiveGenerator:
    """Entangle a one-period map into a single quadratic generator.

    Args:
        M: Unit-determinant one-period map.
        T: Drive period; fixes the scale of the Hamiltonian coefficients.
        hbar: Action scale for quantum coefficients.
        band: Marginal band; maps with Tr M / 2 <= -1 + band are split.

    Returns:
        EffectiveGenerator with exp(G) = M, or exp(G) = -M when
        reflection_factor is set. For M = -I the generator is zero.
    """
    if not T > 0:
        raise ValidationError(f"period must be positive, got {T}")
    require_unit_det(M, det_tol)
    regime = classify(M, band, det_tol, shear_tol).regime

    reflected = M.half_trace <= -1.0 + band
    if reflected:
        if M.max_deviation(-Monodromy2.identity()) <= shear_tol:
            log.warning("map equals -I: generator of the pi rotation is not real, returning G = 0")
            return _zero_generator(T, hbar, regime, True)
        log.info("Tr M = %.12g <= -2: splitting off a -I factor", M.trace)
        M = -M

    h = M.half_trace
    dsq = (h - 1.0) * (h + 1.0)
    if h > 0.0 and abs(dsq) < _SERIES_CUTOFF:
        # Marginal neighbourhood: delta -> 1 and G is the nilpotent part of M.
        delta = delta_of_dsq(dsq)
        exponent_sq = delta * delta * dsq
    elif dsq > 0.0:
        d = math.sqrt(dsq)
        mu = math.asinh(d)
        delta = mu / d
        exponent_sq = mu * mu
    else:
        # atan2 covers both signs of Tr M; the principal arcsin only h > 0.
        d = math.sqrt(-dsq)
        angle = math.atan2(d, h)
        delta = angle / d
        exponent_sq = -angle * angle

    gen = EffectiveGenerator(
        g11=delta * 0.5 * (M.m11 - M.m22),
        g12=delta * M.m12,
        g21=delta * M.m21,
        period=T,
        hbar=hbar,
        delta=delta,
        exponent_sq=exponent_sq,
        reflection_factor=reflected,
        regime=regime,
    )
    log.debug("generator: delta=%.17g exponent_sq=%.17g regime=%s",
              delta, exponent_sq, regime.name)
    return gen


def heff_kicked(params: KickedParams, band: float = DEFAULT_BAND) -> EffectiveGenerator:
    """Effective generator of the kicked oscillator."""
    return heff_from_monodromy(monodromy_kicked(params), params.T, params.hbar, band)


def regime_reduction(gen: EffectiveGenerator) -> Tuple[float, Regime]:
    """Squared frequency of the normal form (P^2 + Omega^2 X^2) / 2.

    Omega^2 = det(G) / T^2: positive elliptic, negative hyperbolic, and
    exactly zero for maps classified as marginal.
    """
    if gen.regime is Regime.MARGINAL:
        return 0.0, Regime.MARGINAL
    omega_sq = -gen.exponent_sq / (gen.period * gen.period)
    return omega_sq, gen.regime


class Proportionality(NamedTuple):
    """Least-squares fit Q = sigma * H of two quadratic forms."""
    sigma: float
    residual: float


def quadratic_form_proportionality(gen: EffectiveGenerator,
                                   q: QuadraticFormCoeffs,
                                   tol: float = 1e-300) -> Proportionality:
    """Fit the invariant form Q as a multiple of the effective Hamiltonian.

    For an unreflected map sigma = -2T/delta; the reflection split flips the
    sign. The residual is |Q - sigma H| / |Q|.
    """
    hv = gen.hamiltonian_form().as_vector()
    qv = q.as_vector()
    hh = float(hv @ hv)
    qq = float(qv @ qv)
    if hh <= tol or qq <= tol:
        raise IndeterminateError(
            "sigma is undefined: the invariant form or the effective Hamiltonian vanishes (M = +-I)"
        )
    sigma = float(hv @ qv) / hh
    residual = float(np.linalg.norm(qv - sigma * hv)) / math.sqrt(qq)
    return Proportionality(sigma, residual)


# =============================================================================
# EXPANDED CLOSED FORM (KICKED OSCILLATOR)
# =============================================================================

def expanded_form_coefficients(params: KickedParams,
                               delta: Optional[float] = None) -> QuadraticFormCoeffs:
    """Closed expression of the kicked-oscillator effective Hamiltonian.

    delta * sin(wT)/(wT) * (p^2/(2 m e^a) + m w^2 e^a x^2 / 2 + w sinh(a) cot(wT) (xp + px)),
    returned as classical coefficients of p^2, x^2 and x p (xp + px -> 2 x p).
    """
    omega, T, alpha, m = params.omega, params.T, params.alpha, params.m
    wt = omega * T
    s = math.sin(wt)
    if omega == 0.0 or abs(s) < 1e-15:
        raise ValidationError(
            f"expanded form needs omega > 0 and sin(omega*T) != 0, got omega*T = {wt!r}"
        )
    if delta is None:
        h = math.cosh(alpha) * math.cos(wt)
        delta = delta_of_dsq(h * h - 1.0)
    pref = delta * s / wt
    return QuadraticFormCoeffs(
        q_pp=pref / (2.0 * m * math.exp(alpha)),
        q_xx=pref * m * omega * omega * math.exp(alpha) / 2.0,
        q_xp=2.0 * pref * omega * math.sinh(alpha) * math.cos(wt) / s,
    )


def compare_expanded_form(gen: EffectiveGenerator, params: KickedParams) -> Dict[str, float]:
    """Ratios expanded / matrix-element coefficient for p^2, x^2 and x p.

    The p^2 and x^2 ratios are 1; the cross-term ratio comes out as 2.
    A ratio is nan when both coefficients vanish.
    """
    if gen.reflection_factor:
        raise ValidationError("expanded form does not describe a reflection-split generator")
    expanded = expanded_form_coefficients(params, gen.delta)
    ours = gen.hamiltonian_form()
    size = max(np.max(np.abs(expanded.as_vector())), np.max(np.abs(ours.as_vector())))
    ratios = {}
    for key, a, b in (("p2", expanded.q_pp, ours.q_pp),
                      ("x2", expanded.q_xx, ours.q_xx),
                      ("xp", expanded.q_xp, ours.q_xp)):
        if max(abs(a), abs(b)) <= 1e-12 * size:
            ratios[key] = math.nan
        elif abs(b) <= 1e-12 * size:
            ratios[key] = math.inf
        else:
            ratios[key] = a / b
    if math.isfinite(ratios["xp"]) and abs(ratios["xp"] - 1.0) > 1e-9:
        log.info("expanded cross term differs from the matrix-element form by a factor %.12g",
                 ratios["xp"])
    return ratios
