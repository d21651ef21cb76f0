import cmath
import math

import pytest

from paramres.core.classical import free_matrix, monodromy_kicked
from paramres.core.types import KickedParams, Regime
from paramres.errors import ValidationError
from paramres.quantum.spectrum import (
    TWO_PI, elliptic_spectrum, floquet_phase, floquet_spectrum, marginal_partners,
    rational_approximation,
)


def _circular_distance(a, b):
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


# === Rational detection ===

@pytest.mark.parametrize("x, expected", [
    (1.0 / 3.0, (1, 3)),
    (0.4, (2, 5)),
    (0.5, (1, 2)),
    (2.0, (2, 1)),
])
def test_rational_approximation_finds_simple_fractions(x, expected):
    assert rational_approximation(x) == expected


def test_rational_approximation_respects_cap():
    assert rational_approximation(math.sqrt(2.0) - 1.0, tol=1e-12, cap=1000) is None


def test_loose_tolerance_accepts_truncated_input():
    # 2.0943951 ~ 2pi/3 to 8 digits
    assert rational_approximation(2.0943951 / TWO_PI, tol=1e-8) == (1, 3)
    assert rational_approximation(2.0943951 / TWO_PI, tol=1e-12, cap=1000) is None


# === Elliptic spectrum ===

@pytest.mark.parametrize("r, s", [(1, 3), (2, 5)])
def test_rational_rotation_gives_s_classes(r, s):
    spec = elliptic_spectrum(TWO_PI * r / s, n_max=20)
    assert spec.rational == (r, s)
    assert len(spec.distinct) == s
    assert spec.degeneracy == "finite"
    for c, members in enumerate(spec.classes):
        assert members == tuple(range(c, 21, s))
        for n in members:
            assert _circular_distance(spec.values[n], spec.distinct[c]) < 1e-12


def test_irrational_rotation_has_no_degeneracy():
    spec = elliptic_spectrum(1.0, n_max=10)
    assert spec.rational is None
    assert spec.degeneracy == "none"
    assert len(spec.classes) == 11
    assert spec.values[3] == pytest.approx(3.5)


def test_orientation_reverses_levels():
    plus = elliptic_spectrum(1.0, n_max=3)
    minus = elliptic_spectrum(1.0, n_max=3, orientation=-1)
    for a, b in zip(plus.values, minus.values):
        assert _circular_distance(a, -b) < 1e-12


def test_elliptic_spectrum_rejects():
    with pytest.raises(ValidationError):
        elliptic_spectrum(0.0, 3)
    with pytest.raises(ValidationError):
        elliptic_spectrum(1.0, -1)
    with pytest.raises(ValidationError):
        elliptic_spectrum(1.0, 3, orientation=0)


def test_max_gap_of_third_turn():
    spec = elliptic_spectrum(TWO_PI / 3.0, n_max=8)
    assert spec.max_gap == pytest.approx(TWO_PI / 3.0)


def test_irrational_rotation_fills_circle():
    golden = TWO_PI * (math.sqrt(5.0) - 1.0) / 2.0
    gaps = [elliptic_spectrum(golden, n_max=n).max_gap for n in (8, 16, 32, 64, 128)]
    assert elliptic_spectrum(golden, n_max=8).rational is None
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < gaps[0] / 4


# === Marginal partners ===

def test_marginal_partners_share_phase():
    T = 1.7
    partners = marginal_partners(0.4, T, k_max=3, include_trivial=True)
    assert len(partners) == 8
    assert partners[:2] == [0.4, -0.4]
    reference = floquet_phase(0.4, T)
    for p in partners:
        assert abs(floquet_phase(p, T) - reference) < 1e-12


@pytest.mark.parametrize("P0, T, k_max", [(1000.0, TWO_PI, 1), (1.0, 2.0, 20000), (250.0, 0.3, 50)])
def test_marginal_partners_at_large_phase(P0, T, k_max):
    partners = marginal_partners(P0, T, k_max=k_max)
    assert len(partners) == 2 * k_max
    for k, p in zip(range(1, k_max + 1), partners[::2]):
        turns = (p * p - P0 * P0) * T / (4 * math.pi)
        assert turns == pytest.approx(k, rel=1e-9, abs=1e-12 * P0 * P0 * T)


def test_floquet_phase_value():
    assert floquet_phase(1.0, 2.0, 1.0) == pytest.approx(cmath.exp(-1j))


# === Full dispatch ===

def test_floquet_spectrum_elliptic():
    spec = floquet_spectrum(free_matrix(1.0, 1.0, TWO_PI / 3.0), 1.0, n_max=9)
    assert spec.regime is Regime.ELLIPTIC
    assert spec.rational == (1, 3)
    assert spec.omega_t == pytest.approx(TWO_PI / 3.0)


def test_floquet_spectrum_marginal():
    spec = floquet_spectrum(free_matrix(1.0, 0.0, 2.0), 2.0, p0=1.0, k_max=2)
    assert spec.regime is Regime.MARGINAL
    assert spec.continuous and spec.degeneracy == "countable"
    assert len(spec.partners) == 6


def test_floquet_spectrum_resonant_hyperbolic(resonant):
    M = monodromy_kicked(resonant)
    spec = floquet_spectrum(M, resonant.T, mu=0.3, n_labels=4)
    assert spec.regime is Regime.HYPERBOLIC
    assert spec.continuous
    assert len(spec.comb_labels) == 8
    for x0, mu in spec.comb_labels:
        assert mu == pytest.approx(0.3)
        assert 1.0 <= abs(x0) <= math.e


def test_floquet_spectrum_generic_hyperbolic_has_no_labels():
    M = monodromy_kicked(KickedParams(omega=1.0, T=1.0, alpha=2.0))
    spec = floquet_spectrum(M, 1.0)
    assert spec.regime is Regime.HYPERBOLIC
    assert spec.comb_labels == ()
