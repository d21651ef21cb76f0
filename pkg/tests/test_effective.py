import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import expm

from paramres.core.classical import (
    classify, free_matrix, kick_matrix, marginal_kick_strength, monodromy_kicked, quadratic_form,
)
from paramres.core.effective import (
    compare_expanded_form, delta_of_dsq, delta_value, expanded_form_coefficients,
    heff_from_monodromy, heff_kicked, quadratic_form_proportionality, regime_reduction,
)
from paramres.core.types import Elliptic, Hyperbolic, KickedParams, Monodromy2, Regime
from paramres.errors import IndeterminateError, ValidationError


# === delta ===

def test_delta_at_zero_is_exactly_one():
    assert delta_of_dsq(0.0) == 1.0


@pytest.mark.parametrize("dsq", [1e-4, -1e-4])
def test_delta_series_matches_direct_formula(dsq):
    d = math.sqrt(abs(dsq))
    direct = math.asinh(d) / d if dsq > 0 else math.asin(d) / d
    series = 1.0 - dsq / 6.0 + 3.0 * dsq * dsq / 40.0
    assert abs(direct - series) < 1e-12
    assert abs(delta_of_dsq(dsq) - direct) < 1e-12


def test_delta_branches():
    assert delta_of_dsq(3.0) == pytest.approx(math.asinh(math.sqrt(3.0)) / math.sqrt(3.0))
    assert delta_of_dsq(-0.5) == pytest.approx(math.asin(math.sqrt(0.5)) / math.sqrt(0.5))
    with pytest.raises(ValidationError):
        delta_of_dsq(-1.0)
    assert delta_value(0.25).delta > 0


# === Generator reconstruction ===

def _random_params(rng):
    return KickedParams(omega=float(rng.uniform(0.5, 2)), T=float(rng.uniform(0.01, 10)),
                        alpha=float(rng.uniform(-2, 2)), m=float(rng.uniform(0.5, 2)))


def test_exponentiate_reconstructs_map(rng):
    checked = 0
    while checked < 500:
        params = _random_params(rng)
        M = monodromy_kicked(params)
        if abs(abs(M.half_trace) - 1.0) <= 1e-6:
            continue
        gen = heff_kicked(params)
        target = -M if gen.reflection_factor else M
        assert gen.exponentiate().max_deviation(target) < 1e-10
        checked += 1


def test_generator_agrees_with_scipy_expm():
    params = KickedParams(omega=1.0, T=1.0, alpha=0.6)
    gen = heff_kicked(params)
    assert_allclose(expm(gen.matrix), monodromy_kicked(params).as_array(), atol=1e-12)


def test_elliptic_with_negative_trace_keeps_rotation_angle():
    # Rotation by 2.5 rad: Tr M / 2 < 0 but still elliptic, no reflection.
    M = free_matrix(1.0, 1.0, 2.5)
    gen = heff_from_monodromy(M, 1.0)
    assert not gen.reflection_factor
    assert gen.exponent_sq == pytest.approx(-2.5 ** 2, rel=1e-12)
    assert gen.exponentiate().max_deviation(M) < 1e-12


def test_reflection_split_below_minus_two():
    params = KickedParams(omega=1.0, T=math.pi, alpha=0.7)
    gen = heff_kicked(params)
    assert gen.reflection_factor
    assert gen.regime is Regime.HYPERBOLIC
    assert gen.exponentiate().max_deviation(-monodromy_kicked(params)) < 1e-12


def test_minus_identity_gives_zero_generator(caplog):
    gen = heff_from_monodromy(-Monodromy2.identity(), 1.0)
    assert gen.reflection_factor
    assert (gen.g11, gen.g12, gen.g21) == (0.0, 0.0, 0.0)
    assert "-I" in caplog.text


def test_marginal_shear_generator_is_nilpotent_part():
    M = free_matrix(1.0, 0.0, 2.0)
    gen = heff_from_monodromy(M, 2.0)
    assert gen.delta == 1.0
    assert (gen.g11, gen.g12, gen.g21) == (0.0, 2.0, 0.0)
    assert gen.u == pytest.approx(0.5)   # p^2 / (2m)


def test_pure_kick_generator_is_diagonal():
    alpha, T = 0.7, 2.0
    gen = heff_from_monodromy(kick_matrix(alpha), T)
    assert gen.g11 == pytest.approx(alpha, rel=1e-12)
    assert gen.g12 == pytest.approx(0.0, abs=1e-15)
    assert gen.g21 == pytest.approx(0.0, abs=1e-15)
    assert gen.u == pytest.approx(0.0, abs=1e-15)
    assert gen.v == pytest.approx(0.0, abs=1e-15)
    assert gen.w == pytest.approx(alpha / T, rel=1e-12)
    assert gen.exponentiate().max_deviation(kick_matrix(alpha)) < 1e-12


def test_generator_is_in_symplectic_algebra(rng):
    lam = np.array([[0.0, 1.0], [-1.0, 0.0]])
    checked = 0
    while checked < 200:
        params = _random_params(rng)
        M = monodromy_kicked(params)
        if abs(abs(M.half_trace) - 1.0) <= 1e-6:
            continue
        G = heff_kicked(params).matrix
        scale = max(1.0, float(np.max(np.abs(G))))
        assert np.max(np.abs(G.T @ lam + lam @ G)) < 1e-12 * scale
        checked += 1


@pytest.mark.parametrize("M", [
    monodromy_kicked(KickedParams(omega=1.0, T=1.0, alpha=0.2)),
    free_matrix(1.0, 1.0, 2.5),
    free_matrix(1.0, 1.0, 4.0),
    monodromy_kicked(KickedParams(omega=1.0, T=1.0, alpha=2.0)),
    monodromy_kicked(KickedParams(omega=1.0, T=math.pi, alpha=0.7)),
])
def test_generator_eigenvalues_match_stability_exponent(M):
    cls = classify(M)
    eig = np.linalg.eigvals(heff_from_monodromy(M, 1.0).matrix)
    if isinstance(cls, Elliptic):
        angle = min(cls.omega, 2.0 * math.pi - cls.omega)
        assert_allclose(np.sort(eig.imag), [-angle, angle], atol=1e-10)
        assert_allclose(eig.real, 0.0, atol=1e-12)
    else:
        assert isinstance(cls, Hyperbolic)
        assert_allclose(np.sort(eig.real), [-cls.mu, cls.mu], rtol=1e-10)
        assert_allclose(eig.imag, 0.0, atol=1e-12)


def test_heff_rejects_bad_input():
    with pytest.raises(ValidationError):
        heff_from_monodromy(Monodromy2.identity(), 0.0)
    with pytest.raises(ValidationError):
        heff_from_monodromy(Monodromy2(2.0, 0.0, 0.0, 2.0), 1.0)


# === Regime reduction ===

def test_regime_reduction_signs():
    ell = heff_kicked(KickedParams(omega=1.0, T=1.0, alpha=0.2))
    hyp = heff_kicked(KickedParams(omega=1.0, T=2.0 * math.pi, alpha=1.0))
    mar = heff_from_monodromy(free_matrix(1.0, 0.0, 1.0), 1.0)
    omega_sq, regime = regime_reduction(ell)
    assert regime is Regime.ELLIPTIC and omega_sq > 0
    omega_sq, regime = regime_reduction(hyp)
    assert regime is Regime.HYPERBOLIC
    assert omega_sq == pytest.approx(-1.0 / (2.0 * math.pi) ** 2, rel=1e-10)
    assert regime_reduction(mar) == (0.0, Regime.MARGINAL)


def test_unperturbed_oscillator_frequency():
    gen = heff_kicked(KickedParams(omega=1.0, T=1.0, alpha=0.0))
    omega_sq, _ = regime_reduction(gen)
    assert omega_sq == pytest.approx(1.0, rel=1e-12)
    assert gen.u == pytest.approx(0.5, rel=1e-12)
    assert gen.v == pytest.approx(0.5, rel=1e-12)
    assert gen.w == pytest.approx(0.0, abs=1e-12)


# === Proportionality ===

def test_invariant_form_is_multiple_of_hamiltonian():
    params = KickedParams(omega=1.0, T=1.3, alpha=0.4)
    gen = heff_kicked(params)
    fit = quadratic_form_proportionality(gen, quadratic_form(monodromy_kicked(params)))
    assert fit.residual < 1e-10
    assert fit.sigma == pytest.approx(-2.0 * params.T / gen.delta, rel=1e-10)


def test_proportionality_sign_flips_under_reflection():
    params = KickedParams(omega=1.0, T=math.pi, alpha=0.7)
    gen = heff_kicked(params)
    fit = quadratic_form_proportionality(gen, quadratic_form(monodromy_kicked(params)))
    assert fit.residual < 1e-10
    assert fit.sigma == pytest.approx(2.0 * params.T / gen.delta, rel=1e-10)


def test_proportionality_indeterminate_for_identity():
    gen = heff_from_monodromy(Monodromy2.identity(), 1.0)
    with pytest.raises(IndeterminateError):
        quadratic_form_proportionality(gen, quadratic_form(Monodromy2.identity()))


def test_marginal_proportionality():
    wt = 0.9
    params = KickedParams(omega=1.0, T=wt, alpha=marginal_kick_strength(wt))
    M = monodromy_kicked(params)
    fit = quadratic_form_proportionality(heff_kicked(params), quadratic_form(M))
    assert fit.residual < 1e-10


# === Quantum coefficients ===

def test_quantum_coefficients_are_imaginary():
    gen = heff_kicked(KickedParams(omega=1.0, T=1.0, alpha=0.3, hbar=2.0))
    a, b, c = gen.quantum_coefficients()
    for coeff in (a, b, c):
        assert coeff.real == 0.0
    assert a.imag == pytest.approx(gen.g12 / 4.0)
    assert b.imag == pytest.approx(-gen.g21 / 4.0)
    assert c.imag == pytest.approx(gen.g11 / 2.0)
    with pytest.raises(ValidationError):
        gen.quantum_coefficients(0.0)


# === Expanded closed form ===

def test_expanded_form_matches_except_cross_term():
    params = KickedParams(omega=1.3, T=0.8, alpha=0.5, m=1.7)
    gen = heff_kicked(params)
    ratios = compare_expanded_form(gen, params)
    assert ratios["p2"] == pytest.approx(1.0, rel=1e-10)
    assert ratios["x2"] == pytest.approx(1.0, rel=1e-10)
    assert ratios["xp"] == pytest.approx(2.0, rel=1e-10)


def test_expanded_form_without_kick_has_no_cross_term():
    params = KickedParams(omega=1.0, T=1.0, alpha=0.0)
    ratios = compare_expanded_form(heff_kicked(params), params)
    assert math.isnan(ratios["xp"])


def test_expanded_form_rejects_resonance_and_reflection():
    with pytest.raises(ValidationError):
        expanded_form_coefficients(KickedParams(omega=1.0, T=2.0 * math.pi, alpha=0.5))
    reflected = KickedParams(omega=1.0, T=math.pi, alpha=0.7)
    with pytest.raises(ValidationError):
        compare_expanded_form(heff_kicked(reflected), reflected)
