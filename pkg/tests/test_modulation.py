import math

import pytest

from paramres.core.classical import free_matrix, monodromy_kicked, stability_boundary_kicked
from paramres.core.types import KickedParams, Monodromy2
from paramres.errors import NoBracketError, NonConvergenceError, ValidationError
from paramres.modulation import (
    ProfileFamily, boundary_between, convergence_order, kicked_family, mathieu_family,
    monodromy_converged, monodromy_slices, rk4_oracle, slice_matrix, trace_boundary,
)
from paramres.profiles import ConstantProfile, SquareWaveProfile


# === Slices ===

def test_slice_matrix_forms():
    assert slice_matrix(4.0, 1.0, 0.3).max_deviation(free_matrix(1.0, 2.0, 0.3)) < 1e-15
    assert slice_matrix(0.0, 2.0, 0.5) == Monodromy2(1.0, 0.25, 0.0, 1.0)
    inverted = slice_matrix(-1.0, 1.0, 0.5)
    assert inverted.m11 == pytest.approx(math.cosh(0.5))
    assert inverted.m21 == pytest.approx(math.sinh(0.5))
    assert inverted.det == pytest.approx(1.0, abs=1e-15)


def test_constant_profile_is_exact_for_any_slice_count():
    profile = ConstantProfile(2.25, 1.7)
    exact = free_matrix(1.0, 1.5, 1.7)
    for n in (1, 7, 64):
        assert monodromy_slices(profile, 1.0, n).max_deviation(exact) < 1e-13


def test_square_wave_is_exact_when_switch_is_a_slice_edge():
    profile = SquareWaveProfile(4.0, 1.0, duty=0.5, period=2.0)
    exact = free_matrix(1.0, 1.0, 1.0) @ free_matrix(1.0, 2.0, 1.0)
    assert monodromy_slices(profile, 1.0, 16).max_deviation(exact) < 1e-13


def test_slice_product_is_symplectic(mathieu):
    M = monodromy_slices(mathieu, 1.0, 1000)
    assert M.is_symplectic(1e-12)


def test_slice_product_matches_rk4(mathieu):
    product = monodromy_converged(mathieu, 1.0, 1e-10)
    assert product.result.max_deviation(rk4_oracle(mathieu, 1.0, 20000)) < 1e-8
    M, n = product
    assert n == product.n_slices and M is product.result
    assert product.history[-1][1] < 1e-10


def test_convergence_order_is_two(mathieu):
    report = convergence_order(mathieu, 1.0, n_start=64, doublings=3, oracle_steps=20000)
    assert report.slices == (64, 128, 256, 512)
    for order in report.orders:
        assert 1.8 <= order <= 2.2


def test_non_convergence_raises(mathieu):
    with pytest.raises(NonConvergenceError):
        monodromy_converged(mathieu, 1.0, 1e-15, n_start=8, n_max=64)
    with pytest.raises(ValidationError):
        monodromy_converged(mathieu, 1.0, 1e-10, n_start=64, n_max=64)


def test_rk4_needs_enough_steps(mathieu):
    with pytest.raises(ValidationError):
        rk4_oracle(mathieu, 1.0, 10)


# === Boundaries ===

def test_kicked_bisection_matches_closed_form():
    for alpha in (0.3, 1.0):
        found = trace_boundary(kicked_family(alpha), 1e-9, 2 * math.pi - 1e-9, 1e-13)
        closed = stability_boundary_kicked(alpha)
        assert [r.sign for r in found] == [r.sign for r in closed]
        for a, b in zip(found, closed):
            assert a.value == pytest.approx(b.value, abs=1e-9)


def test_mathieu_boundaries_agree_between_methods():
    slices = trace_boundary(mathieu_family(0.5, method="slices", slices=4096), 0.5, 1.5,
                            1e-10, 16)
    rk4 = trace_boundary(mathieu_family(0.5, method="rk4", steps=2000), 0.5, 1.5, 1e-10, 16)
    assert len(slices) == len(rk4) == 2
    for a, b in zip(slices, rk4):
        assert a.value == pytest.approx(b.value, abs=1e-6)
        assert a.sign == b.sign == -1
    assert 0.7 < slices[0].value < 0.8
    assert 1.2 < slices[1].value < 1.3


def test_trace_boundary_without_crossing():
    with pytest.raises(NoBracketError):
        trace_boundary(kicked_family(0.0), 0.5, 2.5)


def test_boundary_between_single_bracket():
    family = kicked_family(1.0)
    root = boundary_between(family, 0.3, 1.2)
    assert root is not None and root.sign == 1
    assert abs(math.cosh(1.0) * math.cos(root.value)) == pytest.approx(1.0, abs=1e-10)
    assert boundary_between(family, 1.0, 1.2) is None


def test_profile_family_margin():
    family = ProfileFamily("kicked", "omega_t",
                           lambda wt: monodromy_kicked(KickedParams(omega=1.0, T=wt, alpha=0.0)))
    assert family.margin(1.0) == pytest.approx(math.cos(1.0) - 1.0)
    with pytest.raises(ValidationError):
        mathieu_family(0.5, method="euler")
