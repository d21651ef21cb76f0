import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from paramres.core.classical import free_matrix, monodromy_kicked
from paramres.core.types import KickedParams, Monodromy2
from paramres.errors import IndeterminateError, ValidationError
from paramres.quantum.gaussian import (
    GaussianState, propagate_gaussian, trajectory, variance_growth_exponent,
)


def test_vacuum_is_minimum_uncertainty():
    state = GaussianState.vacuum(hbar=2.0)
    assert_allclose(state.covariance, np.eye(2))
    assert state.det == pytest.approx(1.0)


def test_from_covariance_normal_form():
    state = GaussianState.from_covariance((0.0, 0.0), [[2.0, 0.0], [0.0, 0.5]])
    assert state.scale == pytest.approx(1.0)
    assert state.squeeze == pytest.approx(0.25 * math.log(4.0))
    assert_allclose(state.covariance, [[2.0, 0.0], [0.0, 0.5]], atol=1e-14)
    assert state.log_max_eigenvalue == pytest.approx(math.log(2.0))


@pytest.mark.parametrize("cov", [
    [[0.1, 0.0], [0.0, 0.1]],     # below hbar/2
    [[1.0, 0.3], [0.0, 1.0]],     # not symmetric
    [[1.0, 0.0], [0.0, -1.0]],    # not positive
    [[1.0, 0.0, 0.0]],            # wrong shape
])
def test_from_covariance_rejects(cov):
    with pytest.raises(ValidationError):
        GaussianState.from_covariance((0.0, 0.0), cov)


def test_step_matches_sandwich_product(rng):
    M = monodromy_kicked(KickedParams(omega=1.0, T=0.9, alpha=0.7))
    state = GaussianState.from_covariance((0.3, -1.2), [[1.5, 0.2], [0.2, 0.8]])
    after = state.step(M)
    a = M.as_array()
    assert_allclose(after.covariance, a @ state.covariance @ a.T, rtol=1e-12, atol=1e-14)
    assert_allclose(after.mean, a @ np.array(state.mean), atol=1e-14)
    assert after.det == state.det


def test_resonant_kick_squeezes_linearly(resonant):
    M = monodromy_kicked(resonant)
    states = trajectory(GaussianState.vacuum(), M, 10)
    for n, s in enumerate(states):
        assert s.squeeze == pytest.approx(n, abs=1e-9)
        assert s.log_max_eigenvalue == pytest.approx(math.log(0.5) + 2 * n, abs=1e-9)


def test_elliptic_rotation_keeps_vacuum():
    state = propagate_gaussian(GaussianState.vacuum(), free_matrix(1.0, 1.0, 0.7), 100)
    assert state.squeeze == pytest.approx(0.0, abs=1e-12)
    assert_allclose(state.covariance, 0.5 * np.eye(2), atol=1e-12)


def test_long_hyperbolic_run_keeps_determinant():
    M = monodromy_kicked(KickedParams(omega=1.0, T=1.0, alpha=2.0))
    state = propagate_gaussian(GaussianState.vacuum(), M, 200)
    assert state.det == pytest.approx(0.25, rel=1e-15)
    assert math.isfinite(state.log_max_eigenvalue)


@pytest.mark.parametrize("params", [
    KickedParams(omega=1.0, T=2.0 * math.pi, alpha=1.0),
    KickedParams(omega=1.0, T=2.0 * math.pi, alpha=0.5),
    KickedParams(omega=1.0, T=1.0, alpha=2.0),
])
def test_growth_exponent_matches_mu(params):
    M = monodromy_kicked(params)
    mu = math.acosh(abs(M.half_trace))
    assert variance_growth_exponent(M, 30) == pytest.approx(mu, rel=1e-2)


def test_growth_exponent_needs_hyperbolic_map():
    with pytest.raises(IndeterminateError):
        variance_growth_exponent(free_matrix(1.0, 1.0, 0.5))
    with pytest.raises(ValidationError):
        variance_growth_exponent(Monodromy2(2.0, 0.0, 0.0, 0.5), 1)


def test_trajectory_rejects_non_area_preserving_map():
    with pytest.raises(ValidationError):
        trajectory(GaussianState.vacuum(), Monodromy2(2.0, 0.0, 0.0, 1.0), 3)
    with pytest.raises(ValidationError):
        trajectory(GaussianState.vacuum(), Monodromy2.identity(), -1)
