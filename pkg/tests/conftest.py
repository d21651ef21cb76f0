"""Shared fixtures."""

import math

import numpy as np
import pytest

from paramres.core.types import KickedParams
from paramres.profiles import MathieuProfile


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def mathieu():
    """The reference Mathieu profile l = 1, delta_l = 0.5, omega0 = 2 (T = pi)."""
    return MathieuProfile(1.0, 0.5, 2.0)


@pytest.fixture
def resonant():
    """Kicked oscillator at omega*T = 2*pi with alpha = 1: a pure dilation."""
    return KickedParams(omega=1.0, T=2.0 * math.pi, alpha=1.0)


@pytest.fixture
def config_home(tmp_path, monkeypatch):
    """Isolated XDG config directory."""
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "xdg"))
    return tmp_path / "xdg"
