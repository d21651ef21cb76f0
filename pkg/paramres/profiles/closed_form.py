"""Closed-form frequency profiles."""

import logging
import math
from typing import Any, Dict

import numpy as np

from paramres.errors import ValidationError
from paramres.profiles.base import FrequencyProfile

log = logging.getLogger(__name__)


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0 or not math.isfinite(value):
        raise ValidationError(f"{name} must be positive and finite, got {value}")
    return value


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value}")
    return value


class ConstantProfile(FrequencyProfile):
    """omega^2(t) = omega_sq over a period T."""

    kind = "constant"

    def __init__(self, omega_sq: float, period: float):
        self._omega_sq = _finite("omega_sq", omega_sq)
        self._period = _positive("period", period)

    @property
    def period(self) -> float:
        return self._period

    def omega_sq(self, t):
        return np.full_like(np.asarray(t, dtype=float), self._omega_sq)

    def params(self) -> Dict[str, Any]:
        return {"omega_sq": self._omega_sq, "period": self._period}


class MathieuProfile(FrequencyProfile):
    """omega^2(t) = l - delta_l cos(omega0 t), period 2*pi/omega0.

    l and delta_l are dimensionless. Profiles that go negative somewhere
    (l - |delta_l| <= 0, the inverted pendulum) are allowed.
    """

    kind = "mathieu"

    def __init__(self, l: float, delta_l: float, omega0: float):
        self.l = _finite("l", l)
        self.delta_l = _finite("delta_l", delta_l)
        self.omega0 = _positive("omega0", omega0)
        if self.l - abs(self.delta_l) <= 0:
            log.warning("Mathieu profile l=%g, delta_l=%g is not positive everywhere",
                        self.l, self.delta_l)

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega0

    def omega_sq(self, t):
        return self.l - self.delta_l * np.cos(self.omega0 * np.asarray(t, dtype=float))

    def params(self) -> Dict[str, Any]:
        return {"l": self.l, "delta_l": self.delta_l, "omega0": self.omega0}


class SquareWaveProfile(FrequencyProfile):
    """omega_sq_high for the first duty*T of each period, omega_sq_low after."""

    kind = "square"

    def __init__(self, omega_sq_high: float, omega_sq_low: float,
                 duty: float = 0.5, period: float = 2.0 * math.pi):
        self.omega_sq_high = _finite("omega_sq_high", omega_sq_high)
        self.omega_sq_low = _finite("omega_sq_low", omega_sq_low)
        self.duty = float(duty)
        if not 0.0 < self.duty < 1.0:
            raise ValidationError(f"duty must lie in (0, 1), got {duty}")
        self._period = _positive("period", period)

    @property
    def period(self) -> float:
        return self._period

    @property
    def switch_time(self) -> float:
        return self.duty * self._period

    def omega_sq(self, t):
        phase = np.mod(np.asarray(t, dtype=float), self._period)
        return np.where(phase < self.switch_time, self.omega_sq_high, self.omega_sq_low)

    def params(self) -> Dict[str, Any]:
        return {
            "omega_sq_high": self.omega_sq_high,
            "omega_sq_low": self.omega_sq_low,
            "duty": self.duty,
            "period": self._period,
        }
