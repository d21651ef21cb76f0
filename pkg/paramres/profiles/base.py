"""Abstract base class for periodic frequency profiles omega^2(t)."""

from abc import ABC, abstractmethod
from typing import Any, Dict

import numpy as np

from paramres.errors import ValidationError


class FrequencyProfile(ABC):
    """A periodic squared frequency omega^2(t) driving x'' + omega^2(t) x = 0.

    Implementations:
    - ConstantProfile: omega^2 fixed, with an explicit period
    - MathieuProfile: l - dl cos(w0 t)
    - SquareWaveProfile: two levels switched at a duty fraction
    - SampledProfile: piecewise linear through CSV samples
    - ScaledProfile: offset + scale * another profile
    """

    kind: str = ""

    @property
    @abstractmethod
    def period(self) -> float:
        """Drive period T > 0."""
        ...

    @abstractmethod
    def omega_sq(self, t):
        """omega^2 at time(s) t; accepts floats and numpy arrays."""
        ...

    @abstractmethod
    def params(self) -> Dict[str, Any]:
        """Constructor parameters, as accepted by from_params()."""
        ...

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "FrequencyProfile":
        """Build a profile from a parameter mapping (config files, CLI)."""
        try:
            return cls(**params)
        except TypeError as e:
            raise ValidationError(f"bad parameters for profile '{cls.kind}': {e}") from e

    def scaled(self, offset: float = 0.0, scale: float = 1.0) -> "ScaledProfile":
        """Profile offset + scale * omega^2(t) with the same period."""
        return ScaledProfile(self, offset, scale)

    def sample(self, n: int) -> np.ndarray:
        """omega^2 at n equally spaced points of [0, T]."""
        return np.asarray(self.omega_sq(np.linspace(0.0, self.period, n)), dtype=float)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "period": self.period, **self.params()}

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


class ScaledProfile(FrequencyProfile):
    """offset + scale * base(t)."""

    kind = "scaled"

    def __init__(self, base: FrequencyProfile, offset: float = 0.0, scale: float = 1.0):
        self.base = base
        self.offset = float(offset)
        self.scale = float(scale)

    @property
    def period(self) -> float:
        return self.base.period

    def omega_sq(self, t):
        return self.offset + self.scale * self.base.omega_sq(t)

    def params(self) -> Dict[str, Any]:
        return {"base": self.base, "offset": self.offset, "scale": self.scale}
