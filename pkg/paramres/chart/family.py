"""Two-parameter families of one-period maps swept by stability charts."""

import logging
import math
import threading
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Tuple, Type

from paramres.core.classical import (
    TWO_PI, marginal_kick_strength, monodromy_kicked, stability_boundary_kicked,
)
from paramres.core.types import BoundaryRoot, KickedParams, Monodromy2
from paramres.errors import ParamresError, ValidationError
from paramres.modulation import ProfileFamily, boundary_between, monodromy_slices
from paramres.profiles import MathieuProfile, load_profile_csv
from paramres.profiles.base import FrequencyProfile

log = logging.getLogger(__name__)


class SweepFamily(ABC):
    """A family of maps M(p1, p2; fixed) for parameter-plane sweeps."""

    name: str = ""
    param_names: Tuple[str, str] = ("", "")

    def __init__(self, fixed: Optional[Dict[str, Any]] = None):
        fixed = dict(fixed or {})
        unknown = set(fixed) - set(self.defaults())
        if unknown:
            raise ValidationError(
                f"unknown fixed parameter(s) for family '{self.name}': {', '.join(sorted(unknown))}"
            )
        self.fixed = {**self.defaults(), **fixed}

    @classmethod
    @abstractmethod
    def defaults(cls) -> Dict[str, Any]:
        """Fixed parameters and their default values."""
        ...

    @abstractmethod
    def build(self, values: Dict[str, float]) -> Monodromy2:
        """Monodromy matrix at one point of the parameter plane."""
        ...

    def refine_edge(self, axis: str, lo: float, hi: float,
                    other: Dict[str, float], tol: float) -> Optional[BoundaryRoot]:
        """Boundary crossing on the segment where only `axis` varies.

        The default bisects |Tr M|/2 - 1 along the segment.
        """
        line = ProfileFamily(self.name, axis, lambda v: self.build({**other, axis: v}))
        return boundary_between(line, lo, hi, tol)


class KickedFamily(SweepFamily):
    """Kicked oscillator over (omega*T, alpha)."""

    name = "kicked"
    param_names = ("omega_t", "alpha")

    @classmethod
    def defaults(cls) -> Dict[str, Any]:
        return {"m": 1.0, "omega": 1.0}

    def build(self, values: Dict[str, float]) -> Monodromy2:
        omega = float(self.fixed["omega"])
        return monodromy_kicked(KickedParams(
            omega=omega, T=values["omega_t"] / omega, alpha=values["alpha"], m=float(self.fixed["m"]),
        ))

    def refine_edge(self, axis: str, lo: float, hi: float,
                    other: Dict[str, float], tol: float) -> Optional[BoundaryRoot]:
        # Closed-form crossings where available.
        if axis == "omega_t":
            alpha = other["alpha"]
            if alpha != 0.0:
                for root in stability_boundary_kicked(alpha):
                    k = math.floor((lo - root.value) / TWO_PI)
                    for shift in (k, k + 1):
                        value = root.value + shift * TWO_PI
                        if lo <= value <= hi:
                            return BoundaryRoot(value, root.sign)
        elif axis == "alpha":
            omega_t = other["omega_t"]
            c = math.cos(omega_t)
            if abs(c) > 1e-15:
                for sign in (1, -1):
                    value = marginal_kick_strength(omega_t, sign)
                    if lo <= value <= hi:
                        return BoundaryRoot(value, 1 if c > 0 else -1)
        return super().refine_edge(axis, lo, hi, other, tol)


class MathieuFamily(SweepFamily):
    """Mathieu profiles over (l, delta_l) by slice products."""

    name = "mathieu"
    param_names = ("l", "delta_l")

    @classmethod
    def defaults(cls) -> Dict[str, Any]:
        return {"omega0": 2.0, "m": 1.0, "slices": 512}

    def build(self, values: Dict[str, float]) -> Monodromy2:
        profile = MathieuProfile(values["l"], values["delta_l"], float(self.fixed["omega0"]))
        return monodromy_slices(profile, float(self.fixed["m"]), int(self.fixed["slices"]))


class CustomFamily(SweepFamily):
    """A sampled profile from a CSV file, swept as offset + scale * omega^2(t)."""

    name = "custom"
    param_names = ("offset", "scale")

    def __init__(self, fixed: Optional[Dict[str, Any]] = None):
        super().__init__(fixed)
        self._lock = threading.Lock()
        self._profile: Optional[FrequencyProfile] = None
        self._error: Optional[ParamresError] = None

    @classmethod
    def defaults(cls) -> Dict[str, Any]:
        return {"profile": None, "m": 1.0, "slices": 512}

    def _base_profile(self) -> FrequencyProfile:
        with self._lock:
            if self._profile is None and self._error is None:
                path = self.fixed["profile"]
                if not path:
                    self._error = ValidationError("custom family needs a 'profile' CSV path")
                else:
                    try:
                        self._profile = load_profile_csv(path)
                    except ParamresError as e:
                        self._error = e
            if self._error is not None:
                raise self._error
            return self._profile

    def build(self, values: Dict[str, float]) -> Monodromy2:
        profile = self._base_profile().scaled(values["offset"], values["scale"])
        return monodromy_slices(profile, float(self.fixed["m"]), int(self.fixed["slices"]))


# =============================================================================
# REGISTRY
# =============================================================================

_registry: Dict[str, Type[SweepFamily]] = {}


def register_family(family_cls: Type[SweepFamily]) -> None:
    """Register a sweep family class under its name."""
    if family_cls.name not in _registry:
        _registry[family_cls.name] = family_cls


def get_registered_families() -> List[str]:
    return list(_registry)


def build_family(name: str, fixed: Optional[Dict[str, Any]] = None) -> SweepFamily:
    try:
        family_cls = _registry[name]
    except KeyError:
        known = ", ".join(sorted(_registry))
        raise ValidationError(f"unknown sweep family '{name}' (known: {known})") from None
    return family_cls(fixed)


register_family(KickedFamily)
register_family(MathieuFamily)
register_family(CustomFamily)
