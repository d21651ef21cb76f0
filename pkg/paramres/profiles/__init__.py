"""Frequency profile registry.

Profiles are registered by kind name so that configuration files and the CLI
can build them from a name and a parameter mapping.
"""

from typing import Any, Dict, List, Optional, Type

from paramres.errors import ValidationError
from paramres.profiles.base import FrequencyProfile, ScaledProfile

_registry: Dict[str, Type[FrequencyProfile]] = {}


def register_profile(profile_cls: Type[FrequencyProfile]) -> None:
    """Register a profile class under its kind name."""
    if profile_cls.kind not in _registry:
        _registry[profile_cls.kind] = profile_cls


def get_registered_profiles() -> List[str]:
    """Return all registered kind names."""
    return list(_registry)


def get_profile_class(kind: str) -> Type[FrequencyProfile]:
    try:
        return _registry[kind]
    except KeyError:
        known = ", ".join(sorted(_registry))
        raise ValidationError(f"unknown profile kind '{kind}' (known: {known})") from None


def build_profile(kind: str, params: Optional[Dict[str, Any]] = None) -> FrequencyProfile:
    """Construct a registered profile from its kind and parameters."""
    return get_profile_class(kind).from_params(dict(params or {}))


# Auto-register built-in profiles on import.
from paramres.profiles.closed_form import (  # noqa: E402
    ConstantProfile, MathieuProfile, SquareWaveProfile,
)
from paramres.profiles.sampled import (  # noqa: E402
    SampledProfile, dump_profile_csv, load_profile_csv, parse_profile_csv,
)
register_profile(ConstantProfile)
register_profile(MathieuProfile)
register_profile(SquareWaveProfile)
register_profile(SampledProfile)

__all__ = [
    "FrequencyProfile",
    "ScaledProfile",
    "ConstantProfile",
    "MathieuProfile",
    "SquareWaveProfile",
    "SampledProfile",
    "register_profile",
    "get_registered_profiles",
    "get_profile_class",
    "build_profile",
    "parse_profile_csv",
    "load_profile_csv",
    "dump_profile_csv",
]
