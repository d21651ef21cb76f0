"""Configuration management for paramres.

User settings live in $XDG_CONFIG_HOME/paramres/config.json (falling back to
~/.config/paramres/config.json) and are deep-merged over DEFAULTS. Nothing
is written unless save_config() is called.

Run manifests for the CLI are a separate, flat `key = value` format; see
parse_manifest().
"""

import copy
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Tuple, Union

from paramres.errors import ValidationError

log = logging.getLogger(__name__)


# Default configuration values
DEFAULTS = {
    # Numerical tolerances
    "tolerances": {
        "band": 1e-9,  # Half-width of the marginal band around |Tr M|/2 = 1
        "det": 1e-8,  # Accepted |det M - 1|
        "convergence": 1e-10,  # Slice doubling stops below this max-entry change
        "boundary": 1e-12,  # Bisection bracket width
        "rational": 1e-9,  # Rationality test for Omega*T / 2*pi
        "denominator_cap": 1000000,
        "shear": 1e-12,  # Entry tolerance for M = +-I
    },

    # Physical units
    "units": {
        "m": 1.0,
        "hbar": 1.0,
    },

    # Slice products and the RK4 oracle
    "modulation": {
        "start_slices": 64,
        "max_slices": 1048576,
        "rk4_steps": 20000,
        "chart_slices": 512,  # Fixed slice count per chart cell
    },

    # Chart sweeps
    "chart": {
        "workers": 1,
    },

    # Output
    "output": {
        "format": "csv",
        "digits": 17,
    },

    # Command-line specifics
    "cli": {
        "spectrum_rational_tol": 1e-8,  # Literals like 2.0943951 carry ~8 digits
    },
}


def _get_base_config_dir() -> Path:
    """Get the XDG config base directory."""
    xdg_config = os.environ.get("XDG_CONFIG_HOME", "")
    if xdg_config:
        return Path(xdg_config)
    return Path.home() / ".config"


def get_config_dir() -> Path:
    """Get the configuration directory (not created)."""
    return _get_base_config_dir() / "paramres"


def get_config_path() -> Path:
    """Get the path to the configuration file."""
    return get_config_dir() / "config.json"


def _deep_merge(base: dict, override: dict) -> dict:
    """Deep merge override into base, returning new dict."""
    result = copy.deepcopy(base)
    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = _deep_merge(result[key], value)
        else:
            result[key] = value
    return result


def load_config(path: Optional[Union[str, Path]] = None) -> dict:
    """Load configuration from file, merging with defaults."""
    config_path = Path(path) if path else get_config_path()

    if config_path.exists():
        try:
            with open(config_path, "r") as f:
                user_config = json.load(f)
            if not isinstance(user_config, dict):
                raise ValueError("top level must be an object")
            return _deep_merge(DEFAULTS, user_config)
        except (json.JSONDecodeError, ValueError, IOError) as e:
            log.warning("Could not load config from %s: %s", config_path, e)

    return copy.deepcopy(DEFAULTS)


def save_config(config: dict, path: Optional[Union[str, Path]] = None) -> bool:
    """Save configuration to file."""
    config_path = Path(path) if path else get_config_path()

    try:
        config_path.parent.mkdir(parents=True, exist_ok=True)
        with open(config_path, "w") as f:
            json.dump(config, f, indent=2)
        return True
    except IOError as e:
        log.error("Could not save config to %s: %s", config_path, e)
        return False


def lookup(config: dict, key: str, default: Any = None) -> Any:
    """Get a value from a config dict using dot notation (e.g., 'tolerances.band')."""
    value = config
    for k in key.split("."):
        if isinstance(value, dict) and k in value:
            value = value[k]
        else:
            return default
    return value


def get(key: str, default: Any = None) -> Any:
    """Get a config value using dot notation."""
    return lookup(load_config(), key, default)


def validate_tolerances(config: dict) -> None:
    """All tolerances must be positive."""
    for name, value in config.get("tolerances", {}).items():
        if not isinstance(value, (int, float)) or not value > 0:
            raise ValidationError(f"tolerance '{name}' must be > 0, got {value!r}")


# Convenience accessors
class Config:
    """Configuration accessor with attribute-style access."""

    def __init__(self, data: Optional[dict] = None, path: Optional[Union[str, Path]] = None):
        self._config = data if data is not None else load_config(path)
        validate_tolerances(self._config)

    @classmethod
    def defaults(cls) -> "Config":
        return cls(copy.deepcopy(DEFAULTS))

    @property
    def data(self) -> dict:
        return self._config

    @property
    def tolerances(self) -> dict:
        return self._config.get("tolerances", DEFAULTS["tolerances"])

    @property
    def units(self) -> dict:
        return self._config.get("units", DEFAULTS["units"])

    @property
    def modulation(self) -> dict:
        return self._config.get("modulation", DEFAULTS["modulation"])

    @property
    def chart(self) -> dict:
        return self._config.get("chart", DEFAULTS["chart"])

    @property
    def output(self) -> dict:
        return self._config.get("output", DEFAULTS["output"])

    @property
    def cli(self) -> dict:
        return self._config.get("cli", DEFAULTS["cli"])

    def __getitem__(self, key: str) -> Any:
        value = lookup(self._config, key)
        if value is None:
            value = lookup(DEFAULTS, key)
        return value


# =============================================================================
# RUN MANIFESTS
# =============================================================================

def parse_manifest(text: str, allowed: Optional[Iterable[str]] = None) -> Dict[str, Tuple[str, int]]:
    """Parse a flat `key = value` run manifest.

    '#' starts a comment line, blank lines are skipped, '-' in keys is read
    as '_'. Returns {key: (raw value, line number)}.

    Raises:
        ValidationError: On malformed lines, duplicate keys, or keys outside
            `allowed` (with the line number).
    """
    allowed_set = set(allowed) if allowed is not None else None
    entries: Dict[str, Tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"manifest line {lineno}: expected 'key = value', got '{line}'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if not key:
            raise ValidationError(f"manifest line {lineno}: empty key")
        if allowed_set is not None and key not in allowed_set:
            raise ValidationError(f"manifest line {lineno}: unknown key '{key}'")
        if key in entries:
            raise ValidationError(f"manifest line {lineno}: duplicate key '{key}'")
        entries[key] = (value, lineno)
    return entries


def load_manifest(path: Union[str, Path],
                  allowed: Optional[Iterable[str]] = None) -> Dict[str, Tuple[str, int]]:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ValidationError(f"cannot read manifest {path}: {e}") from e
    return parse_manifest(text, allowed)
