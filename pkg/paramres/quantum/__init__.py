"""Quantum side of the Floquet problem: Gaussian moments, spectra, comb eigenstates."""

from paramres.quantum.gaussian import (
    GaussianState,
    propagate_gaussian,
    trajectory,
    variance_growth_exponent,
)
from paramres.quantum.spectrum import (
    QuasiEnergySpectrum,
    elliptic_spectrum,
    floquet_spectrum,
    marginal_partners,
    rational_approximation,
)
from paramres.quantum.comb import (
    DeltaCombState,
    MomentumEntry,
    PositionEntry,
    apply_kick_to_momenta,
    apply_kick_to_positions,
    build_origin_state,
    build_resonant_eigenstate,
    comb_overlap,
    eigen_residual,
    normalize_label,
)

__all__ = [
    "GaussianState",
    "propagate_gaussian",
    "trajectory",
    "variance_growth_exponent",
    "QuasiEnergySpectrum",
    "elliptic_spectrum",
    "floquet_spectrum",
    "marginal_partners",
    "rational_approximation",
    "DeltaCombState",
    "MomentumEntry",
    "PositionEntry",
    "apply_kick_to_momenta",
    "apply_kick_to_positions",
    "build_origin_state",
    "build_resonant_eigenstate",
    "comb_overlap",
    "eigen_residual",
    "normalize_label",
]
