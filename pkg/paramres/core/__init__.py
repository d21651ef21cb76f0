"""Core classical maps, stability classes and effective generators."""

from paramres.core.types import (
    Regime,
    KickedParams,
    Monodromy2,
    Elliptic,
    Hyperbolic,
    Marginal,
    StabilityClass,
    QuadraticFormCoeffs,
    BoundaryRoot,
    DeltaValue,
    EffectiveGenerator,
)
from paramres.core.classical import (
    kick_matrix,
    free_matrix,
    monodromy_kicked,
    eigenvalue_pair,
    classify,
    quadratic_form,
    stability_boundary_kicked,
    marginal_kick_strength,
    exp_traceless,
)
from paramres.core.effective import (
    delta_of_dsq,
    heff_from_monodromy,
    regime_reduction,
    quadratic_form_proportionality,
)

__all__ = [
    "Regime",
    "KickedParams",
    "Monodromy2",
    "Elliptic",
    "Hyperbolic",
    "Marginal",
    "StabilityClass",
    "QuadraticFormCoeffs",
    "BoundaryRoot",
    "DeltaValue",
    "EffectiveGenerator",
    "kick_matrix",
    "free_matrix",
    "monodromy_kicked",
    "eigenvalue_pair",
    "classify",
    "quadratic_form",
    "stability_boundary_kicked",
    "marginal_kick_strength",
    "exp_traceless",
    "delta_of_dsq",
    "heff_from_monodromy",
    "regime_reduction",
    "quadratic_form_proportionality",
]
