"""Resonance combinatorics and Bergman representative coordinates of quasi-Reinhardt domains."""

__version__ = "0.1.0"

from .action import (  # noqa: E402
    InvalidityCertificate,
    ValidityCertificate,
    WeightMatrix,
    apply_action,
    validate_action,
    weight_of_monomial,
)
from .resonance import (  # noqa: E402
    build_gamma,
    check_antisymmetry,
    enumerate_weight_class,
    resonance_profile,
)
from .polymap import (  # noqa: E402
    Polynomial,
    PolynomialMap,
    ResonantMap,
    compose,
    degree,
    evaluate,
    factor_biholomorphism,
    invert_resonant,
    is_resonant,
    linear_part,
)
from .scalar import GaussianRational  # noqa: E402

__all__ = [
    "GaussianRational",
    "InvalidityCertificate",
    "Polynomial",
    "PolynomialMap",
    "ResonantMap",
    "ValidityCertificate",
    "WeightMatrix",
    "apply_action",
    "build_gamma",
    "check_antisymmetry",
    "compose",
    "degree",
    "enumerate_weight_class",
    "evaluate",
    "factor_biholomorphism",
    "invert_resonant",
    "is_resonant",
    "linear_part",
    "resonance_profile",
    "validate_action",
    "weight_of_monomial",
]
