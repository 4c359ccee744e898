"""Regularized Gaussian product functionals and exact pairing combinatorics.

Two views of the same renormalization procedure:

* an analytic track: spectra with power-law tails, their cutoff
  deformations, the infinite-product characteristic functional, and the
  Gaussian-transform partition values, all with certified truncation
  errors;
* an exact combinatorial track: Wick-pairing moment polynomials over
  rationals and the shift identity that keeps every renormalized series
  coefficient finite.

The two tracks cross-validate each other; ``renorm.verify`` runs the
whole acceptance suite.
"""

from .diagrams import (
    INFINITE,
    InfiniteCoefficient,
    MomentPolynomial,
    all_pairings,
    partial_sum_scan,
    renorm_identity_holds,
    series_coefficients,
    shifted_moment,
    tadpole_free_moment,
    wick_moment,
    wick_moment_by_pairings,
)
from .partition import McConfig
from .quadrature import OscillationBudgetExceeded, QuadratureConfig, QuadratureFailure
from .regulator import (
    DeformedSpectrum,
    Exponential,
    NoConvergence,
    SharpCutoff,
    UnsupportedRegulatorTail,
    constant_part,
    regulator_from_dict,
    regulator_to_dict,
    singular_part,
)
from .spectrum import (
    DivergentSum,
    ExplicitWithTail,
    PowerLaw,
    Spectrum,
    spectrum_from_dict,
    spectrum_to_dict,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "DivergentSum",
    "Spectrum",
    "PowerLaw",
    "ExplicitWithTail",
    "spectrum_to_dict",
    "spectrum_from_dict",
    "SharpCutoff",
    "Exponential",
    "DeformedSpectrum",
    "singular_part",
    "constant_part",
    "UnsupportedRegulatorTail",
    "NoConvergence",
    "regulator_to_dict",
    "regulator_from_dict",
    "QuadratureConfig",
    "QuadratureFailure",
    "OscillationBudgetExceeded",
    "McConfig",
    "INFINITE",
    "InfiniteCoefficient",
    "MomentPolynomial",
    "all_pairings",
    "wick_moment",
    "wick_moment_by_pairings",
    "tadpole_free_moment",
    "shifted_moment",
    "renorm_identity_holds",
    "series_coefficients",
    "partial_sum_scan",
]
