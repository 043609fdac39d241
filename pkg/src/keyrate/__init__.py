"""Init keyrate package."""

from keyrate.core import (
    JointDist,
    ParamFamily,
    Variant,
    binary_erasure_source,
    binary_symmetric_source,
    mutual_information,
)
from keyrate.correlation import maximal_correlation
from keyrate.envelope import EnvelopeConfig, GridFunctional, omega_r, sigma_r
from keyrate.rates import kbib, rate_region_boundary, s_star

__all__ = [
    "EnvelopeConfig",
    "GridFunctional",
    "JointDist",
    "ParamFamily",
    "Variant",
    "binary_erasure_source",
    "binary_symmetric_source",
    "kbib",
    "maximal_correlation",
    "mutual_information",
    "omega_r",
    "rate_region_boundary",
    "s_star",
    "sigma_r",
]
