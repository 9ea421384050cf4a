"""Conditional moments and multi-time correlators of polynomial jump-diffusions."""

from .correlator import (
    CorrelatorSpec,
    TimeGrid,
    correlator,
    correlator2,
    correlator_iterated,
    moment,
    tilde_g,
    tilde_g_expm,
)
from .errors import DegreeCapError, DomainError, ExpmConditionError, ShapeError
from .generator import (
    PolyModel,
    expm_conditions,
    expm_dense,
    generator_expm,
    generator_expm_recursive,
    generator_matrix,
)
from .greeks import GreekReport, delta, greeks, theta
from .mc import OUParams, gaussian_ou_oracle, mc_correlator
from .pricing import AsianSpec, asian_price_poly, exp_integrated_moment

__all__ = [
    "CorrelatorSpec",
    "TimeGrid",
    "correlator",
    "correlator2",
    "correlator_iterated",
    "moment",
    "tilde_g",
    "tilde_g_expm",
    "DegreeCapError",
    "DomainError",
    "ExpmConditionError",
    "ShapeError",
    "PolyModel",
    "expm_conditions",
    "expm_dense",
    "generator_expm",
    "generator_expm_recursive",
    "generator_matrix",
    "GreekReport",
    "delta",
    "greeks",
    "theta",
    "OUParams",
    "gaussian_ou_oracle",
    "mc_correlator",
    "AsianSpec",
    "asian_price_poly",
    "exp_integrated_moment",
]
