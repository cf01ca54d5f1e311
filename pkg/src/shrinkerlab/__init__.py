"""Frequency-function verification lab for harmonic functions on rigid
gradient shrinking Ricci solitons with constant scalar curvature."""

__version__ = "0.1.0"

from .geometry import EinsteinFactor, RigidShrinker, coarea_check
from .harmonics import (
    ExponentialMode,
    HarmonicCombination,
    PolynomialMode,
    constant,
    coordinate,
    dim_poly_space,
    evaluate,
    growth_order,
    sup_on_sublevel,
)
from .frequency import FrequencyProfile, H_of_t, J_of_t, N_of_t, frequency_profile, h_of_t
from .report import IdentityEntry, IdentityReport

__all__ = [
    "EinsteinFactor", "RigidShrinker", "coarea_check",
    "ExponentialMode", "HarmonicCombination", "PolynomialMode",
    "constant", "coordinate", "dim_poly_space", "evaluate", "growth_order", "sup_on_sublevel",
    "FrequencyProfile", "H_of_t", "J_of_t", "N_of_t", "frequency_profile", "h_of_t",
    "IdentityEntry", "IdentityReport",
]
