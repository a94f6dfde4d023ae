"""qwblow: desk-scale laboratory for geometric blowup of the radial quasilinear
wave equation d_t^2 u - (1 + u + d_t u) Lap u = 0 with small data.

The package computes the radiation field of the data, minimizes the lifespan
functional, builds the slow-time profile by characteristics, assembles the
matched approximate solution, integrates the reduced wave equation to blowup,
and certifies upper lifespan bounds through a Riccati comparison argument.
"""

from .data import PolyBump, RadialProfile, TableProfile, make_profile, zero_profile
from .radiation import RadiationField, radiation_field
from .lifespan import LifespanEstimate, g_log_ratio, tau0, tau_unified

__all__ = [
    "PolyBump",
    "RadialProfile",
    "TableProfile",
    "make_profile",
    "zero_profile",
    "RadiationField",
    "radiation_field",
    "LifespanEstimate",
    "g_log_ratio",
    "tau0",
    "tau_unified",
]

__version__ = "0.1.0"
