# This file is part of incres.
#
# incres is free software: you can redistribute it and/or modify it under
# the terms of the GNU General Public License as published by the Free Software
# Foundation, either version 2 of the License, or (at your option) any later
# version.
#
# incres is distributed in the hope that it will be useful, but WITHOUT ANY
# WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR
# A PARTICULAR PURPOSE. See the GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License along with
# incres. If not, see <https://www.gnu.org/licenses/>.

import logging

logger = logging.getLogger(__name__)

# canonical units: the gravitational parameter and the equatorial radius are 1
DEFAULT_MU = 1.0
DEFAULT_ALPHA = 1.0
DEFAULT_J2 = 1e-3

CONFIG_ENV_VAR = "INCRES_CONFIG"

# radius below which the potential is considered singular ("almost rectilinear")
R_MIN = 1e-9

# |N| may exceed Theta by this much (relative) before it is an error
INVARIANT_TOL = 1e-12

# eccentricities below this are treated as circular
CIRCULAR_E = 1e-12

# negative eccentricity from rounding is clamped to zero inside this band
ECCENTRICITY_CLAMP = 1e-14

KEPLER_TOL = 1e-13
# iteration stops here so adding back whole revolutions stays within KEPLER_TOL
KEPLER_ITER_TOL = 2e-14
KEPLER_MAX_ITER = 50
KEPLER_BISECTION_ITER = 200

# parallax inversion
INVERSE_MAX_ITER = 10
INVERSE_TOL = 1e-14
KAPPA_MAX = 0.05

# numeric propagation
TOL_MIN = 1e-14
TOL_MAX = 1e-6
DEFAULT_TOL = 1e-12
MAX_STEPS = 2000000

# cos^2 i slightly outside [0, 1] is clamped inside this band
COS2I_CLAMP = 1e-12

# below this sigma the critical inclination uses its power series
SIGMA_SERIES = 1e-8

DEFAULT_K_WINDOW = (0.5, 1.5)
MAX_DENOMINATOR = 10000

CSV_DIGITS = 17


class IncresException(Exception):
    pass


class InvariantViolation(IncresException):
    pass


class SingularityException(IncresException):
    pass


class UnboundOrbitException(IncresException):
    pass


class KeplerSolverException(IncresException):
    pass


class PropagationException(IncresException):
    pass


class InversionException(IncresException):
    pass


class NoRealInclination(IncresException):
    pass


__all__ = [
    "PhysicalModel",
    "PolarNodalState",
    "CartesianState",
    "KeplerianElements",
    "SigmaParameter",
    "TrajectorySamples",
    "load_model",
    "keplerian_to_polar_nodal",
    "polar_nodal_to_keplerian",
    "polar_nodal_to_cartesian",
    "cartesian_to_polar_nodal",
    "inclination_of",
    "sigma_of",
    "IncresException",
    "InvariantViolation",
    "SingularityException",
    "UnboundOrbitException",
    "KeplerSolverException",
    "PropagationException",
    "InversionException",
    "NoRealInclination",
    "logger",
]

from .core import (
    CartesianState,
    KeplerianElements,
    PhysicalModel,
    PolarNodalState,
    SigmaParameter,
    TrajectorySamples,
    cartesian_to_polar_nodal,
    inclination_of,
    keplerian_to_polar_nodal,
    load_model,
    polar_nodal_to_cartesian,
    polar_nodal_to_keplerian,
    sigma_of,
)
