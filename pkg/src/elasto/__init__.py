"""Exact solutions of the isotropic elastodynamic Cauchy problem for
curl-free initial data with equal diagonal derivatives, plus the tools
to check them against the full 3-D system."""

from .admissible import (
    ProblemData, RidgeDirection, Sampling, ValidationReport, combine, ridge_data,
    ridge_forcing, superpose, superpose_forcing, validate_admissible,
)
from .core import Material, SpacetimePoint, Tolerances, new_material
from .errors import (
    CFLViolation, ConfigError, ElastoError, EmptySuperposition, NoConvergence, NonHyperbolic,
    NonPositiveDensity, ParseError, PreconditionError, RangeError, SupportViolation, UnknownProfile,
)
from .fields import (
    ForcingField, ScalarField3, ScalarProfile, VectorField3, check_decay, curl, partial,
)
from .quadrature import QuadratureSpec, integrate_1d, integrate_batch
from .solver import (
    DisplacementSample, displacement, displacement_gradient, solve, solve_component,
    space_gradient, time_derivative, velocity,
)
from .stress import StressTensor, divergence, stress_tensor, stresses

__version__ = "0.1.0"
