"""pcaplab: numerical laboratory for exterior p-Laplace potentials of convex bodies.

Solves the exterior Dirichlet problem for the p-Laplacian outside an
axisymmetric convex body, reconstructs gradients/Hessians and level sets of
the potential, and verifies capacity identities, monotone level-set
quantities, sharp geometric inequalities, and the pointwise differential
identities behind them, with the exact radial solution as analytic oracle.
"""

__version__ = "0.1.0"

from .params import Params, QExponent, in_lambda, lambda_threshold
from .radial import (
    RadialSolution,
    ball_capacity,
    ball_V_const,
    radial_grad_norm,
    radial_level_mean_curvature,
    radial_u,
)
from .bodies import Body, BoundarySample, area, minkowski_mean, parse_body, sample_boundary, willmore_functional

__all__ = [
    "Params",
    "QExponent",
    "in_lambda",
    "lambda_threshold",
    "RadialSolution",
    "radial_u",
    "radial_grad_norm",
    "radial_level_mean_curvature",
    "ball_capacity",
    "ball_V_const",
    "Body",
    "BoundarySample",
    "parse_body",
    "sample_boundary",
    "area",
    "willmore_functional",
    "minkowski_mean",
    "__version__",
]
