"""Closed-form exterior solution for a ball, used as the analytic oracle.

Outside a ball of radius R the capacitary potential is u = (R/r)^beta with
beta = (n-p)/(p-1).  Everything downstream (capacity values, level-norm
constants, curvature of level spheres) has an exact expression here, which
the numerical modules are tested against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .params import Params, QExponent


@dataclass(frozen=True)
class RadialSolution:
    """Exact potential outside the ball of radius `radius`."""

    params: Params
    radius: float = 1.0

    def __post_init__(self):
        if not (self.radius > 0.0):
            raise ValueError(f"radius must be positive, got {self.radius}")

    @property
    def beta(self) -> float:
        return self.params.decay_rate

    def _check_r(self, r: float) -> None:
        if r < self.radius:
            raise ValueError(f"r = {r} is inside the ball of radius {self.radius}")


def radial_u(sol: RadialSolution, r: float) -> float:
    """u(r) = (R/r)^beta, equal to 1 on the ball boundary and decaying to 0."""
    sol._check_r(r)
    return (sol.radius / r) ** sol.beta


def radial_u_prime(sol: RadialSolution, r: float) -> float:
    """du/dr, negative: -beta R^beta r^(-beta-1)."""
    sol._check_r(r)
    b = sol.beta
    return -b * sol.radius**b * r ** (-b - 1.0)


def radial_u_second(sol: RadialSolution, r: float) -> float:
    """d^2u/dr^2 = beta (beta+1) R^beta r^(-beta-2)."""
    sol._check_r(r)
    b = sol.beta
    return b * (b + 1.0) * sol.radius**b * r ** (-b - 2.0)


def radial_grad_norm(sol: RadialSolution, r: float) -> float:
    """|Du|(r) = beta R^beta r^(-(n-1)/(p-1)); strictly decreasing in r."""
    sol._check_r(r)
    b = sol.beta
    return b * sol.radius**b * r ** (-(sol.params.n - 1.0) / (sol.params.p - 1.0))


def radial_level_mean_curvature(sol: RadialSolution, r: float) -> float:
    """Mean curvature (n-1)/r of the level sphere through radius r,
    taken with respect to the normal pointing away from the ball."""
    sol._check_r(r)
    return (sol.params.n - 1.0) / r


def ball_capacity(params: Params, R: float) -> float:
    """Normalized p-capacity of the ball of radius R: exactly R^(n-p)."""
    if not (R > 0.0):
        raise ValueError(f"radius must be positive, got {R}")
    return R ** (params.n - params.p)


def ball_V_const(params: Params, q: QExponent | float, R: float) -> float:
    """Constant value of the level norms on a ball of radius R.

    Finite q:   C^q * beta^(q(p-1)) * |S^{n-1}|   with C = R^(n-p),
    q = inf:    beta * C^(-1/(n-p)).

    Evaluated in log space: q(p-1) can easily exceed what a direct power
    chain survives on sweep grids.
    """
    if not (R > 0.0):
        raise ValueError(f"radius must be positive, got {R}")
    n, p = params.n, params.p
    beta = params.decay_rate
    log_C = (n - p) * math.log(R)
    qv = q.q if isinstance(q, QExponent) else float(q)
    if math.isinf(qv):
        return math.exp(math.log(beta) - log_C / (n - p))
    if qv < 1.0:
        raise ValueError(f"q must be >= 1 or infinity, got {qv}")
    return math.exp(qv * log_C + qv * (p - 1.0) * math.log(beta) + math.log(params.sphere_area))
