"""Scalar parameters shared by every other module.

The whole toolkit works with a dimension n >= 3 and an exponent p in (1, n).
Derived constants that appear over and over (the sphere area |S^{n-1}|, the
decay rate (n-p)/(p-1) of the capacitary potential, the admissible region for
the level-norm exponent q) live here so they are computed exactly once and
the same way everywhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field


def sphere_area(n: int) -> float:
    """Area of the unit (n-1)-sphere in R^n: 2 pi^(n/2) / Gamma(n/2)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class Params:
    """Dimension and exponent of the exterior p-Laplace problem.

    Requires an integer n >= 3 and 1 < p < n.  `sphere_area` is filled in
    automatically.
    """

    n: int
    p: float
    sphere_area: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool):
            raise ValueError(f"dimension n must be an integer, got {self.n!r}")
        if self.n < 3:
            raise ValueError(f"dimension n must be >= 3, got {self.n}")
        if not (1.0 < self.p < self.n):
            raise ValueError(f"exponent p must satisfy 1 < p < n = {self.n}, got {self.p}")
        object.__setattr__(self, "sphere_area", sphere_area(self.n))

    @property
    def decay_rate(self) -> float:
        """(n-p)/(p-1), the power in the far-field profile |x|^{-decay_rate}."""
        return (self.n - self.p) / (self.p - 1.0)

    @property
    def grad_decay_rate(self) -> float:
        """(n-1)/(p-1), the power governing the gradient decay."""
        return (self.n - 1.0) / (self.p - 1.0)


@dataclass(frozen=True)
class QExponent:
    """Exponent q of the level-set norms: a real >= 1 or infinity.

    Infinity is kept as a distinct case (math.inf) rather than a large float,
    so no arithmetic is ever done on it by accident.
    """

    q: float

    def __post_init__(self):
        if not (self.q >= 1.0):
            raise ValueError(f"q must be >= 1 or infinity, got {self.q}")

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.q)

    @classmethod
    def inf(cls) -> "QExponent":
        return cls(math.inf)


def lambda_threshold(params: Params) -> float:
    """Smallest finite q for which the level norms are monotone.

    Equals 1 + (n-p)/((p-1)(n-1)); tends to 1 as p -> n.
    """
    n, p = params.n, params.p
    return 1.0 + (n - p) / ((p - 1.0) * (n - 1.0))


def in_lambda(params: Params, q: QExponent | float) -> bool:
    """Whether (p, q) is in the admissible region for the monotonicity of
    the level norms: q = infinity always qualifies, finite q needs
    q >= 1 + (n-p)/((p-1)(n-1))."""
    qv = q.q if isinstance(q, QExponent) else float(q)
    if math.isinf(qv):
        return True
    return qv >= lambda_threshold(params)
