"""Axisymmetric convex bodies (n = 3) and their boundary geometry.

Every supported body is a superellipse of revolution: the meridian profile in
polar form (angle phi from the +z axis) is

    rho(phi) = [ (sin(phi)/a)^m + (|cos(phi)|/c)^m ]^(-1/m),

with the ball (a = c, m = 2) and the spheroid (m = 2) as special cases.
Mean curvature comes from the analytic profile derivatives, never from mesh
differencing, so the geometric side of every inequality check carries only
quadrature error.

Curvature/normal conventions: the outward unit normal, and the mean curvature
H = kappa_meridian + kappa_revolution, so H = 2/R on a ball of radius R.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

MAX_SUPERELL_EXPONENT = 8.0  # curvature near the equator degenerates beyond this


class BodyError(ValueError):
    """Invalid body parameters or body specification string."""


@dataclass(frozen=True)
class Body:
    """Convex body of revolution with equatorial semi-axis a and polar semi-axis c."""

    kind: str  # "ball" | "spheroid" | "superell"
    a: float
    c: float
    m: float = 2.0

    def __post_init__(self):
        if self.kind not in ("ball", "spheroid", "superell"):
            raise BodyError(f"unknown body kind {self.kind!r}")
        if not (self.a > 0.0 and self.c > 0.0):
            raise BodyError(f"semi-axes must be positive, got a={self.a}, c={self.c}")
        if self.kind == "ball" and self.a != self.c:
            raise BodyError("ball requires a == c")
        if self.kind in ("ball", "spheroid") and self.m != 2.0:
            raise BodyError(f"{self.kind} requires exponent m = 2")
        if not (2.0 <= self.m <= MAX_SUPERELL_EXPONENT):
            raise BodyError(
                f"superellipsoid exponent must lie in [2, {MAX_SUPERELL_EXPONENT:g}], got {self.m}"
            )
        self._check_convexity()

    def _check_convexity(self):
        phi = np.linspace(1e-4, math.pi - 1e-4, 4097)
        k1, k2 = self.principal_curvatures(phi)
        if np.any(k1 < -1e-9 / self.circumradius) or np.any(k2 < -1e-9 / self.circumradius):
            raise BodyError("profile is not convex")

    @property
    def circumradius(self) -> float:
        return max(self.a, self.c)

    @property
    def inradius(self) -> float:
        return min(self.a, self.c)

    def scaled(self, lam: float) -> "Body":
        return Body(self.kind, lam * self.a, lam * self.c, self.m)

    # -- profile in polar form ------------------------------------------------

    def _g(self, phi):
        s, cph = np.sin(phi), np.cos(phi)
        return (s / self.a) ** self.m + (np.abs(cph) / self.c) ** self.m

    def rho(self, phi):
        """Distance from the origin to the profile at polar angle phi."""
        return self._g(phi) ** (-1.0 / self.m)

    def _rho_derivs(self, phi):
        """rho, drho/dphi, d2rho/dphi2 (vectorized)."""
        m = self.m
        s, cph = np.sin(phi), np.cos(phi)
        ac, cc = self.a**m, self.c**m
        absc = np.abs(cph)
        sgnc = np.sign(cph)
        g = s**m / ac + absc**m / cc
        gp = m * (s ** (m - 1.0) * cph / ac - absc ** (m - 1.0) * sgnc * s / cc)
        gpp = m * (
            ((m - 1.0) * s ** (m - 2.0) * cph**2 - s**m) / ac
            + ((m - 1.0) * absc ** (m - 2.0) * s**2 - absc**m) / cc
        )
        rho = g ** (-1.0 / m)
        rp = -(1.0 / m) * g ** (-1.0 / m - 1.0) * gp
        rpp = (1.0 / m) * (1.0 / m + 1.0) * g ** (-1.0 / m - 2.0) * gp**2 - (1.0 / m) * g ** (
            -1.0 / m - 1.0
        ) * gpp
        return rho, rp, rpp

    def point(self, phi):
        """Meridian coordinates (r, z) at polar angle phi."""
        rho = self.rho(phi)
        return rho * np.sin(phi), rho * np.cos(phi)

    def speed(self, phi):
        """|d(point)/dphi| = sqrt(rho^2 + rho'^2)."""
        rho, rp, _ = self._rho_derivs(phi)
        return np.sqrt(rho**2 + rp**2)

    def outward_normal(self, phi):
        """Unit outward normal (n_r, n_z) of the profile."""
        rho, rp, _ = self._rho_derivs(phi)
        s, cph = np.sin(phi), np.cos(phi)
        sp = np.sqrt(rho**2 + rp**2)
        return (rho * s - rp * cph) / sp, (rp * s + rho * cph) / sp

    def principal_curvatures(self, phi):
        """(kappa_meridian, kappa_revolution) with respect to the outward normal."""
        rho, rp, rpp = self._rho_derivs(phi)
        s = np.sin(phi)
        sp2 = rho**2 + rp**2
        k1 = (rho**2 + 2.0 * rp**2 - rho * rpp) / sp2**1.5
        nr = (rho * s - rp * np.cos(phi)) / np.sqrt(sp2)
        r = rho * s
        # revolution curvature n_r / r; umbilic limit kappa_1 on the axis
        k2 = np.where(np.abs(r) > 1e-12 * self.circumradius, nr / np.where(r == 0, 1.0, r), k1)
        return k1, k2

    def mean_curvature(self, phi):
        """H = kappa_1 + kappa_2 (so H = 2/R on the ball of radius R)."""
        k1, k2 = self.principal_curvatures(phi)
        return k1 + k2

    # -- arclength parametrization -------------------------------------------

    def arclength_table(self, samples: int = 8193):
        """Cumulative meridian arclength on a fine phi grid (phi, s)."""
        phi = np.linspace(0.0, math.pi, samples)
        sp = self.speed(phi)
        s = integrate.cumulative_trapezoid(sp, phi, initial=0.0)
        return phi, s

    def phi_of_arclength(self, s_values, samples: int = 8193):
        phi, s = self.arclength_table(samples)
        return np.interp(s_values, s, phi)

    def meridian_length(self) -> float:
        _, s = self.arclength_table()
        return float(s[-1])


@dataclass(frozen=True)
class BoundarySample:
    """Boundary quadrature node: position, outward normal, curvature, area weight."""

    position: tuple  # (r, z) in the meridian plane
    normal: tuple  # outward unit normal (n_r, n_z)
    H: float  # mean curvature, > 0
    weight: float  # surface measure chunk, sums to the total area

    def __post_init__(self):
        if not self.H > 0.0:
            raise BodyError(f"mean curvature must be positive at samples, got {self.H}")
        nrm = math.hypot(*self.normal)
        if abs(nrm - 1.0) > 1e-12:
            raise BodyError(f"normal not unit length: |n| = {nrm}")


def sample_boundary(body: Body, count: int) -> list[BoundarySample]:
    """Arclength-uniform midpoint samples of the boundary surface.

    The weights are midpoint-rule chunks of dsigma = 2 pi r ds, so summing
    them reproduces the surface area to O((L/count)^2).
    """
    if count < 16:
        raise ValueError(f"need at least 16 samples, got {count}")
    L = body.meridian_length()
    ds = L / count
    s_mid = (np.arange(count) + 0.5) * ds
    phi = body.phi_of_arclength(s_mid)
    r, z = body.point(phi)
    nr, nz = body.outward_normal(phi)
    H = body.mean_curvature(phi)
    w = 2.0 * math.pi * r * ds
    return [
        BoundarySample((r[i], z[i]), (nr[i], nz[i]), float(H[i]), float(w[i]))
        for i in range(count)
    ]


def _surface_quad(body: Body, integrand) -> float:
    """Adaptive quadrature of integrand(phi) * 2 pi r |gamma'| over [0, pi]."""

    def f(phi):
        p = np.asarray([phi])
        r = body.rho(p) * np.sin(p)
        return float(integrand(p)[0] * 2.0 * math.pi * r[0] * body.speed(p)[0])

    total = 0.0
    # split at the equator: superellipsoid profiles lose smoothness there
    for lo, hi in ((0.0, math.pi / 2.0), (math.pi / 2.0, math.pi)):
        val, _ = integrate.quad(f, lo, hi, epsabs=1e-12, epsrel=1e-12, limit=400)
        total += val
    return total


def area(body: Body) -> float:
    """Surface area |partial Omega|."""
    return _surface_quad(body, lambda phi: np.ones_like(phi))


def willmore_functional(body: Body) -> float:
    """Integral of (H/2)^2 over the boundary; equals 4 pi exactly on balls."""
    return _surface_quad(body, lambda phi: (body.mean_curvature(phi) / 2.0) ** 2)


def minkowski_mean(body: Body) -> float:
    """Area average of H/2 over the boundary; equals 1/R on balls."""
    total = _surface_quad(body, lambda phi: body.mean_curvature(phi) / 2.0)
    return total / area(body)


def parse_body(spec: str) -> Body:
    """Parse a body specification string: ball:R | spheroid:a,c | superell:a,c,m."""
    try:
        kind, _, rest = spec.partition(":")
        nums = [float(x) for x in rest.split(",")] if rest else []
        if kind == "ball" and len(nums) == 1:
            return Body("ball", nums[0], nums[0])
        if kind == "spheroid" and len(nums) == 2:
            return Body("spheroid", nums[0], nums[1])
        if kind == "superell" and len(nums) == 3:
            return Body("superell", nums[0], nums[1], nums[2])
    except BodyError:
        raise
    except ValueError:
        pass
    raise BodyError(f"cannot parse body spec {spec!r} (expected ball:R | spheroid:a,c | superell:a,c,m)")


def body_spec(body: Body) -> str:
    """Inverse of parse_body."""
    if body.kind == "ball":
        return f"ball:{body.a:g}"
    if body.kind == "spheroid":
        return f"spheroid:{body.a:g},{body.c:g}"
    return f"superell:{body.a:g},{body.c:g},{body.m:g}"
