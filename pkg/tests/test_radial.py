import math

import pytest

from pcaplab.params import Params, QExponent
from pcaplab.radial import (
    RadialSolution,
    ball_capacity,
    ball_V_const,
    radial_grad_norm,
    radial_level_mean_curvature,
    radial_u,
)


def sol(n, p, R=1.0):
    return RadialSolution(Params(n, p), R)


def test_radial_u_values():
    assert radial_u(sol(3, 2.0), 2.0) == pytest.approx(0.5, rel=1e-14)
    assert radial_u(sol(3, 2.0), 1.0) == 1.0
    # (n-p)/(p-1) = 1/2 for n=4, p=3: u(16) = (1/16)^(1/2)
    assert radial_u(sol(4, 3.0), 16.0) == pytest.approx(0.25, rel=1e-14)


def test_radial_u_domain_error():
    with pytest.raises(ValueError):
        radial_u(sol(3, 2.0), 0.5)
    with pytest.raises(ValueError):
        radial_grad_norm(sol(3, 2.0), 0.99)
    with pytest.raises(ValueError):
        radial_level_mean_curvature(sol(3, 2.0), 0.99)


def test_radial_grad_norm_values():
    assert radial_grad_norm(sol(3, 2.0), 1.0) == pytest.approx(1.0, rel=1e-14)
    assert radial_grad_norm(sol(3, 2.0), 2.0) == pytest.approx(0.25, rel=1e-14)
    assert radial_grad_norm(sol(3, 1.5), 1.0) == pytest.approx(3.0, rel=1e-14)


def test_radial_grad_matches_finite_difference():
    s = sol(3, 1.7, 1.3)
    h = 1e-6
    for r in (1.5, 2.0, 7.0):
        fd = (radial_u(s, r + h) - radial_u(s, r - h)) / (2 * h)
        assert radial_grad_norm(s, r) == pytest.approx(abs(fd), rel=1e-8)


def test_gradient_asymptotics():
    # r^((n-1)/(p-1)) |Du| tends to C^(1/(p-1)) (n-p)/(p-1) with C = R^(n-p)
    for n, p, R in [(3, 2.0, 1.0), (3, 1.5, 2.0), (5, 2.5, 0.7)]:
        prm = Params(n, p)
        s = RadialSolution(prm, R)
        C = ball_capacity(prm, R)
        expected = C ** (1.0 / (p - 1.0)) * prm.decay_rate
        r = 1e6
        assert r ** prm.grad_decay_rate * radial_grad_norm(s, r) == pytest.approx(expected, rel=1e-10)


def test_mean_curvature_of_level_spheres():
    assert radial_level_mean_curvature(sol(3, 2.0), 1.0) == 2.0
    assert radial_level_mean_curvature(sol(3, 2.0), 2.0) == 1.0
    assert radial_level_mean_curvature(sol(4, 2.0, 0.5), 0.5) == pytest.approx(6.0)


def test_ball_capacity_values():
    assert ball_capacity(Params(3, 2.0), 1.0) == 1.0
    assert ball_capacity(Params(3, 2.0), 2.0) == pytest.approx(2.0, rel=1e-14)
    assert ball_capacity(Params(5, 3.0), 2.0) == pytest.approx(4.0, rel=1e-14)


def test_ball_V_const_values():
    assert ball_V_const(Params(3, 2.0), 2.0, 1.0) == pytest.approx(4.0 * math.pi, rel=1e-13)
    assert ball_V_const(Params(3, 2.0), QExponent.inf(), 1.0) == pytest.approx(1.0, rel=1e-13)
    assert ball_V_const(Params(3, 2.0), QExponent.inf(), 2.0) == pytest.approx(0.5, rel=1e-13)


def test_ball_V_const_scaling():
    prm = Params(3, 1.5)
    lam, R, q = 3.0, 1.2, 2.5
    ratio = ball_V_const(prm, q, lam * R) / ball_V_const(prm, q, R)
    assert ratio == pytest.approx(lam ** (q * (prm.n - prm.p)), rel=1e-12)
    ratio_inf = ball_V_const(prm, QExponent.inf(), lam * R) / ball_V_const(prm, QExponent.inf(), R)
    assert ratio_inf == pytest.approx(1.0 / lam, rel=1e-12)


def test_ball_V_const_extreme_exponents_stay_finite():
    # q(p-1) ~ 80 with R far from 1: direct power chains would overflow
    prm = Params(5, 4.5)
    v = ball_V_const(prm, 60.0, 50.0)
    assert math.isfinite(v) and v > 0.0


def test_capacity_scaling_law():
    for n, p in [(3, 2.0), (4, 1.5), (6, 3.3)]:
        prm = Params(n, p)
        assert ball_capacity(prm, 3.0) / ball_capacity(prm, 1.5) == pytest.approx(
            2.0 ** (n - p), rel=1e-12
        )


def test_overdetermined_identity_on_balls():
    # ((p-1)/(n-p)) |Du|(R) equals (H/(n-1))(R) exactly on the ball boundary
    for n, p, R in [(3, 2.0, 1.0), (3, 1.5, 2.0), (4, 2.5, 0.3), (5, 4.0, 1.7)]:
        s = RadialSolution(Params(n, p), R)
        lhs = (p - 1.0) / (n - p) * radial_grad_norm(s, R)
        rhs = radial_level_mean_curvature(s, R) / (n - 1.0)
        assert lhs == pytest.approx(rhs, rel=1e-13)


def test_monotone_decay_in_r():
    s = sol(3, 2.5, 1.1)
    radii = [1.1, 1.5, 2.0, 4.0, 10.0]
    u_vals = [radial_u(s, r) for r in radii]
    g_vals = [radial_grad_norm(s, r) for r in radii]
    assert all(a > b for a, b in zip(u_vals, u_vals[1:]))
    assert all(a > b for a, b in zip(g_vals, g_vals[1:]))
