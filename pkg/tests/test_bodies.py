import math

import numpy as np
import pytest

from pcaplab.bodies import (
    Body,
    BodyError,
    area,
    body_spec,
    minkowski_mean,
    parse_body,
    sample_boundary,
    willmore_functional,
)

from _oracles import ball_area, spheroid_area


def test_parse_and_roundtrip():
    b = parse_body("ball:1.5")
    assert b.kind == "ball" and b.a == b.c == 1.5
    s = parse_body("spheroid:1,2")
    assert (s.a, s.c) == (1.0, 2.0)
    se = parse_body("superell:1,1,4")
    assert se.m == 4.0
    for spec in ("ball:2", "spheroid:1,2", "superell:1,1.5,3"):
        assert parse_body(body_spec(parse_body(spec))) == parse_body(spec)


@pytest.mark.parametrize("spec", ["cube:1", "ball:", "ball:1,2", "spheroid:1", "superell:1,1", "ball:abc"])
def test_parse_rejects_garbage(spec):
    with pytest.raises(BodyError):
        parse_body(spec)


def test_invalid_body_parameters():
    with pytest.raises(BodyError):
        Body("superell", 1.0, 1.0, 1.5)  # below the convex-exponent floor
    with pytest.raises(BodyError):
        Body("superell", 1.0, 1.0, 9.0)  # beyond the double-precision cap
    with pytest.raises(BodyError):
        Body("ball", 1.0, 2.0)
    with pytest.raises(BodyError):
        Body("spheroid", -1.0, 2.0)


def test_ball_area_and_curvature():
    b = parse_body("ball:1")
    samples = sample_boundary(b, 256)
    total = sum(s.weight for s in samples)
    assert total == pytest.approx(ball_area(1.0), rel=1e-3)
    for s in samples[::16]:
        assert s.H == pytest.approx(2.0, rel=1e-10)


def test_spheroid_area_against_classical_formula():
    b = parse_body("spheroid:1,2")
    samples = sample_boundary(b, 512)
    total = sum(s.weight for s in samples)
    assert total == pytest.approx(spheroid_area(1.0, 2.0), rel=1e-3)
    # adaptive quadrature should do much better
    assert area(b) == pytest.approx(spheroid_area(1.0, 2.0), rel=1e-10)


def test_oblate_spheroid_area():
    assert area(parse_body("spheroid:2,1")) == pytest.approx(spheroid_area(2.0, 1.0), rel=1e-10)


def test_sample_count_validation():
    with pytest.raises(ValueError):
        sample_boundary(parse_body("ball:1"), 8)


def test_spheroid_curvatures_at_pole_and_equator():
    b = parse_body("spheroid:1,2")
    k1_pole, k2_pole = b.principal_curvatures(np.asarray([1e-9]))
    # umbilic pole of the ellipse: both curvatures c/a^2
    assert k1_pole[0] == pytest.approx(2.0, rel=1e-6)
    assert k2_pole[0] == pytest.approx(2.0, rel=1e-6)
    k1_eq, k2_eq = b.principal_curvatures(np.asarray([math.pi / 2]))
    assert k1_eq[0] == pytest.approx(1.0 / 4.0, rel=1e-12)  # a/c^2
    assert k2_eq[0] == pytest.approx(1.0, rel=1e-12)  # 1/a


def test_curvature_matches_finite_differences():
    b = parse_body("superell:1,1.3,4")
    phi0 = 1.1
    h = 1e-5
    pts = [b.point(np.asarray([phi0 + k * h])) for k in (-1, 0, 1)]
    rp = (pts[2][0][0] - pts[0][0][0]) / (2 * h), (pts[2][1][0] - pts[0][1][0]) / (2 * h)
    rpp = (
        (pts[2][0][0] - 2 * pts[1][0][0] + pts[0][0][0]) / h**2,
        (pts[2][1][0] - 2 * pts[1][1][0] + pts[0][1][0]) / h**2,
    )
    speed = math.hypot(*rp)
    k_fd = -(rp[0] * rpp[1] - rp[1] * rpp[0]) / speed**3
    k1, _ = b.principal_curvatures(np.asarray([phi0]))
    assert k1[0] == pytest.approx(k_fd, rel=1e-5)


def test_normals_are_unit_and_outward():
    b = parse_body("superell:1.2,0.9,3")
    phi = np.linspace(0.01, math.pi - 0.01, 97)
    nr, nz = b.outward_normal(phi)
    assert np.allclose(nr**2 + nz**2, 1.0, atol=1e-12)
    r, z = b.point(phi)
    # outward means positive projection on the position ray for a convex body around the origin
    assert np.all(nr * r + nz * z > 0.0)


def test_willmore_equality_on_balls():
    for R in (0.5, 1.0, 3.0):
        assert willmore_functional(parse_body(f"ball:{R}")) == pytest.approx(4 * math.pi, rel=1e-10)


def test_willmore_slack_positive_off_balls():
    assert willmore_functional(parse_body("spheroid:1,2")) > 4 * math.pi
    assert willmore_functional(parse_body("superell:1,1,4")) > 4 * math.pi
    assert willmore_functional(parse_body("spheroid:2,1")) > 4 * math.pi


def test_willmore_continuity_near_ball():
    w = willmore_functional(parse_body("spheroid:1,1.0001"))
    assert w == pytest.approx(4 * math.pi, rel=1e-6)
    assert w >= 4 * math.pi - 1e-10


def test_willmore_scale_invariance():
    b = parse_body("spheroid:1,2")
    assert willmore_functional(b.scaled(2.0)) == pytest.approx(willmore_functional(b), rel=1e-9)


def test_minkowski_mean_values():
    assert minkowski_mean(parse_body("ball:1")) == pytest.approx(1.0, rel=1e-10)
    assert minkowski_mean(parse_body("ball:2")) == pytest.approx(0.5, rel=1e-10)
    b = parse_body("spheroid:1,2")
    assert minkowski_mean(b) >= math.sqrt(4 * math.pi / area(b))


def test_area_scaling():
    b = parse_body("superell:1,1.5,3")
    assert area(b.scaled(2.0)) == pytest.approx(4.0 * area(b), rel=1e-9)
    assert minkowski_mean(b.scaled(2.0)) == pytest.approx(minkowski_mean(b) / 2.0, rel=1e-9)
