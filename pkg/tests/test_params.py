import math

import pytest

from pcaplab.params import Params, QExponent, in_lambda, lambda_threshold


def test_sphere_area_values():
    assert Params(3, 2.0).sphere_area == pytest.approx(4.0 * math.pi, rel=1e-14)
    assert Params(4, 2.0).sphere_area == pytest.approx(2.0 * math.pi**2, rel=1e-14)
    assert Params(5, 2.0).sphere_area == pytest.approx(8.0 * math.pi**2 / 3.0, rel=1e-14)


@pytest.mark.parametrize("n,p", [(2, 1.5), (3, 1.0), (3, 3.0), (3, 0.5), (3, 5.0)])
def test_invalid_params_rejected(n, p):
    with pytest.raises(ValueError):
        Params(n, p)


def test_fractional_dimension_rejected():
    with pytest.raises(ValueError):
        Params(3.5, 2.0)  # type: ignore[arg-type]


@pytest.mark.parametrize(
    "n,p,expected",
    [
        (3, 2.0, 1.5),
        (3, 2.9, 1.0 + 0.1 / (1.9 * 2.0)),
        (5, 2.0, 1.75),
    ],
)
def test_lambda_threshold_values(n, p, expected):
    assert lambda_threshold(Params(n, p)) == pytest.approx(expected, rel=1e-14)


def test_lambda_threshold_tends_to_one():
    assert lambda_threshold(Params(3, 2.999999)) == pytest.approx(1.0, abs=1e-6)
    assert lambda_threshold(Params(3, 1.0001)) > 1.0


def test_in_lambda_boundary_cases():
    prm = Params(3, 2.0)
    assert in_lambda(prm, 1.5)  # exact threshold
    assert not in_lambda(prm, 1.4)
    assert in_lambda(prm, QExponent.inf())


@pytest.mark.parametrize("n,p", [(3, 1.2), (3, 2.0), (4, 2.5), (5, 3.5), (7, 1.01)])
def test_threshold_membership_is_sharp(n, p):
    prm = Params(n, p)
    thr = lambda_threshold(prm)
    assert thr > 1.0
    assert in_lambda(prm, thr)
    for delta in (1e-12, 1e-6, 0.1):
        assert not in_lambda(prm, thr - delta)


@pytest.mark.parametrize("n,p", [(3, 1.5), (3, 2.5), (4, 2.0), (6, 4.0)])
def test_p_independent_exponent_always_admissible(n, p):
    prm = Params(n, p)
    assert in_lambda(prm, (n - 1.0) / (p - 1.0))


def test_qexponent_validation():
    with pytest.raises(ValueError):
        QExponent(0.5)
    with pytest.raises(ValueError):
        QExponent(float("nan"))
    assert QExponent.inf().is_inf
    assert not QExponent(2.0).is_inf
