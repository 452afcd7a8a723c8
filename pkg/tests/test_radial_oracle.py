import math

import numpy as np
import pytest

from fockop.core_math import SpaceParams
from fockop.measure import RadialCircles
from fockop.radial_oracle import AliasingError, oracle_compare, radial_eigenvalues


def P(a):
    return SpaceParams(a)


def test_single_circle_closed_form():
    lam = radial_eigenvalues(P(0.0), RadialCircles([1.0], [1.0]), 5).lambdas
    expected = [math.exp(-1) / math.factorial(k) for k in range(6)]
    assert np.allclose(lam, expected, rtol=1e-14)


def test_head_and_tail_weights():
    rho = 2.0
    lam = radial_eigenvalues(P(2.0), RadialCircles([rho], [1.0]), 3).lambdas
    # k <= 1 is head: rho^2k e^-rho^2 / k!; tail k >= 2: rho^(2k-2) e^-rho^2 / Gamma(k)
    expected = [math.exp(-4), 4 * math.exp(-4), 4 * math.exp(-4) / 1, 16 * math.exp(-4) / 2]
    assert np.allclose(lam, expected, rtol=1e-14)


def test_origin_circle():
    c = RadialCircles([0.0], [2.0])
    assert radial_eigenvalues(P(0.0), c, 3).lambdas.tolist() == [2.0, 0, 0, 0]
    assert radial_eigenvalues(P(-2.0), c, 3).lambdas.tolist() == [0, 0, 0, 0]
    assert radial_eigenvalues(P(2.0), c, 3).lambdas[0] == 2.0


@pytest.mark.parametrize("alpha", [-2.0, 0.0, 2.0])
@pytest.mark.parametrize("rho", [1.0, 2.0])
def test_matrix_matches_oracle(alpha, rho):
    rep = oracle_compare(P(alpha), RadialCircles([rho], [1.0]), 12, 64)
    assert rep.passed
    assert rep.max_offdiag <= 1e-10 * rep.lambda_max
    for p, v in rep.schatten_oracle.items():
        assert abs(rep.schatten_matrix[p] / v - 1) <= 1e-8


def test_two_circles_odd_alpha():
    rep = oracle_compare(P(1.5), RadialCircles([0.5, 1.7], [2.0, 0.3]), 20, 84)
    assert rep.passed


def test_aliasing_detected():
    c = RadialCircles([1.5], [1.0])
    with pytest.raises(AliasingError):
        oracle_compare(P(0.0), c, 12, 8)
    rep = oracle_compare(P(0.0), c, 12, 8, raise_on_alias=False)
    assert rep.aliasing and not rep.passed


def test_csv_export():
    lam = radial_eigenvalues(P(0.0), RadialCircles([1.0], [1.0]), 2)
    assert lam.to_csv().splitlines()[0] == "index,eigenvalue"
    assert abs(lam.schatten(1) - math.exp(-1) * 2.5) <= 1e-15
