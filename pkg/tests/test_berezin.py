import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockop.berezin import (
    aggregate_json,
    ball_profile,
    berezin_direct,
    berezin_lp_norm,
    berezin_profile,
    compactness_profile,
    default_grid,
    lattice_sequence,
    lp_ball,
    split_disc_rule,
)
from fockop.core_math import SpaceParams
from fockop.measure import LatticeSpec, RadialCircles, gaussian_density, lattice_gaussian, lebesgue, point_mass
from fockop.toeplitz import TrustRegionError


def P(a):
    return SpaceParams(a)


def test_default_grid():
    g = default_grid(1.0, 0.5, 4)
    assert g.size == 9 and g[0] == 0
    assert np.allclose(np.abs(g[1:5]), 0.5)


@pytest.mark.parametrize("a", [0j, 1 + 0j, 2j])
def test_point_mass_closed_form(a):
    z = default_grid(4.0, 0.5, 8)
    got = berezin_direct(P(0.0), point_mass(a.real, a.imag), z)
    assert np.max(np.abs(got - np.exp(-np.abs(z - a) ** 2))) <= 1e-8


def test_symbol_one_is_one_inside():
    z = np.array([0, 0.5 + 0.5j, -2.0, 3j])
    got = berezin_direct(P(0.0), lebesgue(8.0), z)
    assert np.max(np.abs(got - 1)) <= 1e-8


def test_gaussian_density_closed_form():
    # mu = exp(-|w|^2) dv at alpha = 0 gives mu~(z) = exp(-|z|^2 / 2) / 2
    z = np.array([0, 1.0, 1 + 1j, -2.5j])
    got = berezin_direct(P(0.0), gaussian_density(1.0, 8.0), z)
    assert np.max(np.abs(got - 0.5 * np.exp(-np.abs(z) ** 2 / 2))) <= 1e-9


def test_scalar_in_scalar_out():
    v = berezin_direct(P(1.0), point_mass(1.0, 0.0), 0.5)
    assert isinstance(v, float) and v > 0


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.complex_numbers(max_magnitude=3))
def test_nonnegative_and_linear(alpha, z):
    mu = RadialCircles([0.5, 1.5], [1.0, 2.0])
    v1 = berezin_direct(P(alpha), mu, z)
    v3 = berezin_direct(P(alpha), mu.scaled(3.0), z)
    assert v1 >= 0
    assert abs(v3 - 3 * v1) <= 1e-12 * max(v1, 1e-300)


def test_delta_origin_negative_alpha_vanishes():
    assert berezin_direct(P(-2.0), point_mass(), 1.0) == 0.0


def test_lp_norm_point_mass_alpha_zero():
    # int exp(-p|z - a|^2) dv = 1/p
    for p in (1.0, 2.0, 0.5):
        res = berezin_lp_norm(P(0.0), point_mass(), p)
        assert abs(res.value - (1 / p) ** (1 / p)) <= 1e-10 * (1 / p) ** (1 / p)
        assert res.tail_indicator < 1e-20
        assert res.inner_value <= res.value


def test_split_disc_rule_area():
    rule, inner = split_disc_rule(4.0, 32, 16)
    assert abs(np.sum(rule.weights()) - 16.0) <= 1e-12
    assert abs(np.sum(rule.weights()[inner]) - 9.0) <= 1e-12


def test_lp_norm_lattice_equals_total_mass():
    # at alpha = 0 the Berezin transform integrates to the total mass
    mu = lattice_gaussian(0.5, 1.0, 8.0)
    res = berezin_lp_norm(P(0.0), mu, 1.0, 8.0)
    assert abs(res.value / mu.total_mass - 1) <= 1e-6


def test_ball_profile_and_lp_ball():
    mu = point_mass(0.0, 0.0, 2.0)
    prof = ball_profile(mu, 1.0, np.array([0, 0.5, 1.0, 2.0]))
    assert prof.values.tolist() == [2.0, 2.0, 0.0, 0.0]
    # the ball mass is 2 on |z| < 1, whose dv-measure is 1
    assert abs(lp_ball(mu, 1.0, 1.0) - 2.0) <= 1e-12
    assert abs(lp_ball(mu, 1.0, 2.0) - 2.0) <= 1e-12


def test_lattice_sequence():
    seq = lattice_sequence(point_mass(0.1, 0.0), LatticeSpec(1.0, 1.0, 3.0))
    assert seq.sup == 1.0
    assert seq.lp(1) == 2.0  # the atom lies within 1 of both 0 and 1
    assert seq.lp(math.inf) == 1.0


def test_compactness_profile_point_mass():
    prof = compactness_profile(P(0.0), point_mass(), [1.0, 2.0, 3.0, 4.0])
    # ||T k_z|| = |k_z(0)| exp(0) = exp(-|z|^2 / 2) for delta_0
    assert np.allclose(prof.values, np.exp(-np.array([1, 4, 9, 16]) / 2), rtol=1e-10)
    assert prof.decreasing and prof.vanishing_trend


def test_compactness_profile_symbol_one_flat():
    prof = compactness_profile(P(0.0), lebesgue(8.0), [1.0, 2.0, 3.0])
    assert np.allclose(prof.values, 1.0, atol=1e-6)
    assert not prof.vanishing_trend


def test_compactness_trust_region():
    with pytest.raises(TrustRegionError):
        compactness_profile(P(0.0), point_mass(), [5.0], D=32)
    with pytest.raises(ValueError):
        compactness_profile(P(0.0), point_mass(), [1.0], p=1.0)


def test_profile_exports():
    prof = berezin_profile(P(0.0), point_mass(), np.array([0, 1j]))
    rows = prof.to_csv().splitlines()
    assert rows[0] == "re,im,value" and len(rows) == 3
    doc = json.loads(aggregate_json(prof.sup, {1.0: 0.5}))
    assert doc == {"sup": 1.0, "lp": {"1.0": 0.5}}
