import json
import math

import numpy as np
import pytest

from fockop.core_math import SpaceParams
from fockop.measure import AtomicMeasure, RadialCircles, lebesgue, point_mass
from fockop.verify import (
    BOUNDED_GROUP,
    SCHATTEN_GROUP,
    atomic_suite,
    ball_berezin_constant,
    builtin_suite,
    estimate_band_sweep,
    frame_gram_bound,
    frame_gram_sweep,
    grid_points,
    kernel_fp_norm,
    near_atom_grid,
    run_equivalence_suite,
    run_selftest,
)


def P(a):
    return SpaceParams(a)


def test_report_point_mass():
    rep = run_equivalence_suite(P(0.0), point_mass(), 1.0, 1.0)
    for name in BOUNDED_GROUP:
        assert abs(rep.indicators[name] - 1) <= 1e-10
    assert abs(rep.indicators["schatten_p"] - 1) <= 1e-10
    assert abs(rep.indicators["lp_berezin"] - 1) <= 1e-10
    assert abs(rep.indicators["lp_ball"] - 1) <= 1e-10
    assert rep.indicators["lp_lattice"] == 1.0
    assert rep.verdicts == {"bounded": "comparable", "compact": "agree", "schatten": "comparable",
                            "summary": "bounded, S_1"}


def test_report_json_round_trip():
    rep = run_equivalence_suite(P(0.0), point_mass(1.0, 0.0), 2.0, 1.0)
    doc = json.loads(rep.to_json())
    assert set(doc) == {"config", "indicators", "ratios", "verdicts", "diagnostics", "provenance"}
    assert set(doc["ratios"]["bounded"]) == {"op_norm/sup_berezin", "op_norm/sup_ball", "sup_berezin/sup_ball"}
    assert len(doc["ratios"]["schatten"]) == 6
    assert rep.to_json() == run_equivalence_suite(P(0.0), point_mass(1.0, 0.0), 2.0, 1.0).to_json()
    assert rep.to_csv().splitlines()[0] == "indicator,value,growth"


def test_empty_measure_report():
    empty = AtomicMeasure(np.array([], dtype=complex), np.array([]))
    rep = run_equivalence_suite(P(0.0), empty, 1.0, 1.0)
    assert all(v == 0 for v in rep.indicators.values())
    assert rep.verdicts["summary"] == "bounded, S_1"


def test_homogeneity_of_every_indicator():
    mu = atomic_suite()["mixture"]
    a = run_equivalence_suite(P(1.0), mu, 1.0, 1.0)
    b = run_equivalence_suite(P(1.0), mu.scaled(3.0), 1.0, 1.0)
    for k in a.indicators:
        assert abs(b.indicators[k] - 3 * a.indicators[k]) <= 1e-12 * 3 * a.indicators[k]
    assert a.verdicts == b.verdicts


def test_symbol_one_not_trace_class():
    rep = run_equivalence_suite(P(0.0), lebesgue(8.0), 1.0, 1.0)
    assert rep.verdicts["bounded"] == "comparable"
    assert rep.verdicts["schatten"] == "divergent"
    assert rep.verdicts["summary"] == "bounded, not S_1"


def test_circles_compact_and_trace_class():
    rep = run_equivalence_suite(P(-1.0), RadialCircles([1.0, 2.0], [1.0, 0.5]), 1.0, 1.0)
    assert rep.verdicts["summary"] == "bounded, S_1"
    assert rep.diagnostics["vanishing_trend"] == {"berezin": True, "ball": True}


def test_frame_gram():
    assert frame_gram_bound(P(0.0), []) == 0.0
    assert abs(frame_gram_bound(P(0.0), [0j]) - 1) <= 1e-14
    assert grid_points(1.0, 1.0).size == 5
    sweep = frame_gram_sweep(P(0.0), 1.0, (6.0, 8.0))
    assert abs(sweep[1][2] / sweep[0][2] - 1) <= 0.01


def test_kernel_fp_norm_alpha_zero():
    for p in (1.0, 2.0, 4.0):
        for z in (0j, 1.5 + 1j, 4.0):
            val = kernel_fp_norm(P(0.0), z, p) ** p
            assert abs(val - 2 / p) <= 1e-8


@pytest.mark.parametrize("which", ["diagonal", "ksnorm", "upper_bound", "lower_bound", "submean"])
@pytest.mark.parametrize("alpha", [-2.0, 0.0, 2.0])
def test_bands_pass(which, alpha):
    rep = estimate_band_sweep(P(alpha), which)
    assert rep.passed
    assert rep.to_csv().splitlines()[0] == ",".join(rep.columns)


def test_unknown_band():
    with pytest.raises(ValueError):
        estimate_band_sweep(P(0.0), "nope")


@pytest.mark.parametrize("alpha", [-2.0, 0.0, 2.0])
def test_ball_berezin_constant(alpha):
    pos = np.concatenate([m.discretize()[0] for m in atomic_suite().values()])
    grid = near_atom_grid(pos)
    for mu in atomic_suite().values():
        assert ball_berezin_constant(P(alpha), mu, grid=grid) < 1e6


def test_suites_are_valid():
    assert set(builtin_suite()) >= {"delta_0", "lattice_gaussian", "symbol_one"}
    for mu in atomic_suite().values():
        assert np.all(np.abs(mu.positions) <= 2 + 1e-12)


def test_selftest_subset():
    res = run_selftest(["kernel_closed_forms", "frac_composition_multiplier"])
    assert [r.name for r in res] == ["kernel_closed_forms", "frac_composition_multiplier"]
    assert all(r.passed for r in res)
