"""Invariant checks run by ``fockop selftest``.

Each check returns (passed, detail).  Sizes are kept small enough that the
whole battery finishes in well under two minutes on one core.
"""

from __future__ import annotations

import math

import numpy as np

from .berezin import berezin_direct, compactness_profile, lattice_sequence
from .core_math import SpaceParams, gaussian_polar_rule, log_gamma
from .kernel import (
    EntirePoly,
    frac_coeff,
    frac_integral_quadrature,
    frac_integral_series,
    inner_product,
    kernel_diagonal,
    KernelSection,
    kernel_values,
    taylor_split,
)
from .measure import AtomicMeasure, LatticeSpec, RadialCircles, ball_mass, lattice_gaussian, lebesgue, point_mass
from .radial_oracle import oracle_compare, radial_eigenvalues
from .toeplitz import assemble, berezin_from_matrix, schatten_norm, trace_formula
from . import verify

ALPHAS = (-2.0, 0.0, 2.0)


def quad_moments():
    rule = gaussian_polar_rule(8.0, 160, 64)
    r2 = np.abs(rule.points()) ** 2
    worst = 0.0
    for k in range(21):
        val = float(np.sum(rule.weights() * r2**k * np.exp(-r2)))
        worst = max(worst, abs(val / math.gamma(k + 1) - 1))
    return worst <= 1e-9, f"max rel err {worst:.2e}"


def quad_angular():
    # normalized monomials z^k / sqrt(k!), so the bound is scale free
    rule = gaussian_polar_rule(8.0, 64, 32)
    z = rule.points()
    g = rule.weights() * np.exp(-np.abs(z) ** 2)
    worst = 0.0
    for j in range(16):
        for k in range(16):
            if j != k:
                m = np.sum(g * z**j * np.conj(z) ** k) / math.sqrt(math.factorial(j) * math.factorial(k))
                worst = max(worst, abs(m))
    return worst <= 1e-12, f"max |off moment| {worst:.2e}"


def log_gamma_recurrence():
    xs = np.linspace(0.5, 100, 2000)
    worst = max(abs(log_gamma(x + 1) - log_gamma(x) - math.log(x)) for x in xs)
    return worst <= 1e-12, f"max deviation {worst:.2e}"


def kernel_closed_forms():
    e = math.e
    cases = [(0.0, e), (-2.0, e - 1), (2.0, 1 + e)]
    worst = max(abs(kernel_values(SpaceParams(a), 1 + 0j, 1 + 0j) / v - 1) for a, v in cases)
    return worst <= 1e-10, f"max rel err {worst:.2e}"


def kernel_hermitian():
    rng = np.random.default_rng(7)
    z = rng.uniform(-3, 3, 100) + 1j * rng.uniform(-3, 3, 100)
    w = rng.uniform(-3, 3, 100) + 1j * rng.uniform(-3, 3, 100)
    worst = 0.0
    for a in (-4.0, -1.0, 0.0, 1.5, 4.0):
        p = SpaceParams(a)
        kzw = kernel_values(p, z, w)
        kwz = kernel_values(p, w, z)
        worst = max(worst, float(np.max(np.abs(kzw - np.conj(kwz)) / np.abs(kzw))))
    return worst <= 1e-12, f"max rel asymmetry {worst:.2e}"


def _band(which, alphas, **kw):
    def run():
        parts = []
        ok = True
        for a in alphas:
            rep = verify.estimate_band_sweep(SpaceParams(a), which, **kw)
            ok &= rep.passed
            parts.append(f"a={a:g}: [{rep.low:.3g}, {rep.high:.3g}]")
        return ok, "; ".join(parts)

    return run


def diagonal_alpha_zero():
    r = np.linspace(0, 6, 61)
    ratio = kernel_diagonal(SpaceParams(0.0), r + 0j) / np.exp(r**2)
    worst = float(np.max(np.abs(ratio - 1)))
    return worst <= 1e-12, f"max |ratio - 1| {worst:.2e}"


def frac_cross_check():
    fs = [EntirePoly([1.0 / math.factorial(k) for k in range(21)]), EntirePoly.monomial(3), EntirePoly([1.0])]
    worst = 0.0
    for f in fs:
        for s in (0.5, 1.0, 2.5):
            ser = frac_integral_series(f, s)
            for z in (1.0, 2.0, 1 + 1j):
                q = frac_integral_quadrature(f, s, z)
                worst = max(worst, abs(q - complex(ser(z))) / abs(q))
    return worst <= 1e-8, f"max rel diff {worst:.2e}"


def frac_composition():
    # I^{-s} I^s multiplies degree k by Gamma(1+k)^2 / (Gamma(1+s+k) Gamma(1-s+k)) on k > s
    f = EntirePoly(np.arange(1, 9, dtype=float))
    worst = 0.0
    for s in (0.5, 1.0, 2.5):
        g = frac_integral_series(frac_integral_series(f, s), -s)
        _, tail = taylor_split(f, s)
        for k in range(f.coeffs.size):
            expect = tail.coeffs[k] * frac_coeff(s, k) * frac_coeff(-s, k) if k < tail.coeffs.size and k > s else 0
            got = g.coeffs[k] if k < g.coeffs.size else 0
            worst = max(worst, abs(got - expect))
    return worst <= 1e-12, f"max coefficient deviation {worst:.2e}"


def tail_product_degree():
    f = EntirePoly(np.ones(10))
    ok = True
    for a in (0.5, 1.0, 2.0, 3.3, 4.0):
        _, ft = taylor_split(f, a / 2)
        _, gt = taylor_split(f, a / 2)
        ok &= all(k > a for k in (ft * gt).support())
    return ok, "all tail-product degrees exceed alpha"


def reproducing():
    rule = gaussian_polar_rule(12.0, 160, 64)
    f = EntirePoly([1, -0.5, 0.25j, 0.1, 0, 0.02, 0, 0, 0.003])
    worst = 0.0
    for a in (-3.0, -1.0, 0.0, 1.0, 3.0):
        p = SpaceParams(a)
        for z in (0j, 1 + 0j, 2 + 1j):
            val = inner_product(p, f, KernelSection(p, z), rule)
            worst = max(worst, abs(val - complex(f(z))) / abs(f(z)))
    return worst <= 1e-6, f"max rel err {worst:.2e}"


def ball_mass_monotone():
    mus = [lattice_gaussian(0.5, 1.0, 4.0), RadialCircles(np.array([1.0, 2.0]), np.array([1.0, 0.5]))]
    z = np.array([0, 0.5, 1 + 1j, -2, 3j])
    ok = True
    for mu in mus:
        prev = np.zeros(z.size)
        for r in (0.1, 0.5, 1.0, 2.0, 4.0):
            cur = ball_mass(mu, z, r)
            ok &= bool(np.all(cur >= prev))
            prev = cur
    total = mus[0].total_mass
    ok &= abs(ball_mass(mus[0], 0j, 100.0) - total) <= 1e-12 * total
    return ok, "monotone in r; total mass recovered"


def lattice_overlap():
    mu = lattice_gaussian(0.5, 1.0, 8.0)
    seq = lattice_sequence(mu, LatticeSpec(0.5, 1.0, 9.0))
    l1 = seq.lp(1)
    return l1 <= 9 * mu.total_mass * (1 + 1e-12), f"l1 {l1:.6g} vs 9 * mass {9 * mu.total_mass:.6g}"


def toeplitz_structure():
    ok = True
    worst_h = 0.0
    worst_psd = 0.0
    for a in (-2.0, 0.0, 2.0, 3.0):
        for mu in verify.atomic_suite().values():
            T = assemble(SpaceParams(a), mu, 16)
            E = T.entries
            worst_h = max(worst_h, float(np.max(np.abs(E - E.conj().T))))
            ev = np.linalg.eigvalsh(E)
            worst_psd = max(worst_psd, -ev[0] / max(ev[-1], 1e-300))
            if a > 0:
                hm = SpaceParams(a).head_max
                ok &= bool(np.all(E[: hm + 1, hm + 1 :] == 0))
    ok &= worst_h <= 1e-12 and worst_psd <= 1e-10
    return ok, f"hermitian {worst_h:.1e}, min eig ratio {-worst_psd:.1e}"


def toeplitz_linearity():
    s = verify.atomic_suite()
    m1, m2 = s["mixture"], s["delta_1+i"]
    combo = AtomicMeasure(np.concatenate([m1.positions, m2.positions]),
                          np.concatenate([2 * m1.weights, 0.5 * m2.weights]))
    worst = 0.0
    for a in ALPHAS:
        p = SpaceParams(a)
        lhs = assemble(p, combo, 16).entries
        rhs = 2 * assemble(p, m1, 16).entries + 0.5 * assemble(p, m2, 16).entries
        worst = max(worst, float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs))))
    return worst <= 1e-12, f"max rel deviation {worst:.2e}"


def truncation_stability():
    mu = verify.atomic_suite()["mixture"]
    worst = 0.0
    for a in ALPHAS:
        p = SpaceParams(a)
        e24 = assemble(p, mu, 24).entries[:13, :13]
        e36 = assemble(p, mu, 36).entries[:13, :13]
        worst = max(worst, float(np.max(np.abs(e24 - e36)) / np.max(np.abs(e36))))
    return worst < 1e-8, f"max change {worst:.2e}"


def trace_identity():
    worst = 0.0
    for a in ALPHAS + (3.0,):
        p = SpaceParams(a)
        for mu in verify.atomic_suite().values():
            t = assemble(p, mu, 32).trace()
            f = trace_formula(p, mu, 32)
            worst = max(worst, abs(t - f) / abs(f) if f else abs(t))
    return worst <= 1e-8, f"max rel diff {worst:.2e}"


def schatten_monotone():
    T = assemble(SpaceParams(0.0), verify.atomic_suite()["mixture"], 24)
    vals = [schatten_norm(T, q) for q in (0.5, 1, 2, 4, math.inf)]
    ok = all(b <= a * (1 + 1e-12) for a, b in zip(vals, vals[1:]))
    return ok, ", ".join(f"{v:.4g}" for v in vals)


def berezin_consistency():
    z = np.array([0, 1, 1 + 1j, -2 + 0.5j, 3j, 2.5 - 1.5j])
    worst = 0.0
    for a in ALPHAS:
        p = SpaceParams(a)
        for mu in verify.atomic_suite().values():
            T = assemble(p, mu, 32)
            d = berezin_direct(p, mu, z)
            m = np.array([berezin_from_matrix(T, p, x) for x in z])
            err = np.abs(d - m) / np.where(d > 0, d, 1.0)
            worst = max(worst, float(np.max(err)))
    return worst <= 1e-6, f"max rel diff {worst:.2e}"


def berezin_rank_one():
    worst = 0.0
    z = np.array([0, 1, 2 + 1j, -1.5j])
    for a in (0j, 1 + 0j, 2 + 0j):
        vals = berezin_direct(SpaceParams(0.0), point_mass(a.real, a.imag), z)
        worst = max(worst, float(np.max(np.abs(vals - np.exp(-np.abs(z - a) ** 2)))))
    return worst <= 1e-8, f"max abs err {worst:.2e}"


def ball_vs_berezin():
    parts = []
    ok = True
    for a in ALPHAS:
        p = SpaceParams(a)
        C = 0.0
        for mu in verify.atomic_suite().values():
            grid = np.concatenate([verify.default_grid(3.0, 0.5, 8), verify.near_atom_grid(mu.positions)])
            C = max(C, verify.ball_berezin_constant(p, mu, 0.1, 0.2, grid))
        ok &= C < 1e6
        parts.append(f"a={a:g}: C={C:.3g}")
    return ok, "; ".join(parts)


def radial_oracle():
    worst = 0.0
    ok = True
    for a in ALPHAS:
        for rho in (1.0, 2.0):
            rep = oracle_compare(SpaceParams(a), RadialCircles(np.array([rho]), np.array([1.0])), 12, 64)
            ok &= rep.passed
            for q, v in rep.schatten_oracle.items():
                worst = max(worst, abs(rep.schatten_matrix[q] / v - 1))
    return ok and worst <= 1e-8, f"max schatten rel diff {worst:.2e}"


def radial_trace():
    worst = 0.0
    for a in ALPHAS:
        p = SpaceParams(a)
        c = RadialCircles(np.array([0.5, 1.5]), np.array([1.0, 2.0]))
        lam = radial_eigenvalues(p, c, 24).lambdas
        tf = trace_formula(p, c.to_atomic(100), 24)
        worst = max(worst, abs(lam.sum() - tf) / tf)
    return worst <= 1e-10, f"max rel diff {worst:.2e}"


def compactness_trends():
    a = compactness_profile(SpaceParams(0.0), point_mass(), [2.0, 3.0, 4.0])
    b = compactness_profile(SpaceParams(0.0), lebesgue(8.0), [1.0, 2.0, 3.0])
    ok = a.vanishing_trend and not b.vanishing_trend and max(abs(v - 1) for v in b.values) < 1e-6
    return ok, f"delta_0 {a.values[-1]:.3g}, symbol one {b.values[-1]:.6f}"


def frame_gram():
    parts = []
    ok = True
    for a in ALPHAS:
        sweep = verify.frame_gram_sweep(SpaceParams(a), 1.0, (6.0, 8.0))
        change = abs(sweep[1][2] / sweep[0][2] - 1)
        ok &= change < 0.05
        parts.append(f"a={a:g}: {sweep[1][2]:.4g} ({change:.1%})")
    return ok, "; ".join(parts)


def equivalence_delta():
    rep = verify.run_equivalence_suite(SpaceParams(0.0), point_mass(), 1.0, 1.0, 16)
    ind = rep.indicators
    ok = all(abs(ind[k] - 1) < 1e-6 for k in ind) and rep.verdicts["summary"] == "bounded, S_1"
    return ok, rep.verdicts["summary"]


CHECKS = [
    ("quadrature_moments", quad_moments),
    ("quadrature_angular", quad_angular),
    ("log_gamma_recurrence", log_gamma_recurrence),
    ("kernel_closed_forms", kernel_closed_forms),
    ("kernel_hermitian", kernel_hermitian),
    ("kernel_upper_bound", _band("upper_bound", (-4.0, -1.0, 0.0, 1.5, 4.0))),
    ("diagonal_band", _band("diagonal", (-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0))),
    ("diagonal_alpha_zero", diagonal_alpha_zero),
    ("near_diagonal_lower_bound", _band("lower_bound", (-4.0, -2.0, 0.0, 2.0, 4.0))),
    ("submean", _band("submean", ALPHAS)),
    ("kernel_norm_band_p1", _band("ksnorm", ALPHAS, p=1.0)),
    ("kernel_norm_band_p2", _band("ksnorm", ALPHAS, p=2.0)),
    ("kernel_norm_band_p4", _band("ksnorm", ALPHAS, p=4.0)),
    ("frac_series_vs_quadrature", frac_cross_check),
    ("frac_composition_multiplier", frac_composition),
    ("tail_product_degree", tail_product_degree),
    ("reproducing_property", reproducing),
    ("ball_mass_monotone", ball_mass_monotone),
    ("lattice_overlap_bound", lattice_overlap),
    ("toeplitz_hermitian_psd_blocks", toeplitz_structure),
    ("toeplitz_linearity", toeplitz_linearity),
    ("toeplitz_truncation_stability", truncation_stability),
    ("trace_identity", trace_identity),
    ("schatten_monotone", schatten_monotone),
    ("berezin_matrix_consistency", berezin_consistency),
    ("berezin_rank_one", berezin_rank_one),
    ("ball_mass_vs_berezin", ball_vs_berezin),
    ("radial_oracle", radial_oracle),
    ("radial_trace", radial_trace),
    ("compactness_trends", compactness_trends),
    ("frame_gram_stability", frame_gram),
    ("equivalence_delta_0", equivalence_delta),
]
