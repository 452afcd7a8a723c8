"""Acceptance criteria, each at its stated tolerance.

Every test prints one PASS/FAIL line, collected again in the terminal summary.
"""

import math
import subprocess
import sys

import numpy as np

from conftest import record
from fockop.berezin import berezin_direct, default_grid
from fockop.core_math import SpaceParams, gaussian_polar_rule
from fockop.kernel import (
    EntirePoly,
    KernelSection,
    frac_integral_quadrature,
    frac_integral_series,
    inner_product,
    kernel_diagonal,
    kernel_eval,
    taylor_split,
)
from fockop.measure import RadialCircles, lattice_gaussian, lebesgue, point_mass
from fockop.radial_oracle import oracle_compare
from fockop.toeplitz import assemble, berezin_from_matrix, trace_formula
from fockop.verify import (
    atomic_suite,
    ball_berezin_constant,
    builtin_suite,
    estimate_band_sweep,
    kernel_fp_norm,
    near_atom_grid,
    run_equivalence_suite,
)


def P(a):
    return SpaceParams(a)


def rel(a, b):
    return abs(a - b) / abs(b) if b != 0 else abs(a)


def test_criterion_01_kernel_closed_forms():
    cases = [(0.0, math.e), (-2.0, math.e - 1), (2.0, 1 + math.e)]
    err = max(rel(kernel_eval(P(a), 1, 1).value, ref) for a, ref in cases)
    ok = err <= 1e-10
    record(1, ok, f"kernel closed forms, max rel error {err:.2e} (tol 1e-10)")
    assert ok


def test_criterion_02_fractional_calculus():
    exp20 = EntirePoly([1 / math.factorial(k) for k in range(21)])
    funcs = {"exp": exp20, "z^3": EntirePoly.monomial(3), "1": EntirePoly([1.0])}
    cross = 0.0
    for f in funcs.values():
        for s in (0.5, 1.0, 2.5):
            g = frac_integral_series(f, s)
            for z in (1.0, 2.0, 1 + 1j):
                cross = max(cross, rel(complex(g(z)), frac_integral_quadrature(f, s, z)))
    # composition clause: I^{-s} I^s f against the Taylor tail f^+_s, coefficient by coefficient
    comp = 0.0
    for f in funcs.values():
        for s in (0.5, 1.0, 2.5):
            lhs = frac_integral_series(frac_integral_series(f, s), -s)
            _, tail = taylor_split(f, s)
            n = max(lhs.coeffs.size, tail.coeffs.size)
            a = np.pad(lhs.coeffs, (0, n - lhs.coeffs.size))
            b = np.pad(tail.coeffs, (0, n - tail.coeffs.size))
            comp = max(comp, float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300), initial=0.0)))
    ok_cross = cross <= 1e-8
    ok_comp = comp <= 1e-12
    ok = ok_cross and ok_comp
    record(2, ok, f"series vs quadrature max rel {cross:.2e} (tol 1e-8) {'ok' if ok_cross else 'FAILED'}; "
                  f"I^-s I^s f = f^+_s max coefficient rel deviation {comp:.3g} "
                  f"{'ok' if ok_comp else 'FAILED (multiplier is Gamma(1+k)^2/(Gamma(1+s+k)Gamma(1-s+k)), not 1)'}")
    assert ok


def test_criterion_03_reproducing_property():
    rng = np.random.default_rng(2024)
    polys = [EntirePoly([1.0]), EntirePoly([0, 0, 1.0, -0.5j]),
             EntirePoly(rng.normal(size=9) + 1j * rng.normal(size=9))]
    rule = gaussian_polar_rule(12.0, 160, 64)
    err = 0.0
    for alpha in (-3.0, -1.0, 0.0, 1.0, 3.0):
        for f in polys:
            for z in (0j, 1 + 0j, 2 + 1j):
                val = inner_product(P(alpha), f, KernelSection(P(alpha), z), rule)
                err = max(err, rel(val, complex(f(z))))
    ok = err <= 1e-6
    record(3, ok, f"reproducing property, max rel error {err:.2e} (tol 1e-6)")
    assert ok


def test_criterion_04_diagonal_band():
    r = np.linspace(0.0, 6.0, 121)
    worst = 0.0
    dev0 = 0.0
    for alpha in (-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0):
        ratio = kernel_diagonal(P(alpha), r + 0j) / ((1 + r) ** alpha * np.exp(r**2))
        worst = max(worst, ratio.max() / ratio.min())
        if alpha == 0:
            dev0 = float(np.max(np.abs(ratio - 1)))
    ok = worst <= 50 and dev0 <= 1e-12
    record(4, ok, f"diagonal band, worst band ratio {worst:.3g} (<= 50), alpha=0 deviation {dev0:.1e} (<= 1e-12)")
    assert ok


def test_criterion_05_kernel_norm_band():
    worst = 0.0
    for alpha in (-2.0, 0.0, 2.0):
        for p in (1.0, 2.0, 4.0):
            worst = max(worst, estimate_band_sweep(P(alpha), "ksnorm", p).band_ratio)
    zs = [0j, 1 + 0j, 2.5 + 2.5j, -3j, 5 + 0j, 3.5 - 3.5j]
    dev0 = max(abs(kernel_fp_norm(P(0.0), z, p) ** p - 2 / p) for p in (1.0, 2.0, 4.0) for z in zs)
    ok = worst <= 50 and dev0 <= 1e-8
    record(5, ok, f"kernel norm band, worst band ratio {worst:.3g} (<= 50), alpha=0 |norm^p - 2/p| {dev0:.1e}")
    assert ok


def test_criterion_06_toeplitz_identity():
    T = assemble(P(0.0), lebesgue(8.0), 12)
    err = float(np.max(np.abs(T.entries - np.eye(13))))
    ok = err <= 1e-8
    record(6, ok, f"symbol-1 matrix vs identity (D=12), max entry error {err:.2e} (tol 1e-8)")
    assert ok


def test_criterion_07_rank_one():
    grid = default_grid(6.0, 0.5, 16)
    ev_err = 0.0
    ber_err = 0.0
    for a in (0j, 1 + 0j, 2j, 2 + 0j):
        mu = point_mass(a.real, a.imag)
        ev = assemble(P(0.0), mu, 32).eigenvalues()
        ev_err = max(ev_err, abs(ev[0] - 1), float(np.max(np.abs(ev[1:]))))
        vals = berezin_direct(P(0.0), mu, grid)
        ber_err = max(ber_err, float(np.max(np.abs(vals - np.exp(-np.abs(grid - a) ** 2)))))
    ok = ev_err <= 1e-10 and ber_err <= 1e-8
    record(7, ok, f"rank-one point masses, eigenvalue error {ev_err:.1e} (1e-10), Berezin error {ber_err:.1e} (1e-8)")
    assert ok


def test_criterion_08_berezin_consistency():
    grid = default_grid(3.0, 0.25, 16)
    worst = 0.0
    for alpha in (-2.0, 0.0, 2.0):
        for mu in atomic_suite().values():
            T = assemble(P(alpha), mu, 32)
            direct = berezin_direct(P(alpha), mu, grid)
            via = np.array([berezin_from_matrix(T, P(alpha), z) for z in grid])
            for d, v in zip(direct, via):
                worst = max(worst, rel(v, d) if d != 0 else abs(v))
    ok = worst <= 1e-6
    record(8, ok, f"Berezin direct vs matrix (D=32, |z|<=3), max rel deviation {worst:.2e} (tol 1e-6)")
    assert ok


def test_criterion_09_radial_oracle():
    off = diag = sch = 0.0
    for alpha in (-2.0, 0.0, 2.0):
        for circles in (RadialCircles([1.0], [1.0]), RadialCircles([2.0], [1.0]),
                        RadialCircles([1.0, 2.0], [1.0, 0.5])):
            rep = oracle_compare(P(alpha), circles, 12, 64, raise_on_alias=False)
            off = max(off, rep.max_offdiag / rep.lambda_max)
            diag = max(diag, rep.max_diag_rel_error)
            sch = max(sch, max(rel(rep.schatten_matrix[p], v) for p, v in rep.schatten_oracle.items()))
    ok = off <= 1e-10 and diag <= 1e-10 and sch <= 1e-8
    record(9, ok, f"radial oracle, offdiag/lambda_max {off:.1e}, diagonal rel {diag:.1e}, Schatten rel {sch:.1e}")
    assert ok


def test_criterion_10_trace_identity():
    worst = 0.0
    for alpha in (-2.0, 0.0, 2.0, 3.0):
        for mu in atomic_suite().values():
            tr = assemble(P(alpha), mu, 32).trace()
            tf = trace_formula(P(alpha), mu, 32)
            worst = max(worst, rel(tr, tf) if tf != 0 else abs(tr))
    blocks = True
    for alpha in (1.0, 2.0, 3.0, 4.0):
        h = int(math.floor(alpha / 2)) + 1
        for mu in atomic_suite().values():
            E = assemble(P(alpha), mu, 32).entries
            blocks &= bool(np.all(E[:h, h:] == 0) and np.all(E[h:, :h] == 0))
    ok = worst <= 1e-8 and blocks
    record(10, ok, f"trace vs trace formula max rel {worst:.1e} (tol 1e-8); exact head/tail zero blocks: {blocks}")
    assert ok


def test_criterion_11_triple_coherence():
    mu = lattice_gaussian(0.5, 1.0, 8.0)
    a = run_equivalence_suite(P(0.0), mu, 1.0, 1.0)
    b = run_equivalence_suite(P(0.0), mu.scaled(3.0), 1.0, 1.0)
    names = ("lp_lattice", "lp_ball", "lp_berezin")
    vals = [a.indicators[n] for n in names]
    finite = all(math.isfinite(v) and v > 0 for v in vals)
    spread = max(vals) / min(vals)
    homog = max(rel(b.indicators[k], 3 * v) for k, v in a.indicators.items())
    ok = finite and spread <= 1e3 and homog <= 1e-12
    record(11, ok, f"lattice/ball/Berezin L^1 = {vals[0]:.6g}/{vals[1]:.6g}/{vals[2]:.6g}, "
                   f"spread {spread:.3g} (<= 1e3), 3x homogeneity rel error {homog:.1e}")
    assert ok


def test_criterion_12_ball_mass_constant():
    suite = builtin_suite()
    atoms = np.concatenate([m.positions for m in suite.values() if hasattr(m, "positions")
                            and m.positions.size < 50])
    grid = np.concatenate([default_grid(), near_atom_grid(atoms)])
    consts = {}
    for alpha in (-2.0, 0.0, 2.0):
        consts[alpha] = max(ball_berezin_constant(P(alpha), mu, 0.1, 0.2, grid) for mu in suite.values())
    ok = all(math.isfinite(c) and c < 1e6 for c in consts.values())
    record(12, ok, "mu(B(z,0.1)) <= C mu~(z), C per alpha: "
                   + ", ".join(f"{a:g}: {c:.3g}" for a, c in consts.items()) + " (< 1e6)")
    assert ok


def test_criterion_13_determinism(tmp_path):
    measure = tmp_path / "lattice.json"
    measure.write_text('{"type": "generator", "name": "lattice_gaussian", "s": 0.5, "max_radius": 6}')

    def run(tag, threads):
        out = tmp_path / tag
        cmd = [sys.executable, "-m", "fockop", "--threads", str(threads), "verify-abc", "--alpha", "1",
               "--p", "1", "--r", "1", "--measure", str(measure), "--out", str(out)]
        proc = subprocess.run(cmd, capture_output=True, check=True)
        return proc.stdout + (out / "report.json").read_bytes() + (out / "report.csv").read_bytes()

    first = run("a", 1)
    same_run = first == run("b", 1)
    same_threads = first == run("c", 4)
    ok = same_run and same_threads
    record(13, ok, f"verify-abc bytes identical across runs: {same_run}, across --threads 1 vs 4: {same_threads}")
    assert ok
