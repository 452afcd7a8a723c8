"""Equivalence reports, frame Gram bounds, estimate bands and the selftest battery.

An equivalence report collects, for one measure, the indicators that the
boundedness / compactness / Schatten characterizations tie together:

    bounded:  op_norm ~ sup_berezin ~ sup_ball
    schatten: schatten_p ~ lp_berezin ~ lp_ball ~ lp_lattice

Ratios are only formed inside each group.  Suprema are grid suprema and
L^p norms are truncated to a disc, so divergence is judged from growth
between two truncation levels rather than from absolute values.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .berezin import (
    ball_profile,
    berezin_direct,
    berezin_lp_norm,
    default_grid,
    lattice_sequence,
)
from .core_math import SpaceParams, gaussian_polar_rule, panel_polar_rule
from .kernel import comparison_E, kernel_diagonal, kernel_values, normalized_kernel
from .measure import (
    AtomicMeasure,
    LatticeSpec,
    Measure,
    RadialCircles,
    ball_mass,
    gaussian_density,
    lattice_gaussian,
    lebesgue,
    point_mass,
)
from .toeplitz import DEFAULT_DEGREE, assemble, schatten_norm

RATIO_CAP = 1e3
GROWTH_LIMIT = 1.1

BOUNDED_GROUP = ("op_norm", "sup_berezin", "sup_ball")
SCHATTEN_GROUP = ("schatten_p", "lp_berezin", "lp_ball", "lp_lattice")


@dataclass
class EquivalenceReport:
    config: dict
    indicators: dict
    ratios: dict
    verdicts: dict
    diagnostics: dict
    provenance: dict

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "indicators": self.indicators,
            "ratios": self.ratios,
            "verdicts": self.verdicts,
            "diagnostics": self.diagnostics,
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["indicator", "value", "growth"])
        for name in BOUNDED_GROUP + SCHATTEN_GROUP:
            w.writerow([name, repr(self.indicators[name]), repr(self.diagnostics["growth"].get(name, 1.0))])
        return buf.getvalue()


def _pair_ratios(values: dict, names) -> dict:
    out = {}
    for a, b in itertools.combinations(names, 2):
        va, vb = values[a], values[b]
        if va == 0 and vb == 0:
            out[f"{a}/{b}"] = 1.0
        elif vb == 0:
            out[f"{a}/{b}"] = math.inf
        else:
            out[f"{a}/{b}"] = va / vb
    return out


def _comparable(ratios: dict, cap: float) -> bool:
    for r in ratios.values():
        if not (math.isfinite(r) and r > 0 and 1 / cap <= r <= cap):
            return False
    return True


def _growth(full: float, part: float) -> float:
    if full == 0 and part == 0:
        return 1.0
    if part == 0:
        return math.inf
    return full / part


def _ring_trend(values: np.ndarray, grid: np.ndarray) -> bool:
    """True if the ring maxima over the three largest radii do not increase and at least halve."""
    radii = np.round(np.abs(grid), 12)
    rings = np.unique(radii)[-3:]
    maxima = [float(np.max(values[radii == R])) for R in rings]
    return all(b <= a for a, b in zip(maxima, maxima[1:])) and maxima[-1] <= 0.5 * maxima[0]


def run_equivalence_suite(params: SpaceParams, mu: Measure, p: float, r: float, D: int = DEFAULT_DEGREE,
                          s: float | None = None, R_B: float = 8.0, cap: float = RATIO_CAP,
                          grid=None) -> EquivalenceReport:
    """Fill every indicator for mu and classify the two equivalence groups.

    Schatten growth compares degree D with D // 2; L^p growth compares the
    disc |z| <= R_B with |z| <= 0.75 R_B.  A growth factor above 1.1 marks
    that indicator as divergent.
    """
    if not -4 <= params.alpha <= 4:
        warnings.warn("band caps were calibrated for alpha in [-4, 4]", stacklevel=2)
    s = r if s is None else s
    lattice = LatticeSpec(s, r, R_B)
    grid = default_grid() if grid is None else np.asarray(grid, dtype=complex)

    T = assemble(params, mu, D)
    T_half = assemble(params, mu, D // 2)
    op = schatten_norm(T, math.inf)
    sp = schatten_norm(T, p)
    sp_half = schatten_norm(T_half, p)

    ber = berezin_direct(params, mu, grid)
    balls = ball_profile(mu, r, grid)
    lpb = berezin_lp_norm(params, mu, p, R_B)

    ball_rule = panel_polar_rule(R_B, r / 4, 8, 128)
    bm = np.asarray(ball_mass(mu, ball_rule.points(), r), dtype=float)
    terms = ball_rule.weights() * bm**p
    inner = np.abs(ball_rule.points()) <= 0.75 * R_B
    lp_ball_full = float(np.sum(terms)) ** (1 / p)
    lp_ball_inner = float(np.sum(terms[inner])) ** (1 / p)

    seq = lattice_sequence(mu, lattice)
    lat_inner = np.abs(seq.points) <= 0.75 * R_B
    lp_lat_full = seq.lp(p)
    lp_lat_inner = float(np.sum(seq.masses[lat_inner] ** p)) ** (1 / p)

    indicators = {
        "op_norm": op,
        "sup_berezin": float(np.max(ber)) if ber.size else 0.0,
        "sup_ball": balls.sup,
        "schatten_p": sp,
        "lp_berezin": lpb.value,
        "lp_ball": lp_ball_full,
        "lp_lattice": lp_lat_full,
    }
    growth = {
        "schatten_p": _growth(sp, sp_half),
        "lp_berezin": _growth(lpb.value, lpb.inner_value),
        "lp_ball": _growth(lp_ball_full, lp_ball_inner),
        "lp_lattice": _growth(lp_lat_full, lp_lat_inner),
    }
    divergent = {k: bool(g > GROWTH_LIMIT) for k, g in growth.items()}

    ratios = {
        "bounded": _pair_ratios(indicators, BOUNDED_GROUP),
        "schatten": _pair_ratios(indicators, SCHATTEN_GROUP),
    }
    bounded_ok = _comparable(ratios["bounded"], cap) and all(math.isfinite(indicators[k]) for k in BOUNDED_GROUP)
    n_div = sum(divergent.values())
    if n_div == 0:
        schatten_verdict = "comparable" if _comparable(ratios["schatten"], cap) else "not comparable"
    elif n_div == len(divergent):
        schatten_verdict = "divergent"
    else:
        schatten_verdict = "divergence disagreement"

    ber_vanish = _ring_trend(ber, grid) if ber.size else True
    ball_vanish = _ring_trend(balls.values, grid) if balls.values.size else True
    zero = all(indicators[k] == 0 for k in indicators)
    compact_verdict = "agree" if (ber_vanish == ball_vanish or zero) else "disagree"

    if not bounded_ok:
        summary = "not comparable"
    elif schatten_verdict == "comparable":
        summary = f"bounded, S_{p:g}"
    elif schatten_verdict == "divergent":
        summary = f"bounded, not S_{p:g}"
    else:
        summary = "inconclusive"

    verdicts = {
        "bounded": "comparable" if bounded_ok else "not comparable",
        "compact": compact_verdict,
        "schatten": schatten_verdict,
        "summary": summary,
    }
    diagnostics = {
        "growth": growth,
        "divergent": divergent,
        "vanishing_trend": {"berezin": ber_vanish, "ball": ball_vanish},
        "berezin_tail_indicator": lpb.tail_indicator,
        "sup_is_grid_sup": True,
    }
    config = {"alpha": params.alpha, "dim": params.dim, "p": p, "r": r, "s": s, "D": D, "R_B": R_B,
              "cap": cap, "measure": mu.describe()}
    tol = params.tolerances
    provenance = {
        "grid": {"points": int(grid.size), "r_max": float(np.max(np.abs(grid))) if grid.size else 0.0},
        "D": D,
        "tolerances": {"series_rel_tol": tol.series_rel_tol, "quad_rel_tol": tol.quad_rel_tol,
                       "report_ratio_cap": tol.report_ratio_cap},
    }
    return EquivalenceReport(config, indicators, ratios, verdicts, diagnostics, provenance)


def two_radius_consistency(params: SpaceParams, mu: Measure, p: float, r: float, D: int = DEFAULT_DEGREE) -> bool:
    """Same verdicts at ball radius r and 2r."""
    a = run_equivalence_suite(params, mu, p, r, D)
    b = run_equivalence_suite(params, mu, p, 2 * r, D, s=r)
    return a.verdicts == b.verdicts


# ---------------------------------------------------------------------------
# frame operator


def frame_gram_bound(params: SpaceParams, points) -> float:
    """Largest eigenvalue of G[i, j] = <k_xj, k_xi>_alpha."""
    pts = np.asarray(points, dtype=complex).ravel()
    if pts.size == 0:
        return 0.0
    K = kernel_values(params, pts[:, None], pts[None, :])
    d = np.sqrt(kernel_diagonal(params, pts))
    G = K / d[:, None] / d[None, :]
    G = 0.5 * (G + G.conj().T)
    return float(np.linalg.eigvalsh(G)[-1])


def grid_points(s: float, radius: float) -> np.ndarray:
    m = int(math.floor(radius / s + 1e-9))
    idx = np.arange(-m, m + 1)
    pts = (s * idx[None, :] + 1j * s * idx[:, None]).ravel()
    return pts[np.abs(pts) <= radius * (1 + 1e-12)]


def frame_gram_sweep(params: SpaceParams, s: float = 1.0, radii=(4.0, 6.0, 8.0)) -> list:
    return [(R, int(grid_points(s, R).size), frame_gram_bound(params, grid_points(s, R))) for R in radii]


# ---------------------------------------------------------------------------
# estimate bands


@dataclass
class BandReport:
    which: str
    alpha: float
    low: float
    high: float
    passed: bool
    rows: list = field(default_factory=list)
    columns: tuple = ()

    @property
    def band_ratio(self) -> float:
        return self.high / self.low if self.low > 0 else math.inf

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


def kernel_fp_norm(params: SpaceParams, z: complex, p: float, radius: float = 10.0,
                   n_radial: int = 64, n_angular: int = 64) -> float:
    """||k_z||_{F^p_alpha} by a polar rule centred at z."""
    rule = gaussian_polar_rule(radius, n_radial, n_angular).shifted(z)
    w = rule.points()
    kz = normalized_kernel(params, complex(z), w)
    integrand = np.abs(kz * np.exp(-0.5 * np.abs(w) ** 2)) ** p * (1 + np.abs(w)) ** (-params.alpha)
    return float(np.sum(rule.weights() * integrand)) ** (1 / p)


SUBMEAN_SUITE = (
    (1.0,),
    (0.0, 1.0),
    (0.0, 2.0, 0.0, 1.0),
    (1.0, 5.0, 10.0, 10.0, 5.0, 1.0),
    tuple(1.0 / math.factorial(k) for k in range(12)),
)


def estimate_band_sweep(params: SpaceParams, which: str, p: float = 2.0, cap: float | None = None) -> BandReport:
    """Empirical constants of the kernel and normalized-kernel estimates on a standard grid.

    diagonal     K(z,z) / ((1+|z|)^a e^{|z|^2}),            |z| in [0, 6]
    lower_bound  |K(z,w)| / ((1+|z|)^a e^{(|z|^2+|w|^2)/2}),  |w - z| < 0.1, |z| <= 6
    ksnorm       ||k_z||_{F^p} / (1+|z|)^{(1/2-1/p) a},      |z| <= 5
    submean      |f(z)|^2 e^{-|z|^2} (1+|z|)^-a / int_{B(z,1)} |f|^2 e^{-|w|^2} dv_a, |z| <= 5
    upper_bound  |K(z,w)| / ((1+|z w|)^{a/2} E(z,w)),         |z|, |w| <= 6
    """
    a = params.alpha
    cap = params.tolerances.report_ratio_cap if cap is None else cap
    if which == "diagonal":
        r = np.linspace(0.0, 6.0, 61)
        ratio = kernel_diagonal(params, r + 0j) / ((1 + r) ** a * np.exp(r**2))
        rows = list(zip(r, ratio))
        lo, hi = float(np.min(ratio)), float(np.max(ratio))
        return BandReport(which, a, lo, hi, hi / lo <= cap, rows, ("r", "ratio"))
    if which == "lower_bound":
        zs = default_grid(6.0, 0.5, 8)
        offs = np.concatenate([[0j], np.outer([0.05, 0.099], np.exp(2j * np.pi * np.arange(8) / 8)).ravel()])
        z = np.repeat(zs, offs.size)
        w = z + np.tile(offs, zs.size)
        K = np.abs(kernel_values(params, z, w))
        ratio = K / ((1 + np.abs(z)) ** a * np.exp(0.5 * (np.abs(z) ** 2 + np.abs(w) ** 2)))
        rows = list(zip(np.abs(z), np.abs(w - z), ratio))
        lo, hi = float(np.min(ratio)), float(np.max(ratio))
        return BandReport(which, a, lo, hi, lo > 0, rows, ("abs_z", "dist", "ratio"))
    if which == "ksnorm":
        r = np.linspace(0.0, 5.0, 11)
        norms = np.array([kernel_fp_norm(params, x, p) for x in r])
        ratio = norms / (1 + r) ** ((0.5 - 1 / p) * a)
        rows = list(zip(r, norms, ratio))
        lo, hi = float(np.min(ratio)), float(np.max(ratio))
        return BandReport(which, a, lo, hi, hi / lo <= cap, rows, ("r", "norm", "ratio"))
    if which == "submean":
        zs = default_grid(5.0, 0.5, 8)
        disc = gaussian_polar_rule(1.0, 24, 32)
        rows = []
        for fi, coeffs in enumerate(SUBMEAN_SUITE):
            f = np.polynomial.Polynomial(coeffs)
            for z in zs:
                w = disc.points() + z
                rhs = np.sum(disc.weights() * np.abs(f(w)) ** 2 * np.exp(-np.abs(w) ** 2) * (1 + np.abs(w)) ** (-a))
                lhs = abs(f(z)) ** 2 * math.exp(-abs(z) ** 2) * (1 + abs(z)) ** (-a)
                rows.append((fi, abs(z), lhs / rhs))
        ratio = np.array([row[2] for row in rows])
        hi = float(np.max(ratio))
        return BandReport(which, a, float(np.min(ratio)), hi, math.isfinite(hi) and hi < 1e4, rows,
                          ("function", "abs_z", "ratio"))
    if which == "upper_bound":
        zs = default_grid(6.0, 1.0, 8)
        z = np.repeat(zs, zs.size)
        w = np.tile(zs, zs.size)
        K = np.abs(kernel_values(params, z, w))
        ratio = K / ((1 + np.abs(z) * np.abs(w)) ** (a / 2) * comparison_E(z, w))
        rows = list(zip(np.abs(z), np.abs(w), ratio))
        hi = float(np.max(ratio))
        return BandReport(which, a, float(np.min(ratio)), hi, hi < 1e4, rows, ("abs_z", "abs_w", "ratio"))
    raise ValueError(f"unknown band {which!r}")


# ---------------------------------------------------------------------------
# ball mass vs Berezin transform


def ball_berezin_constant(params: SpaceParams, mu: Measure, r: float = 0.1, z_min: float = 0.2, grid=None) -> float:
    """max of mu(B(z, r)) / mu~(z) over grid points with |z| >= z_min."""
    grid = default_grid() if grid is None else np.asarray(grid, dtype=complex)
    grid = grid[np.abs(grid) >= z_min]
    masses = np.asarray(ball_mass(mu, grid, r), dtype=float)
    hit = masses > 0
    if not np.any(hit):
        return 0.0
    ber = berezin_direct(params, mu, grid[hit])
    return float(np.max(masses[hit] / ber))


def near_atom_grid(positions, offsets=(0.0, 0.05), n_angles: int = 8) -> np.ndarray:
    ring = np.exp(2j * np.pi * np.arange(n_angles) / n_angles)
    pts = [np.asarray(positions, dtype=complex)[:, None] + o * ring[None, :] for o in offsets]
    return np.unique(np.concatenate([q.ravel() for q in pts]))


# ---------------------------------------------------------------------------
# built-in measures


def builtin_suite() -> dict:
    return {
        "delta_0": point_mass(0.0, 0.0),
        "delta_1": point_mass(1.0, 0.0),
        "delta_1+i": point_mass(1.0, 1.0),
        "delta_2": point_mass(2.0, 0.0),
        "lattice_gaussian": lattice_gaussian(0.5, 1.0, 8.0),
        "circles": RadialCircles(np.array([1.0, 2.0]), np.array([1.0, 0.5])),
        "gaussian_density": gaussian_density(1.0, 8.0),
        "symbol_one": lebesgue(8.0),
    }


def atomic_suite() -> dict:
    """Small atomic measures supported in |a| <= 2."""
    return {
        "delta_0": point_mass(0.0, 0.0),
        "delta_1": point_mass(1.0, 0.0),
        "delta_1+i": point_mass(1.0, 1.0),
        "delta_-2i": point_mass(0.0, -2.0, 0.5),
        "mixture": _mixture(),
    }


def _mixture():
    pos = np.array([0.3 + 0.2j, -1.0 + 0.5j, 1.5 - 1.0j, -0.5 - 1.5j, 2.0 + 0j])
    wts = np.array([1.0, 0.5, 2.0, 0.25, 1.5])
    return AtomicMeasure(pos, wts, {"type": "atomic", "name": "mixture"})


# ---------------------------------------------------------------------------
# selftest


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _check(name, fn) -> CheckResult:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crashing check is a failing check
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, bool(ok), detail, time.perf_counter() - t0)


def selftest_checks():
    from . import selftest_battery

    return selftest_battery.CHECKS


def run_selftest(names=None) -> list[CheckResult]:
    checks = selftest_checks()
    if names:
        checks = [(n, f) for n, f in checks if n in names]
    return [_check(n, f) for n, f in checks]
