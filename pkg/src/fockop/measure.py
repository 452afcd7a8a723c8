"""Nonnegative measures on the plane: representations, file I/O, ball masses, lattices.

Every measure can be reduced to weighted points via ``discretize()``.  For
atoms that is exact; circles are split into equal atoms; densities are
replaced by their quadrature nodes.  All downstream integrals (Toeplitz
matrices, Berezin transforms) then become finite sums.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .core_math import QuadratureRule, SpaceParams, gaussian_polar_rule, radial_nodes
from .kernel import kernel_values


class MeasureFormatError(ValueError):
    """Malformed measure file; the message names the offending line or field."""


class NegativeMassError(MeasureFormatError):
    pass


class LatticeConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# measure types


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    positions: np.ndarray
    weights: np.ndarray
    source: dict = field(default_factory=dict)

    kind = "atomic"

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=complex).ravel()
        wts = np.asarray(self.weights, dtype=float).ravel()
        if pos.shape != wts.shape:
            raise MeasureFormatError("atom positions and weights differ in length")
        if np.any(wts < 0) or not np.all(np.isfinite(wts)):
            raise NegativeMassError("atom weights must be finite and nonnegative")
        if not np.all(np.isfinite(pos)):
            raise MeasureFormatError("atom positions must be finite")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "weights", wts)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def discretize(self, **_):
        return self.positions, self.weights

    def scaled(self, c: float) -> "AtomicMeasure":
        return AtomicMeasure(self.positions, self.weights * c, {**self.source, "scale": c})

    def describe(self) -> dict:
        return self.source or {"type": "atomic", "n_atoms": int(self.positions.size)}


@dataclass(frozen=True, eq=False)
class RadialCircles:
    radii: np.ndarray
    masses: np.ndarray
    source: dict = field(default_factory=dict)

    kind = "radial_circles"

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float).ravel()
        m = np.asarray(self.masses, dtype=float).ravel()
        if r.shape != m.shape:
            raise MeasureFormatError("circle radii and masses differ in length")
        if np.any(r < 0) or np.any(m < 0):
            raise NegativeMassError("circle radii and masses must be nonnegative")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "masses", m)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    def to_atomic(self, n_atoms: int) -> AtomicMeasure:
        theta = 2 * np.pi * np.arange(n_atoms) / n_atoms
        ring = np.exp(1j * theta)
        pos = (self.radii[:, None] * ring[None, :]).ravel()
        wts = np.repeat(self.masses / n_atoms, n_atoms)
        return AtomicMeasure(pos, wts, {"type": "radial_circles", "n_atoms": n_atoms})

    def discretize(self, n_atoms: int = 512, **_):
        return self.to_atomic(n_atoms).discretize()

    def scaled(self, c: float) -> "RadialCircles":
        return RadialCircles(self.radii, self.masses * c, {**self.source, "scale": c})

    def describe(self) -> dict:
        return self.source or {"type": "radial_circles",
                               "circles": [[float(r), float(m)] for r, m in zip(self.radii, self.masses)]}


@dataclass(frozen=True, eq=False)
class DensityMeasure:
    """Absolutely continuous measure d(mu) = density(w) dv(w) on |w| <= support_radius."""

    density: Callable[[np.ndarray], np.ndarray]
    support_radius: float
    n_radial: int = 64
    n_angular: int = 96
    source: dict = field(default_factory=dict)
    scale: float = 1.0

    kind = "density"

    def rule(self) -> QuadratureRule:
        return gaussian_polar_rule(self.support_radius, self.n_radial, self.n_angular)

    def evaluate(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        vals = np.asarray(self.density(w), dtype=float) * self.scale
        return np.where(np.abs(w) <= self.support_radius, vals, 0.0)

    def discretize(self, **_):
        rule = self.rule()
        pts = rule.points()
        return pts, self.evaluate(pts) * rule.weights()

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.discretize()[1]))

    def scaled(self, c: float) -> "DensityMeasure":
        return DensityMeasure(self.density, self.support_radius, self.n_radial, self.n_angular,
                              {**self.source, "scale": self.scale * c}, self.scale * c)

    def describe(self) -> dict:
        return self.source


@dataclass(frozen=True, eq=False)
class GridDensity(DensityMeasure):
    """Piecewise-constant density on polar cells.

    ``edges`` are the outer radii of the radial cells (cell i spans
    [edges[i-1], edges[i]) with edges[-1] = 0); ``values`` has shape
    (len(edges), angles_count).
    """

    edges: np.ndarray = None
    values: np.ndarray = None
    nodes_per_cell: int = 8

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=float).ravel()
        v = np.asarray(self.values, dtype=float)
        if e.size == 0 or np.any(np.diff(e) <= 0) or e[0] <= 0:
            raise MeasureFormatError("grid_density radii must be positive and strictly increasing")
        if v.ndim != 2 or v.shape[0] != e.size:
            raise MeasureFormatError("grid_density values must have one row per radius")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise NegativeMassError("grid_density values must be finite and nonnegative")
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "support_radius", float(e[-1]))
        object.__setattr__(self, "density", self._lookup)

    @property
    def angles_count(self) -> int:
        return self.values.shape[1]

    def _lookup(self, w):
        r = np.abs(w)
        i = np.minimum(np.searchsorted(self.edges, r, side="right"), self.edges.size - 1)
        m = self.angles_count
        j = np.floor(np.mod(np.angle(w), 2 * np.pi) / (2 * np.pi / m)).astype(int) % m
        return self.values[i, j]

    def discretize(self, **_):
        # nodes inside each polar cell; the angle grid is offset to cell midpoints
        m = self.angles_count
        n_ang = m * max(1, math.ceil(self.n_angular / m))
        theta = 2 * np.pi * (np.arange(n_ang) + 0.5) / n_ang
        lo = np.concatenate([[0.0], self.edges[:-1]])
        rs, ws = [], []
        for a, b in zip(lo, self.edges):
            if a == 0.0:
                r, w = radial_nodes(b, self.nodes_per_cell, inner=b)
            else:
                x, wx = np.polynomial.legendre.leggauss(self.nodes_per_cell)
                r = 0.5 * (b - a) * x + 0.5 * (b + a)
                w = 0.5 * (b - a) * wx * r
            rs.append(r)
            ws.append(w)
        r = np.concatenate(rs)
        w = np.concatenate(ws)
        pts = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
        qw = np.repeat(w * 2.0 / n_ang, n_ang)
        return pts, self.evaluate(pts) * qw

    def scaled(self, c: float) -> "GridDensity":
        return GridDensity(density=None, support_radius=0.0, n_radial=self.n_radial,
                           n_angular=self.n_angular, source={**self.source, "scale": self.scale * c},
                           scale=self.scale * c, edges=self.edges, values=self.values,
                           nodes_per_cell=self.nodes_per_cell)


Measure = AtomicMeasure | RadialCircles | DensityMeasure


# ---------------------------------------------------------------------------
# generators


def lattice_gaussian(s: float = 0.5, decay: float = 1.0, max_radius: float = 8.0) -> AtomicMeasure:
    pts = _lattice(s, max_radius)
    src = {"type": "generator", "name": "lattice_gaussian", "s": s, "decay": decay, "max_radius": max_radius}
    return AtomicMeasure(pts, np.exp(-decay * np.abs(pts) ** 2), src)


def lebesgue(support_radius: float = 8.0, n_radial: int = 64, n_angular: int = 96) -> DensityMeasure:
    """The symbol-1 density d(mu) = dv, truncated to a disc."""
    src = {"type": "generator", "name": "lebesgue", "support_radius": support_radius}
    return DensityMeasure(lambda w: np.ones(np.shape(w)), support_radius, n_radial, n_angular, src)


def gaussian_density(decay: float = 1.0, support_radius: float = 8.0, n_radial: int = 64,
                     n_angular: int = 96) -> DensityMeasure:
    """d(mu) = exp(-decay |w|^2) dv on |w| <= support_radius (decay may be negative)."""
    src = {"type": "generator", "name": "gaussian_density", "decay": decay, "support_radius": support_radius}
    return DensityMeasure(lambda w: np.exp(-decay * np.abs(w) ** 2), support_radius, n_radial, n_angular, src)


def point_mass(re: float = 0.0, im: float = 0.0, weight: float = 1.0) -> AtomicMeasure:
    src = {"type": "generator", "name": "point_mass", "re": re, "im": im, "weight": weight}
    return AtomicMeasure([complex(re, im)], [weight], src)


GENERATORS = {
    "lattice_gaussian": lattice_gaussian,
    "lebesgue": lebesgue,
    "gaussian_density": gaussian_density,
    "point_mass": point_mass,
}


def generate(name: str, **params) -> Measure:
    try:
        gen = GENERATORS[name]
    except KeyError:
        raise MeasureFormatError(f"unknown generator {name!r}; known: {sorted(GENERATORS)}") from None
    try:
        return gen(**params)
    except TypeError as exc:
        raise MeasureFormatError(f"generator {name!r}: {exc}") from None


# ---------------------------------------------------------------------------
# file format


def load_measure(source) -> Measure:
    """Read a measure from a path, or from JSON/CSV text.

    JSON: ``{"type": "atomic" | "radial_circles" | "grid_density" | "generator", ...}``.
    CSV (atomic only): header ``re,im,weight``.
    """
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                    and not source.lstrip().startswith(("{", "re"))):
        path = Path(source)
        text = path.read_text(encoding="utf-8")
        if path.suffix.lower() == ".csv":
            return _parse_csv(text)
    else:
        text = str(source)
    if text.lstrip().startswith("{"):
        return parse_measure_json(text)
    return _parse_csv(text)


def parse_measure_json(text: str) -> Measure:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeasureFormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return measure_from_dict(doc)


def measure_from_dict(doc: dict) -> Measure:
    if not isinstance(doc, dict) or "type" not in doc:
        raise MeasureFormatError("measure document needs a top-level 'type' field")
    kind = doc["type"]
    if kind == "atomic":
        atoms = _field(doc, "atoms", list)
        pos, wts = [], []
        for i, atom in enumerate(atoms):
            try:
                re_, im_, w = float(atom["re"]), float(atom["im"]), float(atom["weight"])
            except (KeyError, TypeError, ValueError):
                raise MeasureFormatError(f"atoms[{i}]: expected numeric 're', 'im', 'weight'") from None
            if w < 0:
                raise NegativeMassError(f"atoms[{i}].weight is negative ({w})")
            pos.append(complex(re_, im_))
            wts.append(w)
        return AtomicMeasure(np.array(pos, dtype=complex), np.array(wts, dtype=float), doc)
    if kind == "radial_circles":
        circles = _field(doc, "circles", list)
        radii, masses = [], []
        for i, c in enumerate(circles):
            try:
                r, m = float(c[0]), float(c[1])
            except (IndexError, TypeError, ValueError):
                raise MeasureFormatError(f"circles[{i}]: expected [radius, mass]") from None
            if r < 0 or m < 0:
                raise NegativeMassError(f"circles[{i}] has a negative radius or mass")
            radii.append(r)
            masses.append(m)
        return RadialCircles(np.array(radii), np.array(masses), doc)
    if kind == "grid_density":
        radii = np.asarray(_field(doc, "radii", list), dtype=float)
        m = int(_field(doc, "angles_count", int))
        vals = np.asarray(_field(doc, "values", list), dtype=float).ravel()
        if m < 1 or vals.size != radii.size * m:
            raise MeasureFormatError(
                f"grid_density: 'values' must hold len(radii) * angles_count = {radii.size * m} entries")
        if np.any(vals < 0):
            raise NegativeMassError(f"grid_density: values[{int(np.argmax(vals < 0))}] is negative")
        return GridDensity(density=None, support_radius=0.0, source=doc, edges=radii,
                           values=vals.reshape(radii.size, m))
    if kind == "generator":
        params = {k: v for k, v in doc.items() if k not in ("type", "name")}
        return generate(_field(doc, "name", str), **params)
    raise MeasureFormatError(f"unknown measure type {kind!r}")


def _field(doc, name, typ):
    if name not in doc:
        raise MeasureFormatError(f"missing field {name!r} for type {doc.get('type')!r}")
    val = doc[name]
    if typ is int and isinstance(val, float) and val.is_integer():
        val = int(val)
    if not isinstance(val, typ):
        raise MeasureFormatError(f"field {name!r} must be {typ.__name__}")
    return val


def _parse_csv(text: str) -> AtomicMeasure:
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader]
    if not rows or [h.strip() for h in rows[0]] != ["re", "im", "weight"]:
        raise MeasureFormatError("line 1: CSV header must be 're,im,weight'")
    pos, wts = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise MeasureFormatError(f"line {lineno}: expected 3 fields, got {len(row)}")
        try:
            re_, im_, w = (float(c) for c in row)
        except ValueError:
            raise MeasureFormatError(f"line {lineno}: non-numeric field") from None
        if w < 0:
            raise NegativeMassError(f"line {lineno}: negative weight {w}")
        pos.append(complex(re_, im_))
        wts.append(w)
    return AtomicMeasure(np.array(pos, dtype=complex), np.array(wts, dtype=float),
                         {"type": "atomic", "format": "csv", "n_atoms": len(pos)})


# ---------------------------------------------------------------------------
# ball masses and lattices


def ball_mass(mu: Measure, z, r: float):
    """mu(B(z, r)) for the open ball; z may be an array."""
    if not r > 0:
        raise ValueError("ball radius must be positive")
    z = np.asarray(z, dtype=complex)
    if isinstance(mu, AtomicMeasure):
        d = np.abs(z[..., None] - mu.positions)
        return np.sum(np.where(d < r, mu.weights, 0.0), axis=-1)
    if isinstance(mu, RadialCircles):
        return _circle_ball_mass(mu, z, r)
    if isinstance(mu, DensityMeasure):
        disc = gaussian_polar_rule(r, 24, 64)
        offs = disc.points()
        w = disc.weights()
        flat = z.ravel()
        out = np.array([np.sum(mu.evaluate(c + offs) * w) for c in flat])
        return out.reshape(z.shape) if z.ndim else float(out[0])
    raise TypeError(f"unsupported measure {type(mu).__name__}")


def _circle_ball_mass(mu: RadialCircles, z, r):
    az = np.abs(z)[..., None]
    rho = mu.radii
    with np.errstate(divide="ignore", invalid="ignore"):
        c = (rho**2 + az**2 - r**2) / (2 * rho * az)
        frac = np.where(c <= -1, 1.0, np.where(c >= 1, 0.0, np.arccos(np.clip(c, -1, 1)) / np.pi))
    degenerate = (rho == 0) | (az == 0)
    inside = (np.abs(rho - az) < r).astype(float)
    frac = np.where(degenerate, inside, frac)
    return np.sum(frac * mu.masses, axis=-1)


@dataclass(frozen=True)
class LatticeSpec:
    spacing: float
    ball_radius: float
    max_radius: float
    dim: int = 1

    def __post_init__(self):
        if not (self.spacing > 0 and self.ball_radius > 0):
            raise LatticeConfigError("lattice spacing and ball radius must be positive")
        bound = self.ball_radius * math.sqrt(2 / self.dim)
        if not self.spacing < bound:
            raise LatticeConfigError(
                f"spacing {self.spacing} violates the covering bound s < r*sqrt(2/n) = {bound:.6g}")


def _lattice(s: float, max_radius: float) -> np.ndarray:
    m = int(math.floor(max_radius / s + 1e-9))
    idx = np.arange(-m, m + 1)
    pts = (s * idx[None, :] + 1j * s * idx[:, None]).ravel()
    return pts[np.abs(pts) <= max_radius * (1 + 1e-12)]


def lattice_points(spec: LatticeSpec) -> np.ndarray:
    """Points of s*Z^2 in the closed disc of radius max_radius, row-major (imaginary part outer)."""
    return _lattice(spec.spacing, spec.max_radius)


def lattice_covers(spec: LatticeSpec, probe_step: float = 0.05) -> bool:
    """True if every probe point with |z| <= max_radius - r is within r of a lattice point."""
    pts = lattice_points(spec)
    reach = spec.max_radius - spec.ball_radius
    if reach <= 0:
        return True
    g = np.arange(-reach, reach + probe_step / 2, probe_step)
    probe = (g[None, :] + 1j * g[:, None]).ravel()
    probe = probe[np.abs(probe) <= reach]
    # distance to the nearest point of s*Z^2 (the lattice is unbounded inside the reach)
    s = spec.spacing
    near = s * np.round(probe.real / s) + 1j * s * np.round(probe.imag / s)
    ok = np.abs(probe - near) < spec.ball_radius
    return bool(np.all(ok)) and pts.size > 0


# ---------------------------------------------------------------------------
# condition (M)


@dataclass
class ConditionMReport:
    bounded: bool
    certified: bool
    samples: list
    note: str
    divergence_trend: bool = False


def condition_m_integrand_sum(params: SpaceParams, positions, weights, z) -> np.ndarray:
    """sum_m w_m |K(z, a_m)|^2 exp(-|a_m|^2) (1 + |a_m|)^-alpha for each z."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if positions.size == 0:
        return np.zeros(z.shape)
    k = kernel_values(params, z[:, None], positions[None, :])
    a = np.abs(positions)
    wt = weights * np.exp(-(a**2)) * (1 + a) ** (-params.alpha)
    return np.sum(np.abs(k) ** 2 * wt[None, :], axis=1)


def condition_m_check(params: SpaceParams, mu: Measure, probes=(0j, 1 + 0j, 1j)) -> ConditionMReport:
    probes = np.asarray(probes, dtype=complex)
    if isinstance(mu, (AtomicMeasure, RadialCircles)):
        pos, wts = mu.discretize()
        vals = condition_m_integrand_sum(params, pos, wts, probes)
        samples = [(complex(z), float(v)) for z, v in zip(probes, vals)]
        return ConditionMReport(True, True, samples, "finite measure: certified finite")
    pos, wts = mu.discretize()
    rad = np.abs(pos)
    R = mu.support_radius
    levels = (0.5 * R, 0.75 * R, R)
    per_level = []
    for lev in levels:
        keep = rad <= lev
        per_level.append(condition_m_integrand_sum(params, pos[keep], wts[keep], probes))
    full = per_level[-1]
    growth = (full - per_level[1]) / np.where(full > 0, full, 1.0)
    trend = bool(np.any(growth > 1e-6)) or not np.all(np.isfinite(full))
    samples = [(complex(z), float(v)) for z, v in zip(probes, full)]
    note = f"verified on support within B(0,{R:g})"
    if trend:
        note += "; partial integrals still growing with the support radius (divergence trend)"
    return ConditionMReport(not trend, False, samples, note, trend)
