"""Scalar foundations: parameters, tolerances, log-gamma and polar quadrature.

Area measure convention: ``dv = (1/pi) dA`` on the complex plane, so that
``int exp(-|z|^2) dv(z) = 1``.  Every quadrature rule in this package carries
that factor in its weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class SingularWeightError(ValueError):
    """Raised when a radial weight |z|^-alpha is too singular to integrate."""


@dataclass(frozen=True)
class Tolerances:
    series_rel_tol: float = 1e-15
    quad_rel_tol: float = 1e-9
    report_ratio_cap: float = 50.0

    def __post_init__(self):
        for name in ("series_rel_tol", "quad_rel_tol", "report_ratio_cap"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class SpaceParams:
    """Weight exponent and dimension of the weighted Fock space.

    Only ``dim == 1`` is supported by the numerical routines; the field is
    kept so that configurations record the dimension explicitly.
    """

    alpha: float
    dim: int = 1
    tolerances: Tolerances = field(default=DEFAULT_TOLERANCES, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not math.isfinite(self.alpha):
            raise ValueError("alpha must be finite")

    @property
    def split_threshold(self) -> float:
        return self.alpha / 2

    @property
    def head_max(self) -> int:
        """Largest degree in the Taylor head (k <= alpha/2); -1 when empty."""
        if self.alpha <= 0:
            return -1
        return int(math.floor(self.alpha / 2))

    def require_dim_one(self):
        if self.dim != 1:
            raise DomainError("general-measure numerics are implemented for dim = 1 only")


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


@dataclass(frozen=True)
class QuadratureRule:
    """Product rule on the disc |z| <= r_max: radial nodes times a uniform angle grid.

    ``radial_weights`` include the polar Jacobian ``r``.  The full node
    weight is ``radial_weight * 2 / angular_count``, which is where the
    ``1/pi`` of ``dv`` meets the ``2*pi/M`` of the angular sum.
    """

    radii: np.ndarray
    radial_weights: np.ndarray
    angular_count: int
    r_max: float
    center: complex = 0j

    @property
    def radial_nodes(self):
        return list(zip(self.radii.tolist(), self.radial_weights.tolist()))

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.angular_count) / self.angular_count

    def points(self) -> np.ndarray:
        """Node positions, radius-major (shape ``n_radial * angular_count``)."""
        phase = np.exp(1j * self.angles)
        return (self.center + self.radii[:, None] * phase[None, :]).ravel()

    def weights(self) -> np.ndarray:
        w = self.radial_weights[:, None] * (2.0 / self.angular_count)
        return np.broadcast_to(w, (self.radii.size, self.angular_count)).ravel()

    def local_radii(self) -> np.ndarray:
        """Distance of every node from the rule's centre."""
        return np.repeat(self.radii, self.angular_count)

    def integrate(self, f, singular_power: float = 0.0) -> complex:
        """Integrate ``f(z) * |z - center|^(-singular_power)`` against dv.

        ``f`` is called once on the array of nodes.  Singular powers must be
        below 2 (integrable in two real dimensions).
        """
        if singular_power >= 2:
            raise SingularWeightError(
                "|z|^-alpha with alpha >= 2 is not integrable without a vanishing factor"
            )
        vals = np.asarray(f(self.points()))
        w = self.weights()
        if singular_power:
            w = w * self.local_radii() ** (-singular_power)
        return np.sum(vals * w)

    def shifted(self, center: complex) -> "QuadratureRule":
        return QuadratureRule(self.radii, self.radial_weights, self.angular_count, self.r_max, complex(center))


def _gauss_legendre(a: float, b: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def radial_nodes(r_max: float, n_radial: int, inner: float | None = None):
    """Radial nodes and weights for int_0^r_max g(r) r dr.

    The first segment [0, min(1, r_max)] uses r = u^2 so that integrands
    like r^(1 - alpha) with alpha < 2 are tamed near the origin.
    """
    inner = min(1.0, r_max) if inner is None else min(inner, r_max)
    if inner >= r_max:
        n_in, n_out = n_radial, 0
    else:
        n_in = max(4, n_radial // 4)
        n_out = n_radial - n_in
    u, wu = _gauss_legendre(0.0, math.sqrt(inner), n_in)
    r_in = u**2
    w_in = wu * 2 * u
    if n_out:
        r_out, w_out = _gauss_legendre(inner, r_max, n_out)
        r = np.concatenate([r_in, r_out])
        w = np.concatenate([w_in, w_out])
    else:
        r, w = r_in, w_in
    # dv = (1/pi) r dr dtheta; the angular sum later contributes (1/pi) * 2*pi/M.
    return r, w * r


def gaussian_polar_rule(r_max: float, n_radial: int, n_angular: int) -> QuadratureRule:
    """Polar product rule for integrals against dv over the disc |z| <= r_max."""
    if not r_max > 0:
        raise DomainError("r_max must be positive")
    if n_radial < 4 or n_angular < 4:
        raise DomainError("node counts must be >= 4")
    r, w = radial_nodes(r_max, n_radial)
    return QuadratureRule(r, w, int(n_angular), float(r_max))


def panel_polar_rule(r_max: float, panel_width: float, nodes_per_panel: int, n_angular: int,
                     center: complex = 0j) -> QuadratureRule:
    """Composite Gauss-Legendre rule with panel breakpoints at multiples of ``panel_width``.

    Used for piecewise-constant integrands (ball-mass profiles) where the
    breakpoints can be aligned with known discontinuities.
    """
    n_panels = max(1, int(math.ceil(r_max / panel_width - 1e-12)))
    edges = np.minimum(np.arange(n_panels + 1) * panel_width, r_max)
    rs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        x, w = _gauss_legendre(a, b, nodes_per_panel)
        rs.append(x)
        ws.append(w * x)
    return QuadratureRule(np.concatenate(rs), np.concatenate(ws), int(n_angular), float(r_max), complex(center))
