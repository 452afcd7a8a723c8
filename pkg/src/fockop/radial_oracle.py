"""Closed-form spectrum of T^alpha_mu for rotation-invariant mu made of circles.

For mu = sum_i m_i * (uniform probability on |w| = rho_i) the monomials are
eigenvectors and

    lambda_k = sum_i m_i rho_i^(2k) exp(-rho_i^2) rho_i^(-alpha) / c_k

on tail degrees; head degrees (k <= alpha/2, alpha > 0) drop rho^-alpha and
use c_k = k!.  This module computes those directly from the moments and
compares them with the general matrix assembly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_math import SpaceParams, log_gamma
from .measure import RadialCircles
from .toeplitz import assemble_points, eigenvalues_csv, schatten_from_eigs


class AliasingError(RuntimeError):
    """Circle discretization too coarse: off-diagonal entries did not cancel."""


@dataclass(frozen=True)
class RadialEigenvalues:
    alpha: float
    lambdas: np.ndarray

    def schatten(self, p: float) -> float:
        return schatten_from_eigs(self.lambdas, p)

    def to_csv(self) -> str:
        return eigenvalues_csv(self.lambdas)


def _log_ck(params: SpaceParams, k: int) -> float:
    if k <= params.head_max:
        return log_gamma(k + 1)
    return log_gamma(k + 1 - params.alpha / 2)


def radial_eigenvalues(params: SpaceParams, circles: RadialCircles, D: int) -> RadialEigenvalues:
    lam = np.zeros(D + 1)
    for k in range(D + 1):
        head = k <= params.head_max
        lck = _log_ck(params, k)
        acc = 0.0
        for rho, m in zip(circles.radii, circles.masses):
            if m == 0:
                continue
            if rho == 0:
                # only degree 0 is nonzero at the origin; the weighted tail vanishes unless alpha = 0
                if k == 0 and (head or params.alpha == 0):
                    acc += m * math.exp(-lck)
                continue
            lg = 2 * k * math.log(rho) - rho * rho - lck
            if not head:
                lg -= params.alpha * math.log(rho)
            acc += m * math.exp(lg)
        lam[k] = acc
    return RadialEigenvalues(params.alpha, lam)


@dataclass
class OracleReport:
    max_offdiag: float
    max_diag_rel_error: float
    lambda_max: float
    aliasing: bool
    schatten_matrix: dict
    schatten_oracle: dict

    @property
    def passed(self) -> bool:
        return not self.aliasing and self.max_diag_rel_error <= 1e-10


def oracle_compare(params: SpaceParams, circles: RadialCircles, D: int, n_atoms: int,
                   ps=(0.5, 1.0, 2.0, math.inf), raise_on_alias: bool = True) -> OracleReport:
    """Assemble the n_atoms-point discretization and compare it with the closed form.

    The equal-weight ring reproduces circle moments exactly for |j - k| < n_atoms,
    so n_atoms >= 4D + 4 is the documented safe choice.
    """
    atoms = circles.to_atomic(n_atoms)
    T = assemble_points(params, atoms.positions, atoms.weights, D, atoms.describe())
    oracle = radial_eigenvalues(params, circles, D)
    lam_max = float(np.max(oracle.lambdas)) if oracle.lambdas.size else 0.0
    off = T.entries - np.diag(np.diag(T.entries))
    max_off = float(np.max(np.abs(off))) if off.size else 0.0
    diag = np.diag(T.entries).real
    scale = np.where(oracle.lambdas > 0, oracle.lambdas, 1.0)
    max_rel = float(np.max(np.abs(diag - oracle.lambdas) / scale))
    aliasing = max_off > 1e-10 * lam_max
    report = OracleReport(
        max_offdiag=max_off,
        max_diag_rel_error=max_rel,
        lambda_max=lam_max,
        aliasing=aliasing,
        schatten_matrix={p: schatten_from_eigs(T.eigenvalues(), p) for p in ps},
        schatten_oracle={p: oracle.schatten(p) for p in ps},
    )
    if aliasing and raise_on_alias:
        raise AliasingError(
            f"off-diagonal magnitude {max_off:.3g} exceeds 1e-10 * lambda_max with {n_atoms} atoms per circle")
    return report

