"""Matrix of the Toeplitz operator T^alpha_mu in the normalized monomial basis.

With e_k = z^k / sqrt(c_k) the entries are

    E[j, k] = <T e_k, e_j>_alpha = sum_m w_m e_k(a_m) conj(e_j(a_m)) exp(-|a_m|^2) |a_m|^-alpha

for weighted points (a_m, w_m).  For alpha > 0 the head indices (k <= alpha/2)
drop the |a|^-alpha factor and head/tail cross terms vanish, so the matrix
is block diagonal with exact zeros.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core_math import SpaceParams, log_gamma
from .kernel import kernel_diagonal
from .measure import Measure

DEFAULT_DEGREE = 32
EIG_CLAMP = 1e-10


class TrustRegionError(ValueError):
    """Point too far out for the truncated basis to represent k_z."""


@dataclass(frozen=True)
class BasisSpec:
    alpha: float
    degree: int
    log_constants: np.ndarray
    head_max: int

    @property
    def norm_constants(self) -> np.ndarray:
        return np.exp(self.log_constants)

    @property
    def size(self) -> int:
        return self.degree + 1

    def is_head(self) -> np.ndarray:
        return np.arange(self.size) <= self.head_max


def basis_constants(params: SpaceParams, D: int) -> BasisSpec:
    """c_k = <z^k, z^k>_alpha: k! on the head, Gamma(k + 1 - alpha/2) on the tail."""
    if D < 0:
        raise ValueError("degree cutoff must be >= 0")
    half = params.alpha / 2
    logc = np.array([log_gamma(k + 1) if k <= params.head_max else log_gamma(k + 1 - half)
                     for k in range(D + 1)])
    return BasisSpec(params.alpha, D, logc, params.head_max)


def basis_vectors(basis: BasisSpec, points, tail_weight: bool) -> np.ndarray:
    """Rows e_k(a) * exp(-|a|^2 / 2) * |a|^(-alpha/2) (the last factor only if tail_weight).

    Shape (len(points), D + 1).  Computed in the log domain; at a = 0 only
    degree 0 survives, and for a weighted tail it vanishes unless alpha <= 0
    makes the weight regular (alpha = 0) there.
    """
    a = np.asarray(points, dtype=complex).ravel()
    rho = np.abs(a)
    k = np.arange(basis.size)
    out = np.zeros((a.size, basis.size), dtype=complex)
    nz = rho > 0
    if np.any(nz):
        lr = np.log(rho[nz])
        logmag = k[None, :] * lr[:, None] - 0.5 * rho[nz, None] ** 2 - 0.5 * basis.log_constants[None, :]
        if tail_weight:
            logmag = logmag - 0.5 * basis.alpha * lr[:, None]
        phase = np.exp(1j * np.outer(np.angle(a[nz]), k))
        out[nz] = np.exp(logmag) * phase
    if np.any(~nz):
        # e_0(0) = 1 / sqrt(c_0); the weight |0|^-alpha is 1 at alpha = 0 and 0 for alpha < 0
        if not tail_weight or basis.alpha == 0:
            out[~nz, 0] = math.exp(-0.5 * basis.log_constants[0])
    return out


@dataclass
class ToeplitzMatrix:
    basis: BasisSpec
    entries: np.ndarray
    source: dict = field(default_factory=dict)
    factor: np.ndarray | None = field(default=None, repr=False)  # F with entries = F^H F
    _eigs: np.ndarray | None = field(default=None, repr=False)

    @property
    def degree(self) -> int:
        return self.basis.degree

    def eigenvalues(self) -> np.ndarray:
        """Descending eigenvalues; tiny negatives (>= -1e-10 * max) are clamped to 0.

        With the assembly factor the values are squared singular values of F,
        whose rounding floor is near eps^2 * max rather than eps * max; that
        keeps small-p Schatten sums free of round-off eigenvalues.
        """
        if self._eigs is None:
            n = self.basis.size
            if self.factor is not None:
                sv = np.linalg.svd(self.factor, compute_uv=False) if self.factor.size else np.zeros(0)
                ev = np.zeros(n)
                ev[: min(n, sv.size)] = sv[:n] ** 2
            else:
                ev = np.linalg.eigvalsh(self.entries)[::-1]
            top = max(ev[0], 0.0)
            ev = np.where((ev < 0) & (ev >= -EIG_CLAMP * top), 0.0, ev)
            self._eigs = ev
        return self._eigs

    def trace(self) -> float:
        return float(np.sum(np.diag(self.entries).real))

    def op_norm(self) -> float:
        return schatten_norm(self, math.inf)

    def to_json(self) -> str:
        doc = {
            "D": self.degree,
            "alpha": self.basis.alpha,
            "entries": {"re": self.entries.real.ravel().tolist(), "im": self.entries.imag.ravel().tolist()},
            "source": self.source,
        }
        return json.dumps(doc, sort_keys=True, indent=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "k", "re", "im"])
        n = self.basis.size
        for j in range(n):
            for k in range(n):
                v = self.entries[j, k]
                w.writerow([j, k, repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    def eigenvalues_csv(self) -> str:
        return eigenvalues_csv(self.eigenvalues())


def eigenvalues_csv(values) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "eigenvalue"])
    for i, v in enumerate(values):
        w.writerow([i, repr(float(v))])
    return buf.getvalue()


def assemble_points(params: SpaceParams, positions, weights, D: int = DEFAULT_DEGREE,
                    source: dict | None = None) -> ToeplitzMatrix:
    params.require_dim_one()
    basis = basis_constants(params, D)
    pos = np.asarray(positions, dtype=complex).ravel()
    wts = np.asarray(weights, dtype=float).ravel()
    keep = wts > 0
    pos, wts = pos[keep], wts[keep]
    n = basis.size
    entries = np.zeros((n, n), dtype=complex)
    factor = np.zeros((0, n), dtype=complex)
    if pos.size:
        root = np.sqrt(wts)[:, None]
        tail = ~basis.is_head() if params.alpha > 0 else np.ones(n, dtype=bool)
        vt = basis_vectors(basis, pos, tail_weight=True)[:, tail]
        entries[np.ix_(tail, tail)] = vt.conj().T @ (wts[:, None] * vt)
        factor = np.zeros((pos.size, n), dtype=complex)
        factor[:, tail] = root * vt
        if params.alpha > 0:
            head = ~tail
            vh = basis_vectors(basis, pos, tail_weight=False)[:, head]
            entries[np.ix_(head, head)] = vh.conj().T @ (wts[:, None] * vh)
            fh = np.zeros((pos.size, n), dtype=complex)
            fh[:, head] = root * vh
            factor = np.vstack([fh, factor])
        entries = 0.5 * (entries + entries.conj().T)
    return ToeplitzMatrix(basis, entries, source or {}, factor)


def assemble(params: SpaceParams, mu: Measure, D: int = DEFAULT_DEGREE, n_atoms: int = 512) -> ToeplitzMatrix:
    """Toeplitz matrix of mu truncated to degree D.

    Atoms are summed exactly; circles are split into ``n_atoms`` equal atoms
    (exact for D < n_atoms / 2); densities use their quadrature nodes.
    """
    pos, wts = mu.discretize(n_atoms=max(n_atoms, 4 * D + 4))
    return assemble_points(params, pos, wts, D, mu.describe())


def schatten_norm(T: ToeplitzMatrix, p: float) -> float:
    """(sum s_j^p)^(1/p); p = inf gives the largest eigenvalue."""
    if not p > 0:
        raise ValueError("p must be > 0")
    return schatten_from_eigs(T.eigenvalues(), p)


def schatten_from_eigs(eigs, p: float) -> float:
    s = np.abs(np.asarray(eigs, dtype=float))
    if s.size == 0:
        return 0.0
    if math.isinf(p):
        return float(np.max(s))
    top = np.max(s)
    if top == 0:
        return 0.0
    # scale out the top value to keep s^p in range for small p
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))


def trace_formula(params: SpaceParams, mu: Measure, D: int = DEFAULT_DEGREE, n_atoms: int = 512) -> float:
    """Integral of the degree-D truncated head/tail kernel diagonals against mu.

    Sums exp(2k ln|a| - |a|^2 - ln c_k [- alpha ln|a| on the tail]) per point,
    independently of the assembled matrix.
    """
    pos, wts = mu.discretize(n_atoms=max(n_atoms, 4 * D + 4))
    basis = basis_constants(params, D)
    rho = np.abs(pos)
    total = 0.0
    for k in range(D + 1):
        head = k <= params.head_max
        lc = basis.log_constants[k]
        for r, w in zip(rho, wts):
            if w == 0:
                continue
            if r == 0:
                if k == 0 and (head or params.alpha == 0):
                    total += w * math.exp(-lc)
                continue
            lg = 2 * k * math.log(r) - r * r - lc
            if not head:
                lg -= params.alpha * math.log(r)
            total += w * math.exp(lg)
    return total


def trust_radius(D: int) -> float:
    return math.sqrt(D / 2)


def kernel_coefficients(params: SpaceParams, basis: BasisSpec, z: complex) -> np.ndarray:
    """Coordinates x_k of k_z = sum_k x_k e_k: conj(z)^k / sqrt(c_k) / sqrt(K(z, z))."""
    z = complex(z)
    if abs(z) ** 2 > basis.degree / 2 * (1 + 1e-12):
        raise TrustRegionError(f"|z|^2 = {abs(z) ** 2:.6g} exceeds the trust region D/2 = {basis.degree / 2:g}")
    k = np.arange(basis.size)
    logk = 0.5 * math.log(kernel_diagonal(params, z))
    if z == 0:
        x = np.zeros(basis.size, dtype=complex)
        x[0] = math.exp(-0.5 * basis.log_constants[0] - logk)
        return x
    lz = math.log(abs(z))
    mag = np.exp(k * lz - 0.5 * basis.log_constants - logk)
    return mag * np.exp(-1j * k * np.angle(z))


def berezin_from_matrix(T: ToeplitzMatrix, params: SpaceParams, z) -> float:
    """<T k_z, k_z> from the truncated matrix; z must satisfy |z|^2 <= D/2.

    When the assembly factor F (entries = F^H F) is available the form is
    evaluated as ||F x||^2.  Forming x^H E x directly carries an absolute
    error near eps * ||T||, which swamps values far below the operator norm.
    """
    x = kernel_coefficients(params, T.basis, z)
    if T.factor is not None:
        y = T.factor @ x
        return float(np.real(np.vdot(y, y)))
    return float(np.real(np.vdot(x, T.entries @ x)))


def apply_to_kernel(T: ToeplitzMatrix, params: SpaceParams, z) -> np.ndarray:
    """Coordinates of T k_z in the orthonormal basis."""
    return T.entries @ kernel_coefficients(params, T.basis, z)
