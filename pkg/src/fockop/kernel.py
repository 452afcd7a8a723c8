"""Reproducing kernel of the weighted Fock space, fractional integration and Taylor splits.

For n = 1 and u = z * conj(w) the kernel is

    K^alpha(z, w) = sum_{k <= alpha/2} u^k / k!  +  sum_{k > alpha/2} u^k / Gamma(k + 1 - alpha/2)

where the first (head) sum is present only for alpha > 0.  The head/tail
boundary is k <= alpha/2 for the head everywhere in this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

numba.config.THREADING_LAYER = "workqueue"
from scipy.special import roots_jacobi

from .core_math import DomainError, QuadratureRule, SpaceParams, log_gamma

_MAX_TERMS = 200_000


@numba.njit(cache=True, parallel=True)
def _kernel_series(u, alpha, head_max, tol, max_terms, head_out, tail_out, terms_out):
    half = 0.5 * alpha
    kmin = max(half + 2.0, 10.0)
    for i in numba.prange(u.size):
        ui = u[i]
        au = abs(ui)
        k_floor = max(math.e * au, kmin)
        head = 0j
        tail = 0j
        # head: u^k / k!
        term = 1.0 + 0j
        k = 0
        while k <= head_max:
            if k > 0:
                term = term * ui * (1.0 / k)
            head += term
            k += 1
        # first tail term in log domain
        k0 = head_max + 1
        if au == 0.0:
            term = (1.0 + 0j) / math.gamma(k0 + 1 - half) if k0 == 0 else 0j
        else:
            mag = math.exp(k0 * math.log(au) - math.lgamma(k0 + 1 - half))
            ang = k0 * math.atan2(ui.imag, ui.real)
            term = mag * (math.cos(ang) + 1j * math.sin(ang))
        tail += term
        k = k0
        while True:
            s = abs(head + tail)
            if k > k_floor and abs(term) <= tol * s:
                break
            if k - k0 > max_terms:
                break
            k += 1
            term = term * ui * (1.0 / (k - half))
            tail += term
        head_out[i] = head
        tail_out[i] = tail
        terms_out[i] = k + 1


def set_threads(n: int | None):
    """Set the worker count for data-parallel kernel sweeps (None: all cores)."""
    n = numba.config.NUMBA_NUM_THREADS if n is None else max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)


def conj_product(z, w) -> np.ndarray:
    """z * conj(w), formed so that swapping z and w yields the exact conjugate."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    re = z.real * w.real + z.imag * w.imag
    im = z.imag * w.real - z.real * w.imag
    return re + 1j * im


def kernel_parts(params: SpaceParams, z, w):
    """Head and tail parts of K^alpha(z, w) for broadcastable arrays z, w."""
    u = conj_product(z, w)
    shape = u.shape
    flat = np.ascontiguousarray(u.ravel())
    head = np.empty_like(flat)
    tail = np.empty_like(flat)
    terms = np.empty(flat.shape, dtype=np.int64)
    _kernel_series(flat, float(params.alpha), params.head_max, params.tolerances.series_rel_tol,
                   _MAX_TERMS, head, tail, terms)
    return head.reshape(shape), tail.reshape(shape), terms.reshape(shape)


def kernel_values(params: SpaceParams, z, w) -> np.ndarray:
    head, tail, _ = kernel_parts(params, z, w)
    return head + tail


@dataclass(frozen=True)
class KernelValue:
    value: complex
    head_part: complex
    tail_part: complex
    truncation_terms: int


def kernel_eval(params: SpaceParams, z: complex, w: complex) -> KernelValue:
    head, tail, terms = kernel_parts(params, np.array([z]), np.array([w]))
    h, t = complex(head[0]), complex(tail[0])
    return KernelValue(h + t, h, t, int(terms[0]))


def kernel_diagonal(params: SpaceParams, z) -> np.ndarray | float:
    """K^alpha(z, z) as a positive real (array in, array out)."""
    za = np.asarray(z, dtype=complex)
    r2 = np.abs(za) ** 2 + 0j
    head, tail, _ = kernel_parts(params, r2, np.ones_like(r2))
    val = (head + tail).real
    return float(val) if np.ndim(z) == 0 else val


def normalized_kernel(params: SpaceParams, z, w):
    """k^alpha_z(w) = K^alpha(w, z) / sqrt(K^alpha(z, z))."""
    return kernel_values(params, w, z) / np.sqrt(kernel_diagonal(params, z))


def comparison_E(z, w):
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.exp(0.5 * np.abs(z) ** 2 + 0.5 * np.abs(w) ** 2 - 0.125 * np.abs(z - w) ** 2)


class KernelSection:
    """The function w -> K^alpha(w, z) for a fixed z, evaluated by parts."""

    def __init__(self, params: SpaceParams, z: complex):
        self.params = params
        self.z = complex(z)

    def parts(self, w):
        head, tail, _ = kernel_parts(self.params, w, self.z)
        return head, tail

    def __call__(self, w):
        h, t = self.parts(w)
        return h + t


# ---------------------------------------------------------------------------
# polynomials and fractional integration


class EntirePoly:
    """Finite Taylor series sum_k c_k z^k in one variable.

    Coefficients are stored canonically: trailing zeros are stripped, so the
    zero polynomial has an empty coefficient array.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = np.array(coeffs, dtype=complex).ravel()
        nz = np.flatnonzero(c)
        self.coeffs = c[: nz[-1] + 1] if nz.size else c[:0]
        self.coeffs.setflags(write=False)

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0):
        coeffs = np.zeros(k + 1, dtype=complex)
        coeffs[k] = c
        return cls(coeffs)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out

    def __add__(self, other):
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n, dtype=complex)
        a[: self.coeffs.size] += self.coeffs
        a[: other.coeffs.size] += other.coeffs
        return EntirePoly(a)

    def __sub__(self, other):
        return self + EntirePoly(-other.coeffs)

    def __mul__(self, other):
        if isinstance(other, EntirePoly):
            if not self.coeffs.size or not other.coeffs.size:
                return EntirePoly()
            return EntirePoly(np.convolve(self.coeffs, other.coeffs))
        return EntirePoly(self.coeffs * other)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, EntirePoly) and np.array_equal(self.coeffs, other.coeffs)

    def __repr__(self):
        return f"EntirePoly({self.coeffs.tolist()!r})"

    def support(self) -> list[int]:
        return np.flatnonzero(self.coeffs).tolist()

    def parts(self, w, params: SpaceParams):
        """Head and tail values at w; the head is empty when alpha <= 0."""
        if params.alpha <= 0:
            return np.zeros(np.shape(w), dtype=complex), self(w)
        head, tail = taylor_split(self, params.split_threshold)
        return head(w), tail(w)


def taylor_split(f: EntirePoly, s: float) -> tuple[EntirePoly, EntirePoly]:
    """Split f into degrees k <= s (head) and k > s (tail)."""
    k = np.arange(f.coeffs.size)
    head = np.where(k <= s, f.coeffs, 0)
    tail = np.where(k > s, f.coeffs, 0)
    return EntirePoly(head), EntirePoly(tail)


def frac_coeff(s: float, k: int, n: int = 1) -> float:
    """Gamma(n + k) / Gamma(n + s + k), the I^s multiplier on degree-k terms."""
    if s < 0 and k <= abs(s):
        raise DomainError(f"I^s with s={s} is defined only for degrees k > |s| (got k={k})")
    return math.exp(log_gamma(n + k) - log_gamma(n + s + k))


def frac_integral_series(f: EntirePoly, s: float, n: int = 1) -> EntirePoly:
    out = np.zeros(f.coeffs.size, dtype=complex)
    for k, c in enumerate(f.coeffs):
        if s < 0 and k <= abs(s):
            continue
        out[k] = c * frac_coeff(s, k, n)
    return EntirePoly(out)


def frac_integral_quadrature(f, s: float, z: complex, n: int = 1, nodes: int = 64) -> complex:
    """(1/Gamma(s)) int_0^1 t^(n-1) (1-t)^(s-1) f(t z) dt via Gauss-Jacobi nodes.

    ``f`` is any callable on complex arrays (an EntirePoly works).
    """
    if not s > 0:
        raise DomainError("the integral form of I^s is used only for s > 0")
    x, wx = roots_jacobi(nodes, s - 1.0, n - 1.0)
    t = 0.5 * (1.0 + x)
    scale = 0.5 ** (s + n - 1.0)
    vals = np.asarray(f(t * complex(z)), dtype=complex)
    return complex(scale * np.sum(wx * vals) / math.gamma(s))


# ---------------------------------------------------------------------------
# the <.,.>_alpha inner product by quadrature


def inner_product(params: SpaceParams, f, g, rule: QuadratureRule) -> complex:
    """<f, g>_alpha over the nodes of ``rule`` (centred at the origin).

    ``f`` and ``g`` expose ``parts(w, params)`` or ``parts(w)`` returning the
    Taylor head and tail values at the nodes.
    """
    w = rule.points()
    fh, ft = _parts(f, w, params)
    gh, gt = _parts(g, w, params)
    r = np.abs(w)
    gauss = np.exp(-(r**2))
    wts = rule.weights()
    tail_weight = np.zeros_like(r)
    pos = r > 0
    tail_weight[pos] = r[pos] ** (-params.alpha)
    total = np.sum(wts * gauss * (ft * np.conj(gt)) * tail_weight)
    if params.alpha > 0:
        total += np.sum(wts * gauss * fh * np.conj(gh))
    return complex(total)


def _parts(f, w, params):
    if isinstance(f, EntirePoly):
        return f.parts(w, params)
    return f.parts(w)
