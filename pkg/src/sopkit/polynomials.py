"""Monic orthogonal polynomial families and coefficient-vector helpers.

Polynomials are represented as numpy arrays of coefficients in ascending
order (``coeffs[k]`` multiplies ``z**k``), stored real for the families
here so that ``conj(p(z)) == p(conj(z))`` holds exactly in coefficient
arithmetic.  An :class:`OPSystem` carries the recurrence data
``z p_k = p_{k+1} + b_k p_k + c_k p_{k-1}`` together with the squared
norms h_k in the measure units of its ensemble.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .special import DomainError
from .ensembles import Ensemble

__all__ = [
    "OPSystem",
    "op_system",
    "op_eval",
    "op_coeffs",
    "op_norm",
    "classical_factor",
    "poly_eval",
    "poly_trim",
    "poly_add",
    "poly_mul",
    "poly_divide_linear",
    "poly_degree",
]

COEFF_DEGREE_CAP = 64


# ---------------------------------------------------------------------------
# coefficient-vector helpers
# ---------------------------------------------------------------------------


def poly_trim(coeffs) -> np.ndarray:
    """Drop trailing (near-)zero coefficients, keeping at least degree 0."""
    c = np.atleast_1d(np.asarray(coeffs))
    n = len(c)
    while n > 1 and c[n - 1] == 0:
        n -= 1
    return c[:n]


def poly_degree(coeffs) -> int:
    return len(poly_trim(coeffs)) - 1


def poly_eval(coeffs, z):
    """Horner evaluation, vectorized over ``z``."""
    c = np.asarray(coeffs)
    z = np.asarray(z)
    out = np.full(z.shape, c[-1], dtype=np.result_type(c.dtype, z.dtype, float))
    for k in range(len(c) - 2, -1, -1):
        out = out * z + c[k]
    return out if out.ndim else out[()]


def poly_add(a, b, *, scale=1.0) -> np.ndarray:
    """a + scale * b on coefficient vectors of any lengths."""
    a, b = np.atleast_1d(a), np.atleast_1d(b)
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=np.result_type(a.dtype, b.dtype, type(scale), float))
    out[: len(a)] += a
    out[: len(b)] += scale * b
    return out

def poly_mul(a, b) -> np.ndarray:
    return np.convolve(np.atleast_1d(a), np.atleast_1d(b))


def poly_divide_linear(coeffs, m):
    """Divide p(z) by (m - z) exactly; returns (quotient, remainder).

    p(z) = (m - z) q(z) + rem.  The synthetic division is exact in
    coefficient arithmetic; callers assert the remainder is negligible
    when p(m) = 0 by construction.
    """
    c = np.atleast_1d(np.asarray(coeffs))
    n = len(c) - 1
    dtype = np.result_type(c.dtype, type(m), float)
    t = np.zeros(max(n, 1), dtype=dtype)
    if n >= 1:
        t[n - 1] = c[n]
        for j in range(n - 1, 0, -1):
            t[j - 1] = c[j] + m * t[j]
        rem = c[0] + m * t[0]
    else:
        rem = c[0]
    return -t, rem


# ---------------------------------------------------------------------------
# orthogonal polynomial systems
# ---------------------------------------------------------------------------


@dataclass
class OPSystem:
    """Monic family with recurrence coefficients and planar norms."""

    family: str
    params: dict
    b: np.ndarray
    c: np.ndarray
    h: np.ndarray
    _coeff_cache: list = field(default_factory=list, repr=False)

    @property
    def n_max(self) -> int:
        return len(self.b) - 1

    def __post_init__(self):
        if np.any(self.c[1:] < 0):
            raise DomainError("OPSystem: recurrence coefficients c_k must be >= 0")
        if np.any(self.h <= 0):
            raise DomainError("OPSystem: norms h_k must be positive")


def op_system(ensemble: Ensemble, n_max: int) -> OPSystem:
    """Build the monic OP system of an ensemble up to degree ``n_max``."""
    b, c = ensemble.recurrence(n_max)
    h = np.array([ensemble.norm(n) for n in range(n_max + 1)])
    return OPSystem(family=ensemble.family, params=ensemble.params(),
                    b=np.asarray(b, dtype=float), c=np.asarray(c, dtype=float), h=h)


def op_eval(sys: OPSystem, n: int, z):
    """Value of the monic p_n at ``z`` via the upward recurrence."""
    if n < 0 or n > sys.n_max:
        raise DomainError(f"op_eval: degree {n} outside precomputed range 0..{sys.n_max}")
    z = np.asarray(z)
    prev = np.zeros(z.shape, dtype=complex)
    cur = np.ones(z.shape, dtype=complex)
    for k in range(n):
        prev, cur = cur, (z - sys.b[k]) * cur - sys.c[k] * prev
    return cur if cur.ndim else complex(cur[()])


def op_coeffs(sys: OPSystem, n: int) -> np.ndarray:
    """Monic coefficient vector of p_n (ascending), degree capped at 64."""
    if n > COEFF_DEGREE_CAP:
        raise DomainError(f"op_coeffs: degree {n} exceeds coefficient cap {COEFF_DEGREE_CAP}")
    if n > sys.n_max:
        raise DomainError(f"op_coeffs: degree {n} outside precomputed range 0..{sys.n_max}")
    cache = sys._coeff_cache
    while len(cache) <= n:
        k = len(cache) - 1
        if k < 0:
            cache.append(np.ones(1))
            continue
        shifted = np.concatenate(([0.0], cache[k]))
        nxt = poly_add(shifted, cache[k], scale=-sys.b[k])
        if k >= 1:
            nxt = poly_add(nxt, cache[k - 1], scale=-sys.c[k])
        cache.append(nxt)
    return cache[n].copy()


def op_norm(ensemble: Ensemble, n: int) -> float:
    """Closed-form squared norm of the monic p_n against the ensemble measure."""
    h = ensemble.norm(n)
    if h <= 0:
        raise DomainError(f"op_norm: nonpositive norm for {ensemble.name} at n={n}")
    return h


def classical_factor(sys: OPSystem, n: int):
    """(argument scale s, value scale v) with p_n(z) = v * Classical_n(s * z).

    Classical_n is H_n, L_n^(nu), C_n^(1+alpha) or V_n depending on the
    family; monomial families return the identity mapping.  Only valid
    when the family's scale parameter is nonzero (e.g. tau > 0).
    """
    if sys.family == "monomial":
        return 1.0, 1.0
    if sys.family == "hermite":
        t = sys.c[1] if sys.n_max >= 1 else 0.0
        if t <= 0:
            raise DomainError("hermite classical factor needs c_1 > 0")
        return 1.0 / np.sqrt(2.0 * t), (t / 2.0) ** (n / 2.0)
    if sys.family == "laguerre":
        nu = sys.params["nu"]
        t = sys.b[0] / (1.0 + nu)
        if t <= 0:
            raise DomainError("laguerre classical factor needs b_0 > 0")
        fact = float(np.prod(np.arange(1, n + 1, dtype=float)))
        return 1.0 / t, (-1.0) ** n * fact * t ** n
    if sys.family == "gegenbauer":
        alpha, a, b = sys.params["alpha"], sys.params["a"], sys.params["b"]
        cf = np.sqrt(a ** 2 - b ** 2)
        mu = 1.0 + alpha
        poch = float(np.prod(mu + np.arange(n, dtype=float))) if n else 1.0
        fact = float(np.prod(np.arange(1, n + 1, dtype=float)))
        return 1.0 / cf, (fact / poch) * (cf / 2.0) ** n
    if sys.family == "chebyshev3":
        a, b = sys.params["a"], sys.params["b"]
        cf = np.sqrt(a ** 2 - b ** 2)
        return 1.0 / cf, (cf / 2.0) ** n
    raise DomainError(f"classical_factor: unknown family {sys.family!r}")
