"""Scalar special functions on complex arguments.

Thin wrappers around scipy.special that enforce the domain contracts the
rest of the package relies on: finite inputs, explicit guards instead of
silent NaN/inf propagation, and an exactly conjugate-symmetric complex
error function.  Everything here accepts scalars or numpy arrays.
"""

from __future__ import annotations

import numpy as np
import scipy.special as _sp

__all__ = [
    "NumericalError",
    "DomainError",
    "OverflowSignal",
    "QuadratureError",
    "erf_c",
    "bessel",
    "log_gamma",
    "pochhammer",
    "double_factorial",
]


class NumericalError(ArithmeticError):
    """Base class for numerical failures that should abort a computation."""


class DomainError(NumericalError):
    """Argument outside the supported domain of a special function."""


class OverflowSignal(NumericalError):
    """Intermediate magnitude would exceed the representable range."""


class QuadratureError(NumericalError):
    """Quadrature failed to converge; carries the achieved error estimate."""

    def __init__(self, message: str, estimate: float = np.inf):
        super().__init__(message)
        self.estimate = estimate


def _check_finite(z, name: str):
    z = np.asarray(z)
    if not np.all(np.isfinite(z.real)) or (np.iscomplexobj(z) and not np.all(np.isfinite(z.imag))):
        raise DomainError(f"{name}: non-finite input")
    return z


def erf_c(z):
    """Error function continued to the complex plane.

    Evaluation is canonicalised to the closed upper half-plane and then
    conjugated, so ``erf_c(conj(z))`` is bitwise equal to
    ``conj(erf_c(z))``.  Arguments with |z| >= 30 are rejected: the
    intermediate exp(z^2) factors overflow double precision long before
    that, and no caller needs them.
    """
    z = _check_finite(z, "erf_c")
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 30.0):
        raise OverflowSignal("erf_c: |z| >= 30 would overflow exp(z^2) factors")
    lower = z.imag < 0.0
    zc = np.where(lower, np.conj(z), z)
    val = _sp.erf(zc)
    val = np.where(lower, np.conj(val), val)
    if val.ndim == 0:
        return complex(val)
    return val


def bessel(kind: str, nu: float, z):
    """Bessel function J_nu, I_nu or K_nu.

    J and I accept complex arguments with |z| <= 50; K is restricted to
    positive real arguments (the only place the package needs K is in
    weight evaluations at real radius).  Orders nu <= -1 are rejected.
    """
    if nu <= -1.0:
        raise DomainError(f"bessel: order nu={nu} <= -1 unsupported")
    z = _check_finite(z, "bessel")
    if kind == "K":
        zr = np.asarray(z, dtype=float) if not np.iscomplexobj(np.asarray(z)) else None
        if zr is None or np.any(zr <= 0.0):
            raise DomainError("bessel: K_nu requires positive real argument")
        val = _sp.kv(nu, zr)
    elif kind in ("J", "I"):
        zc = np.asarray(z, dtype=complex)
        if np.any(np.abs(zc) > 50.0):
            raise OverflowSignal(f"bessel: |z| > 50 outside guarded range for {kind}_nu")
        fn = _sp.jv if kind == "J" else _sp.iv
        val = fn(nu, zc)
    else:
        raise DomainError(f"bessel: unknown kind {kind!r} (expected J, I or K)")
    if np.any(np.isnan(np.asarray(val))):
        raise NumericalError(f"bessel: NaN produced for kind={kind}, nu={nu}")
    if np.ndim(val) == 0:
        return complex(val) if kind in ("J", "I") else float(val)
    return val


def log_gamma(x):
    """log Gamma(x) for real x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("log_gamma: argument must be positive (pole or cut otherwise)")
    out = _sp.gammaln(x)
    return float(out) if out.ndim == 0 else out


def pochhammer(a: float, n: int):
    """Rising factorial (a)_n = Gamma(a+n)/Gamma(a)."""
    if n < 0 or n != int(n):
        raise DomainError("pochhammer: n must be a nonnegative integer")
    out = _sp.poch(a, int(n))
    if not np.isfinite(out):
        raise NumericalError(f"pochhammer({a}, {n}) not finite")
    return float(out)


def double_factorial(n: int) -> float:
    """n!! with the conventions (-1)!! = 0!! = 1.

    scipy's factorial2 returns 0 for n = -1, which breaks the sum
    coefficients that rely on the empty-product convention, so this is
    computed directly.
    """
    if n < -1 or n != int(n):
        raise DomainError("double_factorial: n must be an integer >= -1")
    n = int(n)
    out = 1.0
    while n > 1:
        out *= n
        n -= 2
    return out
