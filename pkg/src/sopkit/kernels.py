"""Pre-kernels, Pfaffian correlation functions, and their limiting forms.

The finite-N pre-kernel of a skew-orthogonal system,

    sigma_n(u, v) = sum_k [q_{2k+1}(u) q_{2k}(v) - q_{2k}(u) q_{2k+1}(v)] / r_k,

drives all k-point correlation functions through a 2k x 2k Pfaffian.  For
the Gaussian (Hermite-type) and Bessel (Laguerre-type) families the
large-N limits collapse to closed "Bergman-like" forms built from the
error function and from angular integrals of Bessel functions; both the
truncated series (via stable normalized recurrences, N <= 300) and the
closed forms are implemented so each can serve as the other's check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.special as sp

from .special import DomainError, NumericalError, QuadratureError, erf_c, log_gamma
from .quadrature import quad_planar
from .ensembles import Ensemble, EllipticGinibre, ChiralElliptic
from .polynomials import poly_degree, poly_eval
from .skew import SkewSystem, skew_product, pfaffian

__all__ = [
    "pre_kernel",
    "pre_kernel_coeff",
    "reproducing_check",
    "matrix_kernel",
    "corr_fn",
    "scaled_bessel",
    "mehler_kernel",
    "mehler_series",
    "laguerre_poisson",
    "laguerre_poisson_series",
    "hermite_normalized",
    "laguerre_normalized",
    "s_hermite_limit",
    "s_hermite_series",
    "g_hermite",
    "f_hermite",
    "s_laguerre_limit",
    "s_laguerre_series",
    "g_laguerre",
    "f_laguerre",
    "laguerre_angles",
    "unfold_hermite",
    "unfold_laguerre",
    "hermite_origin_kernel",
    "laguerre_origin_kernel",
    "hermite_cocycle",
    "laguerre_cocycle",
    "macroscopic_density",
    "KernelGrid",
]

logger = logging.getLogger("sopkit.kernels")

SERIES_CAP = 300


def _check_tau(tau: float):
    if not 0.0 <= tau < 1.0:
        raise DomainError(f"tau must lie in [0, 1), got {tau}")


# ---------------------------------------------------------------------------
# finite systems: sigma_n, matrix kernel, correlation functions
# ---------------------------------------------------------------------------


def pre_kernel(system: SkewSystem, n: int, u, v):
    """sigma_n(u, v); antisymmetry is exact by construction."""
    if n > system.n_pairs:
        raise DomainError("pre_kernel: n exceeds the stored system size")
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    total = np.zeros(np.broadcast(u, v).shape, dtype=complex)
    for k in range(n):
        qe_u = poly_eval(system.q[2 * k], u)
        qo_u = poly_eval(system.q[2 * k + 1], u)
        qe_v = poly_eval(system.q[2 * k], v)
        qo_v = poly_eval(system.q[2 * k + 1], v)
        total += (qo_u * qe_v - qe_u * qo_v) / system.r[k]
    return total if total.shape else complex(total)


def pre_kernel_coeff(system: SkewSystem, n: int) -> np.ndarray:
    """Coefficient matrix C with sigma_n(u, v) = sum C[a, b] u^a v^b."""
    if n > system.n_pairs:
        raise DomainError("pre_kernel_coeff: n exceeds the stored system size")
    size = 2 * n
    c = np.zeros((size, size))
    for k in range(n):
        qe = system.q[2 * k]
        qo = system.q[2 * k + 1]
        c[: len(qo), : len(qe)] += np.outer(qo, qe) / system.r[k]
        c[: len(qe), : len(qo)] -= np.outer(qe, qo) / system.r[k]
    return c


def reproducing_check(system: SkewSystem, n: int, f, v, tol: float = 1e-8):
    """Skew product <f, sigma_n(., v)>_s, which reproduces f(v) on P_{2n-1}.

    The second slot of the pre-kernel is frozen at ``v``; the resulting
    polynomial in the first slot generally has complex coefficients, so
    the underlying quadrature evaluates both factors at z and zbar
    literally rather than by conjugation.
    """
    f = np.atleast_1d(f)
    if poly_degree(f) > 2 * n - 1:
        raise DomainError("reproducing_check: deg f exceeds 2n-1, outside the "
                          "reproducing subspace")
    v = complex(v)
    sigma = np.zeros(2 * n, dtype=complex)
    for k in range(n):
        qe_v = poly_eval(system.q[2 * k], v)
        qo_v = poly_eval(system.q[2 * k + 1], v)
        sigma[: len(system.q[2 * k + 1])] += system.q[2 * k + 1] * (qe_v / system.r[k])
        sigma[: len(system.q[2 * k])] -= system.q[2 * k] * (qo_v / system.r[k])
    return skew_product(f, sigma, system.ensemble, tol=tol)


def matrix_kernel(system: SkewSystem, z, u) -> np.ndarray:
    """2x2 kernel block [[s(z,u), s(z,ub)], [s(zb,u), s(zb,ub)]]*sqrt(w w)."""
    z = complex(z)
    u = complex(u)
    n = system.n_pairs
    amp = np.sqrt(system.ensemble.weight(z) * system.ensemble.weight(u))
    return amp * np.array([
        [pre_kernel(system, n, z, u), pre_kernel(system, n, z, np.conj(u))],
        [pre_kernel(system, n, np.conj(z), u),
         pre_kernel(system, n, np.conj(z), np.conj(u))],
    ])


def corr_fn(system: SkewSystem, points) -> float:
    """k-point correlation R_{N,k} at the given complex points.

    Pfaffian of the 2k x 2k pre-kernel matrix (rows ordered z1, z1bar,
    z2, z2bar, ...) times prod_i (zbar_i - z_i) and the weights; the
    weights are factored out of the Pfaffian for numerical range.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    k = len(pts)
    both = np.empty(2 * k, dtype=complex)
    both[0::2] = pts
    both[1::2] = np.conj(pts)
    n = system.n_pairs
    vals = system.eval_all(both)  # (2N, 2k)
    mat = np.zeros((2 * k, 2 * k), dtype=complex)
    for j in range(n):
        qe = vals[2 * j]
        qo = vals[2 * j + 1]
        mat += (np.outer(qo, qe) - np.outer(qe, qo)) / system.r[j]
    pf = pfaffian(mat)
    w = np.array([system.ensemble.weight(p) for p in pts], dtype=float)
    val = pf * np.prod(w) * np.prod(np.conj(pts) - pts)
    scale = 1.0 + abs(val)
    if abs(val.imag) > 1e-6 * scale:
        raise NumericalError(f"corr_fn: non-real correlation value {val!r}")
    return float(val.real)


def corr_density(system: SkewSystem, zs) -> np.ndarray:
    """One-point correlation on an array of points.

    Same value as ``corr_fn(system, [z])`` at each entry: the 2x2
    Pfaffian collapses to sigma_N(z, zbar) (zbar - z) w(z), which
    vectorizes over the whole grid at once.
    """
    zs = np.asarray(zs, dtype=complex)
    flat = zs.ravel()
    sig = pre_kernel(system, system.n_pairs, flat, np.conj(flat))
    w = np.array([system.ensemble.weight(complex(p)) for p in flat], dtype=float)
    vals = np.atleast_1d(sig) * w * (np.conj(flat) - flat)
    if np.any(np.abs(vals.imag) > 1e-6 * (1.0 + np.abs(vals))):
        raise NumericalError("corr_density: non-real correlation value")
    return vals.real.reshape(zs.shape)


# ---------------------------------------------------------------------------
# normalized recurrence evaluations (stable up to n ~ 600)
# ---------------------------------------------------------------------------


def hermite_normalized(tau: float, z, n_max: int) -> np.ndarray:
    """s_n(z) for n = 0..n_max-1 with sum_n s_n(z) s_n(w) the Gaussian
    reproducing series; s_n is the monic Gaussian-family polynomial over
    sqrt(n!).  Smooth at tau = 0 where s_n(z) = z^n / sqrt(n!).
    """
    _check_tau(tau)
    z = np.asarray(z, dtype=complex)
    out = np.empty((n_max,) + z.shape, dtype=complex)
    out[0] = 1.0
    if n_max > 1:
        out[1] = z
    for n in range(1, n_max - 1):
        out[n + 1] = (z * out[n] / np.sqrt(n + 1.0)
                      - tau * np.sqrt(n / (n + 1.0)) * out[n - 1])
    return out


def laguerre_normalized(tau: float, nu: float, z, n_max: int) -> np.ndarray:
    """t_n(z), the monic Bessel-family polynomial over sqrt(n! (nu+1)_n)."""
    _check_tau(tau)
    if nu <= -1:
        raise DomainError("laguerre_normalized: nu must exceed -1")
    z = np.asarray(z, dtype=complex)
    out = np.empty((n_max,) + z.shape, dtype=complex)
    out[0] = 1.0
    if n_max > 1:
        out[1] = (z - tau * (1.0 + nu)) / np.sqrt(1.0 + nu)
    for n in range(1, n_max - 1):
        out[n + 1] = ((z - tau * (2 * n + 1 + nu)) * out[n]
                      - tau ** 2 * np.sqrt(n * (n + nu)) * out[n - 1]
                      ) / np.sqrt((n + 1.0) * (n + 1.0 + nu))
    return out


# ---------------------------------------------------------------------------
# Bergman reproducing kernels (Gaussian and Bessel weights)
# ---------------------------------------------------------------------------


def mehler_kernel(tau: float, zeta, eta):
    """Closed Gaussian reproducing kernel K_tau(zeta, eta); eta enters
    conjugated."""
    _check_tau(tau)
    zeta = np.asarray(zeta, dtype=complex)
    hb = np.conj(np.asarray(eta, dtype=complex))
    om = 1.0 - tau ** 2
    val = np.exp((zeta * hb - 0.5 * tau * (zeta ** 2 + hb ** 2)) / om) / np.sqrt(om)
    return val if val.shape else complex(val)


def mehler_series(tau: float, zeta, eta, n_terms: int = 200):
    """Partial sum sum_{n<N} s_n(zeta) s_n(conj(eta))."""
    if n_terms > 2 * SERIES_CAP:
        raise DomainError("mehler_series: n_terms exceeds the stability cap")
    s_z = hermite_normalized(tau, zeta, n_terms)
    s_h = hermite_normalized(tau, np.conj(np.asarray(eta, dtype=complex)), n_terms)
    val = np.sum(s_z * s_h, axis=0)
    return val if val.shape else complex(val)


def laguerre_poisson(tau: float, nu: float, zeta, eta):
    """Closed Bessel-weight reproducing kernel; eta enters conjugated."""
    _check_tau(tau)
    if nu <= -1:
        raise DomainError("laguerre_poisson: nu must exceed -1")
    zeta = np.asarray(zeta, dtype=complex)
    hb = np.conj(np.asarray(eta, dtype=complex))
    om = 1.0 - tau ** 2
    val = (sp.gamma(nu + 1.0) / om * np.exp(-tau * (zeta + hb) / om)
           * scaled_bessel("I", nu, zeta * hb, 1.0 / om))
    return val if np.asarray(val).shape else complex(val)


def laguerre_poisson_series(tau: float, nu: float, zeta, eta, n_terms: int = 200):
    """Partial sum sum_{n<N} t_n(zeta) t_n(conj(eta))."""
    if n_terms > 2 * SERIES_CAP:
        raise DomainError("laguerre_poisson_series: n_terms exceeds the stability cap")
    t_z = laguerre_normalized(tau, nu, zeta, n_terms)
    t_h = laguerre_normalized(tau, nu, np.conj(np.asarray(eta, dtype=complex)), n_terms)
    val = np.sum(t_z * t_h, axis=0)
    return val if val.shape else complex(val)


# ---------------------------------------------------------------------------
# entire Bessel combination x^{-nu/2} [IJ]_nu(2 sqrt(x) s)
# ---------------------------------------------------------------------------


def scaled_bessel(kind: str, nu: float, x, s):
    """x^{-nu/2} I_nu(2 sqrt(x) s) (or J), as one entire function of x.

    The combination has no branch cut: its power series in x is
        s^nu sum_n (+-x)^n s^{2n} / (n! Gamma(n + nu + 1)).
    The series is used for moderate |x| s^2 and the library Bessel
    (with mutually consistent principal branches) beyond.
    """
    if kind not in ("I", "J"):
        raise DomainError(f"scaled_bessel: kind must be 'I' or 'J', got {kind!r}")
    if nu <= -1:
        raise DomainError("scaled_bessel: nu must exceed -1")
    x = np.asarray(x, dtype=complex)
    s = np.asarray(s, dtype=float)
    sign = 1.0 if kind == "I" else -1.0
    arg = np.abs(x) * s ** 2
    out = np.empty(np.broadcast(x, s).shape, dtype=complex)
    small = arg <= 25.0
    if np.any(small):
        xs = np.broadcast_to(x, out.shape)[small]
        ss = np.broadcast_to(s, out.shape)[small]
        n = np.arange(64)
        lg = log_gamma(n + nu + 1.0) + log_gamma(n + 1.0)
        terms = ((sign * xs[..., None]) ** n * ss[..., None] ** (2 * n)
                 * np.exp(-lg))
        out[small] = ss ** nu * np.sum(terms, axis=-1)
    if np.any(~small):
        xs = np.broadcast_to(x, out.shape)[~small]
        ss = np.broadcast_to(s, out.shape)[~small]
        root = np.sqrt(xs)  # principal; matches exp(-nu*log(root)) below
        fn = sp.iv if kind == "I" else sp.jv
        vals = fn(nu, 2.0 * root * ss) * np.exp(-nu * np.log(root))
        out[~small] = vals
    return out if out.shape else complex(out)


_JACOBI_CACHE: dict = {}


def _bessel_angle_integral(fn, nu: float, cutoff: float = np.pi / 2.0,
                           rtol: float = 1e-12):
    """integral_0^cutoff (sin t)^nu * fn(cos t, sin^2 t) dt, spectrally.

    Substituting x = cos t turns the integral into
        int_{cos cutoff}^1 (1-x)^a (1+x)^a fn(x, 1-x^2) dx,  a = (nu-1)/2,
    so a Gauss-Jacobi rule with weight (1-x)^a absorbs the endpoint factor
    exactly and plain Gauss-Legendre's algebraic stalling at fractional nu
    never appears.  fn must be vectorized over the node array.
    """
    a = (nu - 1.0) / 2.0
    x0 = np.cos(cutoff)
    half = (1.0 - x0) / 2.0
    prev = None
    n = 48
    for _ in range(6):
        key = (n, round(a, 12))
        if key not in _JACOBI_CACHE:
            _JACOBI_CACHE[key] = sp.roots_jacobi(n, a, 0.0)
        nodes, weights = _JACOBI_CACHE[key]
        x = 1.0 - half * (1.0 - nodes)
        terms = weights * (1.0 + x) ** a * fn(x, 1.0 - x ** 2)
        est = half ** (a + 1.0) * np.sum(terms)
        # a cancelled sum cannot stabilize below roundoff of its term
        # magnitudes, so convergence is judged against that scale too
        floor = half ** (a + 1.0) * float(np.sum(np.abs(terms)))
        if prev is not None and \
                abs(est - prev) <= rtol * max(1.0 + abs(est), floor):
            return est
        prev = est
        n *= 2
    raise QuadratureError("angular Bessel integral did not stabilize",
                          estimate=prev)


# ---------------------------------------------------------------------------
# Gaussian-family (Hermite) limiting kernel
# ---------------------------------------------------------------------------


def s_hermite_limit(tau: float, z, u):
    """Limiting antisymmetric kernel: Gaussian prefactor times erf."""
    _check_tau(tau)
    z = np.asarray(z, dtype=complex)
    u = np.asarray(u, dtype=complex)
    pref = np.sqrt(np.pi) / (np.sqrt(2.0) * (1.0 + tau))
    val = (pref * np.exp((z ** 2 + u ** 2) / (2.0 * (1.0 + tau)))
           * erf_c((z - u) / np.sqrt(2.0 * (1.0 - tau ** 2))))
    return val if val.shape else complex(val)


def _double_factorial_ratio_weights(n_pairs: int):
    """a_k = sqrt((2k)!!/(2k+1)!!) and b_l = sqrt((2l-1)!!/(2l)!!)."""
    a = np.empty(n_pairs)
    b = np.empty(n_pairs)
    a[0] = 1.0
    b[0] = 1.0
    for k in range(1, n_pairs):
        a[k] = a[k - 1] * np.sqrt(2.0 * k / (2.0 * k + 1.0))
        b[k] = b[k - 1] * np.sqrt((2.0 * k - 1.0) / (2.0 * k))
    return a, b


def s_hermite_series(tau: float, z, u, n_pairs: int):
    """Truncated double series of the Gaussian limiting kernel.

    Equals the finite-N pre-kernel of the elliptic Gaussian ensemble in
    its r_0-normalized units; converges uniformly on compacts.
    """
    if n_pairs > SERIES_CAP:
        raise DomainError("s_hermite_series: N exceeds the stability cap")
    _check_tau(tau)
    z = np.asarray(z, dtype=complex)
    u = np.asarray(u, dtype=complex)
    s_z = hermite_normalized(tau, z, 2 * n_pairs)
    s_u = hermite_normalized(tau, u, 2 * n_pairs)
    a, b = _double_factorial_ratio_weights(n_pairs)
    even_z = np.cumsum(b[:, None] * s_z[0::2].reshape(n_pairs, -1), axis=0)
    even_u = np.cumsum(b[:, None] * s_u[0::2].reshape(n_pairs, -1), axis=0)
    odd_z = s_z[1::2].reshape(n_pairs, -1)
    odd_u = s_u[1::2].reshape(n_pairs, -1)
    val = np.sum(a[:, None] * (odd_z * even_u - odd_u * even_z), axis=0)
    val = val.reshape(np.broadcast(z, u).shape)
    return val if val.shape else complex(val)


def g_hermite(u, v):
    """Building block of the tau=0 Gaussian kernel: odd/even split sum."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    val = (0.5 * np.sqrt(np.pi / 2.0) * np.exp(0.5 * (u ** 2 + v ** 2))
           * (erf_c((u - v) / np.sqrt(2.0)) + erf_c((u + v) / np.sqrt(2.0))))
    return val if val.shape else complex(val)


def _a_mix(phi1: float, phi2: float) -> float:
    return np.sqrt(phi1 * (1.0 + phi2) / ((1.0 + phi1) * (1.0 - phi1 * phi2)))


def f_hermite(varphi: float, phi: float, zeta, eta):
    """Closed form of the two-parameter Gaussian double sum."""
    _check_tau(varphi)
    _check_tau(phi)
    zeta = np.asarray(zeta, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    pref = np.sqrt(np.pi) / (2.0 * np.sqrt(2.0 * (1.0 + varphi) * (1.0 + phi)))
    gauss = np.exp(varphi / (1.0 + varphi) * zeta ** 2
                   + phi / (1.0 + phi) * eta ** 2)
    x = _a_mix(varphi, phi) * zeta
    y = _a_mix(phi, varphi) * eta
    val = pref * gauss * (erf_c(x - y) + erf_c(x + y))
    return val if val.shape else complex(val)


# ---------------------------------------------------------------------------
# Bessel-family (Laguerre) limiting kernel
# ---------------------------------------------------------------------------


def s_laguerre_limit(tau: float, nu: float, z, u):
    """Limiting antisymmetric kernel: angular integral of sinh x Bessel."""
    _check_tau(tau)
    if nu <= -1:
        raise DomainError("s_laguerre_limit: nu must exceed -1")
    z = complex(z)
    u = complex(u)
    om = 1.0 - tau ** 2

    def fn(x, s2):
        return (np.sinh((z - u) * x / om)
                * scaled_bessel("I", nu, z * u * s2 / om ** 2, 1.0))

    integral = om ** -nu * _bessel_angle_integral(fn, nu)
    return sp.gamma(nu + 2.0) / om * np.exp(-tau * (z + u) / om) * integral


def _laguerre_series_weights(nu: float, n_pairs: int):
    """Log-space weights alpha_k, beta_l of the Bessel-family double sum."""
    k = np.arange(n_pairs, dtype=float)
    ln_h = lambda n: log_gamma(n + 1.0) + log_gamma(n + nu + 1.0) - log_gamma(nu + 1.0)
    ln_alpha = (0.5 * ln_h(2 * k + 1) + 0.5 * np.log(np.pi) + log_gamma(nu + 2.0)
                + k * np.log(2.0) + log_gamma(k + 1.0)
                - (k + nu + 1.0) * np.log(2.0) - log_gamma(k + nu / 2.0 + 1.5)
                - log_gamma(2 * k + 2.0))
    ln_beta = (0.5 * ln_h(2 * k) - 2.0 * k * np.log(2.0)
               - log_gamma(k + 1.0) - log_gamma(k + nu / 2.0 + 1.0))
    return np.exp(ln_alpha), np.exp(ln_beta)


def s_laguerre_series(tau: float, nu: float, z, u, n_pairs: int):
    """Truncated double series of the Bessel limiting kernel."""
    if n_pairs > SERIES_CAP:
        raise DomainError("s_laguerre_series: N exceeds the stability cap")
    _check_tau(tau)
    z = np.asarray(z, dtype=complex)
    u = np.asarray(u, dtype=complex)
    t_z = laguerre_normalized(tau, nu, z, 2 * n_pairs)
    t_u = laguerre_normalized(tau, nu, u, 2 * n_pairs)
    alpha, beta = _laguerre_series_weights(nu, n_pairs)
    even_z = np.cumsum(beta[:, None] * t_z[0::2].reshape(n_pairs, -1), axis=0)
    even_u = np.cumsum(beta[:, None] * t_u[0::2].reshape(n_pairs, -1), axis=0)
    odd_z = t_z[1::2].reshape(n_pairs, -1)
    odd_u = t_u[1::2].reshape(n_pairs, -1)
    val = np.sum(alpha[:, None] * (odd_z * even_u - odd_u * even_z), axis=0)
    val = val.reshape(np.broadcast(z, u).shape)
    return val if val.shape else complex(val)


def g_laguerre(nu: float, u, v):
    """Building block of the tau=0 Bessel kernel (angular Bessel integral)."""
    if nu <= -1:
        raise DomainError("g_laguerre: nu must exceed -1")
    u = complex(u)
    v = complex(v)

    def fn(x, s2):
        y = u * v * s2
        return (np.exp((u + v) * x) * scaled_bessel("J", nu, y, 1.0)
                - np.exp(-(u - v) * x) * scaled_bessel("I", nu, y, 1.0))

    return 2.0 ** nu / np.sqrt(np.pi) * _bessel_angle_integral(fn, nu)


def laguerre_angles(vartheta: float, theta: float):
    """Angular cutoffs (lambda, mu) of the two-parameter Bessel double sum."""
    _check_tau(vartheta)
    _check_tau(theta)
    lam = 2.0 * np.arctan(np.sqrt((1.0 + vartheta) * (1.0 + theta)
                                  / ((1.0 - vartheta) * (1.0 - theta))))
    mu = 2.0 * np.arctan(np.sqrt((1.0 - vartheta) * (1.0 + theta)
                                 / ((1.0 + vartheta) * (1.0 - theta))))
    return lam, mu


def f_laguerre(vartheta: float, theta: float, nu: float, zeta, eta):
    """Closed form of the two-parameter Laguerre double sum."""
    _check_tau(vartheta)
    _check_tau(theta)
    if nu <= -1:
        raise DomainError("f_laguerre: nu must exceed -1")
    zeta = complex(zeta)
    eta = complex(eta)
    if vartheta == 0.0:
        return 0.0 + 0.0j  # every summand carries vartheta^{2k+1}
    a1 = vartheta / (1.0 - vartheta ** 2)
    a2 = theta / (1.0 - theta ** 2)
    lam, mu = laguerre_angles(vartheta, theta)
    s0 = 1.0 / np.sqrt((1.0 - vartheta ** 2) * (1.0 - theta ** 2))
    x = vartheta * theta * zeta * eta

    def piece(cutoff, sign, kind):
        def fn(xc, s2):
            return (np.exp((sign * a1 * zeta - a2 * eta) * xc)
                    * scaled_bessel(kind, nu, x * s0 ** 2 * s2, 1.0))
        return s0 ** nu * _bessel_angle_integral(fn, nu, cutoff)

    pref = 2.0 ** nu * s0 / np.sqrt(np.pi)
    return (pref * np.exp(-vartheta * a1 * zeta - theta * a2 * eta)
            * (piece(lam, -1.0, "J") - piece(mu, 1.0, "I")))


# ---------------------------------------------------------------------------
# universality: unfolded finite-N kernels and their origin limits
# ---------------------------------------------------------------------------


def _log_tail_bound(kind: str, terms_ratio: float, last_term: float):
    rho = min(terms_ratio, 0.999)
    bound = last_term * rho / (1.0 - rho) if last_term > 0 else 0.0
    logger.info("%s unfolding: empirical series tail bound %.3e (ratio %.3f)",
                kind, bound, rho)
    return bound


def hermite_cocycle(tau: float, z):
    """Unimodular factor g(z) = exp(tau (conj(z)^2 - z^2)/4); g(zbar) = 1/g(z)."""
    z = np.asarray(z, dtype=complex)
    val = np.exp(tau * (np.conj(z) ** 2 - z ** 2) / 4.0)
    return val if val.shape else complex(val)


def hermite_origin_kernel(z, u):
    """tau=0 Gaussian limit: weighted erf kernel at the origin."""
    z = np.asarray(z, dtype=complex)
    u = np.asarray(u, dtype=complex)
    val = (1.0 / (2.0 * np.sqrt(2.0 * np.pi))
           * np.exp(-0.5 * (np.abs(z) ** 2 + np.abs(u) ** 2 - z ** 2 - u ** 2))
           * erf_c((z - u) / np.sqrt(2.0)))
    return val if val.shape else complex(val)


def unfold_hermite(tau: float, z, u, n_pairs: int):
    """Finite-N weighted kernel with arguments rescaled by the local
    density, in units where the limit is the tau=0 origin kernel."""
    _check_tau(tau)
    z = complex(z)
    u = complex(u)
    om = 1.0 - tau ** 2
    zs = np.sqrt(om) * z
    us = np.sqrt(om) * u
    series = s_hermite_series(tau, zs, us, n_pairs)
    if n_pairs >= 2:
        t_last = abs(complex(
            s_hermite_series(tau, zs, us, n_pairs)
            - s_hermite_series(tau, zs, us, n_pairs - 1)))
        t_prev = abs(complex(
            s_hermite_series(tau, zs, us, n_pairs - 1)
            - s_hermite_series(tau, zs, us, n_pairs - 2)))
        if t_prev > 0:
            _log_tail_bound("gaussian", t_last / t_prev, t_last)
    def logw(p):
        return -(abs(p) ** 2 - tau * (p ** 2).real) / om
    amp = np.exp(0.5 * (logw(zs) + logw(us)))
    pref = om ** 1.5 / (2.0 * np.pi * (1.0 - tau) * np.sqrt(om))
    return pref * amp * series


def laguerre_cocycle(tau: float, z):
    """Unimodular factor g(z) = exp(-i tau Im z); g(zbar) = 1/g(z)."""
    z = np.asarray(z, dtype=complex)
    val = np.exp(-1j * tau * z.imag)
    return val if val.shape else complex(val)


def laguerre_origin_kernel(nu: float, z, u):
    """tau=0 Bessel limit at the origin (continuous in z u across branches)."""
    z = complex(z)
    u = complex(u)

    def fn(x, s2):
        return (np.sinh((z - u) * x)
                * scaled_bessel("I", nu, z * u * s2, 1.0))

    integral = _bessel_angle_integral(fn, nu)
    amp = np.sqrt(float(sp.kv(nu, 2.0 * abs(z)) * sp.kv(nu, 2.0 * abs(u))))
    return abs(z * u) ** (nu / 2.0) / np.pi * amp * integral


def unfold_laguerre(tau: float, nu: float, z, u, n_pairs: int):
    """Bessel-family analogue of unfold_hermite (rescaling z -> (1-tau^2) z)."""
    _check_tau(tau)
    if nu <= -1:
        raise DomainError("unfold_laguerre: nu must exceed -1")
    z = complex(z)
    u = complex(u)
    om = 1.0 - tau ** 2
    zs = om * z
    us = om * u
    series = s_laguerre_series(tau, nu, zs, us, n_pairs)
    if n_pairs >= 2:
        t_last = abs(complex(
            s_laguerre_series(tau, nu, zs, us, n_pairs)
            - s_laguerre_series(tau, nu, zs, us, n_pairs - 1)))
        t_prev = abs(complex(
            s_laguerre_series(tau, nu, zs, us, n_pairs - 1)
            - s_laguerre_series(tau, nu, zs, us, n_pairs - 2)))
        if t_prev > 0:
            _log_tail_bound("bessel", t_last / t_prev, t_last)

    def logw(p):
        # |p|^nu K_nu(2|p|/(1-tau^2)) exp(2 tau Re(p)/(1-tau^2)) at p = om*q
        r = abs(p)
        return (nu * np.log(r) + np.log(float(sp.kve(nu, 2.0 * r / om)))
                - 2.0 * r / om + 2.0 * tau * p.real / om)

    amp = np.exp(0.5 * (logw(zs) + logw(us)))
    pref = om ** 3 / (np.pi * sp.gamma(nu + 2.0) * om ** 2)
    return pref * amp * series


# ---------------------------------------------------------------------------
# macroscopic density
# ---------------------------------------------------------------------------


def macroscopic_density(ensemble: Ensemble, z, n_pairs: int) -> float:
    """Limiting one-point density with the N-scaled droplet boundary."""
    z = complex(z)
    if isinstance(ensemble, EllipticGinibre):
        tau = ensemble.tau
        inside = ((z.real / (1.0 + tau)) ** 2
                  + (z.imag / (1.0 - tau)) ** 2) <= 2.0 * n_pairs
        return 1.0 / (2.0 * np.pi * (1.0 - tau ** 2)) if inside else 0.0
    if isinstance(ensemble, ChiralElliptic):
        tau = ensemble.tau
        if z == 0:
            return np.inf
        inside = (((z.real - 4.0 * tau * n_pairs) / (1.0 + tau ** 2)) ** 2
                  + (z.imag / (1.0 - tau ** 2)) ** 2) <= 4.0 * n_pairs ** 2
        return 1.0 / (4.0 * np.pi * (1.0 - tau ** 2) * abs(z)) if inside else 0.0
    raise DomainError(f"macroscopic_density: unsupported ensemble {ensemble.name}")


# ---------------------------------------------------------------------------
# grid plumbing
# ---------------------------------------------------------------------------


@dataclass
class KernelGrid:
    """Evaluated kernel values on a list of argument pairs."""

    points: np.ndarray  # (n, 2) complex: (z, u) pairs
    values: np.ndarray  # (n,) complex
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex).reshape(-1, 2)
        self.values = np.asarray(self.values, dtype=complex).ravel()
        if len(self.points) != len(self.values):
            raise DomainError("KernelGrid: points/values length mismatch")

    def rows(self):
        for (z, u), val in zip(self.points, self.values):
            yield (z.real, z.imag, u.real, u.imag, val.real, val.imag)
