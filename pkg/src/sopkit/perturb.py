"""Weight perturbation by a quadratic charge factor |z - m|^2.

Multiplying the weight by |z - m|^2 (a "charge insertion" at m) maps the
skew-orthogonal family, its norms, and its pre-kernel to closed-form
images built from the unperturbed data.  The linear factors (m - z) that
appear in denominators always divide the numerators exactly, so all
polynomial outputs are produced by exact synthetic division with a
remainder check rather than by pointwise evaluation; this keeps z = m
(and u = m for kernels) removable in exact arithmetic.

The orthogonal-polynomial analogue accepts complex m; the skew version
requires real m.  The Fourier expansion of the perturbed skew family in
the perturbed orthogonal family fills in *all* lower degrees, which is
the coefficient-level statement that no three-term recurrence survives
the perturbation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .special import DomainError, NumericalError
from .ensembles import make_ensemble
from .polynomials import (OPSystem, op_coeffs, op_eval, poly_add,
                          poly_divide_linear, poly_eval, poly_trim)
from .skew import SkewSystem

__all__ = [
    "PerturbedSystem",
    "perturb_sop",
    "perturb_prekernel",
    "perturb_op",
    "perturb_op_kernel",
    "fourier_beta",
    "fourier_alpha",
]

_ZERO_TOL = 1e-12


def _divide_exact(coeffs, m, what: str):
    """Divide by (m - z), insisting the remainder is numerically zero.

    The remainder equals the numerator evaluated at m, so it is compared
    against the evaluation norm sum |c_a| |m|^a, the scale at which
    roundoff in the coefficients shows up at z = m.
    """
    quot, rem = poly_divide_linear(coeffs, m)
    c = np.atleast_1d(np.asarray(coeffs))
    scale = max(float(np.abs(c) @ np.abs(m) ** np.arange(len(c))), 1.0)
    if abs(rem) > 1e-9 * scale:
        raise NumericalError(
            f"{what}: division by (m - z) left remainder {abs(rem):.3e} "
            f"(numerator should vanish at z = m)")
    return quot


def _monic(coeffs, what: str):
    c = poly_trim(coeffs)
    lead = c[-1]
    if abs(lead - 1.0) > 1e-8:
        raise NumericalError(f"{what}: expected monic output, leading {lead}")
    c = c / lead
    return np.real_if_close(c, tol=1000)


@dataclass
class PerturbedSystem:
    """Monic skew family for the weight |z - m|^2 w(z)."""

    base: SkewSystem
    m: float
    q1: list  # coefficient vectors, ascending
    r1: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        self.r1 = np.asarray(self.r1, dtype=float)
        self.d = np.asarray(self.d, dtype=float)
        if np.any(self.r1 <= 0):
            raise NumericalError("PerturbedSystem: nonpositive skew norm r1_k")

    @property
    def n_pairs(self) -> int:
        return len(self.r1)

    def eval_all(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.empty((len(self.q1),) + z.shape, dtype=complex)
        for n, coeffs in enumerate(self.q1):
            out[n] = poly_eval(coeffs, z)
        return out

    def to_json_dict(self) -> dict:
        return {
            "ensemble": {"name": self.base.ensemble.name,
                         "params": self.base.ensemble.params()},
            "m": f"{float(self.m):.17g}",
            "d": [f"{float(v):.17g}" for v in self.d],
            "q": [[f"{float(np.real(c)):.17g}" for c in coeffs]
                  for coeffs in self.q1],
            "r": [f"{float(v):.17g}" for v in self.r1],
            "base": self.base.to_json_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "PerturbedSystem":
        doc = json.loads(text)
        base = SkewSystem.from_json(json.dumps(doc["base"]))
        q1 = [np.array([float(c) for c in coeffs]) for coeffs in doc["q"]]
        r1 = np.array([float(v) for v in doc["r"]])
        d = np.array([float(v) for v in doc["d"]])
        return cls(base=base, m=float(doc["m"]), q1=q1, r1=r1, d=d)


def _sigma_poly_in_z(system: SkewSystem, n_pairs: int, m: float) -> np.ndarray:
    """Coefficient vector (in z) of the pre-kernel with one slot frozen at m."""
    out = np.zeros(2 * n_pairs + 1)
    for k in range(n_pairs):
        qe = np.asarray(system.q[2 * k], dtype=float)
        qo = np.asarray(system.q[2 * k + 1], dtype=float)
        qe_m = poly_eval(qe, m).real
        qo_m = poly_eval(qo, m).real
        term = poly_add(qo_m * np.pad(qe, (0, len(out) - len(qe))),
                        np.pad(qo, (0, len(out) - len(qo))), scale=-qe_m)
        out = poly_add(out, term, scale=1.0 / system.r[k])
    return out


def perturb_sop(system: SkewSystem, m: float, d=None) -> PerturbedSystem:
    """Skew family of |z - m|^2 w from the family of w (one pair shorter)."""
    m = float(m)
    n_out = system.n_pairs - 1
    if n_out < 1:
        raise DomainError("perturb_sop: base system needs at least two pairs")
    if d is None:
        d = np.zeros(n_out)
    d = np.asarray(d, dtype=float)
    if len(d) != n_out:
        raise DomainError("perturb_sop: gauge list d must have one entry per pair")

    q_at_m = [poly_eval(np.asarray(c, dtype=float), m).real for c in system.q]
    for n in range(n_out + 1):
        if abs(q_at_m[2 * n]) <= _ZERO_TOL:
            raise DomainError(
                f"perturb_sop: perturbation point is a zero of q_{2 * n}")

    r1 = np.array([system.r[n] * q_at_m[2 * n + 2] / q_at_m[2 * n]
                   for n in range(n_out)])
    if np.any(r1 <= 0):
        bad = int(np.argmax(r1 <= 0))
        raise NumericalError(
            f"perturb_sop: r1_{bad} = {r1[bad]:.3e} <= 0; the even values "
            f"q_{2 * bad}(m), q_{2 * bad + 2}(m) differ in sign at m = {m}")

    q1 = []
    for n in range(n_out):
        sigma = _sigma_poly_in_z(system, n + 1, m)
        even = _divide_exact(sigma, m, "perturb_sop even") * (
            system.r[n] / q_at_m[2 * n])
        even = _monic(even, f"perturb_sop q1_{2 * n}")
        num = poly_add(q_at_m[2 * n + 2] * np.asarray(system.q[2 * n], float),
                       np.asarray(system.q[2 * n + 2], float),
                       scale=-q_at_m[2 * n])
        odd = _divide_exact(num, m, "perturb_sop odd") / q_at_m[2 * n]
        odd = poly_add(odd, even, scale=d[n])
        odd = _monic(odd, f"perturb_sop q1_{2 * n + 1}")
        q1.extend([even, odd])
    return PerturbedSystem(base=system, m=m, q1=q1, r1=r1, d=d)


def _sigma_coeff_matrix(system: SkewSystem, n_pairs: int) -> np.ndarray:
    """Bivariate coefficient matrix of the pre-kernel: sigma(z, u) powers."""
    size = 2 * n_pairs
    mat = np.zeros((size, size))
    for k in range(n_pairs):
        qe = np.zeros(size)
        qe[:2 * k + 1] = system.q[2 * k]
        qo = np.zeros(size)
        qo[:2 * k + 2] = system.q[2 * k + 1]
        mat += (np.outer(qo, qe) - np.outer(qe, qo)) / system.r[k]
    return mat


def perturb_prekernel(system: SkewSystem, m: float, z, u):
    """Pre-kernel of the |z - m|^2-perturbed weight, closed form.

    Both linear denominators are removed by exact bivariate synthetic
    division, so z = m and u = m are ordinary points.
    """
    m = float(m)
    n1 = system.n_pairs - 1  # perturbed pair count
    if n1 < 1:
        raise DomainError("perturb_prekernel: base system needs two pairs")
    q_top = np.asarray(system.q[2 * n1], dtype=float)
    q_top_m = poly_eval(q_top, m).real
    if abs(q_top_m) <= _ZERO_TOL:
        raise DomainError(
            f"perturb_prekernel: perturbation point is a zero of q_{2 * n1}")
    sig = _sigma_coeff_matrix(system, n1)
    sig_m = _sigma_poly_in_z(system, n1, m)  # sigma(m, .) = -sigma(., m)
    size = 2 * n1 + 1
    num = np.zeros((size, size))
    num[:sig.shape[0], :sig.shape[1]] = q_top_m * sig
    # - sigma(z, m) q(u): sigma(z, m) = -sigma(m, z)
    num += np.outer(np.pad(sig_m, (0, size - len(sig_m))),
                    np.pad(q_top, (0, size - len(q_top))))
    # + sigma(u, m) q(z) = -sigma(m, u) q(z)
    num -= np.outer(np.pad(q_top, (0, size - len(q_top))),
                    np.pad(sig_m, (0, size - len(sig_m))))
    # divide by (m - z) along rows, then (m - u) along columns
    rows = np.stack([_divide_exact(num[:, j], m, "perturb_prekernel z")
                     for j in range(size)], axis=1)
    cols = np.stack([_divide_exact(rows[i, :], m, "perturb_prekernel u")
                     for i in range(rows.shape[0])], axis=0)
    cols = cols / q_top_m
    z = np.asarray(z, dtype=complex)
    u = np.asarray(u, dtype=complex)
    zp = np.power(z[..., None], np.arange(cols.shape[0]))
    up = np.power(u[..., None], np.arange(cols.shape[1]))
    val = np.einsum("...i,ij,...j->...", zp, cols, up)
    return val if val.shape else complex(val)


# ---------------------------------------------------------------------------
# orthogonal-polynomial analogue (complex m allowed)
# ---------------------------------------------------------------------------


def _kernel_sums(opsys: OPSystem, m: complex, count: int):
    """p_k(m) values and cumulative K_j(m, m) = sum_{k<j} |p_k(m)|^2/h_k."""
    p_m = np.array([op_eval(opsys, k, m) for k in range(count)])
    terms = (p_m * np.conj(p_m)).real / opsys.h[:count]
    return p_m, np.concatenate(([0.0], np.cumsum(terms)))


def perturb_op(opsys: OPSystem, m: complex, n: int):
    """First n orthogonal polynomials and norms for |z - m|^2 w.

    Returns (p1, h1) with p1 a list of monic coefficient vectors and
    h1 the squared norms; needs base degrees up to n + 1.
    """
    if n + 1 > opsys.n_max:
        raise DomainError("perturb_op: base system too short (need degree n+1)")
    m = complex(m)
    p_m, K_mm = _kernel_sums(opsys, m, n + 2)
    p1 = []
    h1 = np.empty(n)
    for j in range(n):
        kern = np.zeros(j + 2, dtype=complex)
        for k in range(j + 1):
            ck = op_coeffs(opsys, k)
            kern[:len(ck)] += (np.conj(p_m[k]) / opsys.h[k]) * ck
        num = kern * p_m[j + 1]
        num = poly_add(num, op_coeffs(opsys, j + 1), scale=-K_mm[j + 1])
        quot = _divide_exact(num, m, "perturb_op") / K_mm[j + 1]
        p1.append(_monic(quot, f"perturb_op p1_{j}"))
        h1[j] = opsys.h[j + 1] * K_mm[j + 2] / K_mm[j + 1]
    return p1, h1


def perturb_op_kernel(opsys: OPSystem, m: complex, n: int, z, u):
    """Reproducing kernel K^(1)_n(z, u) of the perturbed orthogonal family.

    Polynomial in z and conj(u); both linear denominators are divided out
    exactly, keeping z = m and u = m removable.
    """
    if n + 1 > opsys.n_max + 1:
        raise DomainError("perturb_op_kernel: base system too short")
    m = complex(m)
    p_m, K_mm = _kernel_sums(opsys, m, n + 1)
    size = n + 1
    mat = np.zeros((size, size), dtype=complex)  # K_{n+1}(z, u) coefficients
    kern_z = np.zeros(size, dtype=complex)       # K_{n+1}(z, m) in powers of z
    kern_u = np.zeros(size, dtype=complex)       # K_{n+1}(m, u) in powers of conj(u)
    for k in range(n + 1):
        ck = op_coeffs(opsys, k).astype(complex)
        mat[:len(ck), :len(ck)] += np.outer(ck, np.conj(ck)) / opsys.h[k]
        kern_z[:len(ck)] += ck * np.conj(p_m[k]) / opsys.h[k]
        kern_u[:len(ck)] += np.conj(ck) * p_m[k] / opsys.h[k]
    num = K_mm[n + 1] * mat - np.outer(kern_z, kern_u)
    rows = np.stack([_divide_exact(num[:, j], m, "perturb_op_kernel z")
                     for j in range(size)], axis=1)
    cols = np.stack([_divide_exact(rows[i, :], np.conj(m), "perturb_op_kernel u")
                     for i in range(rows.shape[0])], axis=0)
    cols = cols / K_mm[n + 1]
    z = np.asarray(z, dtype=complex)
    u = np.asarray(u, dtype=complex)
    zp = np.power(z[..., None], np.arange(cols.shape[0]))
    up = np.power(np.conj(u)[..., None], np.arange(cols.shape[1]))
    val = np.einsum("...i,ij,...j->...", zp, cols, up)
    return val if val.shape else complex(val)


# ---------------------------------------------------------------------------
# Fourier coefficients of the perturbed skew family in the perturbed OP basis
# ---------------------------------------------------------------------------


def _even_expansion(system: SkewSystem, opsys: OPSystem, k: int) -> np.ndarray:
    """mu_{k, j}: coefficients of q_{2k} in the even monic OP basis."""
    size = 2 * k + 1
    basis = np.zeros((size, size))
    for l in range(size):
        cl = op_coeffs(opsys, l)
        basis[:len(cl), l] = cl
    rhs = np.zeros(size)
    qc = np.asarray(system.q[2 * k], dtype=float)
    rhs[:len(qc)] = qc
    coeff = np.linalg.solve(basis, rhs)
    odd_leak = np.max(np.abs(coeff[1::2])) if k >= 1 else 0.0
    if odd_leak > 1e-8:
        raise NumericalError(
            "fourier expansion: even skew polynomial has odd OP components "
            f"({odd_leak:.3e}); base system lacks the recurrence structure")
    return coeff[0::2]


def _require_plain_gauge(system: SkewSystem, what: str):
    if np.any(np.abs(system.odd_shift) > 0):
        raise DomainError(f"{what}: base system carries a nonzero odd gauge; "
                          "the expansion formulas fix d_k = 0")


def fourier_beta(system: SkewSystem, opsys: OPSystem, m: float,
                 k: int, l: int) -> float:
    """Coefficient of the perturbed monic OP p1_l in q1_{2k+1} (d_k = 0)."""
    _require_plain_gauge(system, "fourier_beta")
    if l > 2 * k + 1 or l < 0:
        return 0.0
    if l == 2 * k + 1:
        return 1.0
    m = float(m)
    if 2 * k + 2 > 2 * system.n_pairs - 1:
        raise DomainError("fourier_beta: base system too short (need q_{2k+2})")
    p_m, K_mm = _kernel_sums(opsys, m, 2 * k + 3)
    p_m = p_m.real
    q2k_m = poly_eval(np.asarray(system.q[2 * k], float), m).real
    q2k2_m = poly_eval(np.asarray(system.q[2 * k + 2], float), m).real
    mu_k = _even_expansion(system, opsys, k)
    mu_k1 = _even_expansion(system, opsys, k + 1)
    half = l // 2
    acc = 0.0
    for j in range(half + 1):
        mkj = mu_k[j] if j < len(mu_k) else 0.0
        acc += (q2k2_m * mkj - q2k_m * mu_k1[j]) * p_m[2 * j]
    acc *= p_m[l + 1]
    if l % 2 == 1:
        big_l = (l - 1) // 2
        j = big_l + 1
        mkj = mu_k[j] if j < len(mu_k) else 0.0
        acc -= ((q2k2_m * mkj - q2k_m * mu_k1[j])
                * K_mm[2 * big_l + 2] * opsys.h[2 * big_l + 2])
    return acc / (opsys.h[l + 1] * K_mm[l + 2] * q2k_m)


def fourier_alpha(system: SkewSystem, opsys: OPSystem, m: float,
                  k: int, l: int) -> float:
    """Coefficient of the perturbed monic OP p1_l in q1_{2k} (d_k = 0)."""
    _require_plain_gauge(system, "fourier_alpha")
    if l > 2 * k or l < 0:
        return 0.0
    if l == 2 * k:
        return 1.0
    m = float(m)
    p_m, K_mm = _kernel_sums(opsys, m, 2 * k + 3)
    p_m = p_m.real
    q_m = [poly_eval(np.asarray(c, float), m).real for c in system.q]
    mu = [_even_expansion(system, opsys, i) for i in range(k + 1)]
    r = system.r
    if l % 2 == 0:
        big_l = l // 2
        acc = 0.0
        for j in range(big_l + 1):
            for i in range(j, k + 1):
                acc += q_m[2 * i + 1] * mu[i][j] / r[i] * p_m[2 * j]
        acc *= p_m[2 * big_l + 1]
        acc -= sum(q_m[2 * i] * p_m[2 * i + 1] / r[i]
                   for i in range(big_l)) * p_m[2 * big_l + 1]
        acc += q_m[2 * big_l] * K_mm[2 * big_l + 1] * opsys.h[2 * big_l + 1] / r[big_l]
        return acc * r[k] / (opsys.h[2 * big_l + 1] * K_mm[2 * big_l + 2] * q_m[2 * k])
    big_l = (l - 1) // 2
    acc = 0.0
    for j in range(big_l + 1):
        for i in range(j, k + 1):
            acc += q_m[2 * i + 1] * mu[i][j] / r[i] * p_m[2 * j]
    acc *= p_m[2 * big_l + 2]
    acc -= sum(q_m[2 * i] * p_m[2 * i + 1] / r[i]
               for i in range(big_l + 1)) * p_m[2 * big_l + 2]
    acc -= sum(q_m[2 * i + 1] * mu[i][big_l + 1] / r[i]
               for i in range(big_l + 1, k + 1)
               ) * K_mm[2 * big_l + 2] * opsys.h[2 * big_l + 2]
    return acc * r[k] / (opsys.h[2 * big_l + 2] * K_mm[2 * big_l + 3] * q_m[2 * k])
