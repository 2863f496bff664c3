"""Skew products, skew moments, the Pfaffian engine and SOP constructors.

The skew product of two polynomials against an ensemble measure is

    <f, g>_s = int (f(z) g(zbar) - g(z) f(zbar)) (z - zbar) dmu(z),

an antisymmetric bilinear form.  Skew-orthogonal polynomial (SOP)
systems q_0..q_{2N-1} with skew norms r_k are built three ways: from the
skew-moment Gram matrix via bordered Pfaffians, from a classical
three-term recurrence, and from radial norm ratios; the constructors
agree (up to the odd-polynomial gauge) and the tests exploit that.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .special import DomainError, NumericalError, QuadratureError
from . import quadrature as quad
from .ensembles import Ensemble, make_ensemble, PerturbedWeight
from .polynomials import OPSystem, op_coeffs, op_system, poly_add, poly_eval, poly_trim

__all__ = [
    "skew_product",
    "skew_moment",
    "skew_gram",
    "pfaffian",
    "pfaffian_minor",
    "SkewSystem",
    "sop_from_gram",
    "sop_from_recurrence",
    "sop_radial",
    "partition_function",
    "partition_function_quadrature",
    "op_from_sop",
]


# ---------------------------------------------------------------------------
# skew products and moments
# ---------------------------------------------------------------------------


def skew_product(f, g, ensemble: Ensemble, tol: float = 1e-8):
    """<f, g>_s by planar quadrature; f, g are coefficient vectors.

    Both polynomials are evaluated at z and at zbar literally (no
    conjugation shortcut), so complex coefficient vectors are handled
    per the defining formula.
    """
    f = np.atleast_1d(f)
    g = np.atleast_1d(g)
    hint = len(f) + len(g) + 2

    def integrand(z):
        zb = np.conj(z)
        return (poly_eval(f, z) * poly_eval(g, zb)
                - poly_eval(g, z) * poly_eval(f, zb)) * (z - zb)

    return quad.quad_planar(integrand, ensemble, tol=tol, degree_hint=hint)


def skew_moment(ensemble: Ensemble, i: int, j: int, method: str = "auto"):
    """Skew moment g_{ij} = <z^i, z^j>_s."""
    gram = skew_gram(ensemble, max(i, j) + 1, moments=method)
    return gram[i, j]


def _gram_closed(ensemble: Ensemble, size: int) -> np.ndarray:
    """Closed-form Gram from the ensemble's orthogonal-polynomial data.

    Radial weights give the bidiagonal g_{i,i+1} = 2 h_{i+1}; recurrence
    families go through the (exact, triangular) expansion of monomials
    in the monic p_n basis, so no quadrature error enters.
    """
    g = np.zeros((size, size))
    if ensemble.radial:
        for i in range(size - 1):
            g[i, i + 1] = 2.0 * ensemble.norm(i + 1)
            g[i + 1, i] = -g[i, i + 1]
        return g
    sys = op_system(ensemble, size)
    coeff = np.zeros((size + 1, size + 1))
    for n in range(size + 1):
        coeff[n, : n + 1] = op_coeffs(sys, n)
    expand = np.linalg.inv(coeff)  # monomials in the p-basis, triangular
    scalar = expand @ np.diag(sys.h) @ expand.T  # <z^a, z^b> real part
    for i in range(size):
        for j in range(size):
            g[i, j] = 2.0 * (scalar[i + 1, j] - scalar[i, j + 1])
    return g


def _gram_quadrature(ensemble: Ensemble, size: int, tol: float) -> np.ndarray:
    """Gram of skew moments by vectorized planar quadrature with refinement."""
    prev = None
    hint = 2 * size + 2
    for level in range(quad.MAX_LEVEL + 1):
        rule = ensemble.quadrature_rule(level, tol=tol, degree_hint=hint)
        z = rule.nodes
        powers = np.vander(z, size + 1, increasing=True).T  # (size+1, nodes)
        scalar = (powers * rule.weights) @ np.conj(powers).T  # int z^a zbar^b dmu
        g = np.zeros((size, size))
        for i in range(size):
            for j in range(size):
                g[i, j] = np.real(scalar[i + 1, j] - scalar[i, j + 1]
                                  - scalar[j + 1, i] + scalar[j, i + 1])
        if prev is not None:
            scale = 1.0 + np.max(np.abs(g))
            if np.max(np.abs(g - prev)) <= tol * scale:
                return g
        prev = g
    raise QuadratureError("skew Gram quadrature did not converge",
                          estimate=float(np.max(np.abs(g - prev))))


def skew_gram(ensemble: Ensemble, size: int, moments: str = "auto",
              tol: float = 1e-8) -> np.ndarray:
    """Antisymmetric matrix of skew moments g_{ij}, 0 <= i, j < size."""
    if moments == "auto":
        moments = "quadrature" if isinstance(ensemble, PerturbedWeight) else "closed"
    if moments == "closed":
        return _gram_closed(ensemble, size)
    if moments == "quadrature":
        return _gram_quadrature(ensemble, size, tol)
    raise DomainError(f"skew_gram: unknown moments source {moments!r}")


# ---------------------------------------------------------------------------
# Pfaffians
# ---------------------------------------------------------------------------


def _check_antisymmetric(a: np.ndarray):
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise DomainError("pfaffian: matrix must be square")
    if n % 2 != 0:
        raise DomainError("pfaffian: dimension must be even")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a + a.T)) > 1e-12 * scale:
        raise DomainError("pfaffian: matrix not antisymmetric")


def pfaffian(m) -> complex:
    """Pfaffian by skew-symmetric (Parlett-Reid) elimination with pivoting.

    Sign convention Pf([[0, a], [-a, 0]]) = a; Pf(m)^2 = det(m).
    """
    a = np.array(m, dtype=complex if np.iscomplexobj(m) else float)
    _check_antisymmetric(a)
    n = a.shape[0]
    if n == 0:
        return 1.0
    pf = 1.0
    for k in range(0, n - 1, 2):
        col = np.abs(a[k + 1:, k])
        kp = k + 1 + int(np.argmax(col))
        if col[kp - k - 1] == 0.0:
            return 0.0
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        pf = pf * a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2:] / a[k, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, a[k + 2:, k + 1])
            a[k + 2:, k + 2:] -= np.outer(a[k + 2:, k + 1], tau)
    return pf if np.iscomplexobj(np.asarray(m)) else float(np.real(pf))


def pfaffian_minor(m) -> complex:
    """Pfaffian by recursive expansion along the first row (n <= 6ish).

    Exponentially slow; kept as the independent sign oracle.
    """
    a = np.asarray(m)
    _check_antisymmetric(a.astype(complex))
    n = a.shape[0]
    if n == 0:
        return 1.0
    if n == 2:
        return a[0, 1]
    total = 0.0
    rest = list(range(1, n))
    for pos, j in enumerate(rest):
        keep = [i for i in range(n) if i != 0 and i != j]
        total += (-1.0) ** pos * a[0, j] * pfaffian_minor(a[np.ix_(keep, keep)])
    return total


# ---------------------------------------------------------------------------
# SOP systems
# ---------------------------------------------------------------------------


@dataclass
class SkewSystem:
    """Monic SOP q_0..q_{2N-1} with skew norms r_0..r_{N-1}."""

    ensemble: Ensemble
    q: list  # coefficient vectors, ascending
    r: np.ndarray
    odd_shift: np.ndarray = None
    lam: np.ndarray = None  # mu-ratio data when built from a recurrence

    def __post_init__(self):
        if self.odd_shift is None:
            self.odd_shift = np.zeros(len(self.r))
        self.r = np.asarray(self.r, dtype=float)
        if np.any(self.r <= 0):
            raise NumericalError("SkewSystem: nonpositive skew norm r_k")
        for n, coeffs in enumerate(self.q):
            c = poly_trim(coeffs)
            if len(c) - 1 != n or abs(c[-1] - 1.0) > 1e-9:
                raise NumericalError(f"SkewSystem: q_{n} is not monic of degree {n}")

    @property
    def n_pairs(self) -> int:
        return len(self.r)

    def eval_all(self, z):
        """Values q_n(z) stacked along the first axis."""
        z = np.asarray(z, dtype=complex)
        out = np.empty((len(self.q),) + z.shape, dtype=complex)
        for n, coeffs in enumerate(self.q):
            out[n] = poly_eval(coeffs, z)
        return out

    def with_gauge(self, d) -> "SkewSystem":
        """Apply the odd-polynomial shift q_{2n+1} -> q_{2n+1} + d_n q_{2n}."""
        d = np.asarray(d, dtype=float)
        q = [c.copy() for c in self.q]
        for k in range(self.n_pairs):
            q[2 * k + 1] = poly_add(q[2 * k + 1], q[2 * k], scale=d[k])
        return SkewSystem(self.ensemble, q, self.r.copy(),
                          odd_shift=self.odd_shift + d,
                          lam=None if self.lam is None else self.lam.copy())

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "ensemble": {"name": self.ensemble.name, "params": self.ensemble.params()},
            "q": [[f"{float(np.real(c)):.17g}" for c in coeffs] for coeffs in self.q],
            "r": [f"{float(v):.17g}" for v in self.r],
            "odd_shift": [f"{float(v):.17g}" for v in self.odd_shift],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SkewSystem":
        doc = json.loads(text)
        ens = make_ensemble(doc["ensemble"]["name"], **doc["ensemble"]["params"])
        q = [np.array([float(c) for c in coeffs]) for coeffs in doc["q"]]
        r = np.array([float(v) for v in doc["r"]])
        d = np.array([float(v) for v in doc["odd_shift"]])
        return cls(ens, q, r, odd_shift=d)


def sop_from_gram(ensemble: Ensemble, n_pairs: int, moments: str = "auto",
                  tol: float = 1e-8) -> SkewSystem:
    """SOP via bordered Pfaffians of the skew-moment Gram matrix.

    The even polynomial of degree 2k is the Pfaffian of the Gram block
    on moment indices 0..2k+1 with the last row/column replaced by
    powers of z; the odd one skips index 2k and appends 2k+1.  The
    coefficient of z^e is extracted by setting the border to the e-th
    unit vector, and the result is rescaled to monic form.
    """
    if n_pairs > 8:
        raise DomainError("sop_from_gram: N > 8 exceeds the conditioning guard")
    size = 2 * n_pairs
    gram = skew_gram(ensemble, size, moments=moments, tol=tol)

    q: list = []
    r = np.zeros(n_pairs)
    for k in range(n_pairs):
        delta = pfaffian(gram[: 2 * k + 2, : 2 * k + 2])
        if delta <= 0:
            raise NumericalError(f"sop_from_gram: Pf of Gram block {2 * k + 2} not positive")
        ce_mat = np.zeros((2 * k + 2, 2 * k + 2))
        ce_mat[:-1, :-1] = gram[: 2 * k + 1, : 2 * k + 1]
        ce = np.zeros(2 * k + 1)
        for e in range(2 * k + 1):
            mat = ce_mat.copy()
            mat[e, -1] = 1.0
            mat[-1, e] = -1.0
            ce[e] = pfaffian(mat)
        if ce[2 * k] == 0:
            raise NumericalError("sop_from_gram: singular even leading coefficient")
        q.append(ce / ce[2 * k])

        odd_idx = list(range(2 * k)) + [2 * k + 1]
        mat0 = np.zeros((2 * k + 2, 2 * k + 2))
        mat0[:-1, :-1] = gram[np.ix_(odd_idx, odd_idx)]
        co = np.zeros(2 * k + 2)
        for slot, e in enumerate(odd_idx):
            mat = mat0.copy()
            mat[slot, -1] = 1.0
            mat[-1, slot] = -1.0
            co[e] = pfaffian(mat)
        if co[2 * k + 1] == 0:
            raise NumericalError("sop_from_gram: singular odd leading coefficient")
        q.append(co / co[2 * k + 1])

        qe = np.zeros(size)
        qe[: len(q[2 * k])] = q[2 * k]
        qo = np.zeros(size)
        qo[: len(q[2 * k + 1])] = q[2 * k + 1]
        r[k] = qe @ gram @ qo
        if r[k] <= 0:
            raise NumericalError(f"sop_from_gram: nonpositive skew norm r_{k}")
    return SkewSystem(ensemble, q, r)


def sop_from_recurrence(opsys: OPSystem, ensemble: Ensemble, n_pairs: int) -> SkewSystem:
    """SOP from three-term recurrence data.

    With rho_k = h_{2k+1} - c_{2k+1} h_{2k} > 0 the skew norms are
    r_k = 2 rho_k, the odd polynomials are q_{2k+1} = p_{2k+1}, and the
    even ones mix the even-degree p's with ratio products
    mu_{k,j} = prod_{l=j}^{k-1} (h_{2l+2} - c_{2l+2} h_{2l+1}) / rho_l.
    """
    need = 2 * n_pairs
    if opsys.n_max < need:
        raise DomainError("sop_from_recurrence: OPSystem shorter than 2N")
    h, c = opsys.h, opsys.c
    rho = np.array([h[2 * k + 1] - c[2 * k + 1] * h[2 * k] for k in range(n_pairs)])
    if np.any(rho <= 0):
        raise NumericalError(
            "sop_from_recurrence: h_{2k+1} - c_{2k+1} h_{2k} <= 0 (inconsistent data)")
    lam = np.array([
        (h[2 * l + 2] - c[2 * l + 2] * h[2 * l + 1]) / rho[l]
        for l in range(n_pairs)
    ])
    q: list = []
    for k in range(n_pairs):
        even = np.asarray(op_coeffs(opsys, 2 * k), dtype=float)
        mu = 1.0
        for j in range(k - 1, -1, -1):
            mu = mu * lam[j]
            even = poly_add(even, op_coeffs(opsys, 2 * j), scale=mu)
        q.append(even)
        q.append(np.asarray(op_coeffs(opsys, 2 * k + 1), dtype=float))
    return SkewSystem(ensemble, q, 2.0 * rho, lam=lam)


def sop_radial(ensemble: Ensemble, n_pairs: int) -> SkewSystem:
    """Radial-weight shortcut: norm-ratio products of even monomials."""
    if not ensemble.radial:
        raise DomainError(f"sop_radial: {ensemble.name} is not radially symmetric")
    h = np.array([ensemble.norm(n) for n in range(2 * n_pairs + 1)])
    lam = h[2::2][: n_pairs] / h[1::2][: n_pairs]  # h_{2l+2} / h_{2l+1}
    q: list = []
    for k in range(n_pairs):
        even = np.zeros(2 * k + 1)
        even[2 * k] = 1.0
        mu = 1.0
        for j in range(k - 1, -1, -1):
            mu = mu * lam[j]
            even[2 * j] = mu
        q.append(even)
        odd = np.zeros(2 * k + 2)
        odd[2 * k + 1] = 1.0
        q.append(odd)
    return SkewSystem(ensemble, q, 2.0 * h[1::2][: n_pairs], lam=lam)


def partition_function(system: SkewSystem) -> float:
    """Z_N = N! prod r_k."""
    return float(math.factorial(system.n_pairs) * np.prod(system.r))


def _interaction(z1, z2):
    """|z1 - z2|^2 |z1 - conj(z2)|^2 for broadcastable complex arrays."""
    return (np.abs(z1 - z2) ** 2) * (np.abs(z1 - np.conj(z2)) ** 2)


def partition_function_quadrature(ensemble: Ensemble, n_points: int,
                                  tol: float = 1e-4) -> float:
    """Direct 2N-fold quadrature of the configuration integral, N <= 3."""
    if n_points not in (1, 2, 3):
        raise DomainError("partition_function_quadrature supports N in {1, 2, 3}")
    hint = 4 * n_points + 2
    levels = (0, 1) if n_points <= 2 else (-1, 0)
    prev = None
    for level in levels:
        rule = ensemble.quadrature_rule(level, tol=1e-9, degree_hint=hint)
        z, w = rule.nodes, rule.weights
        self_term = w * np.abs(z - np.conj(z)) ** 2
        if n_points == 1:
            cur = float(np.sum(self_term))
        elif n_points == 2:
            total = 0.0
            for a0 in range(0, len(z), 2048):
                za = z[a0:a0 + 2048, None]
                wa = self_term[a0:a0 + 2048, None]
                total += float(np.sum(wa * self_term[None, :] * _interaction(za, z[None, :])))
            cur = total
        else:
            total = 0.0
            pair_bc = None
            for ia, za in enumerate(z):
                inter_a = _interaction(za, z)  # vs all b (and c by symmetry)
                vec = self_term * inter_a
                if pair_bc is None:
                    pair_bc = _interaction(z[:, None], z[None, :])
                total += self_term[ia] * float(vec @ pair_bc @ vec)
            cur = total
        if prev is not None and abs(cur - prev) <= tol * abs(cur):
            return cur
        prev = cur
    raise QuadratureError("partition quadrature did not converge",
                          estimate=abs(cur - prev) / abs(cur))


def op_from_sop(system: SkewSystem) -> list:
    """Invert the even mixing: p_{2k+2} = q_{2k+2} - lam_k q_{2k}."""
    if system.lam is None:
        raise DomainError("op_from_sop: system lacks stored recurrence ratios")
    out = [system.q[0].copy(), system.q[1].copy()]
    for k in range(1, system.n_pairs):
        out.append(poly_add(system.q[2 * k], system.q[2 * k - 2],
                            scale=-system.lam[k - 1]))
        out.append(system.q[2 * k + 1].copy())
    return out
