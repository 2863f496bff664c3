"""Weight/support descriptions of the planar symplectic ensembles.

Each ensemble bundles a weight function, its support geometry, the
closed-form squared norms h_n of the monic orthogonal polynomials, the
three-term recurrence data (b_n, c_n), and a certified quadrature rule
for its measure.  All ensembles are frozen (hashable) so quadrature
rules can be cached per (ensemble, refinement level).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.special as _sp

from .special import DomainError, bessel, log_gamma
from . import quadrature as quad

__all__ = [
    "Ensemble",
    "Ginibre",
    "MittagLeffler",
    "TruncatedSymplectic",
    "ProductGinibre",
    "Gegenbauer",
    "ChebyshevEllipse",
    "EllipticGinibre",
    "ChiralElliptic",
    "PerturbedWeight",
    "make_ensemble",
    "ENSEMBLE_NAMES",
]

_RULE_CACHE: dict = {}


def _tail_gamma(s: float, x: float) -> float:
    """Upper incomplete Gamma(s, x), safe for the s <= ~80 used here."""
    return float(_sp.gammaincc(s, x) * np.exp(_sp.gammaln(s)))


@dataclass(frozen=True)
class Ensemble:
    """Base ensemble; concrete subclasses define weight/support/norms."""

    # ---- identity -------------------------------------------------------
    @property
    def name(self) -> str:
        raise NotImplementedError

    def params(self) -> dict:
        raise NotImplementedError

    # ---- measure --------------------------------------------------------
    domain = "plane"  # 'plane' | 'disc' | 'contour'
    radial = False
    family = "monomial"  # classical recurrence family tag

    def weight(self, z):
        raise NotImplementedError

    def log_weight(self, z):
        with np.errstate(divide="ignore"):
            return np.log(np.real(self.weight(z)))

    def in_support(self, z):
        return np.ones(np.shape(z), dtype=bool)

    # ---- orthogonal polynomial data --------------------------------------
    def norm(self, n: int) -> float:
        """Closed-form squared norm h_n of the monic polynomial p_n."""
        raise NotImplementedError

    def recurrence(self, n_max: int):
        """Arrays (b, c) of the recurrence z p_k = p_{k+1} + b_k p_k + c_k p_{k-1}."""
        return np.zeros(n_max + 1), np.zeros(n_max + 1)

    # ---- quadrature -------------------------------------------------------
    _radial_panels = 1

    def tail_radius(self, tol: float, degree_hint: int) -> float:
        """Truncation radius with closed-form tail mass bound < tol/100."""
        raise NotImplementedError  # compact-support ensembles never call this

    def _build_rule(self, level: int, tol: float, degree_hint: int):
        radius = self.tail_radius(tol, degree_hint)
        n_r = max(8, int(48 * 2.0 ** level))
        n_t = max(8, int(max(48, degree_hint + 8) * 2.0 ** level))
        return quad.polar_plane_rule(self.weight, radius, n_r, n_t,
                                     n_panels=self._radial_panels)

    def quadrature_rule(self, level: int, tol: float = 1e-8, degree_hint: int = 40):
        key = (self, level, degree_hint, int(round(-np.log10(tol))))
        rule = _RULE_CACHE.get(key)
        if rule is None:
            rule = self._build_rule(level, tol, degree_hint)
            _RULE_CACHE[key] = rule
        return rule

    def init_radius(self, n_points: int) -> float:
        """Rough bulk radius used to seed samplers."""
        return float(np.sqrt(2.0 * n_points))


def _gaussian_tail_radius(lam: float, c2: float, coeff: float, tol: float,
                          degree_hint: int) -> float:
    """Radius R with coeff * int_R^inf r^(m+1+c2) e^(-r^(2 lam)) 2 pi r-measure < tol/100.

    The tail equals (pi/lam) * coeff * Gamma(s, R^(2 lam)) with
    s = (m + 2 + c2) / (2 lam).
    """
    s = (degree_hint + 2.0 + c2) / (2.0 * lam)
    target = tol * 1e-2
    radius = max(2.0, (2.0 * s) ** (1.0 / (2.0 * lam)))
    while (np.pi / lam) * coeff * _tail_gamma(s, radius ** (2.0 * lam)) > target:
        radius += 0.5
        if radius > 60.0:
            break
    return radius


def _exponential_tail_radius(rate: float, power_extra: float, prefstep,
                             tol: float, degree_hint: int) -> float:
    """Radius for weights bounded by prefstep(R) * r^(m+1+extra) e^(-rate r)."""
    s = degree_hint + 2.0 + power_extra
    target = tol * 1e-2
    radius = max(4.0, 2.0 * s / rate)
    while 2.0 * np.pi * prefstep(radius) * rate ** (-s) * _tail_gamma(s, rate * radius) > target:
        radius += 0.5
        if radius > 200.0:
            break
    return radius


# ---------------------------------------------------------------------------
# radial families on the full plane
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ginibre(Ensemble):
    """w(z) = exp(-|z|^2) on the plane."""

    radial = True

    @property
    def name(self):
        return "ginibre"

    def params(self):
        return {}

    def weight(self, z):
        z = np.asarray(z)
        return np.exp(-(z.real ** 2 + z.imag ** 2))

    def log_weight(self, z):
        z = np.asarray(z)
        return -(z.real ** 2 + z.imag ** 2)

    def norm(self, n: int) -> float:
        return np.pi * float(np.exp(log_gamma(n + 1.0)))

    def tail_radius(self, tol, degree_hint):
        return _gaussian_tail_radius(1.0, 0.0, 1.0, tol, degree_hint)


@dataclass(frozen=True)
class MittagLeffler(Ensemble):
    """w(z) = |z|^(2c) exp(-|z|^(2 lam)) on the plane."""

    lam: float
    c: float
    radial = True

    def __post_init__(self):
        if self.lam <= 0 or self.c <= -1:
            raise DomainError("mittag-leffler requires lam > 0 and c > -1")

    @property
    def name(self):
        return "mittag-leffler"

    def params(self):
        return {"lam": self.lam, "c": self.c}

    @property
    def _radial_panels(self):
        return 1 if float(2 * self.c).is_integer() and self.c >= 0 else 4

    def weight(self, z):
        r2 = np.asarray(z).real ** 2 + np.asarray(z).imag ** 2
        with np.errstate(divide="ignore"):
            return np.where(r2 > 0, r2 ** self.c, 1.0 if self.c == 0 else 0.0) \
                * np.exp(-r2 ** self.lam)

    def log_weight(self, z):
        r2 = np.asarray(z).real ** 2 + np.asarray(z).imag ** 2
        with np.errstate(divide="ignore"):
            return self.c * np.log(r2) - r2 ** self.lam

    def norm(self, n: int) -> float:
        return (np.pi / self.lam) * float(np.exp(log_gamma((n + 1.0 + self.c) / self.lam)))

    def tail_radius(self, tol, degree_hint):
        return _gaussian_tail_radius(self.lam, 2.0 * self.c, 1.0, tol, degree_hint)

    def init_radius(self, n_points):
        return float((2.0 * n_points / self.lam) ** (1.0 / (2.0 * self.lam))) + 1.0


@dataclass(frozen=True)
class ProductGinibre(Ensemble):
    """Product of M independent Ginibre factors, M in {1, 2}.

    M = 1: w = |z|^(2c) exp(-|z|^2); M = 2: w = 2 |z|^(2c) K_0(2|z|).
    """

    m_factors: int
    c: float
    radial = True

    def __post_init__(self):
        if self.m_factors not in (1, 2) or self.c <= -1:
            raise DomainError("product-ginibre requires M in {1,2} and c > -1")

    @property
    def name(self):
        return "product-ginibre"

    def params(self):
        return {"M": self.m_factors, "c": self.c}

    @property
    def _radial_panels(self):
        return 6 if self.m_factors == 2 else (1 if float(2 * self.c).is_integer() else 4)

    def weight(self, z):
        r = np.abs(np.asarray(z, dtype=complex))
        with np.errstate(divide="ignore"):
            rc = np.where(r > 0, r ** (2.0 * self.c), 1.0 if self.c == 0 else 0.0)
        if self.m_factors == 1:
            return rc * np.exp(-r ** 2)
        return 2.0 * rc * np.real(_sp.kv(0, 2.0 * r))

    def log_weight(self, z):
        r = np.abs(np.asarray(z, dtype=complex))
        with np.errstate(divide="ignore"):
            base = 2.0 * self.c * np.log(r)
        if self.m_factors == 1:
            return base - r ** 2
        return np.log(2.0) + base + np.log(_sp.kve(0, 2.0 * r)) - 2.0 * r

    def norm(self, n: int) -> float:
        return np.pi * float(np.exp(self.m_factors * log_gamma(n + 1.0 + self.c)))

    def tail_radius(self, tol, degree_hint):
        if self.m_factors == 1:
            return _gaussian_tail_radius(1.0, 2.0 * self.c, 1.0, tol, degree_hint)
        pref = lambda R: 2.0 * float(_sp.kv(0, 2.0 * R)) * np.exp(2.0 * R)
        return _exponential_tail_radius(2.0, 2.0 * self.c, pref, tol, degree_hint)

    def init_radius(self, n_points):
        return float(n_points) + 1.0 if self.m_factors == 2 else float(np.sqrt(2.0 * n_points))


@dataclass(frozen=True)
class TruncatedSymplectic(Ensemble):
    """w(z) = (1 + alpha)(1 - |z|^2)^alpha on the unit disc."""

    alpha: float
    radial = True
    domain = "disc"

    def __post_init__(self):
        if self.alpha <= -1:
            raise DomainError("truncated-symplectic requires alpha > -1")

    @property
    def name(self):
        return "truncated-symplectic"

    def params(self):
        return {"alpha": self.alpha}

    def weight(self, z):
        r2 = np.asarray(z).real ** 2 + np.asarray(z).imag ** 2
        inside = r2 < 1.0
        return np.where(inside, (1.0 + self.alpha) * np.abs(1.0 - r2) ** self.alpha, 0.0)

    def log_weight(self, z):
        r2 = np.asarray(z).real ** 2 + np.asarray(z).imag ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(r2 < 1.0,
                            np.log(1.0 + self.alpha) + self.alpha * np.log1p(-r2),
                            -np.inf)

    def in_support(self, z):
        z = np.asarray(z)
        return z.real ** 2 + z.imag ** 2 < 1.0

    def norm(self, n: int) -> float:
        return np.pi * float(np.exp(log_gamma(n + 1.0) + log_gamma(self.alpha + 2.0)
                                    - log_gamma(n + self.alpha + 2.0)))

    def _build_rule(self, level, tol, degree_hint):
        n_r = max(8, int(48 * 2.0 ** level))
        n_t = max(8, int(max(48, degree_hint + 8) * 2.0 ** level))
        return quad.elliptic_disc_rule(self.alpha, 1.0, 1.0, n_r, n_t,
                                       prefactor=1.0 + self.alpha)

    def init_radius(self, n_points):
        return 0.9


# ---------------------------------------------------------------------------
# elliptic-disc and contour families
# ---------------------------------------------------------------------------


def _gegenbauer_value(mu: float, n: int, x: float) -> float:
    """C_n^(mu)(x) by the standard three-term recurrence."""
    if n == 0:
        return 1.0
    prev, cur = 1.0, 2.0 * mu * x
    for k in range(2, n + 1):
        prev, cur = cur, (2.0 * x * (k + mu - 1.0) * cur - (k + 2.0 * mu - 2.0) * prev) / k
    return cur


@dataclass(frozen=True)
class Gegenbauer(Ensemble):
    """w(z) = (1 + alpha)(1 - (x/a)^2 - (y/b)^2)^alpha on the elliptic disc, a > b."""

    alpha: float
    a: float
    b: float
    domain = "disc"
    family = "gegenbauer"

    def __post_init__(self):
        if not (self.a > self.b > 0) or self.alpha <= -1:
            raise DomainError("gegenbauer requires a > b > 0 and alpha > -1")

    @property
    def name(self):
        return "gegenbauer"

    def params(self):
        return {"alpha": self.alpha, "a": self.a, "b": self.b}

    @property
    def focal(self) -> float:
        return float(np.sqrt(self.a ** 2 - self.b ** 2))

    def _h_of_z(self, z):
        z = np.asarray(z)
        return (z.real / self.a) ** 2 + (z.imag / self.b) ** 2

    def weight(self, z):
        h = self._h_of_z(z)
        return np.where(h < 1.0, (1.0 + self.alpha) * np.abs(1.0 - h) ** self.alpha, 0.0)

    def log_weight(self, z):
        h = self._h_of_z(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(h < 1.0,
                            np.log(1.0 + self.alpha) + self.alpha * np.log1p(-h),
                            -np.inf)

    def in_support(self, z):
        return self._h_of_z(z) < 1.0

    def norm(self, n: int) -> float:
        mu = 1.0 + self.alpha
        cf = self.focal
        big_r = (self.a ** 2 + self.b ** 2) / (self.a ** 2 - self.b ** 2)
        ratio = float(np.exp(log_gamma(n + 1.0) - (log_gamma(mu + n) - log_gamma(mu))))
        return (np.pi * self.a * self.b * mu / (n + mu)) * (cf / 2.0) ** (2 * n) \
            * ratio ** 2 * _gegenbauer_value(mu, n, big_r)

    def recurrence(self, n_max: int):
        ns = np.arange(n_max + 1, dtype=float)
        mu = 1.0 + self.alpha
        c = np.zeros(n_max + 1)
        if n_max >= 1:
            k = ns[1:]
            c[1:] = k * (k + 2.0 * self.alpha + 1.0) / ((k + self.alpha) * (k + mu)) \
                * (self.focal / 2.0) ** 2
        return np.zeros(n_max + 1), c

    def _build_rule(self, level, tol, degree_hint):
        n_r = max(8, int(48 * 2.0 ** level))
        n_t = max(8, int(max(48, degree_hint + 8) * 2.0 ** level))
        return quad.elliptic_disc_rule(self.alpha, self.a, self.b, n_r, n_t,
                                       prefactor=1.0 + self.alpha)

    def init_radius(self, n_points):
        return 0.9 * self.b


@dataclass(frozen=True)
class ChebyshevEllipse(Ensemble):
    """w(z) = sqrt|(c + z)/(c - z)| with arc-length measure on the ellipse boundary."""

    a: float
    b: float
    domain = "contour"
    family = "chebyshev3"

    def __post_init__(self):
        if not (self.a > self.b > 0):
            raise DomainError("chebyshev-ellipse requires a > b > 0")

    @property
    def name(self):
        return "chebyshev-ellipse"

    def params(self):
        return {"a": self.a, "b": self.b}

    @property
    def focal(self) -> float:
        return float(np.sqrt(self.a ** 2 - self.b ** 2))

    def weight(self, z):
        z = np.asarray(z, dtype=complex)
        cf = self.focal
        return np.sqrt(np.abs((cf + z) / (cf - z)))

    def norm(self, n: int) -> float:
        return np.pi * ((self.a + self.b) ** (2 * n + 1)
                        + (self.a - self.b) ** (2 * n + 1)) / 4.0 ** n

    def recurrence(self, n_max: int):
        b = np.zeros(n_max + 1)
        c = np.zeros(n_max + 1)
        b[0] = self.focal / 2.0
        if n_max >= 1:
            c[1:] = self.focal ** 2 / 4.0
        return b, c

    def _build_rule(self, level, tol, degree_hint):
        n_t = max(8, int(max(128, 4 * degree_hint) * 2.0 ** level))
        return quad.elliptic_contour_rule(self.weight, self.a, self.b, n_t)

    def init_radius(self, n_points):
        return self.a


# ---------------------------------------------------------------------------
# elliptic Gaussian (Hermite) and chiral (Laguerre) families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EllipticGinibre(Ensemble):
    """w(z) = exp(-A|z|^2 + B Re z^2) on the plane; tau = B/A in [0, 1)."""

    bigA: float
    bigB: float
    family = "hermite"

    def __post_init__(self):
        if not (self.bigA > self.bigB >= 0):
            raise DomainError("elliptic requires A > B >= 0")

    @classmethod
    def from_tau(cls, tau: float) -> "EllipticGinibre":
        if not 0 <= tau < 1:
            raise DomainError(f"elliptic requires 0 <= tau < 1, got {tau}")
        if tau == 0:
            return cls(1.0, 0.0)
        return cls(1.0 / (1.0 - tau ** 2), tau / (1.0 - tau ** 2))

    @property
    def tau(self) -> float:
        return self.bigB / self.bigA

    @property
    def name(self):
        return "elliptic"

    def params(self):
        return {"A": self.bigA, "B": self.bigB}

    def weight(self, z):
        z = np.asarray(z)
        return np.exp(self.log_weight(z))

    def log_weight(self, z):
        z = np.asarray(z)
        return -self.bigA * (z.real ** 2 + z.imag ** 2) \
            + self.bigB * (z.real ** 2 - z.imag ** 2)

    def norm(self, n: int) -> float:
        d = self.bigA ** 2 - self.bigB ** 2
        return np.pi / np.sqrt(d) * float(np.exp(log_gamma(n + 1.0))) * (self.bigA / d) ** n

    def recurrence(self, n_max: int):
        ns = np.arange(n_max + 1, dtype=float)
        return np.zeros(n_max + 1), ns * self.bigB / (self.bigA ** 2 - self.bigB ** 2)

    def tail_radius(self, tol, degree_hint):
        rate = self.bigA - self.bigB
        s = (degree_hint + 2.0) / 2.0
        target = tol * 1e-2
        radius = max(2.0, np.sqrt(2.0 * s / rate))
        while np.pi * rate ** (-s) * _tail_gamma(s, rate * radius ** 2) > target:
            radius += 0.5
            if radius > 80.0:
                break
        return radius

    def init_radius(self, n_points):
        return float((1.0 + self.tau) * np.sqrt(2.0 * n_points / (1.0 - self.tau ** 2)))


@dataclass(frozen=True)
class ChiralElliptic(Ensemble):
    """w(z) = |z|^nu K_nu(A|z|) exp(B Re z) on the plane; tau = B/A."""

    bigA: float
    bigB: float
    nu: float
    family = "laguerre"
    _radial_panels = 4

    def __post_init__(self):
        if not (self.bigA > self.bigB >= 0) or self.nu <= -1:
            raise DomainError("chiral requires A > B >= 0 and nu > -1")

    @classmethod
    def from_tau(cls, tau: float, nu: float) -> "ChiralElliptic":
        if not 0 <= tau < 1:
            raise DomainError(f"chiral requires 0 <= tau < 1, got {tau}")
        return cls(2.0 / (1.0 - tau ** 2), 2.0 * tau / (1.0 - tau ** 2), nu)

    @property
    def tau(self) -> float:
        return self.bigB / self.bigA

    @property
    def name(self):
        return "chiral"

    def params(self):
        return {"A": self.bigA, "B": self.bigB, "nu": self.nu}

    def weight(self, z):
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            rn = np.where(r > 0, r ** self.nu, 1.0 if self.nu == 0 else 0.0)
            kval = np.where(r > 0, _sp.kv(self.nu, self.bigA * np.maximum(r, 1e-300)), np.inf)
        return rn * np.real(kval) * np.exp(self.bigB * z.real)

    def log_weight(self, z):
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            logk = np.log(_sp.kve(self.nu, self.bigA * np.maximum(r, 1e-300))) \
                - self.bigA * r
            return self.nu * np.log(r) + logk + self.bigB * z.real

    def norm(self, n: int) -> float:
        d = self.bigA ** 2 - self.bigB ** 2
        return (np.pi / self.bigA) * float(np.exp(
            log_gamma(n + 1.0) + log_gamma(n + self.nu + 1.0)
            + (2 * n + self.nu + 1.0) * np.log(2.0 * self.bigA / d)))

    def recurrence(self, n_max: int):
        t = 2.0 * self.bigB / (self.bigA ** 2 - self.bigB ** 2)
        ns = np.arange(n_max + 1, dtype=float)
        return t * (2.0 * ns + 1.0 + self.nu), t ** 2 * ns * (ns + self.nu)

    def tail_radius(self, tol, degree_hint):
        rate = self.bigA - self.bigB
        pref = lambda R: float(bessel("K", self.nu, self.bigA * R)) * np.exp(self.bigA * R)
        return _exponential_tail_radius(rate, self.nu, pref, tol, degree_hint)

    def init_radius(self, n_points):
        return float(2.0 * n_points * (1.0 + self.tau ** 2) / (1.0 - self.tau ** 2)) + 1.0


# ---------------------------------------------------------------------------
# Christoffel-perturbed measure |z - m|^2 w(z)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PerturbedWeight(Ensemble):
    """The base measure multiplied by |z - m|^2 (same support)."""

    base: Ensemble
    m: float

    @property
    def name(self):
        return f"perturbed-{self.base.name}"

    def params(self):
        return dict(self.base.params(), m=self.m)

    @property
    def domain(self):
        return self.base.domain

    def weight(self, z):
        z = np.asarray(z, dtype=complex)
        return np.abs(z - self.m) ** 2 * self.base.weight(z)

    def log_weight(self, z):
        z = np.asarray(z, dtype=complex)
        return 2.0 * np.log(np.abs(z - self.m)) + self.base.log_weight(z)

    def in_support(self, z):
        return self.base.in_support(z)

    def _build_rule(self, level, tol, degree_hint):
        rule = self.base.quadrature_rule(level, tol=tol, degree_hint=degree_hint + 2)
        extra = np.abs(rule.nodes - self.m) ** 2
        return quad.QuadratureRule(rule.nodes, rule.weights * extra, rule.domain_tag)

    def init_radius(self, n_points):
        return self.base.init_radius(n_points)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

ENSEMBLE_NAMES = (
    "ginibre",
    "mittag-leffler",
    "truncated-symplectic",
    "product-ginibre",
    "gegenbauer",
    "chebyshev-ellipse",
    "elliptic",
    "chiral",
)


def make_ensemble(name: str, **kw) -> Ensemble:
    """Build an ensemble by registry name, validating parameter ranges.

    Accepted parameters: tau (elliptic/chiral), nu (chiral), A/B
    (elliptic/chiral direct), lam/c (mittag-leffler), alpha
    (truncated-symplectic, gegenbauer), a/b (gegenbauer,
    chebyshev-ellipse), M/c (product-ginibre).
    """
    name = name.lower()
    if name == "ginibre":
        return Ginibre()
    if name == "mittag-leffler":
        return MittagLeffler(lam=float(kw.get("lam", 1.0)), c=float(kw.get("c", 0.0)))
    if name == "truncated-symplectic":
        return TruncatedSymplectic(alpha=float(kw.get("alpha", 0.0)))
    if name == "product-ginibre":
        return ProductGinibre(m_factors=int(kw.get("M", 1)), c=float(kw.get("c", 0.0)))
    if name == "gegenbauer":
        return Gegenbauer(alpha=float(kw.get("alpha", 0.0)),
                          a=float(kw.get("a", 2.0)), b=float(kw.get("b", 1.0)))
    if name == "chebyshev-ellipse":
        return ChebyshevEllipse(a=float(kw.get("a", 2.0)), b=float(kw.get("b", 1.0)))
    if name == "elliptic":
        if "A" in kw or "B" in kw:
            return EllipticGinibre(bigA=float(kw["A"]), bigB=float(kw.get("B", 0.0)))
        return EllipticGinibre.from_tau(float(kw.get("tau", 0.0)))
    if name == "chiral":
        nu = float(kw.get("nu", 0.0))
        if "A" in kw or "B" in kw:
            return ChiralElliptic(bigA=float(kw["A"]), bigB=float(kw.get("B", 0.0)), nu=nu)
        return ChiralElliptic.from_tau(float(kw.get("tau", 0.0)), nu)
    raise DomainError(f"unknown ensemble {name!r}; known: {', '.join(ENSEMBLE_NAMES)}")
