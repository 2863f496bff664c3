"""Quadrature rules for the planar, disc and contour measures.

A :class:`QuadratureRule` carries complex nodes and *real* weights that
already include the weight function and the geometric Jacobian, so that
``sum(w * f(nodes))`` approximates the integral of ``f`` against the
ensemble measure.  Builders are provided for the three support
geometries used by the ensembles:

* radial/general weights on the full plane  -> truncated polar grid,
* weights on an elliptic disc               -> polar map with Gauss-Jacobi
  radial nodes (handles (1 - rho^2)^alpha exactly for fractional alpha),
* arc-length measures on an elliptic contour -> periodic trapezoid rule.

``quad_planar`` drives the rules with node doubling until two successive
levels agree, and raises :class:`QuadratureError` with the achieved
estimate otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

from .special import QuadratureError

__all__ = [
    "QuadratureRule",
    "legendre_rule",
    "polar_plane_rule",
    "elliptic_disc_rule",
    "elliptic_contour_rule",
    "quad_planar",
    "adaptive_gl",
    "MAX_LEVEL",
]

MAX_LEVEL = 4


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes + weights realizing one measure on one domain."""

    nodes: np.ndarray
    weights: np.ndarray
    domain_tag: str  # 'real-line-segment' | 'planar-region' | 'elliptic-contour'

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise ValueError("nodes and weights must have equal length")

    def integrate(self, f):
        return np.sum(self.weights * f(self.nodes))


def legendre_rule(n: int, a: float, b: float) -> QuadratureRule:
    """n-point Gauss-Legendre rule on the real segment [a, b]."""
    x, w = leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return QuadratureRule(mid + half * x, half * w, "real-line-segment")


def _radial_panels(radius: float, n_panels: int) -> list[tuple[float, float]]:
    """Split [0, radius] into geometrically growing panels toward 0.

    A single panel is the common (smooth-weight) case; several panels
    concentrate nodes near the origin for weights with log or fractional
    power behaviour there (Bessel-K, |z|^{2c}).
    """
    if n_panels <= 1:
        return [(0.0, radius)]
    cuts = [0.0] + [radius * 2.0 ** (k - n_panels + 1) for k in range(n_panels)]
    return list(zip(cuts[:-1], cuts[1:]))


def polar_plane_rule(weight, radius: float, n_r: int, n_t: int,
                     n_panels: int = 1) -> QuadratureRule:
    """Tensor rule r x theta for a planar weight truncated at |z| = radius.

    ``weight`` maps complex z to the (real, nonnegative) density against
    Lebesgue measure dA; the returned weights include weight * r * dr * dtheta.
    """
    rs, wrs = [], []
    for a, b in _radial_panels(radius, n_panels):
        x, w = leggauss(n_r)
        rs.append(0.5 * (a + b) + 0.5 * (b - a) * x)
        wrs.append(0.5 * (b - a) * w)
    r = np.concatenate(rs)
    wr = np.concatenate(wrs)
    theta = 2.0 * np.pi * np.arange(n_t) / n_t
    wt = 2.0 * np.pi / n_t
    z = r[:, None] * np.exp(1j * theta)[None, :]
    wgt = (wr * r)[:, None] * wt * np.real(weight(z))
    return QuadratureRule(z.ravel(), wgt.ravel(), "planar-region")


def elliptic_disc_rule(alpha: float, a: float, b: float, n_r: int, n_t: int,
                       prefactor: float = 1.0) -> QuadratureRule:
    """Rule for (prefactor) * (1 - (x/a)^2 - (y/b)^2)^alpha on the elliptic disc.

    Uses x = a*rho*cos(phi), y = b*rho*sin(phi) and Gauss-Jacobi nodes in
    t = 2*rho^2 - 1 so the (1 - rho^2)^alpha factor is integrated exactly.
    """
    t, wt = roots_jacobi(n_r, alpha, 0.0)
    rho = np.sqrt(0.5 * (1.0 + t))
    # int_0^1 F(rho) (1-rho^2)^alpha rho drho = 2^(-alpha-2) sum wt F(rho(t))
    wrad = wt * 2.0 ** (-alpha - 2.0)
    phi = 2.0 * np.pi * np.arange(n_t) / n_t
    wphi = 2.0 * np.pi / n_t
    z = a * rho[:, None] * np.cos(phi)[None, :] + 1j * b * rho[:, None] * np.sin(phi)[None, :]
    wgt = prefactor * a * b * wrad[:, None] * np.full_like(phi, wphi)[None, :]
    return QuadratureRule(z.ravel(), np.broadcast_to(wgt, z.shape).ravel().copy(),
                          "planar-region")


def elliptic_contour_rule(weight, a: float, b: float, n_t: int) -> QuadratureRule:
    """Arc-length rule on the ellipse x = a cos(theta), y = b sin(theta).

    The integrand is 2*pi periodic and smooth, so the equispaced
    trapezoid rule converges spectrally.
    """
    theta = 2.0 * np.pi * np.arange(n_t) / n_t
    z = a * np.cos(theta) + 1j * b * np.sin(theta)
    ds = np.sqrt((a * np.sin(theta)) ** 2 + (b * np.cos(theta)) ** 2)
    wgt = (2.0 * np.pi / n_t) * ds * np.real(weight(z))
    return QuadratureRule(z, wgt, "elliptic-contour")


def quad_planar(f, ensemble, tol: float = 1e-8, degree_hint: int = 40):
    """Integrate ``f`` against the ensemble measure with node doubling.

    Levels double the node counts (and, for plane weights, the tail
    radius certified by the ensemble's closed-form bound is fixed from
    ``tol`` and ``degree_hint``).  Convergence requires two successive
    levels to agree within ``tol * (1 + |I|)``.
    """
    prev = None
    for level in range(MAX_LEVEL + 1):
        rule = ensemble.quadrature_rule(level, tol=tol, degree_hint=degree_hint)
        cur = complex(np.sum(rule.weights * f(rule.nodes)))
        if prev is not None:
            err = abs(cur - prev)
            if err <= tol * (1.0 + abs(cur)):
                return cur
        prev = cur
    raise QuadratureError(
        f"quad_planar did not converge for {ensemble.name}: last change {err:.3e}",
        estimate=err,
    )


def adaptive_gl(f, a: float, b: float, n0: int = 64, rtol: float = 1e-10,
                max_doublings: int = 5):
    """Gauss-Legendre on [a, b] doubling nodes until two passes agree.

    ``f`` must be vectorized over the node array.  Used for the smooth
    alpha-integrals of the limiting Bessel kernels.
    """
    prev = None
    diff = np.inf
    n = n0
    for _ in range(max_doublings + 1):
        x, w = leggauss(n)
        xs = 0.5 * (a + b) + 0.5 * (b - a) * x
        cur = 0.5 * (b - a) * np.sum(w * f(xs), axis=-1)
        if prev is not None:
            diff = float(np.max(np.abs(cur - prev)))
            if np.all(np.abs(cur - prev) <= rtol * (1.0 + np.abs(cur))):
                return cur
        prev = cur
        n *= 2
    raise QuadratureError("adaptive_gl did not stabilize", estimate=diff)
