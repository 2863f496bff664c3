"""Ensemble registry: weights, supports, norms, and validation."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from sopkit.ensembles import PerturbedWeight, make_ensemble
from sopkit.quadrature import quad_planar
from sopkit.special import DomainError

ALL_NAMES = [
    ("ginibre", {}),
    ("mittag-leffler", {"lam": 2.0, "c": 0.5}),
    ("truncated-symplectic", {"alpha": 1.0}),
    ("product-ginibre", {"M": 2, "c": 0.0}),
    ("gegenbauer", {"alpha": 1.0, "a": 2.0, "b": 1.0}),
    ("chebyshev-ellipse", {"a": 2.0, "b": 1.0}),
    ("elliptic", {"tau": 0.5}),
    ("chiral", {"tau": 0.5, "nu": 0.5}),
]


def test_unknown_name_rejected():
    with pytest.raises(DomainError):
        make_ensemble("circular")


def test_parameter_validation():
    bad = [
        ("elliptic", {"tau": 1.5}),
        ("elliptic", {"tau": -0.1}),
        ("chiral", {"tau": 0.5, "nu": -1.0}),
        ("truncated-symplectic", {"alpha": -1.5}),
        ("mittag-leffler", {"lam": 0.0}),
        ("mittag-leffler", {"lam": 1.0, "c": -1.0}),
        ("gegenbauer", {"alpha": 0.0, "a": 1.0, "b": 2.0}),
        ("chebyshev-ellipse", {"a": 1.0, "b": 1.0}),
        ("chebyshev-ellipse", {"a": 2.0, "b": 0.0}),
        ("product-ginibre", {"M": 0}),
    ]
    for name, kw in bad:
        with pytest.raises(DomainError):
            make_ensemble(name, **kw)


def test_ginibre_weight():
    ens = make_ensemble("ginibre")
    assert_allclose(ens.weight(1.0 + 1.0j), math.exp(-2.0), rtol=1e-14)
    assert ens.radial
    assert ens.domain == "plane"


def test_mittag_leffler_weight_form():
    # |z|^{2c} exp(-|z|^{2 lam}) reproduces the closed moments below
    ens = make_ensemble("mittag-leffler", lam=2.0, c=0.5)
    z = 1.3 * np.exp(0.4j)
    want = abs(z) ** 1.0 * math.exp(-abs(z) ** 4.0)
    assert_allclose(ens.weight(z), want, rtol=1e-13)


def test_truncated_symplectic_support():
    ens = make_ensemble("truncated-symplectic", alpha=1.0)
    assert ens.domain == "disc"
    assert ens.in_support(0.5j)
    assert not ens.in_support(1.2)
    assert ens.weight(1.5) == 0.0
    # normalized so the mass is pi: (1 + alpha)(1 - |z|^2)^alpha
    assert_allclose(ens.weight(0.6), 2.0 * (1 - 0.36) ** 1.0, rtol=1e-14)
    assert_allclose(ens.norm(0), math.pi, rtol=1e-13)


def test_elliptic_weight_closed_form():
    tau = 0.5
    ens = make_ensemble("elliptic", tau=tau)
    for z in (0.4 + 0.9j, -1.1 + 0.2j):
        want = math.exp(-z.real ** 2 / (1 + tau) - z.imag ** 2 / (1 - tau))
        assert_allclose(ens.weight(z), want, rtol=1e-13)
    assert ens.family == "hermite"
    assert not ens.radial


def test_family_tags():
    tags = {
        "ginibre": "monomial",
        "mittag-leffler": "monomial",
        "truncated-symplectic": "monomial",
        "product-ginibre": "monomial",
        "gegenbauer": "gegenbauer",
        "chebyshev-ellipse": "chebyshev3",
        "elliptic": "hermite",
        "chiral": "laguerre",
    }
    for (name, kw) in ALL_NAMES:
        assert make_ensemble(name, **kw).family == tags[name]


def test_weight_conjugation_symmetry():
    """Every registered weight is symmetric about the real axis."""
    for name, kw in ALL_NAMES:
        ens = make_ensemble(name, **kw)
        z = 0.31 + 0.17j if ens.domain != "contour" else None
        if z is None:
            continue
        assert_allclose(ens.weight(np.conj(z)), ens.weight(z), rtol=1e-12)


def test_ginibre_norms():
    ens = make_ensemble("ginibre")
    for n in range(5):
        assert_allclose(ens.norm(n), math.pi * math.factorial(n), rtol=1e-13)


def test_mittag_leffler_norm_closed_form():
    # h_n = (pi/lam) Gamma((n+1+c)/lam)
    ens = make_ensemble("mittag-leffler", lam=1.0, c=0.0)
    assert_allclose(ens.norm(3), 6.0 * math.pi, rtol=1e-13)
    ens = make_ensemble("mittag-leffler", lam=2.0, c=0.5)
    for n in range(4):
        want = (math.pi / 2.0) * math.gamma((n + 1.5) / 2.0)
        assert_allclose(ens.norm(n), want, rtol=1e-13)


def test_chebyshev_norm_closed_form():
    ens = make_ensemble("chebyshev-ellipse", a=2.0, b=1.0)
    assert_allclose(ens.norm(0), 4.0 * math.pi, rtol=1e-13)
    for n in range(4):
        want = math.pi * (3.0 ** (2 * n + 1) + 1.0) / 4.0 ** n
        assert_allclose(ens.norm(n), want, rtol=1e-13)


def test_elliptic_norm_zero():
    tau = 0.5
    ens = make_ensemble("elliptic", tau=tau)
    assert_allclose(ens.norm(0), math.pi * math.sqrt(1 - tau ** 2), rtol=1e-13)


def test_radial_norms_match_quadrature():
    """Closed-form |z|^{2n} moments vs planar quadrature, several families."""
    cases = [
        ("ginibre", {}),
        ("mittag-leffler", {"lam": 2.0, "c": 0.5}),
        ("truncated-symplectic", {"alpha": 1.0}),
        ("product-ginibre", {"M": 2, "c": 0.5}),
    ]
    for name, kw in cases:
        ens = make_ensemble(name, **kw)
        for n in (0, 2, 5):
            val = quad_planar(lambda z: np.abs(z) ** (2 * n), ens, tol=1e-9)
            assert_allclose(val.real, ens.norm(n), rtol=1e-7,
                            err_msg=f"{name} n={n}")


def test_tail_radius_monotone():
    ens = make_ensemble("ginibre")
    r_tight = ens.tail_radius(1e-12, 40)
    r_loose = ens.tail_radius(1e-6, 40)
    assert r_tight > r_loose > 0.0
    assert ens.tail_radius(1e-8, 80) > ens.tail_radius(1e-8, 20)


def test_init_radius_positive():
    for name, kw in ALL_NAMES:
        ens = make_ensemble(name, **kw)
        if ens.domain == "contour":
            continue
        assert ens.init_radius(8) > 0.0


def test_perturbed_weight():
    base = make_ensemble("ginibre")
    ens = PerturbedWeight(base, 0.7)
    z = 0.3 + 0.4j
    assert_allclose(ens.weight(z), abs(z - 0.7) ** 2 * base.weight(z), rtol=1e-14)
    assert ens.params()["m"] == 0.7
    assert ens.in_support(z) == base.in_support(z)


def test_params_round_trip():
    for name, kw in ALL_NAMES:
        ens = make_ensemble(name, **kw)
        params = ens.params()
        again = make_ensemble(name, **params)
        assert again.params() == params
