"""Monic orthogonal-polynomial families: recurrences, coefficients, norms."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from numpy.polynomial.hermite import hermval
from scipy.special import chebyu, eval_gegenbauer

from sopkit.ensembles import make_ensemble
from sopkit.polynomials import (
    COEFF_DEGREE_CAP,
    OPSystem,
    classical_factor,
    op_coeffs,
    op_eval,
    op_norm,
    op_system,
    poly_degree,
    poly_divide_linear,
    poly_eval,
    poly_mul,
    poly_trim,
)
from sopkit.quadrature import quad_planar
from sopkit.special import DomainError


def test_poly_helpers():
    assert poly_degree([1.0, 0.0, 3.0, 0.0]) == 2
    assert list(poly_trim([1.0, 2.0, 0.0, 0.0])) == [1.0, 2.0]
    prod = poly_mul([1.0, 1.0], [2.0, 0.0, 1.0])  # (1+z)(2+z^2)
    assert_allclose(prod, [2.0, 2.0, 1.0, 1.0])
    assert poly_eval([2.0, 2.0, 1.0, 1.0], 2.0) == 18.0


def test_poly_divide_linear_reconstructs():
    """p(z) = (m - z) q(z) + remainder, checked on random coefficients."""
    rng = np.random.default_rng(7)
    for _ in range(5):
        p = rng.normal(size=6)
        m = rng.normal()
        q, rem = poly_divide_linear(p, m)
        z = rng.normal(size=4) + 1j * rng.normal(size=4)
        assert_allclose((m - z) * poly_eval(q, z) + rem, poly_eval(p, z),
                        rtol=1e-12, atol=1e-12)


def test_poly_divide_linear_exact_at_root():
    # numerator vanishing at z = m divides with (numerically) zero remainder
    p = np.array([-0.25, 0.0, 1.0])  # z^2 - 1/4, root at 0.5
    q, rem = poly_divide_linear(p, 0.5)
    assert abs(rem) < 1e-14
    assert_allclose(q, [-0.5, -1.0], atol=1e-14)  # (0.5 - z) * (-z - 0.5)


def test_monomial_family():
    ens = make_ensemble("ginibre")
    sys = op_system(ens, 8)
    assert op_eval(sys, 7, 2.0) == 128.0
    assert_allclose(op_coeffs(sys, 4), [0, 0, 0, 0, 1.0])
    assert_allclose(op_coeffs(sys, 0), [1.0])


def test_hermite_family_recurrence():
    tau = 0.5
    sys = op_system(make_ensemble("elliptic", tau=tau), 6)
    z = 0.7 - 0.3j
    # p_2 = z^2 - tau
    assert_allclose(op_eval(sys, 2, z), z * z - tau, rtol=1e-14)
    assert_allclose(sys.c[1:5], tau * np.arange(1, 5), rtol=1e-13)
    assert np.all(sys.b[:5] == 0.0)


def test_hermite_coeffs_third():
    sys = op_system(make_ensemble("elliptic", tau=1.0 / 3.0), 4)
    assert_allclose(op_coeffs(sys, 2), [-1.0 / 3.0, 0.0, 1.0], rtol=1e-14)


def test_laguerre_family_recurrence():
    tau, nu = 0.4, 0.5
    sys = op_system(make_ensemble("chiral", tau=tau, nu=nu), 6)
    z = 1.1 + 0.6j
    # p_1 = z - tau (nu + 1)
    assert_allclose(op_eval(sys, 1, z), z - tau * (nu + 1.0), rtol=1e-14)
    # c_n = tau^2 n (n + nu)
    ns = np.arange(1, 5)
    assert_allclose(sys.c[1:5], tau ** 2 * ns * (ns + nu), rtol=1e-12)


def test_chebyshev_contour_recurrence():
    a, b = 2.0, 1.0
    cf = math.sqrt(a * a - b * b)
    sys = op_system(make_ensemble("chebyshev-ellipse", a=a, b=b), 6)
    # p_1 = z - cf/2 and c_n = cf^2/4 for n >= 1
    assert_allclose(sys.b[0], cf / 2.0, rtol=1e-13)
    assert_allclose(sys.c[1:5], np.full(4, cf * cf / 4.0), rtol=1e-13)


def test_classical_factor_hermite():
    tau = 0.5
    sys = op_system(make_ensemble("elliptic", tau=tau), 8)
    for n in (2, 3, 5):
        s, v = classical_factor(sys, n)
        z = 0.8 + 0.4j
        hn = hermval(s * z, [0.0] * n + [1.0])  # physicists' H_n
        assert_allclose(op_eval(sys, n, z), v * hn, rtol=1e-12)


def test_gegenbauer_matches_scipy():
    alpha, a, b = 1.0, 2.0, 1.0
    sys = op_system(make_ensemble("gegenbauer", alpha=alpha, a=a, b=b), 8)
    for n in (1, 2, 4):
        s, v = classical_factor(sys, n)
        z = 0.6 - 0.2j
        assert_allclose(op_eval(sys, n, z), v * eval_gegenbauer(n, 1.0 + alpha, s * z),
                        rtol=1e-12)


def test_gegenbauer_reduces_to_chebyshev_u():
    """At alpha = 0 the elliptic-disc family degenerates to Chebyshev U.

    Checked coefficientwise: p_n(z) = v * U_n(s z) with the monic scale
    factors from classical_factor.
    """
    sys = op_system(make_ensemble("gegenbauer", alpha=0.0, a=2.0, b=1.0), 8)
    for n in range(1, 9):
        s, v = classical_factor(sys, n)
        u = chebyu(n).coef[::-1]  # ascending U_n coefficients
        want = v * u * s ** np.arange(n + 1)
        got = op_coeffs(sys, n)
        assert np.max(np.abs(got - want)) <= 1e-12 * np.max(np.abs(want))


def test_op_norm_closed_forms():
    assert_allclose(op_norm(make_ensemble("mittag-leffler", lam=1.0, c=0.0), 3),
                    6.0 * math.pi, rtol=1e-13)
    assert_allclose(op_norm(make_ensemble("chebyshev-ellipse", a=2.0, b=1.0), 0),
                    4.0 * math.pi, rtol=1e-13)
    tau = 0.5
    assert_allclose(op_norm(make_ensemble("elliptic", tau=tau), 0),
                    math.pi * math.sqrt(1.0 - tau ** 2), rtol=1e-13)


def test_op_norm_matches_quadrature():
    """h_n = <p_n, p_n> against planar quadrature for several geometries."""
    cases = [
        ("ginibre", {}),
        ("gegenbauer", {"alpha": 1.0, "a": 2.0, "b": 1.0}),
        ("elliptic", {"tau": 0.5}),
    ]
    for name, kw in cases:
        ens = make_ensemble(name, **kw)
        sys = op_system(ens, 8)
        for n in (0, 3, 6):
            val = quad_planar(lambda z: np.abs(op_eval(sys, n, z)) ** 2, ens,
                              tol=1e-9)
            assert_allclose(val.real, op_norm(ens, n), rtol=1e-7,
                            err_msg=f"{name} n={n}")


def test_orthogonality_by_quadrature():
    for name, kw in [("ginibre", {}), ("truncated-symplectic", {"alpha": 1.0})]:
        ens = make_ensemble(name, **kw)
        sys = op_system(ens, 6)
        for n in range(4):
            for m in range(n + 1, 5):
                val = quad_planar(
                    lambda z: op_eval(sys, n, z) * np.conj(op_eval(sys, m, z)),
                    ens, tol=1e-9)
                bound = 1e-7 * math.sqrt(op_norm(ens, n) * op_norm(ens, m))
                assert abs(val) <= bound, f"{name} <p{n}, p{m}> = {val}"


def test_coefficients_are_real():
    for name, kw in [("elliptic", {"tau": 0.5}),
                     ("chiral", {"tau": 0.4, "nu": 0.5}),
                     ("gegenbauer", {"alpha": 1.0, "a": 2.0, "b": 1.0})]:
        sys = op_system(make_ensemble(name, **kw), 6)
        for n in range(6):
            coeffs = op_coeffs(sys, n)
            assert not np.iscomplexobj(coeffs)
            z = 0.4 + 1.1j
            assert_allclose(np.conj(op_eval(sys, n, z)), op_eval(sys, n, np.conj(z)),
                            rtol=1e-12)


def test_recurrence_vs_coefficient_evaluation():
    sys = op_system(make_ensemble("elliptic", tau=0.5), 14)
    rng = np.random.default_rng(11)
    for n in (5, 9, 12):
        coeffs = op_coeffs(sys, n)
        for _ in range(4):
            z = rng.uniform(-10, 10) + 1j * rng.uniform(-10, 10)
            a = op_eval(sys, n, z)
            b = poly_eval(coeffs, z)
            assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_coefficient_degree_cap():
    sys = op_system(make_ensemble("ginibre"), COEFF_DEGREE_CAP + 4)
    with pytest.raises(DomainError):
        op_coeffs(sys, COEFF_DEGREE_CAP + 1)


def test_opsystem_validation():
    with pytest.raises(DomainError):
        OPSystem("hermite", {}, b=np.zeros(3), c=np.array([0.0, -1.0, 1.0]),
                 h=np.ones(3))
    with pytest.raises(DomainError):
        OPSystem("hermite", {}, b=np.zeros(3), c=np.zeros(3),
                 h=np.array([1.0, 0.0, 1.0]))
