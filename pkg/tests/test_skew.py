"""Skew-products, Pfaffians, and the three skew-orthogonal constructors."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from sopkit.ensembles import make_ensemble
from sopkit.polynomials import op_coeffs, op_system
from sopkit.skew import (
    SkewSystem,
    op_from_sop,
    partition_function,
    partition_function_quadrature,
    pfaffian,
    pfaffian_minor,
    skew_gram,
    skew_moment,
    skew_product,
    sop_from_gram,
    sop_from_recurrence,
    sop_radial,
)
from sopkit.special import DomainError


def ginibre_r(k):
    """Closed-form skew-norms of the Gaussian radial weight."""
    return 2.0 * math.pi * math.factorial(2 * k + 1)


def test_skew_product_alternating():
    ens = make_ensemble("ginibre")
    f = np.array([0.3, 1.0, 0.5])
    assert abs(skew_product(f, f, ens)) < 1e-10
    a = skew_product([1.0], [0.0, 1.0], ens)
    b = skew_product([0.0, 1.0], [1.0], ens)
    assert_allclose(a, -b, rtol=1e-12)


def test_skew_product_gaussian_values():
    ens = make_ensemble("ginibre")
    assert_allclose(skew_product([1.0], [0.0, 1.0], ens), 2.0 * math.pi, rtol=1e-8)
    assert abs(skew_product([1.0], [0.0, 0.0, 0.0, 1.0], ens)) < 1e-8


def test_skew_moment_values():
    # the nearest-neighbour moments of the Gaussian weight: g_{i,i+1} = 2 pi (i+1)!
    ens = make_ensemble("ginibre")
    assert skew_moment(ens, 0, 0) == 0.0
    assert_allclose(skew_moment(ens, 0, 1), 2.0 * math.pi, rtol=1e-10)
    assert_allclose(skew_moment(ens, 1, 2), 4.0 * math.pi, rtol=1e-10)
    assert_allclose(skew_moment(ens, 2, 1), -4.0 * math.pi, rtol=1e-10)
    assert_allclose(skew_moment(ens, 2, 3), 2.0 * math.pi * 6.0, rtol=1e-10)


def test_skew_moment_closed_vs_quadrature():
    ens = make_ensemble("mittag-leffler", lam=2.0, c=0.5)
    for i, j in [(0, 1), (1, 2), (0, 3)]:
        closed = skew_moment(ens, i, j, method="closed")
        quad = skew_moment(ens, i, j, method="quadrature")
        assert_allclose(quad, closed, rtol=1e-7, atol=1e-9)


def test_pfaffian_two_by_two():
    a = 3.7
    m = np.array([[0.0, a], [-a, 0.0]])
    assert_allclose(pfaffian(m), a, rtol=1e-14)


def test_pfaffian_four_by_four_textbook():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(4, 4))
    m = x - x.T
    want = m[0, 1] * m[2, 3] - m[0, 2] * m[1, 3] + m[0, 3] * m[1, 2]
    assert_allclose(pfaffian(m), want, rtol=1e-12)
    assert_allclose(pfaffian_minor(m), want, rtol=1e-12)


def test_pfaffian_squares_to_determinant():
    rng = np.random.default_rng(9)
    for n in (6, 8, 12):
        x = rng.normal(size=(n, n))
        m = x - x.T
        pf = pfaffian(m)
        assert_allclose(pf * pf, np.linalg.det(m), rtol=1e-8)
        if n <= 6:
            assert_allclose(pf, pfaffian_minor(m), rtol=1e-10)


def test_pfaffian_rejects_bad_input():
    with pytest.raises(DomainError):
        pfaffian(np.zeros((3, 3)))
    with pytest.raises(DomainError):
        pfaffian(np.array([[0.0, 1.0], [1.0, 0.0]]))


def test_skew_gram_structure():
    ens = make_ensemble("ginibre")
    g = skew_gram(ens, 4)
    assert_allclose(g, -g.T, atol=1e-12)
    assert_allclose(g[0, 1], 2.0 * math.pi, rtol=1e-10)
    assert_allclose(g[1, 2], 4.0 * math.pi, rtol=1e-10)


def test_sop_from_gram_gaussian():
    ens = make_ensemble("ginibre")
    sys = sop_from_gram(ens, 2)
    assert_allclose(sys.q[0], [1.0])
    assert_allclose(sys.q[1], [0.0, 1.0], atol=1e-12)
    assert_allclose(sys.q[2], [2.0, 0.0, 1.0], atol=1e-10)
    assert_allclose(sys.r[0], ginibre_r(0), rtol=1e-10)
    assert_allclose(sys.r[1], ginibre_r(1), rtol=1e-10)


def test_sop_from_gram_quadrature_moments():
    ens = make_ensemble("ginibre")
    sys = sop_from_gram(ens, 3, moments="quadrature", tol=1e-10)
    for k in range(3):
        assert_allclose(sys.r[k], ginibre_r(k), rtol=1e-6)


def test_sop_from_recurrence_gaussian_norms():
    ens = make_ensemble("ginibre")
    sys = sop_from_recurrence(op_system(ens, 10), ens, 4)
    for k in range(4):
        assert_allclose(sys.r[k], ginibre_r(k), rtol=1e-12)


def test_sop_recurrence_chebyshev_norms():
    # r_k = pi b [(a+b)^{4k+2} - (a-b)^{4k+2}] / 2^{4k}
    a, b = 2.0, 1.0
    ens = make_ensemble("chebyshev-ellipse", a=a, b=b)
    sys = sop_from_recurrence(op_system(ens, 8), ens, 3)
    for k in range(3):
        want = math.pi * b * ((a + b) ** (4 * k + 2) - (a - b) ** (4 * k + 2)) / 2.0 ** (4 * k)
        assert_allclose(sys.r[k], want, rtol=1e-12)


def test_sop_recurrence_truncated_symplectic_mixture():
    # q_2 = p_2 + mu_{1,0} p_0 with mu_{1,0} = 2/(3 + alpha + 1i...) = 2/4
    ens = make_ensemble("truncated-symplectic", alpha=1.0)
    sys = sop_from_recurrence(op_system(ens, 6), ens, 2)
    assert_allclose(sys.q[2], [0.5, 0.0, 1.0], rtol=1e-12)


def test_sop_radial_mittag_leffler():
    ens = make_ensemble("mittag-leffler", lam=1.0, c=0.0)
    sys = sop_radial(ens, 3)
    assert_allclose(sys.q[2], [2.0, 0.0, 1.0], rtol=1e-12)
    assert_allclose(sys.q[3], [0.0, 0.0, 0.0, 1.0], atol=1e-14)
    assert_allclose(sys.q[4], [8.0, 0.0, 4.0, 0.0, 1.0], rtol=1e-12)


def test_sop_radial_equals_recurrence_route():
    ens = make_ensemble("mittag-leffler", lam=2.0, c=0.5)
    a = sop_radial(ens, 3)
    b = sop_from_recurrence(op_system(ens, 8), ens, 3)
    for qa, qb in zip(a.q, b.q):
        assert_allclose(qa, qb, atol=1e-12)
    assert_allclose(a.r, b.r, rtol=1e-12)


def test_sop_radial_rejects_nonradial():
    with pytest.raises(DomainError):
        sop_radial(make_ensemble("elliptic", tau=0.5), 2)


def test_all_families_produce_monic_systems():
    cases = [
        ("ginibre", {}),
        ("mittag-leffler", {"lam": 2.0, "c": 0.5}),
        ("truncated-symplectic", {"alpha": 1.0}),
        ("product-ginibre", {"M": 2, "c": 0.0}),
        ("gegenbauer", {"alpha": 1.0, "a": 2.0, "b": 1.0}),
        ("chebyshev-ellipse", {"a": 2.0, "b": 1.0}),
        ("elliptic", {"tau": 0.5}),
        ("chiral", {"tau": 0.5, "nu": 0.5}),
    ]
    for name, kw in cases:
        ens = make_ensemble(name, **kw)
        if ens.radial:
            sys = sop_radial(ens, 3)
        else:
            sys = sop_from_recurrence(op_system(ens, 8), ens, 3)
        assert np.all(sys.r > 0.0), name
        for n, q in enumerate(sys.q):
            assert len(q) == n + 1, name
            assert q[-1] == 1.0, name


def test_skew_orthogonality_small_case():
    """Def-2.2 relations for the Gaussian weight at N = 2, by quadrature."""
    ens = make_ensemble("ginibre")
    sys = sop_radial(ens, 2)
    rmax = max(sys.r)
    # even-even and odd-odd pairs vanish
    assert abs(skew_product(sys.q[0], sys.q[2], ens)) <= 1e-6 * rmax
    assert abs(skew_product(sys.q[1], sys.q[3], ens)) <= 1e-6 * rmax
    # <q_{2k}, q_{2l+1}> = r_k delta_{kl}
    assert_allclose(skew_product(sys.q[0], sys.q[1], ens), sys.r[0], rtol=1e-6)
    assert_allclose(skew_product(sys.q[2], sys.q[3], ens), sys.r[1], rtol=1e-6)
    assert abs(skew_product(sys.q[0], sys.q[3], ens)) <= 1e-6 * rmax


def test_partition_function_values():
    ens = make_ensemble("ginibre")
    assert_allclose(partition_function(sop_radial(ens, 1)), 2.0 * math.pi,
                    rtol=1e-12)
    assert_allclose(partition_function(sop_radial(ens, 2)),
                    2.0 * (2.0 * math.pi) * (12.0 * math.pi), rtol=1e-12)


def test_partition_function_quadrature_matches():
    ens = make_ensemble("ginibre")
    want = partition_function(sop_radial(ens, 1))
    got = partition_function_quadrature(ens, 1)
    assert_allclose(got, want, rtol=1e-4)


def test_op_from_sop_reconstruction():
    ens = make_ensemble("ginibre")
    sys = sop_radial(ens, 3)
    ps = op_from_sop(sys)
    assert_allclose(ps[2], [0.0, 0.0, 1.0], atol=1e-12)
    assert_allclose(ps[3], sys.q[3], atol=1e-14)
    # elliptic-disc family at alpha = 0
    ens = make_ensemble("gegenbauer", alpha=0.0, a=2.0, b=1.0)
    opsys = op_system(ens, 10)
    sys = sop_from_recurrence(opsys, ens, 3)
    ps = op_from_sop(sys)
    want = op_coeffs(opsys, 4)
    assert np.max(np.abs(ps[4] - want)) <= 1e-10 * np.max(np.abs(want))


def test_gauge_shift_bookkeeping():
    ens = make_ensemble("ginibre")
    sys = sop_radial(ens, 2)
    d = np.array([0.5, -1.25])
    shifted = sys.with_gauge(d)
    assert_allclose(shifted.odd_shift, d)
    assert np.array_equal(shifted.r, sys.r)
    # q_{2k+1} -> q_{2k+1} + d_k q_{2k}, evens untouched
    assert_allclose(shifted.q[1][:1], sys.q[1][:1] + 0.5 * sys.q[0])
    assert_allclose(shifted.q[2], sys.q[2])
    # the gauge keeps the skew-orthogonality relations
    assert_allclose(skew_product(shifted.q[0], shifted.q[1], ens), sys.r[0],
                    rtol=1e-6)


def test_serialization_round_trip():
    ens = make_ensemble("mittag-leffler", lam=2.0, c=0.5)
    sys = sop_radial(ens, 3)
    text = sys.to_json()
    back = SkewSystem.from_json(text)
    assert back.to_json() == text
    for qa, qb in zip(sys.q, back.q):
        assert np.array_equal(qa, qb)
    assert np.array_equal(sys.r, back.r)
    assert back.ensemble.name == ens.name
