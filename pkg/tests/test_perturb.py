"""Weight perturbation |z - m|^2 w(z): perturbed SOP, OP, and pre-kernels."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from sopkit import perturb
from sopkit.ensembles import PerturbedWeight, make_ensemble
from sopkit.polynomials import op_system, poly_eval
from sopkit.quadrature import quad_planar
from sopkit.skew import SkewSystem, skew_product, sop_radial
from sopkit.special import DomainError, NumericalError

GIN = make_ensemble("ginibre")


def test_perturbed_r_origin():
    # r1_0 = r_0 q_2(0)/q_0(0) = 2 pi * 2
    sys = sop_radial(GIN, 2)
    pert = perturb.perturb_sop(sys, 0.0)
    assert_allclose(pert.r1[0], 4.0 * math.pi, rtol=1e-12)


def test_perturbed_polynomials_monic():
    sys = sop_radial(GIN, 4)
    pert = perturb.perturb_sop(sys, 0.7)
    assert_allclose(pert.q1[0], [1.0])
    for n, q in enumerate(pert.q1):
        assert len(q) == n + 1
        assert_allclose(q[-1], 1.0, rtol=1e-12)
    assert np.all(pert.r1 > 0.0)


def test_perturbed_skew_orthogonality():
    """Def-2.2 relations under the shifted weight, by quadrature."""
    m = 0.7
    sys = sop_radial(GIN, 3)
    pert = perturb.perturb_sop(sys, m)
    pens = PerturbedWeight(GIN, m)
    assert_allclose(skew_product(pert.q1[0], pert.q1[1], pens), pert.r1[0],
                    rtol=1e-6)
    assert_allclose(skew_product(pert.q1[2], pert.q1[3], pens), pert.r1[1],
                    rtol=1e-6)
    rmax = float(np.max(pert.r1))
    assert abs(skew_product(pert.q1[0], pert.q1[2], pens)) <= 1e-6 * rmax
    assert abs(skew_product(pert.q1[1], pert.q1[3], pens)) <= 1e-6 * rmax
    assert abs(skew_product(pert.q1[0], pert.q1[3], pens)) <= 1e-6 * rmax


def test_prekernel_two_routes():
    """Closed three-term form vs the sum over the perturbed system."""
    m = 0.7
    sys = sop_radial(GIN, 3)
    pert = perturb.perturb_sop(sys, m)
    rng = np.random.default_rng(4)
    for _ in range(5):
        z, u = rng.normal(size=2) + 1j * rng.normal(size=2)
        direct = perturb.perturb_prekernel(sys, m, z, u)
        total = 0.0 + 0.0j
        for k in range(pert.n_pairs):
            total += (poly_eval(pert.q1[2 * k + 1], z) * poly_eval(pert.q1[2 * k], u)
                      - poly_eval(pert.q1[2 * k], z) * poly_eval(pert.q1[2 * k + 1], u)
                      ) / pert.r1[k]
        assert abs(direct - total) <= 1e-9 * (1.0 + abs(total))


def test_prekernel_antisymmetry_and_diagonal():
    sys = sop_radial(GIN, 3)
    z, u = 0.5 + 0.6j, -0.2 + 0.1j
    a = perturb.perturb_prekernel(sys, 0.7, z, u)
    b = perturb.perturb_prekernel(sys, 0.7, u, z)
    assert_allclose(a, -b, rtol=1e-12)
    assert abs(perturb.perturb_prekernel(sys, 0.7, z, z)) < 1e-12


def test_prekernel_removable_singularity():
    """z = m is a removable point: the division path stays finite and continuous."""
    m = 0.7
    sys = sop_radial(GIN, 3)
    u = 0.3 + 0.4j
    at_m = perturb.perturb_prekernel(sys, m, m, u)
    near_m = perturb.perturb_prekernel(sys, m, m + 1e-7, u)
    assert np.isfinite(at_m)
    assert abs(at_m - near_m) <= 1e-5 * (1.0 + abs(at_m))


def test_zero_denominator_rejected():
    q = [np.array([1.0]), np.array([0.0, 1.0]), np.array([-1.0, 0.0, 1.0]),
         np.array([0.0, 0.0, 0.0, 1.0])]
    sys = SkewSystem(GIN, q, np.array([2 * math.pi, 12 * math.pi]))
    with pytest.raises(DomainError):
        perturb.perturb_sop(sys, 1.0)  # q_2(1) = 0


def test_sign_flip_rejected():
    q = [np.array([1.0]), np.array([0.0, 1.0]), np.array([-1.0, 0.0, 1.0]),
         np.array([0.0, 0.0, 0.0, 1.0])]
    sys = SkewSystem(GIN, q, np.array([2 * math.pi, 12 * math.pi]))
    with pytest.raises(NumericalError):
        perturb.perturb_sop(sys, 0.0)  # q_2(0)/q_0(0) < 0 would give r1 <= 0


def test_perturb_op_origin():
    opsys = op_system(GIN, 8)
    p1, h1 = perturb.perturb_op(opsys, 0.0, 4)
    assert_allclose(p1[0], [1.0])
    assert_allclose(h1[0], math.pi, rtol=1e-12)


def test_perturb_op_far_point_drift():
    """The constant coefficient of p1_1 is exactly m/(1 + m^2), decaying ~ 1/m."""
    opsys = op_system(GIN, 10)
    drifts = []
    for m in (10.0, 100.0, 1000.0):
        p1, _ = perturb.perturb_op(opsys, m, 4)
        drift = p1[1][0]
        assert_allclose(drift, m / (1.0 + m * m), rtol=1e-8)
        drifts.append(abs(drift))
    assert drifts[0] > 9.0 * drifts[1] > 80.0 * drifts[2]


def test_perturb_op_orthogonality():
    m = 0.7
    opsys = op_system(GIN, 10)
    p1, h1 = perturb.perturb_op(opsys, m, 4)
    pens = PerturbedWeight(GIN, m)
    for i in range(3):
        for j in range(i, 3):
            val = quad_planar(
                lambda z: poly_eval(p1[i], z) * np.conj(poly_eval(p1[j], z)),
                pens, tol=1e-9)
            if i == j:
                assert_allclose(val.real, h1[i], rtol=1e-6)
            else:
                assert abs(val) <= 1e-6 * math.sqrt(h1[i] * h1[j])


def test_perturb_op_kernel_reproduces():
    opsys = op_system(GIN, 10)
    m, n = 0.7, 4
    p1, _ = perturb.perturb_op(opsys, m, 6)
    pens = PerturbedWeight(GIN, m)
    z0 = 0.4 + 0.3j
    for j in (0, 1, 2):
        val = quad_planar(lambda w: perturb.perturb_op_kernel(opsys, m, n, z0, w)
                          * poly_eval(p1[j], w), pens, tol=1e-9)
        assert_allclose(val, poly_eval(p1[j], z0), rtol=1e-6, atol=1e-8)


def test_perturb_op_complex_point():
    opsys = op_system(GIN, 8)
    p1, h1 = perturb.perturb_op(opsys, 0.5 + 0.5j, 3)
    for n, coeffs in enumerate(p1):
        assert len(coeffs) == n + 1
        assert_allclose(coeffs[-1], 1.0, rtol=1e-12)
    assert np.all(np.asarray(h1) > 0.0)


def test_fourier_coefficients_frozen_values():
    """q1_3 expansion in the perturbed OP basis at m = 1."""
    sys = sop_radial(GIN, 3)
    opsys = op_system(GIN, 8)
    m = 1.0
    assert_allclose(perturb.fourier_beta(sys, opsys, m, 1, 3), 1.0, rtol=1e-12)
    assert_allclose(perturb.fourier_beta(sys, opsys, m, 1, 0), 1.0 / 3.0,
                    rtol=1e-10)
    assert_allclose(perturb.fourier_beta(sys, opsys, m, 1, 1), -2.0 / 15.0,
                    rtol=1e-10)
    assert_allclose(perturb.fourier_alpha(sys, opsys, m, 1, 2), 1.0, rtol=1e-12)


def test_fourier_fill_in():
    """No three-term truncation: low-degree coefficients are genuinely nonzero."""
    sys = sop_radial(GIN, 3)
    opsys = op_system(GIN, 8)
    assert abs(perturb.fourier_beta(sys, opsys, 1.0, 1, 0)) > 1e-6
    assert abs(perturb.fourier_beta(sys, opsys, 1.0, 1, 1)) > 1e-6


def test_fourier_expansion_rebuilds_q1():
    sys = sop_radial(GIN, 3)
    opsys = op_system(GIN, 10)
    m = 0.7
    pert = perturb.perturb_sop(sys, m)
    p1, _ = perturb.perturb_op(opsys, m, 6)
    for k in range(2):
        for parity, coeff_fn in ((1, perturb.fourier_beta),
                                 (0, perturb.fourier_alpha)):
            deg = 2 * k + parity
            want = pert.q1[deg]
            got = np.zeros(deg + 1)
            for ell in range(deg + 1):
                got[: ell + 1] += (coeff_fn(sys, opsys, m, k, ell)
                                   * np.real(p1[ell]))
            assert np.max(np.abs(got - want)) <= 1e-8 * max(1.0, np.max(np.abs(want)))


def test_fourier_requires_plain_gauge():
    sys = sop_radial(GIN, 3).with_gauge([0.5, 0.0, 0.0])
    opsys = op_system(GIN, 8)
    with pytest.raises(DomainError):
        perturb.fourier_beta(sys, opsys, 1.0, 1, 0)


def test_perturbed_system_round_trip():
    sys = sop_radial(GIN, 3)
    pert = perturb.perturb_sop(sys, 0.7)
    text = pert.to_json()
    back = perturb.PerturbedSystem.from_json(text)
    assert back.to_json() == text
    assert back.m == pert.m
    for qa, qb in zip(pert.q1, back.q1):
        assert np.array_equal(qa, qb)
    assert np.array_equal(pert.r1, back.r1)
