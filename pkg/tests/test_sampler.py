"""Eigenvalue sampling: matrix route, Metropolis route, and estimators."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from sopkit import sampler
from sopkit.ensembles import make_ensemble
from sopkit.kernels import corr_density
from sopkit.quadrature import legendre_rule
from sopkit.skew import sop_radial
from sopkit.special import DomainError

GIN = make_ensemble("ginibre")


def test_matrix_sampling_shapes_and_halfplane():
    s = sampler.sample_matrix_ginibre(3, 50, seed=1)
    assert s.configs.shape == (50, 3)
    assert np.all(s.configs.imag > 0.0)
    assert s.method == "matrix"
    assert s.pairing_residual <= 1e-8


def test_matrix_sampling_reproducible():
    a = sampler.sample_matrix_ginibre(2, 100, seed=42)
    b = sampler.sample_matrix_ginibre(2, 100, seed=42)
    c = sampler.sample_matrix_ginibre(2, 100, seed=43)
    assert np.array_equal(a.configs, b.configs)
    assert not np.array_equal(a.configs, c.configs)


def test_matrix_second_moment_vs_quadrature():
    """E[sum |z_i|^2] for two pairs against the one-point-function oracle."""
    n_pairs = 2
    sys = sop_radial(GIN, n_pairs)
    rad = legendre_rule(160, 0.0, 9.0)
    ang = legendre_rule(48, 0.0, np.pi)
    z = rad.nodes[:, None] * np.exp(1j * ang.nodes[None, :])
    dens = corr_density(sys, z)
    want = 2.0 * np.einsum("i,j,ij->", rad.weights * rad.nodes, ang.weights,
                           dens * np.abs(z) ** 2)
    s = sampler.sample_matrix_ginibre(n_pairs, 10000, seed=5)
    emp = np.sum(np.abs(s.configs) ** 2, axis=1)
    dev = abs(emp.mean() - want) / (emp.std(ddof=1) / math.sqrt(s.n_configs))
    assert dev <= 4.0


def test_matrix_real_axis_depletion():
    s = sampler.sample_matrix_ginibre(2, 10000, seed=7)
    frac = np.mean(np.abs(s.configs.imag) < 0.01)
    assert frac < 5e-4  # O(eps^2) suppression near the real line


def test_matrix_sampling_guards():
    with pytest.raises(DomainError):
        sampler.sample_matrix_ginibre(65, 10, seed=0)
    with pytest.raises(DomainError):
        sampler.sample_matrix_ginibre(2, 100001, seed=0)


def test_log_density_closed_form_single_point():
    z = 0.3 + 0.4j
    want = -abs(z) ** 2 + 2.0 * math.log(2.0 * z.imag)
    assert_allclose(sampler.log_density(GIN, [z]), want, rtol=1e-12)


def test_log_density_pair_interactions():
    z1, z2 = 0.3 + 0.4j, -0.5 + 0.8j
    want = (sampler.log_density(GIN, [z1]) + sampler.log_density(GIN, [z2])
            + 2.0 * math.log(abs(z1 - z2))
            + 2.0 * math.log(abs(z1 - np.conj(z2))))
    assert_allclose(sampler.log_density(GIN, [z1, z2]), want, rtol=1e-12)


def test_acceptance_probability_is_metropolis_ratio():
    cfg = np.array([0.3 + 0.4j, -0.2 + 0.9j])
    prop = 0.5 + 0.2j
    new = cfg.copy()
    new[0] = prop
    ratio = math.exp(sampler.log_density(GIN, new) - sampler.log_density(GIN, cfg))
    assert_allclose(sampler.acceptance_probability(GIN, cfg, 0, prop),
                    min(1.0, ratio), rtol=1e-12)
    # moves into the lower half plane are rejected outright
    assert sampler.acceptance_probability(GIN, cfg, 0, 0.5 - 0.2j) == 0.0


def test_mcmc_reproducible_and_thinned():
    s = sampler.sample_mcmc(GIN, 2, 200, 50, seed=3, thin=4, n_chains=6)
    assert s.configs.shape == (6 * (200 // 4), 2)
    assert s.method == "mcmc"
    assert 0.0 < s.acceptance_rate < 1.0
    again = sampler.sample_mcmc(GIN, 2, 200, 50, seed=3, thin=4, n_chains=6)
    assert np.array_equal(s.configs, again.configs)


def test_mcmc_radial_law_single_pair():
    """KS distance of |z| against the analytic radial law for one pair."""
    s = sampler.sample_mcmc(GIN, 1, 3000, 500, seed=9, thin=5, n_chains=24)
    r = np.abs(s.points())
    cdf = lambda t: 1.0 - (1.0 + t * t) * math.exp(-t * t)
    assert sampler.ks_statistic(r, cdf) <= 0.02


def test_mcmc_guards():
    with pytest.raises(DomainError):
        sampler.sample_mcmc(GIN, 65, 100, 10, seed=0)
    with pytest.raises(DomainError):
        sampler.sample_mcmc(make_ensemble("chebyshev-ellipse", a=2.0, b=1.0),
                            2, 100, 10, seed=0)


def test_empirical_density_mass():
    """Full-plane mass is N; the upper-half window carries N/2."""
    s = sampler.sample_matrix_ginibre(2, 4000, seed=11)
    whole = sampler.empirical_density(s, bins=(40, 40), extent=(-4, 4, -4, 4))
    assert_allclose(whole.integrate(), 2.0, rtol=5e-3)
    upper = sampler.empirical_density(s, bins=(40, 20), extent=(-4, 4, 0, 4))
    assert_allclose(upper.integrate(), 1.0, rtol=5e-3)


def test_empirical_density_mirror_symmetry():
    s = sampler.sample_matrix_ginibre(2, 20000, seed=13)
    field = sampler.empirical_density(s, bins=(8, 4), extent=(-2, 2, 0, 2))
    flipped = field.values[::-1, :]
    # left/right mirror agreement within a loose Monte Carlo band
    assert np.max(np.abs(field.values - flipped)) <= 0.02


def test_empirical_density_box_mean():
    s = sampler.sample_matrix_ginibre(2, 2000, seed=17)
    field = sampler.empirical_density(s, bins=(20, 10), extent=(-2, 2, 0, 2))
    val = field.box_mean(-1.0, 1.0, 0.2, 1.0)
    assert np.isfinite(val) and val >= 0.0


def test_radial_counts_sum():
    s = sampler.sample_matrix_ginibre(2, 500, seed=19)
    edges = np.linspace(0.0, 6.0, 13)
    mean, stderr = sampler.radial_counts(s, edges)
    assert mean.shape == stderr.shape == (12,)
    assert_allclose(mean.sum(), 2.0, atol=1e-12)  # every point lands in range
    with pytest.raises(DomainError):
        sampler.radial_counts(s, [1.0, 0.5])


def test_ks_statistic_uniform():
    x = (np.arange(100) + 0.5) / 100.0
    assert sampler.ks_statistic(x, lambda t: t) <= 0.005 + 1e-12
    with pytest.raises(DomainError):
        sampler.ks_statistic([], lambda t: t)


def test_sample_set_validation():
    from sopkit.special import NumericalError

    with pytest.raises(DomainError):
        sampler.SampleSet(np.zeros((0, 2)), GIN, "matrix", 0)
    with pytest.raises(NumericalError):
        sampler.SampleSet(np.array([[0.3 + 0.4j, 0.1 - 0.2j]]), GIN, "matrix", 0)
    with pytest.raises(DomainError):
        sampler.SampleSet(np.array([[0.3 + 0.4j]]), GIN, "guess", 0)


def test_sample_set_csv_and_metadata(tmp_path):
    s = sampler.sample_mcmc(GIN, 2, 100, 20, seed=3, thin=10, n_chains=2)
    path = tmp_path / "samples.csv"
    s.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "config_id, re(z), im(z)"
    assert len(lines) == 1 + s.n_configs * s.n_points
    md = s.metadata()
    assert md["method"] == "mcmc"
    assert md["seed"] == 3
    assert "acceptance_rate" in md
