"""Monte Carlo sampling of planar symplectic eigenvalue configurations.

Two independent routes draw configurations from the joint density

    P(z_1..z_N) ~ prod_{k<l} |z_k - z_l|^2 |z_k - conj z_l|^2
                  * prod_j |z_j - conj z_j|^2 w(z_j)

with every point kept in the open upper half plane (the conjugate
partner is implicit): direct diagonalization of quaternionic Gaussian
matrices for the Gaussian weight, and a Metropolis chain for general
planar weights.  All randomness flows through counter-based Philox
streams keyed by an explicit integer seed, so sample sets are
reproducible bit for bit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .ensembles import Ensemble, Ginibre
from .special import DomainError, NumericalError

__all__ = [
    "SampleSet",
    "DensityField",
    "sample_matrix_ginibre",
    "sample_mcmc",
    "log_density",
    "acceptance_probability",
    "empirical_density",
    "radial_counts",
    "ks_statistic",
]

log = logging.getLogger(__name__)

_PAIRING_TOL = 1e-8


@dataclass(frozen=True)
class SampleSet:
    """Eigenvalue configurations, one row per draw, upper-half-plane only."""

    configs: np.ndarray          # (n_configs, N) complex, Im > 0
    ensemble: Ensemble
    method: str                  # 'matrix' | 'mcmc'
    rng_seed: int
    acceptance_rate: float | None = None
    pairing_residual: float | None = None
    step_size: float | None = None

    def __post_init__(self):
        cfg = np.asarray(self.configs, dtype=complex)
        if cfg.ndim != 2 or cfg.size == 0:
            raise DomainError("SampleSet needs a nonempty (configs, N) array")
        if not np.all(cfg.imag > 0.0):
            raise NumericalError("SampleSet: a stored point left the upper half plane")
        object.__setattr__(self, "configs", cfg)
        if self.method not in ("matrix", "mcmc"):
            raise DomainError(f"SampleSet: unknown method {self.method!r}")

    @property
    def n_configs(self) -> int:
        return self.configs.shape[0]

    @property
    def n_points(self) -> int:
        return self.configs.shape[1]

    def points(self) -> np.ndarray:
        """All stored points as one flat complex array."""
        return self.configs.ravel()

    def to_csv(self, path) -> None:
        """Write `config_id, re(z), im(z)` rows, 17 significant digits."""
        with open(path, "w") as fh:
            fh.write("config_id, re(z), im(z)\n")
            for i, row in enumerate(self.configs):
                for z in row:
                    fh.write(f"{i},{z.real:.17g},{z.imag:.17g}\n")

    def metadata(self) -> dict:
        md = {
            "ensemble": self.ensemble.name,
            "params": self.ensemble.params(),
            "method": self.method,
            "seed": int(self.rng_seed),
            "n_configs": self.n_configs,
            "n_points": self.n_points,
        }
        if self.acceptance_rate is not None:
            md["acceptance_rate"] = float(self.acceptance_rate)
        if self.pairing_residual is not None:
            md["pairing_residual"] = float(self.pairing_residual)
        if self.step_size is not None:
            md["step_size"] = float(self.step_size)
        return md


# ---------------------------------------------------------------------------
# direct matrix sampling (Gaussian weight)
# ---------------------------------------------------------------------------


def _pair_conjugates(eigs: np.ndarray):
    """Match stacked eigenvalues (rows of 2N) into conjugate pairs.

    Returns (reps, residual): the upper-half representatives, averaged
    with the conjugated partners, and the worst pairing mismatch.  Rows
    whose lexicographic matching exceeds the tolerance are retried with
    an optimal assignment before giving up.
    """
    n2 = eigs.shape[1]
    n = n2 // 2
    order = np.argsort(eigs.imag, axis=1)
    rows = np.arange(eigs.shape[0])[:, None]
    lower = eigs[rows, order[:, :n]]
    upper = eigs[rows, order[:, n:]]
    # complex sort is lexicographic (real part, then imaginary part)
    upper = np.sort(upper, axis=1)
    partner = np.sort(np.conj(lower), axis=1)
    resid = np.abs(upper - partner).max(axis=1)
    bad = np.nonzero(resid > _PAIRING_TOL)[0]
    for i in bad:
        cost = np.abs(upper[i][:, None] - np.conj(lower[i])[None, :])
        ri, ci = linear_sum_assignment(cost)
        matched = np.conj(lower[i])[ci[np.argsort(ri)]]
        resid[i] = np.abs(upper[i] - matched).max()
        if resid[i] > _PAIRING_TOL:
            raise NumericalError(
                f"eigenvalues failed to pair into conjugates (residual {resid[i]:.3e})")
        partner[i] = matched
    reps = 0.5 * (upper + partner)
    return reps, float(resid.max(initial=0.0))


def sample_matrix_ginibre(N: int, count: int, seed: int) -> SampleSet:
    """Diagonalize quaternionic Gaussian matrices; weight exp(-|z|^2).

    Draws 2N x 2N complex matrices [[A, B], [-conj(B), conj(A)]] whose
    blocks have iid complex normal entries of unit total variance, so
    the induced eigenvalue density carries the weight exp(-|z|^2).
    Eigenvalues come in conjugate pairs; each draw is verified to pair
    up within 1e-8 and the upper-half representatives are returned.
    """
    if not (1 <= N <= 64):
        raise DomainError(f"matrix sampling supports 1 <= N <= 64, got {N}")
    if not (1 <= count <= 100_000):
        raise DomainError(f"matrix sampling supports 1 <= count <= 1e5, got {count}")
    rng = np.random.Generator(np.random.Philox(seed))
    chunk = max(1, min(count, 2 ** 21 // (2 * N) ** 2))
    out = np.empty((count, N), dtype=complex)
    worst = 0.0
    done = 0
    scale = np.sqrt(0.5)
    while done < count:
        m = min(chunk, count - done)
        a = scale * (rng.standard_normal((m, N, N)) + 1j * rng.standard_normal((m, N, N)))
        b = scale * (rng.standard_normal((m, N, N)) + 1j * rng.standard_normal((m, N, N)))
        big = np.empty((m, 2 * N, 2 * N), dtype=complex)
        big[:, :N, :N] = a
        big[:, :N, N:] = b
        big[:, N:, :N] = -np.conj(b)
        big[:, N:, N:] = np.conj(a)
        try:
            eigs = np.linalg.eigvals(big)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigenvalue solver did not converge: {exc}") from exc
        reps, resid = _pair_conjugates(eigs)
        worst = max(worst, resid)
        out[done:done + m] = reps
        done += m
    if not np.all(out.imag > 0.0):
        raise NumericalError("matrix sampling produced a non-positive imaginary part")
    return SampleSet(out, Ginibre(), "matrix", seed, pairing_residual=worst)


# ---------------------------------------------------------------------------
# Metropolis chain (general planar weights)
# ---------------------------------------------------------------------------


def log_density(ensemble: Ensemble, points) -> float:
    """Log of the unnormalized joint density at one configuration.

    Returns -inf outside the domain (a point off the open upper half
    plane or outside the weight's support).
    """
    z = np.asarray(points, dtype=complex).ravel()
    if np.any(z.imag <= 0.0) or not np.all(ensemble.in_support(z)):
        return -np.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        total = float(np.sum(ensemble.log_weight(z)))
        total += float(np.sum(2.0 * np.log(2.0 * z.imag)))
        diff = z[:, None] - z[None, :]
        cross = z[:, None] - np.conj(z)[None, :]
        iu = np.triu_indices(len(z), k=1)
        total += float(np.sum(2.0 * np.log(np.abs(diff[iu]))))
        total += float(np.sum(2.0 * np.log(np.abs(cross[iu]))))
    return total


def acceptance_probability(ensemble: Ensemble, config, index: int, proposal) -> float:
    """Metropolis acceptance min(1, density ratio) for a one-point move."""
    cur = np.asarray(config, dtype=complex).copy()
    ld_cur = log_density(ensemble, cur)
    if not np.isfinite(ld_cur):
        raise DomainError("current configuration has zero density")
    new = cur.copy()
    new[index] = proposal
    delta = log_density(ensemble, new) - ld_cur
    return float(min(1.0, np.exp(min(delta, 0.0)) if delta < 0 else 1.0))


def _initial_configs(ensemble: Ensemble, n_chains: int, n_points: int, rng):
    """Spread starting points over the bulk; reject zero-density starts."""
    radius = ensemble.init_radius(n_points)
    configs = np.empty((n_chains, n_points), dtype=complex)
    for c in range(n_chains):
        for _ in range(1000):
            x = radius * (2.0 * rng.random(n_points) - 1.0)
            y = radius * rng.random(n_points) * 0.95 + 1e-3 * radius
            trial = x + 1j * y
            if np.isfinite(log_density(ensemble, trial)):
                configs[c] = trial
                break
        else:
            raise DomainError(
                "could not find a start configuration with positive density")
    return configs


def _particle_delta(ensemble, state, k, prop):
    """Vectorized log-density change when particle k moves to prop."""
    n_chains, n_pts = state.shape
    cur = state[:, k]
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = ensemble.log_weight(prop) - ensemble.log_weight(cur)
        delta = np.asarray(delta, dtype=float)
        delta += 2.0 * (np.log(2.0 * prop.imag) - np.log(2.0 * cur.imag))
        others = np.delete(np.arange(n_pts), k)
        if others.size:
            zo = state[:, others]
            delta += 2.0 * np.sum(
                np.log(np.abs(prop[:, None] - zo)) - np.log(np.abs(cur[:, None] - zo)),
                axis=1)
            delta += 2.0 * np.sum(
                np.log(np.abs(prop[:, None] - np.conj(zo)))
                - np.log(np.abs(cur[:, None] - np.conj(zo))),
                axis=1)
    return delta


def sample_mcmc(ensemble: Ensemble, N: int, steps: int, burn_in: int, seed: int,
                *, thin: int = 5, n_chains: int = 8,
                step_size: float | None = None) -> SampleSet:
    """Metropolis chain over upper-half-plane configurations.

    One step is a sweep of single-particle Gaussian moves.  The step
    size adapts toward 30-40% acceptance during burn-in and is frozen
    afterward; `steps` sweeps are then run and every `thin`-th sweep is
    recorded from each of the `n_chains` lockstep chains.
    """
    if not (1 <= N <= 64):
        raise DomainError(f"mcmc sampling supports 1 <= N <= 64, got {N}")
    if ensemble.domain == "contour":
        raise DomainError("mcmc sampling needs a planar ensemble, not a contour")
    if steps < 1 or burn_in < 0 or thin < 1 or n_chains < 1:
        raise DomainError("mcmc sampling needs steps >= 1, burn_in >= 0, "
                          "thin >= 1, n_chains >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    state = _initial_configs(ensemble, n_chains, N, rng)
    step = float(step_size) if step_size else \
        max(0.05, ensemble.init_radius(N) / (2.0 * np.sqrt(N)))

    def sweep(current_step):
        accepted = 0
        for k in range(N):
            prop = state[:, k] + current_step * (
                rng.standard_normal(n_chains) + 1j * rng.standard_normal(n_chains))
            ok = (prop.imag > 0.0) & np.asarray(ensemble.in_support(prop), dtype=bool)
            delta = np.full(n_chains, -np.inf)
            if np.any(ok):
                delta[ok] = _particle_delta(ensemble, state, k, prop)[ok]
            accept = np.log(rng.random(n_chains)) < delta
            state[accept, k] = prop[accept]
            accepted += int(np.count_nonzero(accept))
        return accepted

    adapt_every = 20
    window = 0
    for sweep_idx in range(burn_in):
        window += sweep(step)
        if (sweep_idx + 1) % adapt_every == 0:
            rate = window / (adapt_every * N * n_chains)
            if rate > 0.40:
                step *= 1.2
            elif rate < 0.30:
                step /= 1.2
            window = 0

    taken = 0
    attempted = steps * N * n_chains
    records = []
    for sweep_idx in range(steps):
        taken += sweep(step)
        if (sweep_idx + 1) % thin == 0:
            records.append(state.copy())
    if not records:
        records.append(state.copy())
    rate = taken / attempted
    log.info("mcmc %s N=%d: acceptance %.3f, step %.4f, %d configs",
             ensemble.name, N, rate, step, len(records) * n_chains)
    configs = np.concatenate(records, axis=0)
    return SampleSet(configs, ensemble, "mcmc", seed,
                     acceptance_rate=rate, step_size=step)


# ---------------------------------------------------------------------------
# density estimation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityField:
    """Histogram density estimate on a rectangular grid.

    `values[i, j]` covers the cell `x_edges[i:i+2] x y_edges[j:j+2]`;
    the field integrates to the number of points per configuration.
    """

    values: np.ndarray
    x_edges: np.ndarray = field(repr=False)
    y_edges: np.ndarray = field(repr=False)

    @property
    def cell_area(self) -> float:
        return float((self.x_edges[1] - self.x_edges[0])
                     * (self.y_edges[1] - self.y_edges[0]))

    def integrate(self) -> float:
        return float(self.values.sum() * self.cell_area)

    def box_mean(self, x0: float, x1: float, y0: float, y1: float) -> float:
        """Average of the field over cells whose centers fall in the box."""
        xc = 0.5 * (self.x_edges[:-1] + self.x_edges[1:])
        yc = 0.5 * (self.y_edges[:-1] + self.y_edges[1:])
        mx = (xc >= x0) & (xc <= x1)
        my = (yc >= y0) & (yc <= y1)
        if not (np.any(mx) and np.any(my)):
            raise DomainError("box_mean: probe box misses every grid cell")
        return float(self.values[np.ix_(mx, my)].mean())


def empirical_density(samples: SampleSet, bins=40, extent=None) -> DensityField:
    """One-point density estimate from a sample set.

    Each stored point and its implicit conjugate partner deposit half a
    count each, matching the convention in which the one-point function
    integrates to N over the whole plane.
    """
    pts = samples.points()
    if pts.size == 0:
        raise DomainError("empirical_density needs a nonempty sample set")
    both = np.concatenate([pts, np.conj(pts)])
    if extent is None:
        pad = 1e-9 + 1e-12 * np.abs(both).max()
        extent = (both.real.min() - pad, both.real.max() + pad,
                  both.imag.min() - pad, both.imag.max() + pad)
    x0, x1, y0, y1 = map(float, extent)
    if isinstance(bins, int):
        bins = (bins, bins)
    hist, xe, ye = np.histogram2d(both.real, both.imag, bins=bins,
                                  range=[[x0, x1], [y0, y1]])
    area = (xe[1] - xe[0]) * (ye[1] - ye[0])
    values = 0.5 * hist / (samples.n_configs * area)
    return DensityField(values, xe, ye)


def radial_counts(samples: SampleSet, edges):
    """Mean and standard error of per-configuration counts in radial bins."""
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
        raise DomainError("radial_counts needs increasing bin edges")
    r = np.abs(samples.configs)
    counts = np.stack([np.histogram(row, bins=edges)[0] for row in r])
    mean = counts.mean(axis=0)
    stderr = counts.std(axis=0, ddof=1) / np.sqrt(samples.n_configs)
    return mean, stderr


def ks_statistic(values, cdf) -> float:
    """Kolmogorov-Smirnov distance between samples and a scalar CDF."""
    x = np.sort(np.asarray(values, dtype=float))
    if x.size == 0:
        raise DomainError("ks_statistic needs at least one sample")
    f = np.asarray([cdf(v) for v in x], dtype=float)
    n = len(x)
    upper = np.abs(np.arange(1, n + 1) / n - f).max()
    lower = np.abs(f - np.arange(0, n) / n).max()
    return float(max(upper, lower))
