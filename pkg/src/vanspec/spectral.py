"""d-fold Vandermonde matrices, empirical spectra and eta-transforms.

Builds the n^d x m sampling matrix V from random points, pools eigenvalues
of V V^H over seeded trials into spectrum summaries (with the rank-deficiency
atom at zero accounted separately), and applies the limiting-spectrum
transform laws: support scaling, and the eta-transform mixture over the
density-of-density g_x that yields the asymptotic MSE.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator
from scipy.stats import ks_2samp

from .sampling import (
    GxClosedForm,
    GxDiscreteAtoms,
    GxEmpirical,
    GxRepresentation,
    SamplingDistribution,
)

# Eigenvalues below ATOM_TOL_REL x (largest eigenvalue of the trial) count as
# the atom at zero.  1e-4 captures the exponentially collapsing cluster that
# uncovered area produces at desk-scale n; a tighter cut (1e-9) misses most
# of it and under-reports the atom.
ATOM_TOL_REL = 1e-4
# Negative eigenvalues beyond -EIG_TOL_REL x max are a solver failure.
EIG_TOL_REL = 1e-8
# Desk-scale cap on the Gram size n^d.
NDIM_CAP = 1024


def _run_trials(worker: Callable[[int], object], trials: int, threads: Optional[int]):
    """Run worker(0..trials-1), results in trial order regardless of schedule."""
    if threads is None or threads <= 0:
        threads = os.cpu_count() or 1
    threads = min(threads, trials)
    if threads <= 1:
        return [worker(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(worker, range(trials)))


def trial_seed(master_seed: int, trial_index: int) -> np.random.SeedSequence:
    """Deterministic per-trial seed, independent of execution order."""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index,))


@dataclass(frozen=True)
class DFoldVandermonde:
    """Sampling matrix V with entries m^(-1/2) exp(-2*pi*i l.x_q)."""

    n: int
    d: int
    m: int
    points: np.ndarray  # (m, d)
    entries: np.ndarray  # (n^d, m) complex

    @property
    def beta(self) -> float:
        return self.n ** self.d / self.m


def multi_indices(n: int, d: int) -> np.ndarray:
    """Row multi-indices l, ordered by nu(l) = sum_j n^(j-1) l_j."""
    r = np.arange(n ** d)
    return np.stack([(r // n ** j) % n for j in range(d)], axis=1)


def build_vandermonde(
    dist: SamplingDistribution, n: int, m: int, seed
) -> DFoldVandermonde:
    """Draw m points from dist and assemble V; deterministic in the seed."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    if n ** dist.d > NDIM_CAP:
        raise ValueError(f"n^d = {n ** dist.d} above desk-scale cap {NDIM_CAP}")
    points = np.asarray(dist.sampler(seed, m), dtype=float)
    if points.shape != (m, dist.d):
        raise ValueError(
            f"sampler for {dist.id} returned shape {points.shape}, wanted {(m, dist.d)}"
        )
    L = multi_indices(n, dist.d)
    phases = L @ points.T
    entries = np.exp(-2j * np.pi * phases) / np.sqrt(m)
    return DFoldVandermonde(n=n, d=dist.d, m=m, points=points, entries=entries)


def gram_eigenvalues(V: DFoldVandermonde) -> np.ndarray:
    """Eigenvalues of V V^H, ascending, with tiny negatives clamped to zero."""
    G = V.entries @ V.entries.conj().T
    G = 0.5 * (G + G.conj().T)
    lam = np.linalg.eigvalsh(G)
    floor = -EIG_TOL_REL * max(lam[-1], 1.0)
    if lam[0] < floor:
        raise RuntimeError(
            f"V V^H eigenvalue {lam[0]} below PSD tolerance (n={V.n}, m={V.m})"
        )
    return np.clip(lam, 0.0, None)


@dataclass(frozen=True)
class SpectrumSummary:
    """Pooled eigenvalue samples of V V^H over independent trials.

    extra_zero_mass is probability mass at zero added on top of the stored
    samples (used by the support-scaling transform); every expectation
    weights the samples by (1 - extra_zero_mass).
    """

    eigenvalues: np.ndarray  # pooled, ascending
    trials: int
    n: int
    d: int
    m: int
    distribution_id: str
    master_seed: Optional[int]
    atom_zero_mass: float  # fraction of stored samples classified as atom
    hist_edges: np.ndarray
    hist_density: np.ndarray  # integrates to 1 - total_atom_mass
    extra_zero_mass: float = 0.0

    @property
    def beta(self) -> float:
        return self.n ** self.d / self.m

    @property
    def total_atom_mass(self) -> float:
        return self.extra_zero_mass + (1.0 - self.extra_zero_mass) * self.atom_zero_mass

    @property
    def atom_cut(self) -> float:
        """Pooled atom/positive split point."""
        return ATOM_TOL_REL * float(self.eigenvalues[-1]) if self.eigenvalues.size else 0.0

    def positive_part(self) -> np.ndarray:
        return self.eigenvalues[self.eigenvalues >= self.atom_cut]


def _histogram(
    positives: np.ndarray, bins, positive_mass: float
) -> tuple[np.ndarray, np.ndarray]:
    if positives.size == 0:
        return np.array([0.0, 1.0]), np.array([0.0])
    edges = np.histogram_bin_edges(positives, bins="fd" if bins == "auto" else bins)
    if len(edges) > 2048:  # FD can explode on heavy tails
        edges = np.histogram_bin_edges(positives, bins=256)
    dens, edges = np.histogram(positives, bins=edges, density=True)
    return edges, dens * positive_mass


def summarize_eigenvalues(
    per_trial: Sequence[np.ndarray],
    n: int,
    d: int,
    m: int,
    distribution_id: str,
    master_seed: Optional[int],
    bins="auto",
) -> SpectrumSummary:
    """Pool per-trial eigenvalues into a SpectrumSummary (atom split per trial)."""
    atom_count = 0
    for lam in per_trial:
        atom_count += int(np.sum(lam < ATOM_TOL_REL * lam[-1]))
    pooled = np.sort(np.concatenate(per_trial))
    atom_mass = atom_count / pooled.size
    positives = pooled[pooled >= ATOM_TOL_REL * pooled[-1]]
    edges, dens = _histogram(positives, bins, 1.0 - atom_mass)
    return SpectrumSummary(
        eigenvalues=pooled,
        trials=len(per_trial),
        n=n,
        d=d,
        m=m,
        distribution_id=distribution_id,
        master_seed=master_seed,
        atom_zero_mass=atom_mass,
        hist_edges=edges,
        hist_density=dens,
    )


def aesd(
    dist: SamplingDistribution,
    n: int,
    m: int,
    trials: int,
    seed: int,
    bins="auto",
    threads: Optional[int] = None,
) -> SpectrumSummary:
    """Average empirical spectral distribution of V V^H over seeded trials."""
    if trials < 1:
        raise ValueError("trials must be >= 1")

    def one(t: int) -> np.ndarray:
        V = build_vandermonde(dist, n, m, trial_seed(seed, t))
        return gram_eigenvalues(V)

    per_trial = _run_trials(one, trials, threads)
    return summarize_eigenvalues(per_trial, n, dist.d, m, dist.id, seed, bins)


def empirical_eta(summary: SpectrumSummary, gamma: float) -> float:
    """eta(gamma) = E[1/(gamma*lambda + 1)] over the summarized spectrum."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    core = float(np.mean(1.0 / (gamma * summary.eigenvalues + 1.0)))
    return summary.extra_zero_mass + (1.0 - summary.extra_zero_mass) * core


def empirical_moment(summary: SpectrumSummary, p: int) -> float:
    """p-th empirical moment (normalized trace of (V V^H)^p)."""
    core = float(np.mean(summary.eigenvalues ** p))
    return (1.0 - summary.extra_zero_mass) * core


def transform_scaled_lsd(base: SpectrumSummary, c: float, beta: float, bins="auto") -> SpectrumSummary:
    """Support-scaling law: from a uniform-phase summary at aspect c*beta,
    predict the spectrum under a support of measure c at aspect beta.

    The prediction adds mass (1 - c) at zero and maps each remaining sample
    lambda -> lambda / c.
    """
    if not 0 < c <= 1:
        raise ValueError("c must be in (0, 1]")
    if abs(base.beta - c * beta) > 0.02 * c * beta:
        raise ValueError(
            f"base summary at beta={base.beta:.4f}, need c*beta={c * beta:.4f}"
        )
    if c == 1.0:
        return base
    scaled = base.eigenvalues / c
    extra = 1.0 - c + c * base.extra_zero_mass
    positives = scaled[scaled >= ATOM_TOL_REL * scaled[-1]]
    positive_mass = (1.0 - extra) * (1.0 - base.atom_zero_mass)
    edges, dens = _histogram(positives, bins, positive_mass)
    return SpectrumSummary(
        eigenvalues=scaled,
        trials=base.trials,
        n=base.n,
        d=base.d,
        m=base.m,
        distribution_id=f"scaled(c={c:g},{base.distribution_id})",
        master_seed=base.master_seed,
        atom_zero_mass=base.atom_zero_mass,
        hist_edges=edges,
        hist_density=dens,
        extra_zero_mass=extra,
    )


@dataclass(frozen=True)
class ScaledLsdComparison:
    ks_distance: float
    atom_direct: float
    atom_transformed: float
    cut: float


def compare_scaled_aesd(
    direct: SpectrumSummary, transformed: SpectrumSummary
) -> ScaledLsdComparison:
    """KS distance between positive parts plus atom-mass bookkeeping.

    The comparison cut separates the direct spectrum's collapsing cluster
    (asymptotically part of the atom) from the bulk: everything below half
    the transformed reference's smallest positive sample is atom-side.
    """
    ref_pos = transformed.eigenvalues[
        transformed.eigenvalues >= transformed.atom_cut
    ]
    cut = max(direct.atom_cut, transformed.atom_cut, 0.5 * float(ref_pos.min()))

    def atom_at(summary: SpectrumSummary, cut: float) -> float:
        below = float(np.mean(summary.eigenvalues < cut))
        return summary.extra_zero_mass + (1.0 - summary.extra_zero_mass) * below

    d_pos = direct.eigenvalues[direct.eigenvalues >= cut]
    t_pos = transformed.eigenvalues[transformed.eigenvalues >= cut]
    ks = float(ks_2samp(d_pos, t_pos).statistic)
    return ScaledLsdComparison(
        ks_distance=ks,
        atom_direct=atom_at(direct, cut),
        atom_transformed=atom_at(transformed, cut),
        cut=cut,
    )


# ---------------------------------------------------------------------------
# eta-transform mixture and the empirical eta_u table


class EtaTableRangeError(ValueError):
    """Query outside the tabulated (beta, gamma) range; extend the table."""


@dataclass
class EtaUTable:
    """Empirical eta-transform of the uniform-phase spectrum on a grid.

    Stands in for the unknown closed-form limiting spectrum: values are
    eta^(n)_u on (beta_grid x gamma_grid), interpolated monotonically in
    log beta and log gamma.  eta(gamma=0) is exactly 1.
    """

    d: int
    n: int
    trials: int
    seed: int
    beta_grid: np.ndarray
    gamma_grid: np.ndarray
    values: np.ndarray  # (len(beta_grid), len(gamma_grid))
    _row_interp: list = field(default_factory=list, repr=False, compare=False)

    def _interp_rows(self):
        if not self._row_interp:
            lg = np.log(self.gamma_grid)
            self._row_interp = [
                PchipInterpolator(lg, row, extrapolate=False) for row in self.values
            ]
        return self._row_interp

    def eta(self, beta: float, gamma: float) -> float:
        if gamma == 0.0:
            return 1.0
        if gamma < 0 or beta <= 0:
            raise ValueError("need beta > 0 and gamma >= 0")
        bg, gg = self.beta_grid, self.gamma_grid
        if not (bg[0] * (1 - 1e-9) <= beta <= bg[-1] * (1 + 1e-9)):
            raise EtaTableRangeError(
                f"beta={beta:.5g} outside table range [{bg[0]:.5g}, {bg[-1]:.5g}]"
            )
        if not (gg[0] * (1 - 1e-9) <= gamma <= gg[-1] * (1 + 1e-9)):
            raise EtaTableRangeError(
                f"gamma={gamma:.5g} outside table range [{gg[0]:.5g}, {gg[-1]:.5g}]"
            )
        beta = float(np.clip(beta, bg[0], bg[-1]))
        gamma = float(np.clip(gamma, gg[0], gg[-1]))
        col = np.array([float(f(np.log(gamma))) for f in self._interp_rows()])
        if len(bg) == 1:
            return float(col[0])
        return float(PchipInterpolator(np.log(bg), col, extrapolate=False)(np.log(beta)))

    def __call__(self, beta: float, gamma: float) -> float:
        return self.eta(beta, gamma)

    def save(self, path: str) -> None:
        payload = {
            "d": self.d,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "beta_grid": self.beta_grid.tolist(),
            "gamma_grid": self.gamma_grid.tolist(),
            "values": self.values.tolist(),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)

    @classmethod
    def load(cls, path: str) -> "EtaUTable":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        return cls(
            d=payload["d"],
            n=payload["n"],
            trials=payload["trials"],
            seed=payload["seed"],
            beta_grid=np.array(payload["beta_grid"]),
            gamma_grid=np.array(payload["gamma_grid"]),
            values=np.array(payload["values"]),
        )


def eta_u_table(
    d: int,
    beta_grid: Sequence[float],
    gamma_grid: Sequence[float],
    n: int,
    trials: int,
    seed: int,
    threads: Optional[int] = None,
) -> EtaUTable:
    """Simulate eta^(n)_u on the grid.  Each beta node is realized by the
    nearest integer m; the stored grid holds the achieved aspect ratios."""
    from .sampling import uniform_distribution

    beta_grid = np.sort(np.asarray(beta_grid, dtype=float))
    gamma_grid = np.sort(np.asarray(gamma_grid, dtype=float))
    if beta_grid[0] <= 0 or gamma_grid[0] <= 0:
        raise ValueError("grids must be positive (gamma=0 is handled exactly)")
    uni = uniform_distribution(d)
    ms = np.unique([max(1, int(round(n ** d / b))) for b in beta_grid])[::-1]
    achieved = np.array([n ** d / m for m in ms])
    values = np.empty((len(ms), len(gamma_grid)))
    for i, m in enumerate(ms):
        summary = aesd(uni, n, int(m), trials, seed=seed + i, threads=threads)
        lam = summary.eigenvalues
        values[i] = [float(np.mean(1.0 / (g * lam + 1.0))) for g in gamma_grid]
    return EtaUTable(
        d=d,
        n=n,
        trials=trials,
        seed=seed,
        beta_grid=achieved,
        gamma_grid=gamma_grid,
        values=values,
    )


def build_eta_table(
    d: int,
    n: int,
    beta_span: tuple[float, float],
    gamma_span: tuple[float, float],
    beta_nodes: int = 24,
    gamma_nodes: int = 40,
    trials: int = 50,
    seed: int = 42,
    threads: Optional[int] = None,
) -> EtaUTable:
    """Log-spaced table covering the requested spans with 5% padding."""
    bspan = (beta_span[0] * 0.95, beta_span[1] * 1.05)
    gspan = (gamma_span[0] * 0.95, gamma_span[1] * 1.05)
    return eta_u_table(
        d,
        np.geomspace(*bspan, beta_nodes),
        np.geomspace(*gspan, gamma_nodes),
        n,
        trials,
        seed,
        threads,
    )


EtaCallable = Callable[[float, float], float]


def eta_mixture(
    gx: GxRepresentation,
    support_measure: float,
    d: int,
    beta: float,
    gamma: float,
    eta_u: EtaCallable,
) -> float:
    """eta_x(d, beta, gamma) = 1 - |A| + |A| * int g_x(y) eta_u(beta/y, gamma*y) dy.

    Discrete atoms evaluate as an exact finite sum; closed forms by adaptive
    quadrature over the g_x support; empirical histograms bin by bin.
    """
    if gamma == 0.0:
        return 1.0
    if isinstance(eta_u, EtaUTable) and eta_u.d != d:
        raise ValueError(f"eta_u table has d={eta_u.d}, mixture needs d={d}")
    A = support_measure
    if isinstance(gx, GxDiscreteAtoms):
        total = 0.0
        for y, area in gx.atoms:
            if y <= 0:
                raise ValueError("discrete g_x atoms need y > 0")
            total += area * eta_u(beta / y, gamma * y)
        return 1.0 - A + total
    if isinstance(gx, GxClosedForm):
        lo, hi = gx.support
        val, _ = integrate.quad(
            lambda y: float(gx.density(np.array([y]))[0]) * eta_u(beta / y, gamma * y),
            lo,
            hi,
            points=list(gx.breakpoints),
            limit=200,
            epsabs=0.0,
            epsrel=1e-4,
        )
        return 1.0 - A + A * val
    if isinstance(gx, GxEmpirical):
        centers = 0.5 * (gx.edges[:-1] + gx.edges[1:])
        total = sum(
            mass * eta_u(beta / y, gamma * y)
            for y, mass in zip(centers, gx.masses)
            if mass > 0
        )
        return 1.0 - A + A * float(total)
    raise TypeError(f"unsupported g_x representation {type(gx).__name__}")


def asymptotic_mse(
    gx: GxRepresentation,
    support_measure: float,
    d: int,
    beta: float,
    gamma: float,
    eta_u: EtaCallable,
) -> float:
    """MSE_inf = eta_x(d, beta, gamma/beta)."""
    return eta_mixture(gx, support_measure, d, beta, gamma / beta, eta_u)
