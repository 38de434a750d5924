"""Sampling distributions on the hypercube H = [-1/2, 1/2)^d.

A SamplingDistribution bundles the density of delivered-sample positions,
its support measure, a seeded sampler and, when known, the distribution of
the density value itself (the "density of the density" g_x), which drives
every limiting-spectrum and asymptotic-MSE formula downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy import stats


@dataclass(frozen=True)
class GxClosedForm:
    """g_x(y) given as a callable density on a finite support interval."""

    density: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float]
    breakpoints: tuple[float, ...] = ()
    cdf: Optional[Callable[[np.ndarray], np.ndarray]] = None


@dataclass(frozen=True)
class GxDiscreteAtoms:
    """g_x as a finite mixture of atoms (y_i, |A_i|); areas sum to |A|."""

    atoms: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class GxEmpirical:
    """Histogram of density values measured over a quadrature grid."""

    edges: np.ndarray
    masses: np.ndarray  # sums to 1


GxRepresentation = Union[GxClosedForm, GxDiscreteAtoms, GxEmpirical]


@dataclass(frozen=True)
class SamplingDistribution:
    """Position distribution of the samples that reach the sink.

    density maps an (m, d) array of points to (m,) nonnegative values;
    sampler(seed, m) draws m i.i.d. points as an (m, d) array.
    power_integral, when set, returns the exact value of the k-th
    density-power integral over H.
    """

    d: int
    density: Callable[[np.ndarray], np.ndarray]
    support_measure: float
    sampler: Callable[[object, int], np.ndarray]
    gx: Optional[GxRepresentation]
    id: str
    power_integral: Optional[Callable[[int], float]] = None


def uniform_distribution(d: int = 1) -> SamplingDistribution:
    """Uniform positions over the whole hypercube (the lossless baseline)."""
    if d < 1:
        raise ValueError("d must be >= 1")

    def density(z: np.ndarray) -> np.ndarray:
        z = np.atleast_2d(z)
        return np.ones(z.shape[0])

    def sampler(seed, m: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        return rng.random((m, d)) - 0.5

    return SamplingDistribution(
        d=d,
        density=density,
        support_measure=1.0,
        sampler=sampler,
        gx=GxDiscreteAtoms(atoms=((1.0, 1.0),)),
        id=f"uniform-d{d}",
        power_integral=lambda k: 1.0,
    )


def empirical_density_of_density(
    dist: SamplingDistribution, cells_per_axis: int = 512, bins: int = 64
) -> GxEmpirical:
    """Measure g_x by evaluating the density on a regular grid over H.

    Only grid cells inside the support contribute; masses are normalized by
    the support measure so they sum to 1.
    """
    if dist.d > 2:
        raise ValueError("grid measurement supported for d <= 2 only")
    axis = (np.arange(cells_per_axis) + 0.5) / cells_per_axis - 0.5
    if dist.d == 1:
        pts = axis[:, None]
    else:
        z1, z2 = np.meshgrid(axis, axis)
        pts = np.stack([z1.ravel(), z2.ravel()], axis=1)
    vals = dist.density(pts)
    vals = vals[vals > 0]
    weights = np.full(vals.size, 1.0 / vals.size)
    hist, edges = np.histogram(vals, bins=bins, weights=weights)
    return GxEmpirical(edges=edges, masses=hist)


def grid_cell_masses(dist: SamplingDistribution, cells: int, subdiv: int = 8) -> np.ndarray:
    """Probability mass of each cell of a cells^d grid over H, by midpoint
    quadrature on a subdiv-refined grid per cell (d <= 2)."""
    if dist.d > 2:
        raise ValueError("cell masses supported for d <= 2 only")
    fine = cells * subdiv
    axis = (np.arange(fine) + 0.5) / fine - 0.5
    if dist.d == 1:
        pts = axis[:, None]
        vals = dist.density(pts).reshape(cells, subdiv)
        masses = vals.mean(axis=1) / cells
    else:
        z1, z2 = np.meshgrid(axis, axis, indexing="ij")
        pts = np.stack([z1.ravel(), z2.ravel()], axis=1)
        vals = dist.density(pts).reshape(cells, subdiv, cells, subdiv)
        masses = vals.mean(axis=(1, 3)) / cells ** 2
        masses = masses.ravel()
    return masses / masses.sum()


def sampler_chi2_pvalue(
    dist: SamplingDistribution, draws: int = 100_000, cells: int = 16, seed=0
) -> float:
    """Chi-square goodness-of-fit p-value of the sampler against the density
    on a cells^d grid."""
    pts = dist.sampler(seed, draws)
    expected = grid_cell_masses(dist, cells) * draws
    idx = np.clip(((pts + 0.5) * cells).astype(int), 0, cells - 1)
    if dist.d == 1:
        flat = idx[:, 0]
    else:
        flat = idx[:, 0] * cells + idx[:, 1]
    observed = np.bincount(flat, minlength=cells ** dist.d).astype(float)
    keep = expected > 1e-9
    # absorb zero-probability cells: any draw there is an outright failure
    if observed[~keep].sum() > 0:
        return 0.0
    stat, p = stats.chisquare(observed[keep], expected[keep] * (observed[keep].sum() / expected[keep].sum()))
    return float(p)
