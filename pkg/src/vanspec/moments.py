"""Asymptotic moments of V V^H for arbitrary sampling densities.

The p-th moment is a polynomial in the aspect ratio beta whose coefficients
mix the density-power integrals I_k with partition sums of v(omega)^d:

    M_p = sum_{k=1..p} beta^(p-k) * I_k * sum_{omega in Omega_{p,k}} v(omega)^d

For the uniform density every I_k is 1 and the moments reduce to the
uniform-phase values.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

import numpy as np
from scipy import integrate

from .partitions import P_MAX, enumerate_partitions, vandermonde_coefficient
from .sampling import GxDiscreteAtoms, SamplingDistribution


@dataclass(frozen=True)
class DensityPowerIntegrals:
    """Integrals I_k = int_H f(z)^k dz for k = 1..P."""

    values: tuple[float, ...]
    method: str  # closed-form | quadrature | monte-carlo
    stderr: tuple[float, ...] | None = None


@dataclass(frozen=True)
class MomentTable:
    d: int
    beta: float
    moments: tuple[float, ...]
    distribution_id: str
    integrals: DensityPowerIntegrals


def density_power_integrals(dist: SamplingDistribution, P: int) -> DensityPowerIntegrals:
    """Compute I_1..I_P, preferring closed forms, then quadrature (d <= 2),
    then antithetic Monte Carlo."""
    if P < 1:
        raise ValueError("P must be >= 1")
    if dist.power_integral is not None:
        vals = tuple(float(dist.power_integral(k)) for k in range(1, P + 1))
        return DensityPowerIntegrals(values=vals, method="closed-form")
    if isinstance(dist.gx, GxDiscreteAtoms):
        # piecewise-constant density: I_k = sum_i |A_i| y_i^k exactly
        vals = tuple(
            float(sum(area * y ** k for y, area in dist.gx.atoms))
            for k in range(1, P + 1)
        )
        return DensityPowerIntegrals(values=vals, method="closed-form")
    if dist.d == 1:
        vals = []
        for k in range(1, P + 1):
            with warnings.catch_warnings():
                warnings.simplefilter("error", integrate.IntegrationWarning)
                try:
                    v, _ = integrate.quad(
                        lambda z: float(dist.density(np.array([[z]]))[0]) ** k,
                        -0.5, 0.5, epsabs=0.0, epsrel=1e-9, limit=200,
                    )
                except integrate.IntegrationWarning as exc:
                    raise ValueError(f"I_{k} quadrature failed for {dist.id}: {exc}")
            vals.append(v)
        return DensityPowerIntegrals(values=tuple(vals), method="quadrature")
    if dist.d == 2:
        vals = []
        for k in range(1, P + 1):
            with warnings.catch_warnings():
                warnings.simplefilter("error", integrate.IntegrationWarning)
                try:
                    v, _ = integrate.dblquad(
                        lambda z2, z1: float(dist.density(np.array([[z1, z2]]))[0]) ** k,
                        -0.5, 0.5, -0.5, 0.5, epsabs=1e-10, epsrel=1e-8,
                    )
                except integrate.IntegrationWarning as exc:
                    raise ValueError(f"I_{k} quadrature failed for {dist.id}: {exc}")
            vals.append(v)
        return DensityPowerIntegrals(values=tuple(vals), method="quadrature")
    # d >= 3: plain Monte Carlo with antithetic pairs
    rng = np.random.default_rng(0)
    n_pairs = 200_000
    z = rng.random((n_pairs, dist.d)) - 0.5
    fz = dist.density(z)
    fz_anti = dist.density(-z)
    vals, errs = [], []
    for k in range(1, P + 1):
        pair_means = 0.5 * (fz ** k + fz_anti ** k)
        vals.append(float(np.mean(pair_means)))
        errs.append(float(np.std(pair_means) / np.sqrt(n_pairs)))
    return DensityPowerIntegrals(values=tuple(vals), method="monte-carlo", stderr=tuple(errs))


@lru_cache(maxsize=None)
def _omega_sum(p: int, k: int, d: int) -> Fraction:
    """Exact sum of v(omega)^d over all k-block partitions of {1..p}."""
    total = Fraction(0)
    for part in enumerate_partitions(p, k):
        total += vandermonde_coefficient(part).rational ** d
    return total


def asymptotic_moment(
    p: int,
    d: int,
    beta: float,
    I: Union[DensityPowerIntegrals, Sequence[float]],
) -> float:
    """p-th asymptotic moment of V V^H at aspect ratio beta."""
    if p < 1 or p > P_MAX:
        raise ValueError(f"p must be in 1..{P_MAX}")
    if d < 1:
        raise ValueError("d must be >= 1")
    if beta <= 0:
        raise ValueError("beta must be > 0")
    values = I.values if isinstance(I, DensityPowerIntegrals) else tuple(I)
    if len(values) < p:
        raise ValueError(f"need I_1..I_{p}, got only {len(values)} integrals")
    return float(
        sum(beta ** (p - k) * values[k - 1] * float(_omega_sum(p, k, d)) for k in range(1, p + 1))
    )


def uniform_moment(p: int, d: int, beta: float) -> float:
    """Moment for uniformly distributed phases (every I_k = 1)."""
    return asymptotic_moment(p, d, beta, [1.0] * p)


def moment_table(dist: SamplingDistribution, d: int, beta: float, P: int) -> MomentTable:
    """Moments M_1..M_P for a sampling distribution."""
    if d != dist.d:
        raise ValueError(f"dimension mismatch: requested d={d}, distribution has d={dist.d}")
    I = density_power_integrals(dist, P)
    ms = tuple(asymptotic_moment(p, d, beta, I) for p in range(1, P + 1))
    return MomentTable(d=d, beta=beta, moments=ms, distribution_id=dist.id, integrals=I)
