"""Set partitions of {1..p} and their lattice-count coefficients.

The p-th asymptotic moment of V V^H is a sum over set partitions, each
weighted by a rational coefficient v(omega) in (0, 1].  v(omega) is obtained
here by exact counting: expanding each Dirichlet-kernel factor of the torus
integral that defines it reduces the integral to counting integer vectors
(t_1..t_p) in {0..n-1}^p subject to one balance constraint per block, and
v(omega) is the leading coefficient of that count as a polynomial in n.
Noncrossing partitions always carry coefficient exactly 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

# Full enumeration / counting cap: Bell(7) = 877 partitions.
P_MAX = 7
# Smallest lattice size used by the polynomial extrapolation fit.
FIT_BASE_N = 8


class LatticeFitError(RuntimeError):
    """Lattice counts failed to fit a degree-(p-k+1) polynomial exactly."""


@dataclass(frozen=True)
class SetPartition:
    """Partition of {1..p}, stored as block labels in first-occurrence order.

    labels[i] is the (1-based) block index of element i+1.  Canonical
    labeling means labels[0] == 1 and every new block takes the next unused
    index, so structural equality of labels is partition equality.
    """

    labels: tuple[int, ...]

    def __post_init__(self):
        if not self.labels:
            raise ValueError("empty partition")
        seen_max = 0
        for lab in self.labels:
            if not isinstance(lab, int) or lab < 1:
                raise ValueError(f"bad block label {lab!r}")
            if lab > seen_max + 1:
                raise ValueError(
                    f"labels {self.labels} not in canonical first-occurrence order"
                )
            seen_max = max(seen_max, lab)

    @property
    def p(self) -> int:
        return len(self.labels)

    @property
    def k(self) -> int:
        return max(self.labels)

    @classmethod
    def from_labels(cls, labels) -> "SetPartition":
        """Build from an arbitrary labeling, relabeling canonically."""
        labels = list(labels)
        remap: dict = {}
        canon = []
        for lab in labels:
            if lab not in remap:
                remap[lab] = len(remap) + 1
            canon.append(remap[lab])
        return cls(tuple(canon))

    @classmethod
    def from_blocks(cls, blocks) -> "SetPartition":
        """Build from blocks of 1-based element positions."""
        elems = sorted(e for b in blocks for e in b)
        if elems != list(range(1, len(elems) + 1)):
            raise ValueError(f"blocks {blocks} do not partition {{1..p}}")
        labels = [0] * len(elems)
        for b in blocks:
            for e in b:
                labels[e - 1] = min(b)
        return cls.from_labels(labels)

    def blocks(self) -> tuple[tuple[int, ...], ...]:
        """Blocks as tuples of 1-based element positions, ordered by label."""
        out: list[list[int]] = [[] for _ in range(self.k)]
        for i, lab in enumerate(self.labels):
            out[lab - 1].append(i + 1)
        return tuple(tuple(b) for b in out)

    def __str__(self) -> str:
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks())


@dataclass(frozen=True)
class PartitionCoefficient:
    """Coefficient v(omega) with its exact rational value."""

    partition: SetPartition
    value: float
    rational: Fraction
    exact: bool


def bell_number(p: int) -> int:
    """Bell number B(p) via the Bell triangle."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    row = [1]
    for _ in range(p):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def stirling2(p: int, k: int) -> int:
    """Stirling number of the second kind S(p, k)."""
    if k < 0 or k > p:
        return 0
    tbl = [[0] * (k + 1) for _ in range(p + 1)]
    tbl[0][0] = 1
    for i in range(1, p + 1):
        for j in range(1, min(i, k) + 1):
            tbl[i][j] = j * tbl[i - 1][j] + tbl[i - 1][j - 1]
    return tbl[p][k]


def enumerate_partitions(p: int, k: int | None = None) -> list[SetPartition]:
    """All partitions of {1..p}, optionally restricted to k blocks.

    Partitions are emitted in lexicographic order of their canonical
    (restricted-growth) label strings; the count is Bell(p), or S(p, k)
    when k is given.
    """
    if p < 1 or p > P_MAX:
        raise ValueError(f"p must be in 1..{P_MAX}, got {p}")
    if k is not None and not 1 <= k <= p:
        raise ValueError(f"k must be in 1..p, got {k}")

    out: list[SetPartition] = []
    labels = [1] * p

    def rec(i: int, used: int):
        if i == p:
            if k is None or used == k:
                out.append(SetPartition(tuple(labels)))
            return
        for lab in range(1, used + 2):
            labels[i] = lab
            rec(i + 1, max(used, lab))

    rec(1, 1)
    return out


def is_noncrossing(part: SetPartition) -> bool:
    """True iff no indices a<b<c<d exist with w_a = w_c != w_b = w_d."""
    w = part.labels
    p = len(w)
    for a, b, c, d in itertools.combinations(range(p), 4):
        if w[a] == w[c] and w[b] == w[d] and w[a] != w[b]:
            return False
    return True


def _active_positions(labels: tuple[int, ...]) -> dict[int, list[int]]:
    """Positions where each block's balance moves (self-loops excluded)."""
    p = len(labels)
    act: dict[int, list[int]] = {}
    for i in range(p):
        bp, bm = labels[i], labels[(i + 1) % p]
        if bp != bm:
            act.setdefault(bp, []).append(i)
            act.setdefault(bm, []).append(i)
    return act


def lattice_count(part: SetPartition, n: int) -> int:
    """Count t in {0..n-1}^p with, per block b, sum over entries of b minus
    sum over cyclic predecessors of b equal to zero.

    Exact integer arithmetic throughout; counts above the int64-safe range
    fall back to Python integers.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    labels = part.labels
    p = len(labels)

    # Blocks touched only by self-loop positions impose no constraint; each
    # self-loop position contributes a free factor n.
    act = _active_positions(labels)
    scale = 1
    dtype: type | np.dtype = np.int64 if n ** p < 2 ** 62 else object

    # state[idx_1, ..., idx_r] = number of prefixes with the open blocks'
    # balances at (idx - offset); axes[j] is the block of axis j.
    state = np.ones((), dtype=dtype)
    axes: list[int] = []
    offs: dict[int, int] = {}
    remaining = {b: len(pos) for b, pos in act.items()}

    for i in range(p):
        bp, bm = labels[i], labels[(i + 1) % p]
        if bp == bm:
            scale *= n
            continue
        for b in (bp, bm):
            if b not in offs:
                state = state[..., np.newaxis]
                axes.append(b)
                offs[b] = 0
        ax_p, ax_m = axes.index(bp), axes.index(bm)
        shape = list(state.shape)
        wp, wm = shape[ax_p], shape[ax_m]
        shape[ax_p] += n - 1
        shape[ax_m] += n - 1
        offs[bm] += n - 1
        new = np.zeros(shape, dtype=dtype)
        for t in range(n):
            sl = [slice(None)] * len(shape)
            sl[ax_p] = slice(t, t + wp)
            sl[ax_m] = slice(n - 1 - t, n - 1 - t + wm)
            new[tuple(sl)] += state
        state = new

        # Trim each touched axis to balances still able to return to zero.
        for b in (bp, bm):
            remaining[b] -= 1
            ax = axes.index(b)
            reach = (n - 1) * remaining[b]
            lo = max(0, offs[b] - reach)
            hi = min(state.shape[ax], offs[b] + reach + 1)
            if offs[b] < 0 or offs[b] >= state.shape[ax]:
                return 0
            if remaining[b] == 0:
                state = np.take(state, offs[b], axis=ax)
                axes.pop(ax)
                del offs[b]
            else:
                sl = [slice(None)] * state.ndim
                sl[ax] = slice(lo, hi)
                state = state[tuple(sl)]
                offs[b] -= lo

    assert state.ndim == 0
    return int(state) * scale


def lattice_count_bruteforce(part: SetPartition, n: int) -> int:
    """Direct enumeration over {0..n-1}^p; oracle for lattice_count."""
    labels = part.labels
    p = len(labels)
    k = part.k
    count = 0
    for t in itertools.product(range(n), repeat=p):
        bal = [0] * (k + 1)
        for i in range(p):
            bal[labels[i]] += t[i]
            bal[labels[(i + 1) % p]] -= t[i]
        if all(v == 0 for v in bal):
            count += 1
    return count


def _leading_coefficient(xs: list[int], ys: list[int], degree: int) -> Fraction:
    """Leading coefficient of the degree-d interpolant through (xs, ys),
    validated against the extra supplied points.  Exact rationals."""
    coeffs = [Fraction(y) for y in ys]
    # Divided-difference table; f[x0..xj] lands in coeffs[j].
    for j in range(1, len(xs)):
        for i in range(len(xs) - 1, j - 1, -1):
            coeffs[i] = (coeffs[i] - coeffs[i - 1]) / (xs[i] - xs[i - j])
    lead = coeffs[degree]
    # Any divided difference beyond the fitted degree must vanish if the
    # data really is a degree-d polynomial.
    for j in range(degree + 1, len(xs)):
        if coeffs[j] != 0:
            raise LatticeFitError(
                f"counts at n={xs} are not a degree-{degree} polynomial"
            )
    return lead


_coefficient_cache: dict[tuple[int, ...], Fraction] = {}


def vandermonde_coefficient(
    part: SetPartition, method: str = "noncrossing-shortcut"
) -> PartitionCoefficient:
    """Coefficient v(omega) = lim_n lattice_count / n^(p-k+1).

    method "noncrossing-shortcut" returns exactly 1 for noncrossing
    partitions and falls back to the fit otherwise; "extrapolated-count"
    always runs the exact rational polynomial fit on lattice counts at
    n = FIT_BASE_N.. (degree p-k+1, one extra point for validation).
    Counts that are quasi-polynomial in n (parity-dependent) are refit on
    even n only.
    """
    if method not in ("noncrossing-shortcut", "extrapolated-count"):
        raise ValueError(f"unknown method {method!r}")
    key = part.labels
    if method == "noncrossing-shortcut":
        if key not in _coefficient_cache and is_noncrossing(part):
            _coefficient_cache[key] = Fraction(1)
    if key not in _coefficient_cache:
        if part.p > P_MAX:
            raise ValueError(f"p={part.p} above counting cap {P_MAX}")
        degree = part.p - part.k + 1
        xs = list(range(FIT_BASE_N, FIT_BASE_N + degree + 2))
        ys = [lattice_count(part, n) for n in xs]
        try:
            lead = _leading_coefficient(xs, ys, degree)
        except LatticeFitError:
            xs = list(range(FIT_BASE_N, FIT_BASE_N + 2 * (degree + 2), 2))
            ys = [lattice_count(part, n) for n in xs]
            lead = _leading_coefficient(xs, ys, degree)
        if not 0 < lead <= 1:
            raise LatticeFitError(
                f"v({part}) = {lead} outside (0, 1]; counting bug suspected"
            )
        _coefficient_cache[key] = lead
    val = _coefficient_cache[key]
    return PartitionCoefficient(
        partition=part, value=float(val), rational=val, exact=True
    )
