"""Ball Divergence statistics.

Two-sample BD from row-wise ranks, its K-sample aggregations, an ``O(N^2)``
two-pointer path for univariate data, and the order-matrix reconstruction
that rebuilds shuffled rank matrices without re-sorting.

All ball counts are tie-inclusive (``<=`` on distances), so duplicated points
within or across groups give exact statistics.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from numba import njit

from ._types import (
    BDKind,
    DistanceMatrix,
    GroupedSample,
    RankStructures,
    group_positions,
    validate_distance_matrix,
)
from .counting import _ranks_only
from .exceptions import EmptyGroupError, LabelCountMismatchError, UnsortedInputError


# -- accumulation ------------------------------------------------------------


@njit(cache=True, nogil=True, inline="always")
def _kahan_add(total, comp, x):
    t = total + x
    if abs(total) >= abs(x):
        comp += (total - t) + x
    else:
        comp += (x - t) + total
    return t, comp


@njit(cache=True, nogil=True)
def _bd_half(own, pooled, offset, n_own, n_other):
    """``(1/n_own^2) * sum (P_own - P_other)^2`` over all balls centred in one group.

    ``own[i, j]`` counts own-group points in ball ``(i, j)``;
    ``pooled[offset + i, offset + j]`` counts points of both groups.
    """
    total = 0.0
    comp = 0.0
    for i in range(n_own):
        for j in range(n_own):
            c_own = own[i, j]
            c_other = pooled[offset + i, offset + j] - c_own
            diff = float(c_own * n_other - c_other * n_own)
            total, comp = _kahan_add(total, comp, diff * diff)
    scale = float(n_own) * float(n_other)
    return (total + comp) / (scale * scale) / (float(n_own) * float(n_own))


@njit(cache=True, nogil=True)
def _bd_from_ranks(rs, rt, rst, ns, nt):
    return _bd_half(rs, rst, 0, ns, nt) + _bd_half(rt, rst, ns, nt, ns)


# -- rank-based path ---------------------------------------------------------


def _check_groups(groups: GroupedSample, n: int) -> None:
    if groups.n != n:
        raise LabelCountMismatchError(f"{groups.n} labels for {n} observations")
    if np.any(groups.sizes < 1):
        raise EmptyGroupError(f"empty group in sizes {groups.sizes.tolist()}")


def _bd_pair_indices(d: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    if len(a) == 0 or len(b) == 0:
        raise EmptyGroupError("both groups must be non-empty")
    ab = np.concatenate([a, b])
    ra = _ranks_only(d[np.ix_(a, a)])
    rb = _ranks_only(d[np.ix_(b, b)])
    rab = _ranks_only(d[np.ix_(ab, ab)])
    return float(_bd_from_ranks(ra, rb, rab, len(a), len(b)))


def bd_two_sample(dist, groups: GroupedSample) -> float:
    """Two-sample Ball Divergence in ``O(N^2 log N)``.

    ``n_own * P_own`` for ball ``(i, j)`` is the rank of ``d(i, j)`` in row
    ``i`` of the within-group block, and ``n_own * P_own + n_other * P_other``
    is its rank in the pooled row.

    >>> from ballistic.metrics import euclidean_distances
    >>> bd_two_sample(euclidean_distances([0.0, 1.0]), GroupedSample.from_sizes([1, 1]))
    2.0
    """
    dist = validate_distance_matrix(dist)
    _check_groups(groups, dist.n)
    if groups.k != 2:
        raise ValueError(f"two-sample BD needs 2 groups, got {groups.k}")
    return _bd_pair_indices(dist.values, groups.indices(0), groups.indices(1))


def bd_pairwise(dist, groups: GroupedSample) -> np.ndarray:
    """Symmetric ``K x K`` table of two-sample BD for every pair of groups (zero diagonal)."""
    dist = validate_distance_matrix(dist)
    _check_groups(groups, dist.n)
    if groups.k < 2:
        raise ValueError("need at least two groups")
    idx = [groups.indices(g) for g in range(groups.k)]
    table = np.zeros((groups.k, groups.k))
    for s in range(groups.k):
        for t in range(s + 1, groups.k):
            table[s, t] = table[t, s] = _bd_pair_indices(dist.values, idx[s], idx[t])
    return table


class KSampleBD(NamedTuple):
    sum: float
    summax: float
    max: float

    def select(self, kind) -> float:
        return getattr(self, BDKind.parse(kind).value)


def bd_k_sample(table, kind="sum") -> tuple[float, KSampleBD]:
    """Aggregate a pairwise BD table.

    Returns the selected variant and all three:

    * ``sum``: total over all pairs;
    * ``summax``: the largest per-group total, ``max_t sum_{s != t} BD(s, t)``;
    * ``max``: the sum of the ``K - 1`` largest pairwise values.

    With two groups all three equal the single two-sample value.
    """
    table = np.asarray(table, dtype=np.float64)
    k = table.shape[0]
    if k < 2 or table.shape != (k, k):
        raise ValueError("need a square table over at least two groups")
    iu = np.triu_indices(k, 1)
    upper = table[iu]
    sym = np.zeros_like(table)
    sym[iu] = upper
    sym = sym + sym.T
    top = np.sort(upper)[::-1][: k - 1]
    variants = KSampleBD(
        sum=math.fsum(upper),
        summax=max(math.fsum(row) for row in sym),
        max=math.fsum(top),
    )
    return variants.select(kind), variants


@njit(cache=True, nogil=True)
def _aggregate(table, out):
    k = table.shape[0]
    m = k * (k - 1) // 2
    vals = np.empty(m)
    p = 0
    total = 0.0
    best = 0.0
    for s in range(k):
        row = 0.0
        for t in range(k):
            if t != s:
                row += table[s, t]
            if t > s:
                vals[p] = table[s, t]
                total += table[s, t]
                p += 1
        if s == 0 or row > best:
            best = row
    vals.sort()
    top = 0.0
    for q in range(m - 1, m - k, -1):
        top += vals[q]
    out[0] = total
    out[1] = best
    out[2] = top


# -- univariate path ---------------------------------------------------------


@njit(cache=True, nogil=True)
def _ball_bounds(xs, ref, lo, hi):
    """Index range in sorted ``ref`` of every ball ``B(xs[i], |xs[i] - xs[j]|)``.

    Both inputs ascending.  For each center a two-pointer scan peels points of
    ``xs`` off the ends in order of decreasing distance; ``ref`` pointers only
    move inward, so each center costs ``O(len(xs) + len(ref))``.  All points
    sharing the current radius are peeled together, which keeps the count
    tie-inclusive.
    """
    n = xs.shape[0]
    m = ref.shape[0]
    for i in range(n):
        c = xs[i]
        left = 0
        right = n - 1
        pl = 0
        pr = m - 1
        while left <= right:
            dl = c - xs[left]
            dr = xs[right] - c
            rad = dl if dl > dr else dr
            while pl < m and c - ref[pl] > rad:
                pl += 1
            while pr >= 0 and ref[pr] - c > rad:
                pr -= 1
            while left <= right and xs[right] - c == rad:
                lo[i, right] = pl
                hi[i, right] = pr
                right -= 1
            while left <= right and c - xs[left] == rad:
                lo[i, left] = pl
                hi[i, left] = pr
                left += 1


@njit(cache=True, nogil=True)
def _bd_half_univariate(xs, pooled, n_other):
    """:func:`_bd_half` for sorted real samples, without any ``n x n`` table.

    Same two-pointer scan as :func:`_ball_bounds`.  While ``xs[left..right]``
    remain, the current ball holds exactly those own-group points; all
    points peeled at one radius share the term.
    """
    n = xs.shape[0]
    m = pooled.shape[0]
    total = 0.0
    comp = 0.0
    for i in range(n):
        c = xs[i]
        left = 0
        right = n - 1
        pl = 0
        pr = m - 1
        while left <= right:
            dl = c - xs[left]
            dr = xs[right] - c
            rad = dl if dl > dr else dr
            while pl < m and c - pooled[pl] > rad:
                pl += 1
            while pr >= 0 and pooled[pr] - c > rad:
                pr -= 1
            c_own = right - left + 1
            c_other = pr - pl + 1 - c_own
            peeled = 0
            while left <= right and xs[right] - c == rad:
                right -= 1
                peeled += 1
            while left <= right and c - xs[left] == rad:
                left += 1
                peeled += 1
            diff = float(c_own * n_other - c_other * n)
            total, comp = _kahan_add(total, comp, diff * diff * peeled)
    scale = float(n) * float(n_other)
    return (total + comp) / (scale * scale) / (float(n) * float(n))


def ball_bounds(xs, ref=None) -> tuple[np.ndarray, np.ndarray]:
    """Inclusive bounds ``(lo, hi)`` so that ball ``(i, j)`` holds ``ref[lo:hi + 1]``.

    ``xs`` and ``ref`` (default ``xs``) must be sorted ascending.
    """
    xs = _sorted_1d(xs)
    ref = xs if ref is None else _sorted_1d(ref)
    n = xs.shape[0]
    lo = np.empty((n, n), dtype=np.int64)
    hi = np.empty((n, n), dtype=np.int64)
    _ball_bounds(xs, ref, lo, hi)
    return lo, hi


def _sorted_1d(x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64).ravel()
    if np.any(np.diff(x) < 0):
        raise UnsortedInputError("input must be sorted ascending")
    return x


def bd_two_sample_univariate(x1, x2) -> float:
    """Two-sample BD for real-valued samples in ``O(N^2)``; inputs sorted ascending."""
    x1 = _sorted_1d(x1)
    x2 = _sorted_1d(x2)
    if len(x1) == 0 or len(x2) == 0:
        raise EmptyGroupError("both groups must be non-empty")
    pooled = np.sort(np.concatenate([x1, x2]), kind="stable")
    return float(
        _bd_half_univariate(x1, pooled, len(x2)) + _bd_half_univariate(x2, pooled, len(x1))
    )


def bd_pairwise_univariate(x, groups: GroupedSample) -> np.ndarray:
    """Pairwise BD table for real-valued observations (unsorted input is fine)."""
    x = np.asarray(x, dtype=np.float64).ravel()
    _check_groups(groups, len(x))
    parts = [np.sort(x[groups.indices(g)], kind="stable") for g in range(groups.k)]
    table = np.zeros((groups.k, groups.k))
    for s in range(groups.k):
        for t in range(s + 1, groups.k):
            table[s, t] = table[t, s] = bd_two_sample_univariate(parts[s], parts[t])
    return table


# -- shuffled-rank reconstruction -------------------------------------------


@njit(cache=True, nogil=True)
def _reconstruct(order, tie_next, lab, pos, s, t, ns, rs, rt, rst):
    """Rebuild rank matrices of groups ``s``, ``t`` and their union from the order matrix.

    ``lab`` are shuffled labels and ``pos[i]`` the within-group index of
    observation ``i``.  Each row of the pooled order matrix is walked once in
    tie blocks: counts are tallied over a block first, then written to every
    block member, giving the tie-inclusive (maximum) rank.
    """
    n = order.shape[0]
    for i in range(n):
        g = lab[i]
        if g != s and g != t:
            continue
        r_own = pos[i]
        row = pos[i] if g == s else ns + pos[i]
        own = rs if g == s else rt
        cnt_own = 0
        cnt_pair = 0
        p = 0
        while p < n:
            e = p
            while e < n - 1 and tie_next[i, e]:
                e += 1
            for q in range(p, e + 1):
                h = lab[order[i, q]]
                if h == g:
                    cnt_own += 1
                    cnt_pair += 1
                elif h == s or h == t:
                    cnt_pair += 1
            for q in range(p, e + 1):
                o = order[i, q]
                h = lab[o]
                if h == s:
                    rst[row, pos[o]] = cnt_pair
                elif h == t:
                    rst[row, ns + pos[o]] = cnt_pair
                if h == g:
                    own[r_own, pos[o]] = cnt_own
            p = e + 1


@njit(cache=True, nogil=True)
def _positions(lab, k):
    seen = np.zeros(k, dtype=np.int64)
    pos = np.empty(lab.shape[0], dtype=np.int64)
    for i in range(lab.shape[0]):
        pos[i] = seen[lab[i]]
        seen[lab[i]] += 1
    return pos


@njit(cache=True, nogil=True)
def _k_sample_from_order(order, tie_next, lab, sizes, table):
    k = sizes.shape[0]
    pos = _positions(lab, k)
    for s in range(k):
        ns = sizes[s]
        for t in range(s + 1, k):
            nt = sizes[t]
            rs = np.empty((ns, ns), dtype=np.int64)
            rt = np.empty((nt, nt), dtype=np.int64)
            rst = np.empty((ns + nt, ns + nt), dtype=np.int64)
            _reconstruct(order, tie_next, lab, pos, s, t, ns, rs, rt, rst)
            v = _bd_from_ranks(rs, rt, rst, ns, nt)
            table[s, t] = v
            table[t, s] = v


@njit(cache=True, nogil=True)
def _bd_null_block(order, tie_next, labels, sizes, perms, out):
    """K-sample BD variants (sum, summax, max) for each row of ``perms``."""
    k = sizes.shape[0]
    table = np.zeros((k, k))
    for m in range(perms.shape[0]):
        lab = labels[perms[m]]
        _k_sample_from_order(order, tie_next, lab, sizes, table)
        _aggregate(table, out[m])


def reconstruct_shuffled_ranks(
    structures: RankStructures,
    shuffled_labels,
    groups: GroupedSample,
    pair: tuple[int, int],
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rank matrices of groups ``s``, ``t`` and ``s`` + ``t`` after a label shuffle, in ``O(N^2)``.

    ``structures`` must come from :func:`ballistic.counting.rowwise_rank` on
    the unshuffled pooled distance matrix.  Rows and columns of each result
    follow observation order within the shuffled groups, with group ``s``
    first in the union.
    """
    lab = np.ascontiguousarray(shuffled_labels, dtype=np.int64)
    n = structures.order.shape[0]
    if lab.shape != (n,):
        raise LabelCountMismatchError(f"{lab.shape[0]} labels for {n} observations")
    if lab.min(initial=0) < 0 or lab.max(initial=0) >= groups.k:
        raise LabelCountMismatchError("labels outside 0..K-1")
    if not np.array_equal(np.bincount(lab, minlength=groups.k), groups.sizes):
        raise LabelCountMismatchError("shuffled labels do not reproduce the group sizes")
    s, t = pair
    if s == t:
        raise ValueError("pair must name two distinct groups")
    ns, nt = int(groups.sizes[s]), int(groups.sizes[t])
    pos = group_positions(lab, np.zeros(groups.k, dtype=np.int64))
    rs = np.empty((ns, ns), dtype=np.int64)
    rt = np.empty((nt, nt), dtype=np.int64)
    rst = np.empty((ns + nt, ns + nt), dtype=np.int64)
    _reconstruct(structures.order, structures.tie_next, lab, pos, s, t, ns, rs, rt, rst)
    return rs, rt, rst
