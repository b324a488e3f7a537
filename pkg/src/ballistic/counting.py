"""Rank and order primitives.

Two building blocks everything else rests on: tie-inclusive row-wise ranking
of a distance matrix, and the merge-sort count of later elements that are no
larger than the current one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from ._types import DistanceMatrix, RankStructures, _frozen, validate_distance_matrix


@dataclass(frozen=True)
class CountResult:
    values: np.ndarray  # input values in ascending order
    numbers: np.ndarray  # numbers[j] = #{t > j : x[t] <= x[j]}


@njit(cache=True, nogil=True)
def _merge_count(values, index, numbers, tmp_v, tmp_i):
    """Bottom-up merge sort of ``values`` that tallies ``numbers`` in place.

    ``index`` must start as ``0..n-1`` and ``numbers`` as zeros.  Whenever an
    element from the left run is emitted, every right-run element already
    emitted is ``<=`` it and sits after it in the original order.  Equal values
    emit the right element first so ties are counted.  Runs ping-pong between
    the input and scratch buffers; the sorted result ends up in ``values``.
    """
    n = values.shape[0]
    src_v, src_i, dst_v, dst_i = values, index, tmp_v, tmp_i
    width = 1
    while width < n:
        lo = 0
        while lo < n:
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            a = lo
            b = mid
            out = lo
            while a < mid and b < hi:
                # branch-free select: random data makes this comparison unpredictable
                va = src_v[a]
                vb = src_v[b]
                ia = src_i[a]
                left = va < vb
                numbers[ia] += (b - mid) * left
                dst_v[out] = va if left else vb
                dst_i[out] = ia if left else src_i[b]
                a += left
                b += 1 - left
                out += 1
            while a < mid:
                numbers[src_i[a]] += b - mid
                dst_v[out] = src_v[a]
                dst_i[out] = src_i[a]
                a += 1
                out += 1
            while b < hi:
                dst_v[out] = src_v[b]
                dst_i[out] = src_i[b]
                b += 1
                out += 1
            lo = hi
        src_v, dst_v = dst_v, src_v
        src_i, dst_i = dst_i, src_i
        width *= 2
    if src_v is not values:
        for p in range(n):
            values[p] = src_v[p]
            index[p] = src_i[p]


def count_leq_after_self(values) -> CountResult:
    """For each position ``j``, count later positions ``t`` with ``x[t] <= x[j]``.

    Runs in ``O(n log n)``.

    >>> count_leq_after_self([2, 1, 1]).numbers.tolist()
    [2, 1, 0]
    """
    v = np.array(values, dtype=np.float64, copy=True).ravel()
    n = v.shape[0]
    index = np.arange(n, dtype=np.int64)
    numbers = np.zeros(n, dtype=np.int64)
    _merge_count(v, index, numbers, np.empty(n), np.empty(n, dtype=np.int64))
    return CountResult(values=v, numbers=numbers)


@njit(cache=True, nogil=True)
def _ranks_from_order(d, order, ranks, tie_next):
    n, m = d.shape
    for i in range(n):
        cur = m
        for p in range(m - 1, -1, -1):
            if p < m - 1 and d[i, order[i, p]] == d[i, order[i, p + 1]]:
                tie_next[i, p] = True
            else:
                cur = p + 1
            ranks[i, order[i, p]] = cur


def rank_rows(d: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tie-inclusive row ranks, order matrix and tie flags of a 2-D array."""
    d = np.ascontiguousarray(d, dtype=np.float64)
    order = np.argsort(d, axis=1, kind="stable")
    ranks = np.empty(d.shape, dtype=np.int64)
    tie_next = np.zeros(d.shape, dtype=np.bool_)
    _ranks_from_order(d, order, ranks, tie_next)
    return ranks, order, tie_next


def rowwise_rank(dist) -> RankStructures:
    """Rank every row of a distance matrix.

    ``ranks[i, j] = #{t : d[i, t] <= d[i, j]}``, so tied distances share the
    largest rank of their block; this makes ``n * P`` for any ball proportion
    an exact rank value.
    """
    dist = validate_distance_matrix(dist)
    ranks, order, tie_next = rank_rows(dist.values)
    return RankStructures(ranks=_frozen(ranks), order=_frozen(order), tie_next=_frozen(tie_next))


def _ranks_only(d: DistanceMatrix | np.ndarray) -> np.ndarray:
    values = d.values if isinstance(d, DistanceMatrix) else d
    return rank_rows(values)[0]
