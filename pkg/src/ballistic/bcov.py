"""Ball Covariance and Ball Correlation.

Three routes to the same numbers:

* :func:`bcov_pair` -- two variables, general metric, ``O(N^2 log N)``: marginal
  proportions from row ranks, the joint proportion by a merge-sort count per row.
* :func:`bcov_pair_univariate` -- two real-valued variables, ``O(N^2)``: ball
  bounds from a two-pointer scan and the joint count by inclusion-exclusion on
  a bivariate rank grid.
* :func:`bcov_mutual` -- any number of variables, direct ``O(K N^3)`` count
  done 64 observations at a time on bit sets.

Each returns the constant, probability and chi-square weighted statistics
together.  A chi-square term whose marginal proportion equals 1 has no
defined weight and contributes 0; likewise a probability term at 0.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np
from numba import njit

from ._types import BCovWeight, DistanceMatrix, validate_distance_matrix
from .bd import _kahan_add, ball_bounds
from .counting import _merge_count, rank_rows
from .exceptions import DimensionMismatchError, LengthMismatchError, TooFewVariablesError


class BCovTriple(NamedTuple):
    constant: float
    probability: float
    chisquare: float

    def select(self, weight) -> float:
        return getattr(self, BCovWeight.parse(weight).value)


# -- term accumulation ---------------------------------------------------------


@njit(cache=True, nogil=True, inline="always")
def _add_pair_terms(acc, c1, c2, cj, n):
    """Add the three weighted terms of one ball pair given integer counts.

    ``acc`` holds (total, compensation) for constant, probability, chi-square.
    """
    diff = float(n * cj - c1 * c2)
    sq = diff * diff
    acc[0], acc[1] = _kahan_add(acc[0], acc[1], sq)
    acc[2], acc[3] = _kahan_add(acc[2], acc[3], sq / (float(c1) * float(c2)))
    if c1 < n and c2 < n:
        den = float(c1) * float(n - c1) * float(c2) * float(n - c2)
        acc[4], acc[5] = _kahan_add(acc[4], acc[5], sq / den)


@njit(cache=True, nogil=True)
def _finish_pair(acc, n, out):
    nn = float(n) * float(n)
    out[0] = (acc[0] + acc[1]) / (nn * nn) / nn
    out[1] = (acc[2] + acc[3]) / nn / nn
    out[2] = (acc[4] + acc[5]) / nn


# -- rank-based two-variable path --------------------------------------------


@njit(cache=True, nogil=True)
def _bcov_pair_kernel(d2, r1, r2, order1, tie1, perm, out):
    """Joint ball counts row by row, with variable 2 relabelled through ``perm``.

    Row ``i``'s companions are visited in ascending ``d1`` order and their
    ``d2`` values collected in ``a``.  The joint count at position ``q`` is the
    number of positions up to the end ``e`` of ``q``'s ``d1`` tie block whose
    ``a`` is ``<= a[q]``.  Sorting each tie block by ``a`` descending makes
    every later in-block element qualify, so the count equals
    ``rank2 - later_leq[q] + (e - q)``.
    """
    n = d2.shape[0]
    a = np.empty(n)
    cols = np.empty(n, dtype=np.int64)
    block_end = np.empty(n, dtype=np.int64)
    index = np.empty(n, dtype=np.int64)
    numbers = np.empty(n, dtype=np.int64)
    tmp_v = np.empty(n)
    tmp_i = np.empty(n, dtype=np.int64)
    acc = np.zeros(6)
    for i in range(n):
        pi = perm[i]
        for q in range(n):
            j = order1[i, q]
            cols[q] = j
            a[q] = d2[pi, perm[j]]
        q = n - 1
        while q >= 0:
            e = q
            b = q
            while b > 0 and tie1[i, b - 1]:
                b -= 1
            if e > b:
                seg = -a[b : e + 1]
                o = np.argsort(seg, kind="mergesort")
                sa = a[b : e + 1].copy()
                sc = cols[b : e + 1].copy()
                for u in range(e - b + 1):
                    a[b + u] = sa[o[u]]
                    cols[b + u] = sc[o[u]]
            for u in range(b, e + 1):
                block_end[u] = e
            q = b - 1
        for u in range(n):
            index[u] = u
            numbers[u] = 0
        _merge_count(a, index, numbers, tmp_v, tmp_i)
        for u in range(n):
            j = cols[u]
            c1 = r1[i, j]
            c2 = r2[pi, perm[j]]
            cj = c2 - numbers[u] + (block_end[u] - u)
            _add_pair_terms(acc, c1, c2, cj, n)
    _finish_pair(acc, n, out)


@njit(cache=True, nogil=True)
def _bcov_pair_null_block(d2, r1, r2, order1, tie1, perms, out):
    for m in range(perms.shape[0]):
        _bcov_pair_kernel(d2, r1, r2, order1, tie1, perms[m], out[m])


class _PairCache(NamedTuple):
    d2: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    order1: np.ndarray
    tie1: np.ndarray


def _pair_cache(d1: DistanceMatrix, d2: DistanceMatrix) -> _PairCache:
    r1, order1, tie1 = rank_rows(d1.values)
    r2 = rank_rows(d2.values)[0]
    return _PairCache(np.ascontiguousarray(d2.values), r1, r2, order1, tie1)


def _check_same_n(mats: Sequence[DistanceMatrix]) -> int:
    n = mats[0].n
    if any(m.n != n for m in mats):
        raise DimensionMismatchError(
            f"all variables must cover the same observations, got sizes {[m.n for m in mats]}"
        )
    return n


def bcov_pair(dist1, dist2) -> BCovTriple:
    """Ball Covariance of two variables from their distance matrices, ``O(N^2 log N)``."""
    d1 = validate_distance_matrix(dist1)
    d2 = validate_distance_matrix(dist2)
    n = _check_same_n([d1, d2])
    if n == 0:
        return BCovTriple(0.0, 0.0, 0.0)
    cache = _pair_cache(d1, d2)
    out = np.empty(3)
    _bcov_pair_kernel(*cache, np.arange(n, dtype=np.int64), out)
    return BCovTriple(*map(float, out))


# -- univariate two-variable path --------------------------------------------


@njit(cache=True, nogil=True)
def _bcov_univariate_kernel(rx, ry, lox, hix, loy, hiy, grid, out):
    n = rx.shape[0]
    acc = np.zeros(6)
    for i in range(n):
        ai = rx[i]
        bi = ry[i]
        for j in range(n):
            aj = rx[j]
            bj = ry[j]
            l1 = lox[ai, aj]
            h1 = hix[ai, aj] + 1
            l2 = loy[bi, bj]
            h2 = hiy[bi, bj] + 1
            cj = grid[h1, h2] - grid[l1, h2] - grid[h1, l2] + grid[l1, l2]
            _add_pair_terms(acc, h1 - l1, h2 - l2, cj, n)
    _finish_pair(acc, n, out)


def _as_1d(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim == 2 and v.shape[1] == 1:
        v = v[:, 0]
    if v.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return np.ascontiguousarray(v)


def bcov_pair_univariate(x, y) -> BCovTriple:
    """Ball Covariance of two real-valued variables in ``O(N^2)``.

    Each ball is an index interval of the sorted values.  With ``F`` the count
    of points whose (x-position, y-position) lies at or below a grid cell, the
    joint count of a box ``[l1, r1] x [l2, r2]`` is
    ``F(r1, r2) - F(l1-1, r2) - F(r1, l2-1) + F(l1-1, l2-1)``.
    """
    x = _as_1d(x, "x")
    y = _as_1d(y, "y")
    if x.shape != y.shape:
        raise LengthMismatchError(f"x has {len(x)} values, y has {len(y)}")
    n = len(x)
    if n == 0:
        return BCovTriple(0.0, 0.0, 0.0)
    ox = np.argsort(x, kind="stable")
    oy = np.argsort(y, kind="stable")
    rx = np.empty(n, dtype=np.int64)
    ry = np.empty(n, dtype=np.int64)
    rx[ox] = np.arange(n)
    ry[oy] = np.arange(n)
    lox, hix = ball_bounds(x[ox])
    loy, hiy = ball_bounds(y[oy])
    grid = np.zeros((n + 1, n + 1), dtype=np.int64)
    grid[rx + 1, ry + 1] = 1
    grid = grid.cumsum(axis=0).cumsum(axis=1)
    out = np.empty(3)
    _bcov_univariate_kernel(rx, ry, lox, hix, loy, hiy, grid, out)
    return BCovTriple(*map(float, out))


# -- K-variable definitional path ---------------------------------------------


_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True, nogil=True, inline="always")
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


@njit(cache=True, nogil=True)
def _bcov_mutual_kernel(ranks, orders, perms, out):
    """Direct joint ball counts for ``K`` variables, 64 observations per word.

    For center ``i`` and variable ``v``, ``prefix[v, c]`` is the bit set of the
    ``c`` observations closest to ``i`` in that variable.  Ball ``(i, j)`` in
    variable ``v`` is exactly ``prefix[v, rank_v(i, j)]`` because ranks are
    tie-inclusive, and the joint count is the popcount of the intersection.
    Variable ``v`` is relabelled through ``perms[v]``.
    """
    k, n, _ = ranks.shape
    words = (n + 63) // 64
    inv = np.empty((k, n), dtype=np.int64)
    for v in range(k):
        for t in range(n):
            inv[v, perms[v, t]] = t
    prefix = np.zeros((k, n + 1, words), dtype=np.uint64)
    cnt = np.empty((k, n), dtype=np.int64)
    inter = np.empty(words, dtype=np.uint64)
    acc = np.zeros(6)
    nf = float(n)
    one = np.uint64(1)
    for i in range(n):
        for v in range(k):
            pi = perms[v, i]
            for q in range(n):
                t = inv[v, orders[v, pi, q]]
                for w in range(words):
                    prefix[v, q + 1, w] = prefix[v, q, w]
                prefix[v, q + 1, t >> 6] |= one << np.uint64(t & 63)
            for j in range(n):
                cnt[v, j] = ranks[v, pi, perms[v, j]]
        for j in range(n):
            for w in range(words):
                inter[w] = prefix[0, cnt[0, j], w]
            for v in range(1, k):
                c = cnt[v, j]
                for w in range(words):
                    inter[w] &= prefix[v, c, w]
            cj = 0
            for w in range(words):
                cj += _popcount(inter[w])
            prod = 1.0
            w_prob = 1.0
            w_chi = 1.0
            for v in range(k):
                c = cnt[v, j]
                p = c / nf
                prod *= p
                w_prob /= p
                if c < n:
                    w_chi /= p * (1.0 - p)
                else:
                    w_chi = 0.0
            diff = cj / nf - prod
            sq = diff * diff
            acc[0], acc[1] = _kahan_add(acc[0], acc[1], sq)
            acc[2], acc[3] = _kahan_add(acc[2], acc[3], sq * w_prob)
            acc[4], acc[5] = _kahan_add(acc[4], acc[5], sq * w_chi)
    nn = nf * nf
    out[0] = (acc[0] + acc[1]) / nn
    out[1] = (acc[2] + acc[3]) / nn
    out[2] = (acc[4] + acc[5]) / nn


@njit(cache=True, nogil=True)
def _bcov_mutual_null_block(ranks, orders, perms, out):
    for m in range(perms.shape[0]):
        _bcov_mutual_kernel(ranks, orders, perms[m], out[m])


def _stack(dists) -> tuple[list[DistanceMatrix], int]:
    mats = [validate_distance_matrix(d) for d in dists]
    if len(mats) < 2:
        raise TooFewVariablesError(f"need at least two variables, got {len(mats)}")
    return mats, _check_same_n(mats)


def _mutual_arrays(mats: Sequence[DistanceMatrix]) -> tuple[np.ndarray, np.ndarray]:
    ranked = [rank_rows(m.values) for m in mats]
    return np.stack([r[0] for r in ranked]), np.stack([r[1] for r in ranked])


def bcov_mutual(dists) -> BCovTriple:
    """Ball Covariance of ``K >= 2`` variables by direct counting, ``O(K N^3)``."""
    mats, n = _stack(dists)
    if n == 0:
        return BCovTriple(0.0, 0.0, 0.0)
    ranks, orders = _mutual_arrays(mats)
    perms = np.tile(np.arange(n, dtype=np.int64), (len(mats), 1))
    out = np.empty(3)
    _bcov_mutual_kernel(ranks, orders, perms, out)
    return BCovTriple(*map(float, out))


def bcov(dists) -> BCovTriple:
    """Ball Covariance of a list of distance matrices, picking the fastest exact path."""
    mats, _ = _stack(dists)
    if len(mats) == 2:
        return bcov_pair(*mats)
    return bcov_mutual(mats)


# -- normalization -------------------------------------------------------------


def marginal_bcov(dist, k: int) -> BCovTriple:
    """``(1/N^2) sum [P - P^k]^2 w^k`` for one variable, for each weight."""
    d = validate_distance_matrix(dist)
    n = d.n
    p = rank_rows(d.values)[0].ravel() / n
    core = (p - p**k) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        prob = np.where(p > 0, core / p**k, 0.0)
        chi = np.where((p > 0) & (p < 1), core / (p * (1.0 - p)) ** k, 0.0)
    nn = float(n) * n
    return BCovTriple(math.fsum(core) / nn, math.fsum(prob) / nn, math.fsum(chi) / nn)


def bcor_from_parts(numerator: BCovTriple, marginals: Sequence[BCovTriple]) -> BCovTriple:
    vals = []
    for w in range(3):
        den = math.prod(m[w] for m in marginals)
        vals.append(numerator[w] / math.sqrt(den) if den > 0 else 0.0)
    return BCovTriple(*vals)


def bcor(dists, weight="constant", root: bool = False) -> float:
    """Ball Correlation: BCov over the root of the product of marginal terms.

    Returns 0 when any marginal term vanishes.  The ratio itself is returned
    by default; ``root=True`` gives its square root instead.  Both order
    instances the same way.
    """
    mats, _ = _stack(dists)
    k = len(mats)
    value = bcor_from_parts(bcov(mats), [marginal_bcov(m, k) for m in mats]).select(weight)
    return math.sqrt(value) if root else value
