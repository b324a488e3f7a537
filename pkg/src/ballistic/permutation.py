"""Seeded permutation tests.

Permutations are drawn up front from one Philox stream, so a given
``(data, seed, n_permutations)`` produces identical null statistics no matter
how many threads evaluate them.  The numba kernels release the GIL and
threads work on contiguous blocks of replicates; results are stitched back in
replicate order.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._types import (
    BCovWeight,
    BDKind,
    GroupedSample,
    TestResult,
    VariantResult,
    validate_distance_matrix,
)
from .bcov import (
    BCovTriple,
    _bcov_mutual_null_block,
    _bcov_pair_null_block,
    _mutual_arrays,
    _pair_cache,
    _stack,
)
from .bd import _bd_null_block, _check_groups
from .counting import rank_rows
from .exceptions import EmptyNullSampleError, TooFewVariablesError

DEFAULT_PERMUTATIONS = 99
# relative slack when comparing null statistics to the observed one; absorbs
# summation-order noise between mathematically equal statistics
TIE_RTOL = 1e-12


class Mode(enum.Enum):
    SHUFFLE_LABELS = "labels"
    SHUFFLE_MARGINS = "margins"


@dataclass(frozen=True, eq=False)
class PermutationPlan:
    """Pre-drawn permutations for a test.

    For label shuffling ``permutations`` has shape ``(M, N)``.  For margin
    shuffling it has shape ``(M, K, N)``: one index permutation per variable per
    replicate, with variable 0 left as the identity since shuffling every
    margin or all but one gives the same null distribution.
    """

    n_permutations: int
    seed: int
    mode: Mode
    permutations: np.ndarray = field(repr=False)

    @staticmethod
    def _rng(seed: int) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(seed))

    @classmethod
    def shuffle_labels(cls, n: int, n_permutations: int = DEFAULT_PERMUTATIONS, seed: int = 1):
        _check_m(n_permutations)
        rng = cls._rng(seed)
        perms = np.empty((n_permutations, n), dtype=np.int64)
        for m in range(n_permutations):
            perms[m] = rng.permutation(n)
        return cls(n_permutations, seed, Mode.SHUFFLE_LABELS, perms)

    @classmethod
    def shuffle_margins(
        cls, n: int, k: int, n_permutations: int = DEFAULT_PERMUTATIONS, seed: int = 1
    ):
        _check_m(n_permutations)
        if k < 2:
            raise TooFewVariablesError("margin shuffling needs at least two variables")
        rng = cls._rng(seed)
        perms = np.empty((n_permutations, k, n), dtype=np.int64)
        perms[:, 0, :] = np.arange(n)
        for m in range(n_permutations):
            for v in range(1, k):
                perms[m, v] = rng.permutation(n)
        return cls(n_permutations, seed, Mode.SHUFFLE_MARGINS, perms)


def _check_m(m: int) -> None:
    if int(m) != m or m < 0:
        raise ValueError(f"n_permutations must be a non-negative integer, got {m!r}")


def p_value(observed: float, null_stats, rtol: float = TIE_RTOL) -> float:
    """Permutation p-value ``(1 + #{null >= observed}) / (1 + M)``.

    Ties count as exceedances.

    >>> p_value(2.0, [2.0, 2.0, 4.0, 1.0])
    0.8
    """
    null = np.asarray(null_stats, dtype=np.float64).ravel()
    if null.size == 0:
        raise EmptyNullSampleError("no null statistics")
    if not np.all(np.isfinite(null)) or not np.isfinite(observed):
        raise ValueError("statistics must be finite")
    threshold = observed - rtol * abs(observed)
    return float((1 + np.count_nonzero(null >= threshold)) / (1 + null.size))


def resolve_threads(n_jobs: int | None) -> int:
    if not n_jobs:
        return os.cpu_count() or 1
    if n_jobs < 0:
        raise ValueError("n_jobs must be >= 0")
    return int(n_jobs)


def _run_blocks(kernel, args, perms: np.ndarray, n_jobs: int | None) -> np.ndarray:
    """Evaluate ``kernel(*args, perms_block, out_block)`` over replicate blocks."""
    m = perms.shape[0]
    out = np.zeros((m, 3))
    if m == 0:
        return out
    workers = min(resolve_threads(n_jobs), m)
    if workers == 1:
        kernel(*args, perms, out)
        return out
    bounds = np.linspace(0, m, min(m, 4 * workers) + 1).astype(int)
    blocks = [(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]

    def run(block):
        a, b = block
        kernel(*args, perms[a:b], out[a:b])

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run, blocks))
    return out


def _complete(names, observed, null, m) -> tuple[VariantResult, ...]:
    return tuple(
        VariantResult(
            name=name,
            statistic=float(observed[w]),
            p_value=p_value(observed[w], null[:, w]) if m > 0 else None,
        )
        for w, name in enumerate(names)
    )


def bd_permutation_test(
    dist,
    groups: GroupedSample,
    plan: PermutationPlan | None = None,
    kind="sum",
    n_jobs: int | None = 0,
) -> TestResult:
    """K-sample Ball Divergence permutation test.

    The pooled order matrix is built once; every replicate rebuilds the
    shuffled within-pair rank matrices from it in ``O(N^2)``.  All three
    aggregations are tested against the same permutations.
    """
    dist = validate_distance_matrix(dist)
    _check_groups(groups, dist.n)
    if groups.k < 2:
        raise ValueError("need at least two groups")
    kind = BDKind.parse(kind)
    if plan is None:
        plan = PermutationPlan.shuffle_labels(dist.n)
    if plan.mode is not Mode.SHUFFLE_LABELS:
        raise ValueError("BD test needs a label-shuffling plan")
    if plan.permutations.shape[1:] != (dist.n,):
        raise ValueError("plan was drawn for a different sample size")
    _, order, tie_next = rank_rows(dist.values)
    args = (order, tie_next, groups.labels, groups.sizes)
    identity = np.arange(dist.n, dtype=np.int64)[None, :]
    observed = _run_blocks(_bd_null_block, args, identity, 1)[0]
    null = _run_blocks(_bd_null_block, args, plan.permutations, n_jobs)
    names = [k.value for k in BDKind]
    info = _complete(names, observed, null, plan.n_permutations)
    chosen = info[names.index(kind.value)]
    return TestResult(
        statistic=chosen.statistic,
        p_value=chosen.p_value,
        replicates=plan.n_permutations,
        sizes=tuple(int(s) for s in groups.sizes),
        method=f"{groups.k}-sample Ball Divergence Test",
        variant=kind.value,
        complete_info=info,
        alternative="distributions of samples are distinct",
        null_distribution=null,
    )


def bcov_permutation_test(
    dists,
    plan: PermutationPlan | None = None,
    weight="constant",
    n_jobs: int | None = 0,
) -> TestResult:
    """Ball Covariance permutation test of (mutual) independence.

    Variable 0 stays fixed and every other variable is relabelled by its own
    permutation.  With two variables the marginal rank tables are built once
    and only the joint counts are redone per replicate.
    """
    mats, n = _stack(dists)
    k = len(mats)
    weight = BCovWeight.parse(weight)
    if plan is None:
        plan = PermutationPlan.shuffle_margins(n, k)
    if plan.mode is not Mode.SHUFFLE_MARGINS:
        raise ValueError("BCov test needs a margin-shuffling plan")
    if plan.permutations.shape[1:] != (k, n):
        raise ValueError("plan was drawn for a different sample size or variable count")
    identity = np.tile(np.arange(n, dtype=np.int64), (1, k, 1))
    if k == 2:
        kernel = _bcov_pair_null_block
        args = tuple(_pair_cache(mats[0], mats[1]))
        observed = _run_blocks(kernel, args, np.ascontiguousarray(identity[:, 1, :]), 1)[0]
        null = _run_blocks(kernel, args, np.ascontiguousarray(plan.permutations[:, 1, :]), n_jobs)
    else:
        kernel = _bcov_mutual_null_block
        args = _mutual_arrays(mats)
        observed = _run_blocks(kernel, args, identity, 1)[0]
        null = _run_blocks(kernel, args, plan.permutations, n_jobs)
    names = list(BCovTriple._fields)
    info = _complete(names, observed, null, plan.n_permutations)
    chosen = info[names.index(weight.value)]
    return TestResult(
        statistic=chosen.statistic,
        p_value=chosen.p_value,
        replicates=plan.n_permutations,
        sizes=(n,),
        method=(
            "Ball Covariance test of independence"
            if k == 2
            else "Ball Covariance test of mutual independence"
        ),
        variant=weight.value,
        complete_info=info,
        alternative="random variables are dependent",
        null_distribution=null,
    )
