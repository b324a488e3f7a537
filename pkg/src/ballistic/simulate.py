"""Small built-in simulation scenarios for checking size and power.

Each scenario draws fresh data per repetition, runs the matching permutation
test and records whether ``p <= 0.05``.  Repetition ``r`` gets its own child
of one :class:`numpy.random.SeedSequence`, used for both the data and the
permutations, so a table depends only on its arguments.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass
from itertools import combinations
from typing import Callable, Iterable

import numpy as np

from ._types import GroupedSample
from .exceptions import UnknownScenarioError
from .metrics import pairwise_distances
from .permutation import PermutationPlan, bcov_permutation_test, bd_permutation_test

LEVEL = 0.05
SHIFT = 1.0


@dataclass(frozen=True)
class RejectionRow:
    scenario: str
    n: int
    variant: str
    reps: int
    permutations: int
    rejections: int
    rate: float


def _rejects(p) -> bool:
    return p is not None and p <= LEVEL


def _bd_outcome(x, y, metric, m, seed, n_jobs) -> dict[str, bool]:
    dist = pairwise_distances(np.vstack([x, y]), metric)
    groups = GroupedSample.from_sizes([len(x), len(y)])
    plan = PermutationPlan.shuffle_labels(dist.n, m, seed)
    res = bd_permutation_test(dist, groups, plan, "sum", n_jobs)
    # with two groups the three aggregations coincide
    return {"bd": _rejects(res.p_value)}


def _bcov_outcome(variables, m, seed, n_jobs, prefix="") -> dict[str, bool]:
    mats = [pairwise_distances(v) for v in variables]
    plan = PermutationPlan.shuffle_margins(mats[0].n, len(mats), m, seed)
    res = bcov_permutation_test(mats, plan, "constant", n_jobs)
    return {prefix + v.name: _rejects(v.p_value) for v in res.complete_info}


def _null_univariate(rng, n, m, seed, n_jobs):
    return _bd_outcome(rng.normal(size=(n, 1)), rng.normal(size=(n, 1)), "euclidean", m, seed, n_jobs)


def _shift_univariate(rng, n, m, seed, n_jobs):
    x = rng.normal(size=(n, 1))
    y = rng.normal(SHIFT, size=(n, 1))
    return _bd_outcome(x, y, "euclidean", m, seed, n_jobs)


def _null_pair(rng, n, m, seed, n_jobs):
    return _bcov_outcome([rng.normal(size=n), rng.normal(size=n)], m, seed, n_jobs)


def _xor_mutual(rng, n, m, seed, n_jobs):
    z1 = rng.integers(0, 2, size=n).astype(float)
    z2 = rng.integers(0, 2, size=n).astype(float)
    z = [z1, z2, (z1 == z2).astype(float)]
    out = _bcov_outcome(z, m, seed, n_jobs, "mutual.")
    for a, b in combinations(range(3), 2):
        out.update(_bcov_outcome([z[a], z[b]], m, seed, n_jobs, f"pair{a + 1}{b + 1}."))
    return out


def _circle_mixture(rng, n, m, seed, n_jobs):
    x, y = circle_mixture_sample(n, rng)
    return _bd_outcome(x, y, "geodesic", m, seed, n_jobs)


SCENARIOS: dict[str, Callable] = {
    "null-univariate": _null_univariate,
    "shift-univariate": _shift_univariate,
    "null-pair": _null_pair,
    "xor-mutual": _xor_mutual,
    "circle-mixture": _circle_mixture,
}


def circle_mixture_sample(n: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` points from each of the two circle laws.

    Both put mass 1/2 on two antipodal points of the unit circle, a quarter
    turn apart, so they share mean and every pairwise-distance moment.
    """
    rng = np.random.default_rng(rng)
    x = np.array([[0.0, 1.0], [0.0, -1.0]])[rng.integers(0, 2, size=n)]
    y = np.array([[1.0, 0.0], [-1.0, 0.0]])[rng.integers(0, 2, size=n)]
    return x, y


def rejection_rates(
    scenario: str,
    n_grid: Iterable[int] = (30,),
    reps: int = 500,
    permutations: int = 199,
    seed: int = 1,
    n_jobs: int = 0,
) -> list[RejectionRow]:
    """Rejection rate at level 0.05 for every ``n`` and reported variant.

    Raises
    ------
    UnknownScenarioError
        If ``scenario`` is not one of :data:`SCENARIOS`.
    """
    try:
        draw = SCENARIOS[scenario]
    except KeyError:
        raise UnknownScenarioError(
            f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}"
        ) from None
    if reps < 1 or permutations < 1:
        raise ValueError("reps and permutations must be positive")
    rows = []
    for n in n_grid:
        if n < 2:
            raise ValueError(f"sample size must be at least 2, got {n}")
        counts: dict[str, int] = {}
        for child in np.random.SeedSequence([seed, n]).spawn(reps):
            rng = np.random.default_rng(child)
            perm_seed = int(child.generate_state(1, np.uint64)[0])
            for name, hit in draw(rng, n, permutations, perm_seed, n_jobs).items():
                counts[name] = counts.get(name, 0) + hit
        rows.extend(
            RejectionRow(scenario, n, name, reps, permutations, c, c / reps)
            for name, c in counts.items()
        )
    return rows


def to_csv(rows: list[RejectionRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(RejectionRow.__dataclass_fields__), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(asdict(row))
    return buf.getvalue()
