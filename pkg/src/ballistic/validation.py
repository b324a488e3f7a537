"""Input coercion shared by the estimators and the CLI."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ._types import DistanceMatrix, GroupedSample, validate_distance_matrix
from .exceptions import (
    DimensionMismatchError,
    EmptyGroupError,
    LabelCountMismatchError,
    TooFewVariablesError,
)
from .metrics import check_points, pairwise_distances


def to_distance(x, distance: bool = False, metric: str = "euclidean") -> DistanceMatrix:
    """A distance matrix from either raw points or a precomputed table."""
    if isinstance(x, DistanceMatrix):
        return x
    if distance:
        return validate_distance_matrix(x)
    return pairwise_distances(x, metric)


def _is_sample_list(x) -> bool:
    return isinstance(x, (list, tuple)) and len(x) > 0 and not np.isscalar(x[0])


def check_samples(x, y=None, labels=None, sizes=None, distance: bool = False):
    """Resolve the accepted K-sample input layouts into pooled data plus groups.

    Accepted forms:

    * ``x`` and ``y`` as two samples;
    * ``x`` as a list of samples;
    * ``x`` pooled, with either ``labels`` (one per row) or ``sizes``
      (consecutive blocks).

    With ``distance=True`` the pooled ``x`` is a distance matrix and only
    ``labels`` or ``sizes`` may describe the groups.

    Returns ``(pooled, groups)``; ``pooled`` is a point array or a
    :class:`DistanceMatrix`.
    """
    if labels is not None and sizes is not None:
        raise ValueError("give either labels or sizes, not both")
    if distance:
        if y is not None or _is_sample_list(x):
            raise ValueError("with distance=True pass one pooled distance matrix")
        pooled = validate_distance_matrix(x)
    elif y is not None or (labels is None and sizes is None and _is_sample_list(x)):
        if labels is not None or sizes is not None:
            raise ValueError("labels/sizes only apply to a pooled sample")
        parts = [check_points(p) for p in ([x, y] if y is not None else list(x))]
        if len({p.shape[1] for p in parts}) != 1:
            raise DimensionMismatchError("all samples need the same number of columns")
        if any(len(p) == 0 for p in parts):
            raise EmptyGroupError("empty sample")
        sizes = [len(p) for p in parts]
        pooled = np.vstack(parts)
    else:
        pooled = check_points(x)
    n = pooled.n if isinstance(pooled, DistanceMatrix) else pooled.shape[0]
    if labels is not None:
        labels = np.asarray(labels)
        if labels.shape != (n,):
            raise LabelCountMismatchError(f"{labels.shape[0]} labels for {n} observations")
        groups = GroupedSample.from_labels(labels)
    elif sizes is not None:
        groups = GroupedSample.from_sizes(sizes)
        if groups.n != n:
            raise LabelCountMismatchError(
                f"group sizes add up to {groups.n} but there are {n} observations"
            )
    else:
        raise ValueError("group structure missing: pass y, a list of samples, labels or sizes")
    if groups.k < 2:
        raise ValueError("need at least two groups")
    return pooled, groups


def check_variables(x, y=None, distance: bool = False, metric: str = "euclidean") -> list[DistanceMatrix]:
    """Distance matrices for each variable of an independence test.

    ``x`` may be a list of variables (arrays or distance tables), or one
    variable paired with ``y``.
    """
    if y is not None:
        items: Sequence = [x, y]
    elif isinstance(x, (list, tuple)):
        items = list(x)
    else:
        raise TooFewVariablesError("pass y or a list of at least two variables")
    if len(items) < 2:
        raise TooFewVariablesError(f"need at least two variables, got {len(items)}")
    mats = [to_distance(v, distance, metric) for v in items]
    sizes = [m.n for m in mats]
    if len(set(sizes)) != 1:
        raise DimensionMismatchError(f"variables have different sample sizes: {sizes}")
    return mats
