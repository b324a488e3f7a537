"""Literal O(N^3) evaluations of the statistics, used as ground truth in tests.

Nothing here ranks or sorts: every ball proportion is obtained by counting
``delta(x, y, z) = I(d(x, z) <= d(x, y))`` directly.
"""

from __future__ import annotations

import math

import numpy as np

from ._types import BCovWeight, GroupedSample, validate_distance_matrix
from .exceptions import DimensionMismatchError, EmptyGroupError, TooFewVariablesError


def _ball_membership(d: np.ndarray, centers, radii_to, members) -> np.ndarray:
    """``out[i, j, t] = d[c_i, m_t] <= d[c_i, r_j]`` for index lists."""
    centers = np.asarray(centers)
    dc = d[np.ix_(centers, radii_to)]  # radius of ball (i, j)
    dm = d[np.ix_(centers, members)]  # distance of member t to center i
    return dm[:, None, :] <= dc[:, :, None]


def naive_bd_two_sample(dist, groups: GroupedSample) -> float:
    d = validate_distance_matrix(dist).values
    if groups.k != 2:
        raise ValueError("two-sample BD needs exactly two groups")
    a, b = groups.indices(0), groups.indices(1)
    if len(a) == 0 or len(b) == 0:
        raise EmptyGroupError("both groups must be non-empty")
    total = 0.0
    for own, other in ((a, b), (b, a)):
        p_own = _ball_membership(d, own, own, own).sum(axis=2) / len(own)
        p_other = _ball_membership(d, own, own, other).sum(axis=2) / len(other)
        total += math.fsum(((p_own - p_other) ** 2).ravel()) / len(own) ** 2
    return total


def _naive_proportions(dists):
    if len(dists) < 2:
        raise TooFewVariablesError("need at least two variables")
    mats = [validate_distance_matrix(m).values for m in dists]
    n = mats[0].shape[0]
    if any(m.shape[0] != n for m in mats):
        raise DimensionMismatchError("all distance matrices must cover the same observations")
    idx = np.arange(n)
    members = [_ball_membership(m, idx, idx, idx) for m in mats]  # (i, j, t)
    marginal = [m.sum(axis=2) / n for m in members]
    joint = np.logical_and.reduce(members).sum(axis=2) / n
    return joint, marginal


def _weights(marginal, kind: BCovWeight) -> np.ndarray:
    w = np.ones_like(marginal[0])
    for p in marginal:
        if kind is BCovWeight.CONSTANT:
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            if kind is BCovWeight.PROBABILITY:
                wk = np.where(p > 0, 1.0 / p, 0.0)
            else:
                wk = np.where((p > 0) & (p < 1), 1.0 / (p * (1.0 - p)), 0.0)
        w = w * wk
    return w


def naive_bcov(dists, weight="constant") -> float:
    kind = BCovWeight.parse(weight)
    joint, marginal = _naive_proportions(dists)
    n = joint.shape[0]
    terms = (joint - np.prod(marginal, axis=0)) ** 2 * _weights(marginal, kind)
    return math.fsum(terms.ravel()) / n**2


def naive_bcor(dists, weight="constant") -> float:
    kind = BCovWeight.parse(weight)
    joint, marginal = _naive_proportions(dists)
    n = joint.shape[0]
    k = len(marginal)
    num = math.fsum(((joint - np.prod(marginal, axis=0)) ** 2 * _weights(marginal, kind)).ravel()) / n**2
    den = 1.0
    for p in marginal:
        wk = _weights([p], kind)
        den *= math.fsum(((p - p**k) ** 2 * wk**k).ravel()) / n**2
    return num / math.sqrt(den) if den > 0 else 0.0
