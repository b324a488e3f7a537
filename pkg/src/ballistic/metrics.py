"""Distance matrices for the two built-in geometries.

Anything else (trees, SPD matrices, curves) should be turned into a
precomputed distance table by the caller and passed through
:func:`ballistic.validate_distance_matrix`.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from ._types import DistanceMatrix, _frozen
from .exceptions import NonFiniteEntryError, ValidationError, ZeroNormRowError

UNIT_NORM_TOL = 1e-6


def check_points(points) -> np.ndarray:
    """Coerce to a finite float array of shape ``(n, p)``; 1-D input becomes one column."""
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[1] < 1:
        raise ValidationError(f"points must be 1-D or 2-D, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        i = int(np.argwhere(~np.isfinite(x))[0, 0])
        raise NonFiniteEntryError(f"non-finite coordinate in row {i}")
    return x


def euclidean_distances(points) -> DistanceMatrix:
    """Pairwise Euclidean distances.

    One-dimensional input uses ``|a - b|`` directly so the result agrees bit for
    bit with the univariate fast paths.
    """
    x = check_points(points)
    if x.shape[1] == 1:
        d = np.abs(x[:, 0][:, None] - x[:, 0][None, :])
    else:
        d = cdist(x, x, metric="euclidean")
        d = (d + d.T) / 2.0
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(_frozen(d))


def great_circle_distances(points) -> DistanceMatrix:
    """Geodesic distances between points on the unit sphere (any dimension).

    Rows whose norm is within ``1e-6`` of one are renormalized; rows further
    off raise :class:`ZeroNormRowError`.
    """
    x = check_points(points)
    norms = np.linalg.norm(x, axis=1)
    bad = np.abs(norms - 1.0) > UNIT_NORM_TOL
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise ZeroNormRowError(f"row {i} has norm {norms[i]:.6g}, expected 1")
    x = x / norms[:, None]
    # chord form: exact 0 for repeated points and exact pi for antipodes,
    # where arccos of the Gram matrix loses about half the digits
    d = 2.0 * np.arctan2(cdist(x, x), cdist(x, -x))
    d = (d + d.T) / 2.0
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(_frozen(d))


METRICS = {
    "euclidean": euclidean_distances,
    "geodesic": great_circle_distances,
}


def pairwise_distances(points, metric: str = "euclidean") -> DistanceMatrix:
    try:
        fn = METRICS[metric]
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(METRICS)}") from None
    return fn(points)
