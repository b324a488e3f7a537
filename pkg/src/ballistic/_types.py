"""Core data containers shared by the statistic and test modules."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import (
    AsymmetricBeyondToleranceError,
    EmptyGroupError,
    NegativeEntryError,
    NonFiniteEntryError,
    NonSquareError,
    NonzeroDiagonalError,
)

SYMMETRY_TOL = 1e-9
DIAGONAL_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Validated symmetric, nonnegative distance table with a zero diagonal.

    Build instances with :func:`validate_distance_matrix`; the constructor does
    not check anything.  The triangle inequality is not required, since every
    statistic here only compares distances.
    """

    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DistanceMatrix):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def take(self, index: np.ndarray) -> "DistanceMatrix":
        """Sub-matrix on ``index`` (rows and columns), in the given order."""
        index = np.asarray(index, dtype=np.intp)
        return DistanceMatrix(_frozen(np.ascontiguousarray(self.values[np.ix_(index, index)])))


def validate_distance_matrix(raw) -> DistanceMatrix:
    """Check a raw table and return it as a :class:`DistanceMatrix`.

    Asymmetry up to an absolute ``1e-9`` is repaired by averaging with the
    transpose, which leaves exactly symmetric input untouched.  Diagonal
    entries up to ``1e-9`` in magnitude are set to zero.

    Raises
    ------
    NonSquareError, NonFiniteEntryError, NegativeEntryError,
    NonzeroDiagonalError, AsymmetricBeyondToleranceError
    """
    if isinstance(raw, DistanceMatrix):
        return raw
    d = np.array(raw, dtype=np.float64, copy=True)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise NonSquareError(f"distance matrix must be square, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        i, j = np.argwhere(~np.isfinite(d))[0]
        raise NonFiniteEntryError(f"non-finite distance at ({i}, {j})")
    if np.any(d < 0):
        i, j = np.argwhere(d < 0)[0]
        raise NegativeEntryError(f"negative distance {d[i, j]} at ({i}, {j})")
    diag = np.abs(np.diagonal(d))
    if np.any(diag > DIAGONAL_TOL):
        i = int(np.argmax(diag))
        raise NonzeroDiagonalError(f"diagonal entry {d[i, i]} at {i} is not zero")
    gap = np.abs(d - d.T)
    if np.any(gap > SYMMETRY_TOL):
        i, j = np.unravel_index(np.argmax(gap), gap.shape)
        raise AsymmetricBeyondToleranceError(
            f"d[{i},{j}]={d[i, j]} but d[{j},{i}]={d[j, i]}"
        )
    if np.any(gap > 0):
        d = (d + d.T) / 2.0
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(_frozen(d))


@dataclass(frozen=True, eq=False)
class GroupedSample:
    """Group membership of a pooled sample.

    ``labels`` holds 0-based group codes, one per observation; ``classes`` maps
    codes back to the caller's labels.  ``cumulative[k]`` is the number of
    observations in groups ``0..k-1``.
    """

    labels: np.ndarray
    sizes: np.ndarray
    cumulative: np.ndarray
    classes: tuple = ()

    @property
    def n(self) -> int:
        return int(self.labels.shape[0])

    @property
    def k(self) -> int:
        return int(self.sizes.shape[0])

    def indices(self, group: int) -> np.ndarray:
        return np.flatnonzero(self.labels == group)

    @classmethod
    def from_labels(cls, labels: Sequence) -> "GroupedSample":
        labels = np.asarray(labels)
        if labels.ndim != 1:
            raise ValueError("labels must be one-dimensional")
        classes, codes = np.unique(labels, return_inverse=True)
        sizes = np.bincount(codes, minlength=len(classes)).astype(np.int64)
        if len(classes) == 0:
            raise EmptyGroupError("no observations")
        return cls(
            labels=_frozen(codes.astype(np.int64)),
            sizes=_frozen(sizes),
            cumulative=_frozen(np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)),
            classes=tuple(classes.tolist()),
        )

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "GroupedSample":
        sizes = np.asarray(sizes, dtype=np.int64)
        if sizes.ndim != 1 or len(sizes) == 0:
            raise ValueError("sizes must be a non-empty 1-D sequence")
        if np.any(sizes < 1):
            raise EmptyGroupError(f"every group needs at least one observation, got {sizes.tolist()}")
        labels = np.repeat(np.arange(len(sizes), dtype=np.int64), sizes)
        return cls(
            labels=_frozen(labels),
            sizes=_frozen(sizes.copy()),
            cumulative=_frozen(np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)),
            classes=tuple(range(1, len(sizes) + 1)),
        )


@dataclass(frozen=True, eq=False)
class RankStructures:
    """Row-wise ranks of a distance matrix plus the order matrix.

    ``ranks[i, j]`` is ``#{t : d[i, t] <= d[i, j]}``.  ``order[i]`` lists column
    indices sorted by ``d[i, :]`` (ties by ascending column).  ``tie_next[i, j]``
    is true when the entries at sorted positions ``j`` and ``j + 1`` of row
    ``i`` are equal; it lets shuffled ranks be rebuilt without the distances.
    """

    ranks: np.ndarray
    order: np.ndarray
    tie_next: np.ndarray


def group_positions(labels: np.ndarray, cumulative: np.ndarray) -> np.ndarray:
    """0-based pooled position of each observation once grouped by ``labels``.

    Observation ``i`` in group ``k`` lands at ``cumulative[k]`` plus the number
    of earlier observations carrying label ``k``.
    """
    labels = np.asarray(labels)
    seen = np.zeros(len(cumulative), dtype=np.int64)
    out = np.empty(labels.shape[0], dtype=np.int64)
    for i, g in enumerate(labels):
        out[i] = cumulative[g] + seen[g]
        seen[g] += 1
    return out


class _Choice(str, enum.Enum):
    @classmethod
    def parse(cls, value) -> "_Choice":
        """Accept a member, its value, or any unambiguous prefix of a value."""
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        hits = [m for m in cls if m.value == text] or [m for m in cls if m.value.startswith(text)]
        if len(hits) != 1 or not text:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"{value!r} is not an unambiguous choice among: {names}")
        return hits[0]


class BDKind(_Choice):
    SUM = "sum"
    SUMMAX = "summax"
    MAX = "max"


class BCovWeight(_Choice):
    CONSTANT = "constant"
    PROBABILITY = "probability"
    CHISQUARE = "chisquare"

    @classmethod
    def parse(cls, value) -> "BCovWeight":
        # bool values follow the R convention: False -> constant, True -> probability
        if value is False or value is None:
            return cls.CONSTANT
        if value is True:
            return cls.PROBABILITY
        return super().parse(value)


@dataclass(frozen=True)
class VariantResult:
    name: str
    statistic: float
    p_value: float | None


@dataclass(frozen=True)
class TestResult:
    """Outcome of a permutation test.

    ``complete_info`` always carries all three variants of the statistic
    family, in a fixed order, computed from the same permutation stream.
    """

    statistic: float
    p_value: float | None
    replicates: int
    sizes: tuple
    method: str
    variant: str
    complete_info: tuple[VariantResult, ...]
    alternative: str = ""
    extra: dict = field(default_factory=dict)
    null_distribution: np.ndarray | None = field(default=None, compare=False, repr=False)

    __test__ = False  # keep pytest from collecting this class

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "variant": self.variant,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "replicates": self.replicates,
            "sizes": list(self.sizes),
            "complete_info": [
                {"name": v.name, "statistic": v.statistic, "p_value": v.p_value}
                for v in self.complete_info
            ],
        }
        out.update(self.extra)
        return out

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("indent", 2)
        return json.dumps(self.to_dict(), **kwargs)
