"""scikit-learn style front ends for the two tests.

Hyper-parameters go to the constructor, data to :meth:`fit`, results land in
trailing-underscore attributes.  ``get_params``/``set_params``/``clone`` work
as for any estimator, so the tests can sit inside grid searches or be cloned
across folds.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._types import BCovWeight, BDKind, DistanceMatrix, TestResult
from .bcov import BCovTriple, bcor_from_parts, marginal_bcov
from .permutation import PermutationPlan, bcov_permutation_test, bd_permutation_test
from .validation import check_samples, check_variables, to_distance


class BallDivergenceTest(BaseEstimator):
    """K-sample test of equal distributions based on Ball Divergence.

    Parameters
    ----------
    n_permutations : int, default=99
        Permutation replicates; 0 computes the statistic only.
    kbd_type : {"sum", "summax", "max"}, default="sum"
        Which K-sample aggregation is reported as ``statistic_``.  All three
        are always available in ``result_.complete_info``.
    distance : bool, default=False
        Treat ``X`` as a precomputed pooled distance matrix.
    metric : {"euclidean", "geodesic"}, default="euclidean"
        Geometry for raw coordinates.
    seed : int, default=1
    n_jobs : int, default=0
        Worker threads for the permutations; 0 uses every core.

    Attributes
    ----------
    result_ : TestResult
    statistic_ : float
    p_value_ : float or None
    groups_ : GroupedSample

    Examples
    --------
    >>> import numpy as np
    >>> rng = np.random.default_rng(0)
    >>> x = np.r_[rng.normal(size=30), rng.normal(2.0, size=30)]
    >>> test = BallDivergenceTest(n_permutations=99).fit(x, sizes=[30, 30])
    >>> test.p_value_ <= 0.05
    True
    """

    def __init__(
        self,
        n_permutations=99,
        kbd_type="sum",
        distance=False,
        metric="euclidean",
        seed=1,
        n_jobs=0,
    ):
        self.n_permutations = n_permutations
        self.kbd_type = kbd_type
        self.distance = distance
        self.metric = metric
        self.seed = seed
        self.n_jobs = n_jobs

    def fit(self, X, y=None, sizes=None):
        """Run the test.

        ``X`` is either a list of samples, or the pooled sample with ``y``
        holding one group label per row (or ``sizes`` giving consecutive
        block lengths).  Two separate samples go in as ``fit([x1, x2])``.
        """
        kind = BDKind.parse(self.kbd_type)
        pooled, groups = check_samples(X, labels=y, sizes=sizes, distance=self.distance)
        dist = to_distance(pooled, self.distance, self.metric)
        plan = PermutationPlan.shuffle_labels(dist.n, self.n_permutations, self.seed)
        self.groups_ = groups
        self.result_ = bd_permutation_test(dist, groups, plan, kind, self.n_jobs)
        self.statistic_ = self.result_.statistic
        self.p_value_ = self.result_.p_value
        return self

    @property
    def complete_info_(self):
        check_is_fitted(self, "result_")
        return self.result_.complete_info


class BallCovarianceTest(BaseEstimator):
    """Test of (mutual) independence based on Ball Covariance.

    Parameters
    ----------
    n_permutations : int, default=99
    weight : {"constant", "probability", "chisquare"} or bool, default="constant"
        Reported variant; ``False`` means constant and ``True`` probability.
    distance : bool, default=False
        Treat every variable as a precomputed distance matrix.
    metric : {"euclidean", "geodesic"}, default="euclidean"
    seed : int, default=1
    n_jobs : int, default=0

    Attributes
    ----------
    result_ : TestResult
    statistic_ : float
    p_value_ : float or None
    bcor_ : BCovTriple
        Ball Correlation for each weight.  This is the ratio of BCov to the
        root of the product of marginal terms; take ``sqrt`` for the root
        form.
    """

    def __init__(
        self,
        n_permutations=99,
        weight="constant",
        distance=False,
        metric="euclidean",
        seed=1,
        n_jobs=0,
    ):
        self.n_permutations = n_permutations
        self.weight = weight
        self.distance = distance
        self.metric = metric
        self.seed = seed
        self.n_jobs = n_jobs

    def fit(self, X, Y=None):
        """``X`` and ``Y`` are two variables, or ``X`` is a list of variables."""
        weight = BCovWeight.parse(self.weight)
        mats = check_variables(X, Y, self.distance, self.metric)
        plan = PermutationPlan.shuffle_margins(mats[0].n, len(mats), self.n_permutations, self.seed)
        self.result_ = bcov_permutation_test(mats, plan, weight, self.n_jobs)
        self.statistic_ = self.result_.statistic
        self.p_value_ = self.result_.p_value
        self.bcor_ = _bcor(self.result_, mats)
        return self


def _bcor(result: TestResult, mats: list[DistanceMatrix]) -> BCovTriple:
    numerator = BCovTriple(*(v.statistic for v in result.complete_info))
    return bcor_from_parts(numerator, [marginal_bcov(m, len(mats)) for m in mats])


def bd_test(
    x,
    y=None,
    n_permutations=99,
    distance=False,
    size=None,
    labels=None,
    seed=1,
    n_jobs=0,
    kbd_type="sum",
    metric="euclidean",
) -> TestResult:
    """Functional form of :class:`BallDivergenceTest`."""
    kind = BDKind.parse(kbd_type)
    pooled, groups = check_samples(x, y, labels=labels, sizes=size, distance=distance)
    dist = to_distance(pooled, distance, metric)
    plan = PermutationPlan.shuffle_labels(dist.n, n_permutations, seed)
    return bd_permutation_test(dist, groups, plan, kind, n_jobs)


def bcov_test(
    x,
    y=None,
    n_permutations=99,
    distance=False,
    weight=False,
    seed=1,
    n_jobs=0,
    metric="euclidean",
) -> TestResult:
    """Functional form of :class:`BallCovarianceTest`."""
    mats = check_variables(x, y, distance, metric)
    plan = PermutationPlan.shuffle_margins(mats[0].n, len(mats), n_permutations, seed)
    return bcov_permutation_test(mats, plan, BCovWeight.parse(weight), n_jobs)
