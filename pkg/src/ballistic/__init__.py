"""Ball Divergence and Ball Covariance tests for data in metric spaces."""

from ._types import (
    BCovWeight,
    BDKind,
    DistanceMatrix,
    GroupedSample,
    RankStructures,
    TestResult,
    VariantResult,
    validate_distance_matrix,
)
from .bcov import (
    BCovTriple,
    bcor,
    bcov,
    bcov_mutual,
    bcov_pair,
    bcov_pair_univariate,
    marginal_bcov,
)
from .bd import (
    KSampleBD,
    ball_bounds,
    bd_k_sample,
    bd_pairwise,
    bd_pairwise_univariate,
    bd_two_sample,
    bd_two_sample_univariate,
    reconstruct_shuffled_ranks,
)
from .counting import CountResult, count_leq_after_self, rowwise_rank
from .estimators import BallCovarianceTest, BallDivergenceTest, bcov_test, bd_test
from .exceptions import *  # noqa: F401,F403
from .metrics import euclidean_distances, great_circle_distances, pairwise_distances
from .permutation import (
    PermutationPlan,
    bcov_permutation_test,
    bd_permutation_test,
    p_value,
)

__version__ = "0.1.0"
