import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ballistic import (
    GroupedSample,
    ball_bounds,
    bd_k_sample,
    bd_pairwise,
    bd_pairwise_univariate,
    bd_two_sample,
    bd_two_sample_univariate,
    euclidean_distances,
    reconstruct_shuffled_ranks,
    rowwise_rank,
)
from ballistic._oracle import naive_bd_two_sample
from ballistic.exceptions import EmptyGroupError, LabelCountMismatchError, UnsortedInputError
from conftest import materialized_ranks, random_points, random_sizes


def two(sizes):
    return GroupedSample.from_sizes(sizes)


def test_single_points():
    assert bd_two_sample(euclidean_distances([0.0, 1.0]), two([1, 1])) == 2.0


def test_hand_value():
    assert bd_two_sample(euclidean_distances([0.0, 1.0, 2.0]), two([2, 1])) == pytest.approx(1.375, abs=1e-15)


def test_identical_groups_give_zero():
    x = [0.0, 1.0, 5.0]
    assert bd_two_sample(euclidean_distances(x + x), two([3, 3])) == 0.0


def test_empty_group_rejected():
    with pytest.raises(EmptyGroupError):
        bd_two_sample_univariate([], [1.0])


def test_labels_must_match_n():
    with pytest.raises(ValueError):
        bd_two_sample(euclidean_distances([0.0, 1.0]), two([1, 2]))


@pytest.mark.parametrize("ties", [False, True])
def test_matches_oracle(rng, ties):
    for _ in range(30):
        n = int(rng.integers(2, 20))
        x = random_points(rng, n, ties=ties)
        g = two(random_sizes(rng, n, 2))
        d = euclidean_distances(x)
        assert bd_two_sample(d, g) == pytest.approx(naive_bd_two_sample(d, g), abs=1e-12)


def test_univariate_center_counts():
    lo, hi = ball_bounds([1.0, 2.0, 4.0])
    # ball centered at 2 through 4 holds all three; centered at 1 through 2 holds two
    assert (hi - lo + 1)[1].tolist() == [2, 1, 3]


def test_ball_bounds_reference_sample():
    lo, hi = ball_bounds([0.0, 10.0], [0.0, 1.0, 2.0, 9.0])
    # ball at 0 with radius 10 covers everything; at 10 radius 0 covers nothing
    assert (lo[0, 1], hi[0, 1]) == (0, 3)
    assert hi[1, 1] - lo[1, 1] + 1 == 0


def test_univariate_rejects_unsorted():
    with pytest.raises(UnsortedInputError):
        bd_two_sample_univariate([1.0, 0.0], [2.0])


@pytest.mark.parametrize("ties", [False, True])
def test_univariate_matches_general(rng, ties):
    for _ in range(30):
        n = int(rng.integers(2, 25))
        x = random_points(rng, n, dim=1, ties=ties)[:, 0]
        g = GroupedSample.from_labels(rng.integers(0, 3, size=n))
        if g.k < 2:
            continue
        table = bd_pairwise(euclidean_distances(x), g)
        np.testing.assert_allclose(bd_pairwise_univariate(x, g), table, atol=1e-12, rtol=0)


def test_k_sample_aggregations():
    table = np.array([[0, 1, 2], [1, 0, 3], [2, 3, 0]], dtype=float)
    value, all3 = bd_k_sample(table, "sum")
    assert value == 6
    assert all3.summax == 5
    assert all3.max == 5


def test_k_sample_constant_table():
    c = 0.3
    table = np.full((4, 4), c) - np.eye(4) * c
    _, all3 = bd_k_sample(table)
    assert all3.sum == pytest.approx(6 * c)
    assert all3.summax == pytest.approx(3 * c)
    assert all3.max == pytest.approx(3 * c)


def test_two_groups_all_aggregations_agree():
    _, all3 = bd_k_sample([[0, 0.7], [0.7, 0]])
    assert all3.sum == all3.summax == all3.max == 0.7


def test_pairwise_symmetric_zero_diagonal(rng):
    x = rng.normal(size=(15, 2))
    table = bd_pairwise(euclidean_distances(x), GroupedSample.from_sizes([5, 5, 5]))
    assert np.array_equal(table, table.T)
    assert np.all(np.diag(table) == 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_symmetric_in_groups_and_permutation_equivariant(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 15))
    x = random_points(rng, n, ties=bool(seed % 2))
    lab = rng.integers(0, 2, size=n)
    if len(set(lab)) < 2:
        return
    d = euclidean_distances(x)
    base = bd_two_sample(d, GroupedSample.from_labels(lab))
    swapped = bd_two_sample(d, GroupedSample.from_labels(1 - lab))
    perm = rng.permutation(n)
    moved = bd_two_sample(euclidean_distances(x[perm]), GroupedSample.from_labels(lab[perm]))
    assert swapped == pytest.approx(base, abs=1e-12)
    assert moved == pytest.approx(base, abs=1e-12)


def test_monotone_transform_invariance(rng):
    x = rng.normal(size=(12, 2))
    d = euclidean_distances(x)
    g = two([5, 7])
    assert bd_two_sample(d.values**2 + d.values, g) == pytest.approx(bd_two_sample(d, g), abs=1e-12)


def test_label_order_invariance():
    x = [0.0, 0.5, 3.0, 3.2, 7.0]
    d = euclidean_distances(x)
    a = bd_pairwise(d, GroupedSample.from_labels(["u", "u", "v", "v", "w"]))
    b = bd_pairwise(d, GroupedSample.from_labels([9, 9, 1, 1, 5]))
    # classes sort to (u, v, w) and (1, 5, 9)
    order = [2, 0, 1]
    assert np.array_equal(a, b[np.ix_(order, order)])


def test_reconstruct_identity():
    x = [0.0, 1.0, 1.0, 4.0, 2.0]
    d = euclidean_distances(x)
    g = two([2, 3])
    got = reconstruct_shuffled_ranks(rowwise_rank(d), g.labels, g, (0, 1))
    want = materialized_ranks(d.values, g.labels, 0, 1)
    for a, b in zip(got, want):
        assert np.array_equal(a, b)


def test_reconstruct_swap():
    d = euclidean_distances([0.0, 1.0, 3.0, 6.0])
    g = two([2, 2])
    lab = np.array([1, 1, 0, 0])
    rs, rt, rst = reconstruct_shuffled_ranks(rowwise_rank(d), lab, g, (0, 1))
    # group 0 is now {3, 6}, group 1 is {0, 1}
    assert rs.tolist() == [[1, 2], [2, 1]]
    # union order 3, 6, 0, 1; from 3 the distances are 0, 3, 3, 2
    assert rst[0].tolist() == [1, 4, 4, 2]


def test_reconstruct_random(rng):
    for _ in range(40):
        n = int(rng.integers(3, 25))
        k = int(rng.integers(2, min(n, 5) + 1))
        g = GroupedSample.from_sizes(random_sizes(rng, n, k))
        d = euclidean_distances(random_points(rng, n, ties=bool(rng.integers(0, 2))))
        lab = g.labels[rng.permutation(n)]
        s, t = rng.choice(k, size=2, replace=False)
        got = reconstruct_shuffled_ranks(rowwise_rank(d), lab, g, (int(s), int(t)))
        want = materialized_ranks(d.values, lab, s, t)
        for a, b in zip(got, want):
            assert np.array_equal(a, b)


def test_reconstruct_rejects_wrong_counts():
    d = euclidean_distances([0.0, 1.0, 2.0])
    g = two([1, 2])
    with pytest.raises(LabelCountMismatchError):
        reconstruct_shuffled_ranks(rowwise_rank(d), [0, 0, 1], g, (0, 1))
