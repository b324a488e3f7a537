import numpy as np
import pytest
from sklearn.base import clone

from ballistic import BallCovarianceTest, BallDivergenceTest, bcov_test, bd_test, bcor, euclidean_distances
from ballistic.exceptions import DimensionMismatchError, LabelCountMismatchError, TooFewVariablesError


def test_get_params_and_clone():
    est = BallDivergenceTest(n_permutations=19, kbd_type="max", seed=4)
    params = est.get_params()
    assert params["n_permutations"] == 19 and params["kbd_type"] == "max"
    twin = clone(est)
    assert twin.get_params() == params
    assert not hasattr(twin, "result_")


def test_bd_input_layouts_agree(rng):
    x1, x2 = rng.normal(size=(8, 2)), rng.normal(1, size=(9, 2))
    pooled = np.vstack([x1, x2])
    a = BallDivergenceTest(n_permutations=29).fit([x1, x2])
    b = BallDivergenceTest(n_permutations=29).fit(pooled, sizes=[8, 9])
    c = BallDivergenceTest(n_permutations=29).fit(pooled, y=["a"] * 8 + ["b"] * 9)
    d = bd_test(x1, x2, n_permutations=29)
    assert a.statistic_ == b.statistic_ == c.statistic_ == d.statistic
    assert a.p_value_ == b.p_value_ == c.p_value_ == d.p_value
    assert len(a.complete_info_) == 3


def test_bd_pooled_list_of_rows_with_labels():
    rows = [[0.0, 0.0], [1.0, 1.0], [5.0, 5.0], [6.0, 6.0]]
    est = BallDivergenceTest(n_permutations=0).fit(rows, y=[0, 0, 1, 1])
    assert est.groups_.sizes.tolist() == [2, 2]


def test_bd_distance_input():
    d = euclidean_distances([0.0, 1.0]).values
    res = bd_test(d, distance=True, size=[1, 1], n_permutations=0)
    assert res.statistic == 2.0


def test_bd_argument_conflicts(rng):
    x = rng.normal(size=6)
    with pytest.raises(ValueError):
        bd_test(x, size=[3, 3], labels=[0] * 3 + [1] * 3)
    with pytest.raises(LabelCountMismatchError):
        bd_test(x, size=[3, 4])
    with pytest.raises(ValueError):
        bd_test(x)
    with pytest.raises(DimensionMismatchError):
        bd_test(rng.normal(size=(3, 2)), rng.normal(size=(3, 3)))


def test_bd_detects_shift():
    rng = np.random.default_rng(3)
    x = np.r_[rng.normal(size=40), rng.normal(2.0, size=40)]
    est = BallDivergenceTest(n_permutations=99).fit(x, sizes=[40, 40])
    assert est.p_value_ <= 0.05


def test_bcov_estimator(rng):
    x = rng.normal(size=30)
    y = x**2 + 0.1 * rng.normal(size=30)
    est = BallCovarianceTest(n_permutations=99, weight=True).fit(x, y)
    assert est.result_.variant == "probability"
    assert est.p_value_ <= 0.05
    assert est.bcor_.constant == pytest.approx(bcor([euclidean_distances(x), euclidean_distances(y)]))
    same = bcov_test(x, y, n_permutations=99, weight="probability")
    assert same.to_json() == est.result_.to_json()


def test_bcov_variable_list(rng):
    z = [rng.normal(size=12) for _ in range(3)]
    res = bcov_test(z, n_permutations=9)
    assert res.sizes == (12,)
    with pytest.raises(TooFewVariablesError):
        bcov_test([z[0]])
    with pytest.raises(DimensionMismatchError):
        bcov_test(z[0], z[1][:5])


def test_bcov_distance_input(rng):
    x = rng.normal(size=10)
    dx = euclidean_distances(x).values
    a = bcov_test(dx, dx, distance=True, n_permutations=0)
    b = bcov_test(x, x, n_permutations=0)
    assert a.statistic == b.statistic > 0
