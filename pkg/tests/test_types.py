import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ballistic import (
    BCovWeight,
    BDKind,
    DistanceMatrix,
    GroupedSample,
    TestResult,
    VariantResult,
    validate_distance_matrix,
)
from ballistic.exceptions import (
    AsymmetricBeyondToleranceError,
    EmptyGroupError,
    NegativeEntryError,
    NonFiniteEntryError,
    NonSquareError,
    NonzeroDiagonalError,
)


def test_validate_accepts_clean_matrix():
    d = validate_distance_matrix([[0, 1], [1, 0]])
    assert isinstance(d, DistanceMatrix)
    assert d.n == 2
    assert not d.values.flags.writeable


@pytest.mark.parametrize(
    "raw, err",
    [
        ([[0, 1, 2], [1, 0, 3]], NonSquareError),
        ([[0, -1], [-1, 0]], NegativeEntryError),
        ([[0, np.nan], [np.nan, 0]], NonFiniteEntryError),
        ([[0, np.inf], [np.inf, 0]], NonFiniteEntryError),
        ([[0.5, 1], [1, 0]], NonzeroDiagonalError),
        ([[0, 1], [2, 0]], AsymmetricBeyondToleranceError),
    ],
)
def test_validate_rejects(raw, err):
    with pytest.raises(err):
        validate_distance_matrix(raw)


def test_validate_repairs_tiny_asymmetry_and_diagonal():
    d = validate_distance_matrix([[1e-12, 1.0], [1.0 + 1e-11, 0.0]])
    assert d.values[0, 0] == 0.0
    assert d.values[0, 1] == d.values[1, 0]


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        validate_distance_matrix([[0, -1], [-1, 0]])


def test_take_and_equality():
    d = validate_distance_matrix([[0, 1, 2], [1, 0, 3], [2, 3, 0]])
    sub = d.take([2, 0])
    assert sub == validate_distance_matrix([[0, 2], [2, 0]])


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 3)), elements=st.floats(-100, 100)))
def test_round_trip_validation(x):
    d = np.abs(x[:, None, 0] - x[None, :, 0])
    once = validate_distance_matrix(d)
    assert validate_distance_matrix(once.values) == once


def test_grouped_sample_from_labels():
    g = GroupedSample.from_labels(["b", "a", "b", "c"])
    assert g.classes == ("a", "b", "c")
    assert g.labels.tolist() == [1, 0, 1, 2]
    assert g.sizes.tolist() == [1, 2, 1]
    assert g.cumulative.tolist() == [0, 1, 3]
    assert g.n == 4 and g.k == 3


def test_grouped_sample_from_sizes():
    g = GroupedSample.from_sizes([2, 3])
    assert g.labels.tolist() == [0, 0, 1, 1, 1]
    assert g.indices(1).tolist() == [2, 3, 4]
    with pytest.raises(EmptyGroupError):
        GroupedSample.from_sizes([2, 0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=2, max_size=20), st.randoms())
def test_grouped_sample_order_independent_sizes(labels, rnd):
    shuffled = list(labels)
    rnd.shuffle(shuffled)
    a = GroupedSample.from_labels(labels)
    b = GroupedSample.from_labels(shuffled)
    assert a.sizes.tolist() == b.sizes.tolist()
    assert a.classes == b.classes


@pytest.mark.parametrize(
    "text, kind",
    [("sum", BDKind.SUM), ("summ", BDKind.SUMMAX), ("MAX", BDKind.MAX)],
)
def test_bdkind_parse(text, kind):
    assert BDKind.parse(text) is kind


def test_bdkind_ambiguous_prefix():
    with pytest.raises(ValueError):
        BDKind.parse("s")


def test_weight_parse():
    assert BCovWeight.parse(False) is BCovWeight.CONSTANT
    assert BCovWeight.parse(True) is BCovWeight.PROBABILITY
    assert BCovWeight.parse("chi") is BCovWeight.CHISQUARE
    with pytest.raises(ValueError):
        BCovWeight.parse("c")


def test_result_serialization():
    res = TestResult(
        statistic=1.5,
        p_value=0.25,
        replicates=3,
        sizes=(2, 2),
        method="m",
        variant="sum",
        complete_info=(VariantResult("sum", 1.5, 0.25),),
    )
    doc = res.to_dict()
    assert doc["complete_info"] == [{"name": "sum", "statistic": 1.5, "p_value": 0.25}]
    assert set(doc) >= {"statistic", "p_value", "replicates", "sizes", "method", "variant"}
    assert '"p_value": 0.25' in res.to_json()
