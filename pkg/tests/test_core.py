import numpy as np
import pytest

from rbrl.core import Dataset, HyperParams, augment_bias, sign, validate_dataset
from rbrl.errors import BadLabelValue, EmptyDataset, NonFiniteFeature, ShapeMismatch


def test_minimal_dataset_is_valid():
    ds = Dataset(np.zeros((2, 2)), [[1, -1], [-1, 1]])
    validate_dataset(ds)
    assert [s.tolist() for s in ds.relevant_sets] == [[0], [1]]
    assert [s.tolist() for s in ds.irrelevant_sets] == [[1], [0]]


def test_zero_label_rejected_with_row():
    ds = Dataset(np.zeros((3, 1)), [[1, -1], [0, 1], [1, 1]])
    with pytest.raises(BadLabelValue) as exc:
        validate_dataset(ds)
    assert exc.value.rows == [1]


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_nonfinite_feature_rejected(bad):
    X = np.zeros((2, 2))
    X[1, 0] = bad
    with pytest.raises(NonFiniteFeature) as exc:
        validate_dataset(Dataset(X, [[1], [-1]]))
    assert exc.value.rows == [1]


def test_empty_dataset_rejected():
    with pytest.raises(EmptyDataset):
        validate_dataset(Dataset(np.zeros((0, 2)), np.zeros((0, 2))))


def test_row_count_mismatch():
    with pytest.raises(ShapeMismatch):
        Dataset(np.zeros((2, 2)), [[1, -1]])


def test_set_sizes_cover_all_labels(rng):
    Y = np.where(rng.random((30, 5)) < 0.3, 1.0, -1.0)
    ds = Dataset(rng.normal(size=(30, 2)), Y)
    for pos, neg in zip(ds.relevant_sets, ds.irrelevant_sets):
        assert len(pos) + len(neg) == 5
        assert not set(pos) & set(neg)


def test_augment_bias():
    ds = augment_bias(Dataset([[2.0, 3.0]], [[1.0]]))
    assert ds.features.tolist() == [[2.0, 3.0, 1.0]]
    big = augment_bias(Dataset(np.zeros((3, 5)), -np.ones((3, 2))))
    assert big.features.shape == (3, 6) and big.l == 2
    twice = augment_bias(augment_bias(Dataset([[2.0, 3.0]], [[1.0]])))
    assert twice.features[0, -2:].tolist() == [1.0, 1.0]


def test_sign_zero_is_negative():
    assert sign(np.array([-1.0, 0.0, 1e-300, 2.0])).tolist() == [-1, -1, 1, 1]


def test_dataset_is_read_only():
    ds = Dataset(np.zeros((1, 1)), [[1.0]])
    with pytest.raises(ValueError):
        ds.features[0, 0] = 1.0


def test_rows_without_both_sets_are_counted():
    ds = Dataset(np.zeros((3, 1)), [[1, 1], [-1, -1], [1, -1]])
    assert ds.rank_usable.tolist() == [False, False, True]
    assert ds.n_rank_skipped == 2


@pytest.mark.parametrize("kw", [{"lambda1": -1}, {"lambda3": float("nan")}, {"rel_tol": 0},
                                {"max_iters": 0}])
def test_hyperparams_invariants(kw):
    with pytest.raises(ValueError):
        HyperParams(**kw)
