"""Domain types shared across the package.

Labels are stored as a sign matrix with entries in {-1, +1}. Feature and label
arrays are copied and marked read-only on construction, so every type here can
be shared between workers without copying.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import BadLabelValue, EmptyDataset, NonFiniteFeature, ShapeMismatch
from .kernel import KernelSpec


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


def sign(F) -> np.ndarray:
    """Elementwise sign with ``sign(x) = +1`` iff ``x > 0``, so ``sign(0) = -1``."""
    return np.where(np.asarray(F) > 0, 1.0, -1.0)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix ``X`` (n x m) and sign label matrix ``Y`` (n x l)."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = _frozen(self.features)
        Y = _frozen(self.labels)
        if X.ndim != 2 or Y.ndim != 2:
            raise ShapeMismatch(f"features and labels must be 2-D, got {X.shape} and {Y.shape}")
        if X.shape[0] != Y.shape[0]:
            raise ShapeMismatch(f"{X.shape[0]} feature rows but {Y.shape[0]} label rows")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", Y)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def m(self) -> int:
        return self.features.shape[1]

    @property
    def l(self) -> int:  # noqa: E743
        return self.labels.shape[1]

    @cached_property
    def relevant_mask(self) -> np.ndarray:
        return self.labels > 0

    @cached_property
    def relevant_sets(self) -> list[np.ndarray]:
        return [np.flatnonzero(row) for row in self.relevant_mask]

    @cached_property
    def irrelevant_sets(self) -> list[np.ndarray]:
        return [np.flatnonzero(~row) for row in self.relevant_mask]

    @cached_property
    def rank_usable(self) -> np.ndarray:
        """Rows with both a relevant and an irrelevant label."""
        n_pos = self.relevant_mask.sum(1)
        return (n_pos > 0) & (n_pos < self.l)

    @property
    def n_rank_skipped(self) -> int:
        return int(self.n - self.rank_usable.sum())

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.intp)
        return Dataset(self.features[rows], self.labels[rows])


def validate_dataset(ds: Dataset) -> None:
    """Raise a :class:`~rbrl.errors.DatasetError` subclass if ``ds`` is malformed."""
    X, Y = ds.features, ds.labels
    if X.shape[0] < 1 or X.shape[1] < 1 or Y.shape[1] < 1:
        raise EmptyDataset(f"dataset needs n, m, l >= 1, got X {X.shape}, Y {Y.shape}")
    bad = ~((Y == 1.0) | (Y == -1.0))
    if bad.any():
        rows = np.flatnonzero(bad.any(1))
        raise BadLabelValue(
            f"label entries must be -1 or +1; offending rows {rows.tolist()[:20]}", rows)
    nonfinite = ~np.isfinite(X)
    if nonfinite.any():
        rows = np.flatnonzero(nonfinite.any(1))
        raise NonFiniteFeature(
            f"non-finite feature values in rows {rows.tolist()[:20]}", rows)


def augment_bias(ds: Dataset) -> Dataset:
    """Append a constant-1 feature column; labels are unchanged."""
    return Dataset(add_bias_column(ds.features), ds.labels)


def add_bias_column(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return np.hstack([X, np.ones((X.shape[0], 1))])


@dataclass(frozen=True)
class HyperParams:
    lambda1: float = 1e-2
    lambda2: float = 1e-2
    lambda3: float = 1e-2
    max_iters: int | None = None
    rel_tol: float = 1e-6
    kernel: KernelSpec | None = None

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "lambda3"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be a finite nonnegative number, got {v}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError(f"max_iters must be positive, got {self.max_iters}")

    @property
    def model_kind(self) -> str:
        return "linear" if self.kernel is None else "kernel"


@dataclass(frozen=True, eq=False)
class LinearModel:
    """``weights`` is (m + 1) x l; the last row is the bias."""

    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen(self.weights))
        if self.weights.ndim != 2 or not np.isfinite(self.weights).all():
            raise ValueError("weights must be a finite 2-D matrix")

    @property
    def n_features(self) -> int:
        """Raw feature width expected at prediction time."""
        return self.weights.shape[0] - 1

    @property
    def n_labels(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True, eq=False)
class KernelModel:
    coefficients: np.ndarray
    kernel: KernelSpec
    train_features: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _frozen(self.coefficients))
        object.__setattr__(self, "train_features", _frozen(self.train_features))
        if self.coefficients.shape[0] != self.train_features.shape[0]:
            raise ShapeMismatch(
                f"{self.coefficients.shape[0]} coefficient rows for "
                f"{self.train_features.shape[0]} training instances")
        if not np.isfinite(self.coefficients).all():
            raise ValueError("coefficients must be finite")

    @property
    def n_features(self) -> int:
        return self.train_features.shape[1]

    @property
    def n_labels(self) -> int:
        return self.coefficients.shape[1]


@dataclass(frozen=True, eq=False)
class PredictionScores:
    scores: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "scores", _frozen(self.scores))


@dataclass(frozen=True, eq=False)
class LabelPredictions:
    labels: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "labels", _frozen(self.labels))
