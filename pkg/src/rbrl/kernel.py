"""Kernel functions and Gram matrices.

Kernels always see the raw (non bias-augmented) features.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch

KERNEL_KINDS = ("linear", "rbf")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel choice. ``gamma=None`` for rbf means 1/m, resolved at fit time."""

    kind: str = "rbf"
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf" and self.gamma is not None and not self.gamma > 0:
            raise ValueError(f"rbf gamma must be > 0, got {self.gamma}")

    def resolve(self, n_features: int) -> "KernelSpec":
        if self.kind == "rbf" and self.gamma is None:
            return KernelSpec("rbf", 1.0 / n_features)
        return self


def _sq_dists(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    d = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * (A @ B.T)
    np.maximum(d, 0.0, out=d)
    return d


def cross_gram(spec: KernelSpec, X_train, X_test) -> np.ndarray:
    """Return the ``n x n_t`` matrix whose column ``t`` is ``k(X_train, x_t)``."""
    X_train = np.asarray(X_train, dtype=float)
    X_test = np.asarray(X_test, dtype=float)
    if X_train.ndim != 2 or X_test.ndim != 2 or X_train.shape[1] != X_test.shape[1]:
        raise ShapeMismatch(
            f"feature widths differ: train {X_train.shape}, test {X_test.shape}")
    if spec.kind == "linear":
        return X_train @ X_test.T
    gamma = spec.resolve(X_train.shape[1]).gamma
    return np.exp(-gamma * _sq_dists(X_train, X_test))


def gram(spec: KernelSpec, X) -> np.ndarray:
    """Symmetric Gram matrix of ``X``; the rbf diagonal is exactly 1."""
    X = np.asarray(X, dtype=float)
    K = cross_gram(spec, X, X)
    K = 0.5 * (K + K.T)
    if spec.kind == "rbf":
        np.fill_diagonal(K, 1.0)
    return K
