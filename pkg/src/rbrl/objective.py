"""Smooth loss terms, their gradients, and the composite objective.

Both formulations are evaluated through the score matrix ``S`` (``X @ W`` in
the linear case, ``K @ A`` in the kernel case). Each loss term returns its
value together with ``dS``, the gradient with respect to the scores, and the
parameter gradient is obtained by one product with ``X.T`` or ``K``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, HyperParams
from .errors import AsymmetricKernel, ShapeMismatch

SYMMETRY_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class SmoothEval:
    value: float
    gradient: np.ndarray


def br_score_terms(S: np.ndarray, Y: np.ndarray):
    """Squared hinge ``1/2 sum max(0, 1 - y*s)^2`` and its gradient in ``S``."""
    R = np.maximum(0.0, 1.0 - Y * S)
    return 0.5 * float(np.sum(R * R)), -Y * R


def rank_pair_weights(ds: Dataset) -> np.ndarray:
    """``1 / (|Y+| |Y-|)`` per row, 0 for rows lacking either label set."""
    n_pos = ds.relevant_mask.sum(1).astype(float)
    n_neg = ds.l - n_pos
    w = np.zeros(ds.n)
    ok = ds.rank_usable
    w[ok] = 1.0 / (n_pos[ok] * n_neg[ok])
    return w


def rank_score_terms(S: np.ndarray, ds: Dataset, weights: np.ndarray | None = None):
    """Pairwise squared hinge ``1/2 sum_i c_i sum_{p,q} max(0, 2 - s_p + s_q)^2``.

    Returns the value and its gradient with respect to ``S``.
    """
    if weights is None:
        weights = rank_pair_weights(ds)
    pos = ds.relevant_mask
    pair = pos[:, :, None] & ~pos[:, None, :]
    H = 2.0 - (S[:, :, None] - S[:, None, :])
    np.maximum(H, 0.0, out=H)
    H *= pair
    value = 0.5 * float(weights @ np.einsum("ipq,ipq->i", H, H))
    dS = weights[:, None] * (H.sum(1) - H.sum(2))
    return value, dS


def _check_linear(W, ds: Dataset) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    if W.shape != (ds.m, ds.l):
        raise ShapeMismatch(f"W has shape {W.shape}, expected {(ds.m, ds.l)}")
    return W


def br_loss_linear(W, ds: Dataset) -> float:
    W = _check_linear(W, ds)
    return br_score_terms(ds.features @ W, ds.labels)[0]


def ranking_loss_term_linear(W, ds: Dataset) -> float:
    W = _check_linear(W, ds)
    return rank_score_terms(ds.features @ W, ds)[0]


def smooth_eval_linear(W, ds: Dataset, hp: HyperParams, weights=None) -> SmoothEval:
    W = _check_linear(W, ds)
    S = ds.features @ W
    value, dS = br_score_terms(S, ds.labels)
    if hp.lambda2 > 0:
        rv, rdS = rank_score_terms(S, ds, weights)
        value += hp.lambda2 * rv
        dS = dS + hp.lambda2 * rdS
    value += 0.5 * hp.lambda1 * float(np.sum(W * W))
    grad = ds.features.T @ dS + hp.lambda1 * W
    return SmoothEval(value, grad)


def check_gram(K, n: int | None = None) -> np.ndarray:
    """Validate a Gram matrix and return its symmetrized copy."""
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or (n is not None and K.shape[0] != n):
        raise ShapeMismatch(f"Gram matrix has shape {K.shape}, expected ({n}, {n})")
    scale = np.max(np.abs(K)) if K.size else 0.0
    asym = np.max(np.abs(K - K.T)) if K.size else 0.0
    if asym > SYMMETRY_RTOL * scale:
        raise AsymmetricKernel(f"max|K - K^T| = {asym:.3g} exceeds {SYMMETRY_RTOL:g} * max|K|")
    return 0.5 * (K + K.T)


def smooth_eval_kernel(A, K, ds: Dataset, hp: HyperParams, weights=None,
                       checked: bool = False) -> SmoothEval:
    """Smooth objective in coefficient space.

    Pass ``checked=True`` when ``K`` has already gone through :func:`check_gram`.
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (ds.n, ds.l):
        raise ShapeMismatch(f"A has shape {A.shape}, expected {(ds.n, ds.l)}")
    if not checked:
        K = check_gram(K, ds.n)
    S = K @ A
    value, dS = br_score_terms(S, ds.labels)
    if hp.lambda2 > 0:
        rv, rdS = rank_score_terms(S, ds, weights)
        value += hp.lambda2 * rv
        dS = dS + hp.lambda2 * rdS
    value += 0.5 * hp.lambda1 * float(np.sum(A * S))
    grad = K @ dS + hp.lambda1 * S
    return SmoothEval(value, grad)


def trace_norm(M) -> float:
    """Sum of singular values."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False).sum())


def full_objective(param, ds: Dataset, K, hp: HyperParams) -> float:
    """Composite objective; ``K=None`` selects the linear formulation."""
    if K is None:
        smooth = smooth_eval_linear(param, ds, hp).value
    else:
        smooth = smooth_eval_kernel(param, K, ds, hp).value
    return smooth + hp.lambda3 * trace_norm(param)
