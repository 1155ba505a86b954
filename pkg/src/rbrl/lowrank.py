"""Trace-norm proximal operator and closed-form Lipschitz constants."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, HyperParams
from .errors import SvdFailure
from .objective import check_gram


@dataclass(frozen=True, eq=False)
class LipschitzBound:
    l_f: float
    l_fr: float
    per_label_a: np.ndarray
    per_label_b: np.ndarray


def svt(M, eps: float) -> np.ndarray:
    """Singular value thresholding: ``argmin_Z 1/2 ||Z - M||_F^2 + eps ||Z||_*``."""
    if eps < 0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    M = np.asarray(M, dtype=float)
    if eps == 0:
        return M.copy()
    try:
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(str(exc)) from exc
    s = np.maximum(s - eps, 0.0)
    keep = s > 0
    return (U[:, keep] * s[keep]) @ Vt[keep]


def _ranking_constants(ds: Dataset, row_norms: np.ndarray):
    pos = ds.relevant_mask
    n_pos = pos.sum(1).astype(float)
    n_neg = ds.l - n_pos
    usable = ds.rank_usable
    # count of pairs each (row, label) participates in
    counts = np.where(pos, n_neg[:, None], n_pos[:, None]) * usable[:, None]
    a = counts.sum(0)
    denom = np.where(usable, (n_pos * n_neg) ** 2, 1.0)
    b = (counts * (row_norms ** 4 / denom)[:, None]).sum(0)
    l_fr = float(np.sqrt(np.max(a * b))) if ds.l else 0.0
    return a, b, l_fr


def lipschitz_linear(ds: Dataset, hp: HyperParams) -> LipschitzBound:
    """Closed-form gradient Lipschitz bound for the linear problem.

    ``ds`` must already carry the bias column.
    """
    X = ds.features
    a, b, l_fr = _ranking_constants(ds, np.linalg.norm(X, axis=1))
    fro2 = float(np.sum(X * X))
    l_f = np.sqrt(3 * fro2 ** 2 + 3 * hp.lambda1 ** 2 + 3 * (hp.lambda2 * l_fr) ** 2)
    return LipschitzBound(float(l_f), l_fr, a, b)


def lipschitz_kernel(K, ds: Dataset, hp: HyperParams) -> LipschitzBound:
    K = check_gram(K, ds.n)
    a, b, l_fr = _ranking_constants(ds, np.linalg.norm(K, axis=0))
    fro2 = float(np.sum(K * K))
    l_f = np.sqrt(3 * fro2 ** 2 + 3 * hp.lambda1 ** 2 * fro2 + 3 * (hp.lambda2 * l_fr) ** 2)
    return LipschitzBound(float(l_f), l_fr, a, b)


def _spectral_sq(M: np.ndarray) -> float:
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2)) ** 2


def _max_pair_curvature(ds: Dataset) -> float:
    # largest eigenvalue of the complete bipartite Laplacian is |Y+| + |Y-| = l
    n_pos = ds.relevant_mask.sum(1).astype(float)
    ok = ds.rank_usable
    if not ok.any():
        return 0.0
    return float(np.max(ds.l / (n_pos[ok] * (ds.l - n_pos[ok]))))


def certified_lipschitz_linear(ds: Dataset, hp: HyperParams) -> float:
    """Provable gradient Lipschitz bound for the linear problem.

    Every smooth term is a sum of ``t * a a^T``-curvature pieces with
    ``t`` in [0, 1], so the constants of the three terms add.
    """
    X = ds.features
    l_r = _max_pair_curvature(ds) * _spectral_sq(X[ds.rank_usable])
    return _spectral_sq(X) + hp.lambda1 + hp.lambda2 * l_r


def certified_lipschitz_kernel(K, ds: Dataset, hp: HyperParams) -> float:
    K = check_gram(K, ds.n)
    k2 = _spectral_sq(K)
    l_r = _max_pair_curvature(ds) * _spectral_sq(K[ds.rank_usable])
    return k2 + hp.lambda1 * np.sqrt(k2) + hp.lambda2 * l_r
