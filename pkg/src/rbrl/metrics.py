"""Example-based multi-label evaluation metrics.

``Y`` and ``H`` are sign matrices ({-1, +1}); ``F`` holds real scores. Ranks
are 1-based with rank 1 the highest score; tied scores are ranked by
ascending label index. For the ranking loss, a relevant/irrelevant pair with
equal scores counts as misordered.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .core import sign
from .errors import NoUsableRows, ShapeMismatch

METRIC_NAMES = ("hamming_loss", "subset_accuracy", "f1_example",
                "ranking_loss", "coverage", "average_precision")
SHORT_NAMES = dict(zip(METRIC_NAMES, ("Hal", "Sa", "F1e", "Ral", "Cov", "Ap")))
# True when larger is better.
MAXIMIZE = {"hamming_loss": False, "subset_accuracy": True, "f1_example": True,
            "ranking_loss": False, "coverage": False, "average_precision": True}


def _pair(A, B, what=("predictions", "labels")):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or A.shape != B.shape:
        raise ShapeMismatch(f"{what[0]} {A.shape} and {what[1]} {B.shape} differ")
    return A, B


def hamming_loss(H, Y) -> float:
    H, Y = _pair(H, Y)
    return float(np.mean(H != Y))


def subset_accuracy(H, Y) -> float:
    H, Y = _pair(H, Y)
    return float(np.mean(np.all(H == Y, axis=1)))


def f1_example(H, Y) -> float:
    """Example-based F1; rows with no true and no predicted positives score 1."""
    H, Y = _pair(H, Y)
    P, T = H > 0, Y > 0
    inter = (P & T).sum(1)
    total = P.sum(1) + T.sum(1)
    per_row = np.where(total > 0, 2.0 * inter / np.maximum(total, 1), 1.0)
    return float(per_row.mean())


def label_ranks(F) -> np.ndarray:
    """1-based rank of every label per row (ties: lower label index first)."""
    F = np.asarray(F, dtype=float)
    order = np.argsort(-F, axis=1, kind="stable")
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.arange(1, F.shape[1] + 1)[None, :].repeat(F.shape[0], 0), 1)
    return ranks


def _ranking_rows(F, Y):
    F, Y = _pair(F, Y, ("scores", "labels"))
    pos = Y > 0
    n_pos = pos.sum(1)
    usable = (n_pos > 0) & (n_pos < Y.shape[1])
    return F, pos, n_pos, usable


def ranking_loss(F, Y) -> float:
    """Mean fraction of misordered relevant/irrelevant pairs over usable rows."""
    F, pos, n_pos, usable = _ranking_rows(F, Y)
    if not usable.any():
        raise NoUsableRows("ranking loss needs a row with both relevant and irrelevant labels")
    F, pos, n_pos = F[usable], pos[usable], n_pos[usable]
    bad = (F[:, :, None] <= F[:, None, :]) & pos[:, :, None] & ~pos[:, None, :]
    n_neg = F.shape[1] - n_pos
    return float(np.mean(bad.sum((1, 2)) / (n_pos * n_neg)))


def coverage(F, Y) -> float:
    """Normalized coverage ``(max relevant rank - 1) / l`` averaged over rows with a relevant label."""
    F, pos, n_pos, _ = _ranking_rows(F, Y)
    rows = n_pos > 0
    if not rows.any():
        raise NoUsableRows("coverage needs a row with at least one relevant label")
    ranks = label_ranks(F[rows])
    worst = np.where(pos[rows], ranks, 0).max(1)
    return float((worst.mean() - 1.0) / F.shape[1])


def average_precision(F, Y) -> float:
    F, pos, n_pos, _ = _ranking_rows(F, Y)
    rows = n_pos > 0
    if not rows.any():
        raise NoUsableRows("average precision needs a row with at least one relevant label")
    ranks = label_ranks(F[rows]).astype(float)
    pos = pos[rows]
    r_rel = np.where(pos, ranks, np.inf)
    # for each relevant j: number of relevant k ranked at or above j
    above = (r_rel[:, None, :] <= ranks[:, :, None]).sum(2)
    prec = np.where(pos, above / ranks, 0.0).sum(1) / pos.sum(1)
    return float(prec.mean())


@dataclass(frozen=True)
class EvalReport:
    hamming_loss: float
    subset_accuracy: float
    f1_example: float
    ranking_loss: float
    coverage: float
    average_precision: float
    # rows left out of ranking_loss / coverage+average_precision means
    excluded_rows: dict = field(default_factory=dict, compare=False)

    def values(self) -> tuple:
        return tuple(getattr(self, k) for k in METRIC_NAMES)

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate_all(F, H, Y, check_consistent: bool = True) -> EvalReport:
    """All six metrics. ``H`` must be ``sign(F)`` unless ``check_consistent`` is off."""
    F, Y = _pair(F, Y, ("scores", "labels"))
    H, _ = _pair(H, Y)
    if check_consistent and not np.array_equal(H, sign(F)):
        raise ValueError("label predictions are not sign(scores)")
    n_pos = (Y > 0).sum(1)
    excluded = {"ranking_loss": int(np.sum((n_pos == 0) | (n_pos == Y.shape[1]))),
                "coverage": int(np.sum(n_pos == 0)),
                "average_precision": int(np.sum(n_pos == 0))}
    return EvalReport(hamming_loss(H, Y), subset_accuracy(H, Y), f1_example(H, Y),
                      ranking_loss(F, Y), coverage(F, Y), average_precision(F, Y), excluded)


def aggregate_reports(reports) -> dict:
    """Mean and sample standard deviation (ddof=1) of each metric."""
    vals = np.array([r.values() for r in reports], dtype=float)
    ddof = 1 if len(vals) > 1 else 0
    return {name: (float(vals[:, k].mean()), float(vals[:, k].std(ddof=ddof)))
            for k, name in enumerate(METRIC_NAMES)}
