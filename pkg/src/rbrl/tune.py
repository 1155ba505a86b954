"""Grid search over the three tradeoff parameters with k-fold cross-validation."""

from __future__ import annotations

import csv
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .core import Dataset, HyperParams
from .data import format_float, kfold_indices
from .errors import NumericalError, ValidationError
from .metrics import MAXIMIZE, METRIC_NAMES, evaluate_all
from .solver import fit, predict

logger = logging.getLogger(__name__)

DEFAULT_GRID = tuple(10.0 ** k for k in range(-4, 3))


@dataclass(frozen=True)
class GridSpec:
    lambda1_grid: tuple = DEFAULT_GRID
    lambda2_grid: tuple = DEFAULT_GRID
    lambda3_grid: tuple = DEFAULT_GRID
    folds: int = 5
    selection_metric: str = "average_precision"

    def __post_init__(self):
        for name in ("lambda1_grid", "lambda2_grid", "lambda3_grid"):
            g = tuple(float(v) for v in getattr(self, name))
            if not g or any(not (np.isfinite(v) and v >= 0) for v in g):
                raise ValueError(f"{name} must be a nonempty list of nonnegative numbers")
            object.__setattr__(self, name, g)
        if self.selection_metric not in METRIC_NAMES:
            raise ValueError(f"unknown selection metric {self.selection_metric!r}")
        if self.folds < 2:
            raise ValueError("folds must be at least 2")

    @property
    def maximize(self) -> bool:
        return MAXIMIZE[self.selection_metric]

    def cells(self):
        return list(itertools.product(self.lambda1_grid, self.lambda2_grid, self.lambda3_grid))


@dataclass
class CellResult:
    index: int
    lambda1: float
    lambda2: float
    lambda3: float
    fold_scores: list = field(default_factory=list)
    mean: float = float("nan")
    failed: bool = False
    error: str = ""


def _run_cell(args):
    index, lams, ds, folds, hp_base, metric = args
    cell = CellResult(index, *lams)
    hp = replace(hp_base, lambda1=lams[0], lambda2=lams[1], lambda3=lams[2])
    try:
        for tr, va in folds:
            model, _ = fit(ds.subset(tr), hp)
            dv = ds.subset(va)
            scores, labels = predict(model, dv.features)
            report = evaluate_all(scores.scores, labels.labels, dv.labels)
            cell.fold_scores.append(getattr(report, metric))
        cell.mean = float(np.mean(cell.fold_scores))
    except (NumericalError, ValidationError, FloatingPointError, np.linalg.LinAlgError) as exc:
        cell.failed = True
        cell.error = f"{type(exc).__name__}: {exc}"
        logger.warning("grid cell %s failed: %s", lams, cell.error)
    return cell


def select_best(cells, maximize: bool) -> CellResult:
    """Best mean score; ties go to the smaller (lambda3, lambda2, lambda1)."""
    ok = [c for c in cells if not c.failed and np.isfinite(c.mean)]
    if not ok:
        raise NumericalError("every grid cell failed")
    sgn = -1.0 if maximize else 1.0
    return min(ok, key=lambda c: (sgn * c.mean, c.lambda3, c.lambda2, c.lambda1))


def grid_search(ds_train: Dataset, grid: GridSpec, hp_base: HyperParams | None = None,
                seed: int = 0, n_jobs: int = 1):
    """Return the selected :class:`HyperParams` and the full per-cell table.

    Folds depend only on ``seed``; results are ordered by cell index whatever
    ``n_jobs`` is.
    """
    hp_base = hp_base or HyperParams()
    folds = kfold_indices(ds_train.n, grid.folds, seed)
    jobs = [(i, lams, ds_train, folds, hp_base, grid.selection_metric)
            for i, lams in enumerate(grid.cells())]
    if n_jobs == 1:
        table = [_run_cell(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            table = list(pool.map(_run_cell, jobs))
    table.sort(key=lambda c: c.index)
    best = select_best(table, grid.maximize)
    hp = replace(hp_base, lambda1=best.lambda1, lambda2=best.lambda2, lambda3=best.lambda3)
    return hp, table


def write_table(table, path, folds: int) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cell", "lambda1", "lambda2", "lambda3",
                    *(f"fold{k}" for k in range(folds)), "mean", "failed"])
        for c in table:
            per_fold = [format_float(v) for v in c.fold_scores]
            per_fold += [""] * (folds - len(per_fold))
            w.writerow([c.index, format_float(c.lambda1), format_float(c.lambda2),
                        format_float(c.lambda3), *per_fold,
                        "" if c.failed else format_float(c.mean), int(c.failed)])
