"""Repeated-split benchmarking and one-axis sensitivity sweeps."""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .core import Dataset, HyperParams
from .data import SplitPlan, format_float, split
from .kernel import KernelSpec
from .metrics import METRIC_NAMES, EvalReport, aggregate_reports, evaluate_all
from .solver import fit, predict
from .tune import DEFAULT_GRID, GridSpec, grid_search

SWEEP_AXES = ("lambda1", "lambda2", "lambda3", "gamma")


@dataclass
class RepeatResult:
    model: str
    repeat: int
    hp: HyperParams
    report: EvalReport
    iterations: int
    stop_reason: str
    train_seconds: float
    test_seconds: float


def fold_seed(seed: int, repeat: int) -> int:
    """Cross-validation seed for one repeat, derived from the run seed."""
    return int(np.random.SeedSequence([seed, repeat, 1]).generate_state(1)[0])


def run_repeat(ds: Dataset, plan: SplitPlan, repeat: int, hp: HyperParams,
               grid: GridSpec | None = None, name: str = "RBRL") -> RepeatResult:
    train, test = split(ds, plan, repeat)
    if grid is not None:
        hp, _ = grid_search(train, grid, hp, seed=fold_seed(plan.seed, repeat))
    t0 = time.perf_counter()
    model, trace = fit(train, hp)
    t1 = time.perf_counter()
    scores, labels = predict(model, test.features)
    t2 = time.perf_counter()
    report = evaluate_all(scores.scores, labels.labels, test.labels)
    return RepeatResult(name, repeat, hp, report, trace.iterations, trace.stop_reason,
                        t1 - t0, t2 - t1)


def ablation_variant(hp: HyperParams, grid: GridSpec | None):
    """The same setup with the ranking term removed."""
    hp = replace(hp, lambda2=0.0)
    if grid is not None:
        grid = replace(grid, lambda2_grid=(0.0,))
    return hp, grid


def _star(args):
    return run_repeat(*args)


def run_bench(ds: Dataset, plan: SplitPlan, hp: HyperParams, grid: GridSpec | None = None,
              ablation: bool = False, n_jobs: int = 1, on_result=None):
    """Run every (variant, repeat) cell; ``on_result`` sees results in a fixed order."""
    variants = [("RBRL", hp, grid)]
    if ablation:
        variants.append(("BRL", *ablation_variant(hp, grid)))
    jobs = [(ds, plan, r, vhp, vgrid, name)
            for name, vhp, vgrid in variants for r in range(plan.repeats)]
    results = []
    if n_jobs == 1:
        it = map(_star, jobs)
        pool = None
    else:
        pool = ProcessPoolExecutor(max_workers=n_jobs)
        it = pool.map(_star, jobs)
    try:
        for res in it:
            results.append(res)
            if on_result is not None:
                on_result(res)
    finally:
        if pool is not None:
            pool.shutdown()
    return results


def summarize(results) -> dict:
    """Mean and std per metric for each model variant, in first-seen order."""
    out = {}
    for name in dict.fromkeys(r.model for r in results):
        reports = [r.report for r in results if r.model == name]
        agg = aggregate_reports(reports)
        out[name] = {k: {"mean": m, "std": s} for k, (m, s) in agg.items()}
    return out


REPEAT_COLUMNS = ["model", "repeat", "lambda1", "lambda2", "lambda3", "gamma",
                  *METRIC_NAMES, "iterations", "stop_reason"]


def repeat_row(r: RepeatResult) -> list:
    gamma = r.hp.kernel.gamma if r.hp.kernel is not None and r.hp.kernel.gamma else ""
    return [r.model, r.repeat, format_float(r.hp.lambda1), format_float(r.hp.lambda2),
            format_float(r.hp.lambda3), format_float(gamma) if gamma != "" else "",
            *(format_float(v) for v in r.report.values()), r.iterations, r.stop_reason]


def write_summary_csv(summary: dict, path) -> None:
    """One row per model with ``mean ± std`` cells, three decimals."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["model", *METRIC_NAMES])
        for name, metrics in summary.items():
            w.writerow([name, *(f"{metrics[k]['mean']:.3f} ± {metrics[k]['std']:.3f}"
                                for k in METRIC_NAMES)])


def sweep_values(axis: str, n_features: int):
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    if axis == "gamma":
        return tuple(10.0 ** k / n_features for k in range(-3, 4))
    return DEFAULT_GRID


def run_sweep(ds: Dataset, plan: SplitPlan, hp: HyperParams, axis: str, values=None):
    """Vary one hyperparameter with the rest fixed.

    Returns ``(value, metric means over repeats)`` per point.
    """
    if values is None:
        values = sweep_values(axis, ds.m)
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    if axis == "gamma" and (hp.kernel is None or hp.kernel.kind != "rbf"):
        raise ValueError("a gamma sweep needs the rbf kernel model")
    rows = []
    for v in values:
        v = float(v)
        if axis == "gamma":
            point = replace(hp, kernel=KernelSpec("rbf", v))
        else:
            point = replace(hp, **{axis: v})
        reports = [run_repeat(ds, plan, r, point).report for r in range(plan.repeats)]
        means = {k: m for k, (m, _) in aggregate_reports(reports).items()}
        rows.append((v, means))
    return rows


def write_sweep_csv(rows, axis: str, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([axis, *METRIC_NAMES])
        for v, means in rows:
            w.writerow([format_float(v), *(format_float(means[k]) for k in METRIC_NAMES)])
