"""Command line entry point: ``rbrl <train|predict|evaluate|tune|bench|sweep>``.

Exit codes: 0 success, 1 unexpected failure, 2 usage error, 3 data or parse
error, 4 validation or shape error, 5 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import (REPEAT_COLUMNS, SWEEP_AXES, repeat_row, run_bench, run_sweep, summarize,
                    write_summary_csv, write_sweep_csv)
from .core import HyperParams, sign
from .data import FORMATS, SplitPlan, format_float, load_dataset
from .errors import ParseError, RBRLError, ShapeMismatch
from .io import load_model, save_model
from .kernel import KernelSpec
from .metrics import METRIC_NAMES, evaluate_all
from .solver import fit, predict
from .tune import DEFAULT_GRID, GridSpec, grid_search, write_table

logger = logging.getLogger("rbrl")


def _floats(text: str) -> tuple:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_data(p, required=True):
    p.add_argument("--data", type=Path, required=required, help="dataset file")
    p.add_argument("--format", choices=FORMATS, default="dense-csv")


def _add_model(p):
    p.add_argument("--model", choices=("linear", "kernel"), default="linear")
    p.add_argument("--kernel", choices=("rbf", "linear"), default="rbf",
                   help="kernel for --model kernel")
    p.add_argument("--gamma", type=float, default=None, help="rbf width (default 1/m)")
    p.add_argument("--lambda1", type=float, default=1e-2)
    p.add_argument("--lambda2", type=float, default=1e-2)
    p.add_argument("--lambda3", type=float, default=1e-2)
    p.add_argument("--rel-tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=None)


def _add_grid(p):
    default = ",".join(repr(v) for v in DEFAULT_GRID)
    p.add_argument("--grid-lambda1", type=_floats, default=DEFAULT_GRID, metavar=default)
    p.add_argument("--grid-lambda2", type=_floats, default=DEFAULT_GRID)
    p.add_argument("--grid-lambda3", type=_floats, default=DEFAULT_GRID)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--metric", choices=METRIC_NAMES, default="average_precision")


def _add_split(p, repeats):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-fraction", type=float, default=0.6)
    p.add_argument("--repeats", type=int, default=repeats)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rbrl", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rbrl {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit one model on a whole dataset")
    _add_data(p)
    _add_model(p)
    p.add_argument("--model-format", choices=("binary", "json"), default="binary")
    p.add_argument("--out", type=Path, required=True, help="output directory")

    p = sub.add_parser("predict", help="score a dataset with a saved model")
    p.add_argument("--model-file", type=Path, required=True)
    _add_data(p)
    p.add_argument("--out", type=Path, required=True, help="scores CSV")

    p = sub.add_parser("evaluate", help="six metrics for a model or a scores file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--model-file", type=Path)
    src.add_argument("--scores", type=Path, help="scores CSV as written by predict")
    _add_data(p)
    p.add_argument("--out", type=Path, default=None, help="report JSON (default: stdout)")

    p = sub.add_parser("tune", help="k-fold grid search")
    _add_data(p)
    _add_model(p)
    _add_grid(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("bench", help="repeated random splits, optional tuning")
    _add_data(p)
    _add_model(p)
    _add_split(p, repeats=10)
    p.add_argument("--tune", action="store_true", help="grid-search each training split")
    _add_grid(p)
    p.add_argument("--ablation", action="store_true", help="also run with lambda2 = 0")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("sweep", help="vary one hyperparameter, others fixed")
    _add_data(p)
    _add_model(p)
    _add_split(p, repeats=1)
    p.add_argument("--axis", choices=SWEEP_AXES, required=True)
    p.add_argument("--values", type=_floats, default=None,
                   help="axis values (default: 1e-4..1e2, or 1e-3/m..1e3/m for gamma)")
    p.add_argument("--out", type=Path, required=True, help="CSV file")
    return parser


def hyperparams_from(args) -> HyperParams:
    kernel = None
    if args.model == "kernel":
        kernel = KernelSpec(args.kernel, args.gamma if args.kernel == "rbf" else None)
    return HyperParams(args.lambda1, args.lambda2, args.lambda3, args.max_iters,
                       args.rel_tol, kernel)


def grid_from(args) -> GridSpec:
    return GridSpec(args.grid_lambda1, args.grid_lambda2, args.grid_lambda3,
                    args.folds, args.metric)


def _write_config(args, path: Path) -> None:
    """Serialize the parsed arguments; ``path`` is a directory or a file name."""
    if path.is_dir():
        path = path / "config.json"
    cfg = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()
           if k not in ("func", "verbose")}
    cfg["rbrl_version"] = __version__
    path.write_text(json.dumps(cfg, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_matrix(path: Path, M: np.ndarray, prefix: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"{prefix}{j + 1}" for j in range(M.shape[1])])
        for row in M:
            w.writerow([format_float(v) for v in row])


def read_scores(path: Path) -> np.ndarray:
    try:
        F = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ParseError(f"cannot read scores from {path}: {exc}") from exc
    return F


def cmd_train(args) -> int:
    ds = load_dataset(args.data, args.format)
    hp = hyperparams_from(args)
    model, trace = fit(ds, hp)
    args.out.mkdir(parents=True, exist_ok=True)
    name = "model.json" if args.model_format == "json" else "model.bin"
    save_model(model, args.out / name)
    with open(args.out / "trace.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "objective"])
        w.writerow([0, format_float(trace.initial_objective)])
        for t, F in enumerate(trace.objective_per_iter, 1):
            w.writerow([t, format_float(F)])
    _write_config(args, args.out)
    final = trace.objective_per_iter[-1] if trace.iterations else trace.initial_objective
    print(f"{trace.stop_reason} after {trace.iterations} iterations; objective {final:.6g}; "
          f"L_f {trace.l_f_used:.6g}; model written to {args.out / name}")
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model_file)
    ds = load_dataset(args.data, args.format)
    scores, _ = predict(model, ds.features)
    _write_matrix(args.out, scores.scores, "s")
    return 0


def cmd_evaluate(args) -> int:
    ds = load_dataset(args.data, args.format)
    if args.model_file is not None:
        scores, labels = predict(load_model(args.model_file), ds.features)
        F, H = scores.scores, labels.labels
    else:
        F = read_scores(args.scores)
        if F.shape != ds.labels.shape:
            raise ShapeMismatch(f"scores {F.shape} do not match labels {ds.labels.shape}")
        H = sign(F)
    if F.shape[1] != ds.l:
        raise ShapeMismatch(f"model predicts {F.shape[1]} labels, dataset has {ds.l}")
    report = evaluate_all(F, H, ds.labels)
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8")
    return 0


def cmd_tune(args) -> int:
    ds = load_dataset(args.data, args.format)
    grid = grid_from(args)
    hp, table = grid_search(ds, grid, hyperparams_from(args), seed=args.seed, n_jobs=args.jobs)
    args.out.mkdir(parents=True, exist_ok=True)
    write_table(table, args.out / "grid.csv", grid.folds)
    best = {"lambda1": hp.lambda1, "lambda2": hp.lambda2, "lambda3": hp.lambda3,
            "selection_metric": grid.selection_metric}
    (args.out / "best.json").write_text(json.dumps(best, indent=2) + "\n", encoding="utf-8")
    _write_config(args, args.out)
    print(json.dumps(best))
    return 0


def cmd_bench(args) -> int:
    ds = load_dataset(args.data, args.format)
    plan = SplitPlan(args.seed, args.train_fraction, args.repeats)
    grid = grid_from(args) if args.tune else None
    args.out.mkdir(parents=True, exist_ok=True)
    _write_config(args, args.out)
    with open(args.out / "repeats.csv", "w", newline="", encoding="utf-8") as rep, \
            open(args.out / "timings.csv", "w", newline="", encoding="utf-8") as tim:
        rw = csv.writer(rep, lineterminator="\n")
        tw = csv.writer(tim, lineterminator="\n")
        rw.writerow(REPEAT_COLUMNS)
        tw.writerow(["model", "repeat", "train_seconds", "test_seconds"])

        def flush(res):
            rw.writerow(repeat_row(res))
            tw.writerow([res.model, res.repeat, f"{res.train_seconds:.4f}",
                         f"{res.test_seconds:.4f}"])
            rep.flush()
            tim.flush()
            logger.info("%s repeat %d done: %s", res.model, res.repeat,
                        {k: round(v, 4) for k, v in zip(METRIC_NAMES, res.report.values())})

        results = run_bench(ds, plan, hyperparams_from(args), grid, args.ablation,
                            args.jobs, on_result=flush)
    summary = summarize(results)
    (args.out / "report.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    write_summary_csv(summary, args.out / "report.csv")
    sys.stdout.write((args.out / "report.csv").read_text(encoding="utf-8"))
    for name in summary:
        tr = [r.train_seconds for r in results if r.model == name]
        te = [r.test_seconds for r in results if r.model == name]
        print(f"{name}: mean train {np.mean(tr):.3f}s, mean test {np.mean(te):.3f}s")
    return 0


def cmd_sweep(args) -> int:
    ds = load_dataset(args.data, args.format)
    plan = SplitPlan(args.seed, args.train_fraction, args.repeats)
    rows = run_sweep(ds, plan, hyperparams_from(args), args.axis, args.values)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(rows, args.axis, args.out)
    _write_config(args, args.out.with_name(args.out.stem + ".config.json"))
    return 0


COMMANDS = {"train": cmd_train, "predict": cmd_predict, "evaluate": cmd_evaluate,
            "tune": cmd_tune, "bench": cmd_bench, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except RBRLError as exc:
        msg, name = str(exc), type(exc).__name__
        if not msg.startswith(name):
            msg = f"{name}: {msg}"
        print(f"error: {msg}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: ValidationError: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
