"""Dataset files, train/test splits and cross-validation folds.

Two text formats are supported (UTF-8, LF line endings):

``dense-csv``
    First line ``#mll n=<n> m=<m> l=<l>``. Each following line holds ``m``
    feature values then ``l`` label tokens, comma separated. Label tokens are
    ``0``/``1`` or ``-1``/``+1`` (``1`` and ``+1`` both mean relevant).

``sparse-mll``
    One instance per line: ``<lbl,lbl,...>|<idx>:<val> <idx>:<val> ...``.
    Feature indices and label indices are both 1-based, absent features are
    0, and the listed labels form the relevant set (an empty list is allowed).
    An optional ``#mll n=<n> m=<m> l=<l>`` first line fixes the dimensions;
    without it ``m`` and ``l`` are the largest indices seen.

All randomness uses numpy's PCG64 generator seeded through ``SeedSequence``,
so splits reproduce across platforms.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Dataset, validate_dataset
from .errors import InconsistentWidth, LabelOutOfRange, ParseError, TooFewRows

FORMATS = ("dense-csv", "sparse-mll")
_HEADER = re.compile(r"^#mll\s+n=(\d+)\s+m=(\d+)\s+l=(\d+)\s*$")
_LABEL_TOKENS = {"0": -1.0, "-1": -1.0, "1": 1.0, "+1": 1.0}


@dataclass(frozen=True)
class SplitPlan:
    seed: int = 0
    train_fraction: float = 0.6
    repeats: int = 10

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")
        if self.repeats < 1:
            raise ValueError(f"repeats must be positive, got {self.repeats}")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


def _parse_header(line: str, lineno: int = 1):
    match = _HEADER.match(line)
    if not match:
        raise ParseError(f"expected '#mll n=<n> m=<m> l=<l>', got {line[:60]!r}", lineno, 1)
    n, m, l = map(int, match.groups())
    return n, m, l


def _column_of(line: str, field_index: int) -> int:
    """1-based character column where comma-separated field ``field_index`` starts."""
    col = 1
    for _ in range(field_index):
        col = line.index(",", col - 1) + 2
    return col


def _read_lines(path) -> list[str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def _load_dense(lines):
    if not lines:
        raise ParseError("empty file", 1, 1)
    n, m, l = _parse_header(lines[0])
    rows = lines[1:]
    if len(rows) != n:
        raise ParseError(f"header declares n={n} but file has {len(rows)} data lines",
                         len(lines), 1)
    X = np.empty((n, m))
    Y = np.empty((n, l))
    for i, line in enumerate(rows):
        lineno = i + 2
        fields = line.split(",")
        if len(fields) != m + l:
            raise InconsistentWidth(
                f"line {lineno}: expected {m + l} fields (m={m}, l={l}), got {len(fields)}")
        for j in range(m):
            try:
                X[i, j] = float(fields[j])
            except ValueError:
                raise ParseError(f"bad feature value {fields[j]!r}", lineno,
                                 _column_of(line, j)) from None
        for j in range(l):
            tok = fields[m + j].strip()
            if tok not in _LABEL_TOKENS:
                raise LabelOutOfRange(f"label token {tok!r} not in {{0, 1, -1, +1}}",
                                      lineno, _column_of(line, m + j))
            Y[i, j] = _LABEL_TOKENS[tok]
    return X, Y


def _load_sparse(lines):
    header = None
    if lines and lines[0].startswith("#"):
        header = _parse_header(lines[0])
        body, offset = lines[1:], 2
    else:
        body, offset = lines, 1
    records = []
    max_feat = max_lab = 0
    for i, line in enumerate(body):
        lineno = i + offset
        if "|" not in line:
            raise ParseError("missing '|' between labels and features", lineno, 1)
        lab_part, feat_part = line.split("|", 1)
        labels = []
        if lab_part.strip():
            col = 1
            for tok in lab_part.split(","):
                t = tok.strip()
                if not t.isdigit() or int(t) < 1:
                    raise LabelOutOfRange(f"label index {t!r} is not a positive integer",
                                          lineno, col)
                labels.append(int(t))
                col += len(tok) + 1
        feats = {}
        col = len(lab_part) + 2
        for tok in feat_part.split():
            idx, sep, val = tok.partition(":")
            if not sep or not idx.isdigit() or int(idx) < 1:
                raise ParseError(f"bad feature token {tok!r}", lineno, col)
            try:
                feats[int(idx)] = float(val)
            except ValueError:
                raise ParseError(f"bad feature value {val!r}", lineno, col) from None
            col += len(tok) + 1
        max_feat = max([max_feat, *feats])
        max_lab = max([max_lab, *labels])
        records.append((lineno, labels, feats))
    if header is not None:
        n, m, l = header
        if len(records) != n:
            raise ParseError(f"header declares n={n} but file has {len(records)} data lines",
                             len(lines), 1)
        if max_feat > m:
            raise InconsistentWidth(f"feature index {max_feat} exceeds header m={m}")
        if max_lab > l:
            raise LabelOutOfRange(f"label index {max_lab} exceeds header l={l}")
    else:
        n, m, l = len(records), max_feat, max_lab
    X = np.zeros((n, m))
    Y = -np.ones((n, l))
    for i, (_, labels, feats) in enumerate(records):
        for idx, val in feats.items():
            X[i, idx - 1] = val
        for j in labels:
            Y[i, j - 1] = 1.0
    return X, Y


def load_dataset(path, format: str = "dense-csv") -> Dataset:
    """Parse and validate a dataset file; 0/1 labels become -1/+1."""
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; choose from {FORMATS}")
    lines = _read_lines(path)
    X, Y = _load_dense(lines) if format == "dense-csv" else _load_sparse(lines)
    ds = Dataset(X, Y)
    validate_dataset(ds)
    return ds


def format_float(x: float) -> str:
    """Shortest text that round-trips a float exactly."""
    return repr(float(x))


def write_dataset(ds: Dataset, path) -> None:
    """Write ``ds`` as canonical dense-csv (labels as -1/+1)."""
    out = [f"#mll n={ds.n} m={ds.m} l={ds.l}"]
    for x, y in zip(ds.features, ds.labels):
        out.append(",".join([*map(format_float, x), *("+1" if v > 0 else "-1" for v in y)]))
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def _rng(*key) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(key))))


def split_indices(n: int, plan: SplitPlan, repeat_index: int):
    if not 0 <= repeat_index < plan.repeats:
        raise ValueError(f"repeat_index {repeat_index} outside [0, {plan.repeats})")
    perm = _rng(plan.seed, repeat_index).permutation(n)
    n_train = math.ceil(plan.train_fraction * n)
    if n_train >= n:
        raise TooFewRows(f"{n} rows leave no test rows at fraction {plan.train_fraction}")
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def split(ds: Dataset, plan: SplitPlan, repeat_index: int):
    """Uniform random train/test split keyed by ``(seed, repeat_index)``."""
    tr, te = split_indices(ds.n, plan, repeat_index)
    return ds.subset(tr), ds.subset(te)


def kfold_indices(n: int, k: int, seed: int):
    if k < 2 or k > n:
        raise TooFewRows(f"cannot make {k} folds from {n} rows (need 2 <= k <= n)")
    perm = _rng(seed).permutation(n)
    folds = np.array_split(perm, k)
    out = []
    for f in range(k):
        val = np.sort(folds[f])
        train = np.sort(np.concatenate([folds[g] for g in range(k) if g != f]))
        out.append((train, val))
    return out


def kfold(ds: Dataset, k: int = 5, seed: int = 0):
    """``k`` (train, validation) dataset pairs; each row validates exactly once."""
    return [(ds.subset(tr), ds.subset(va)) for tr, va in kfold_indices(ds.n, k, seed)]
