import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rbrl.core import Dataset  # noqa: E402


def random_dataset(rng, n, m, l, scale=1.0):
    X = rng.normal(scale=scale, size=(n, m))
    Y = np.where(rng.random((n, l)) < 0.5, 1.0, -1.0)
    return Dataset(X, Y)


def lowrank_dataset(rng, n=120, m=10, l=6, rank=2, noise=0.3):
    """Labels thresholded from a planted rank-``rank`` linear model."""
    X = rng.normal(size=(n, m))
    W = rng.normal(size=(m, rank)) @ rng.normal(size=(rank, l))
    S = X @ W + noise * rng.normal(size=(n, l))
    Y = np.where(S > np.quantile(S, 0.6, axis=0), 1.0, -1.0)
    return Dataset(X, Y)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
