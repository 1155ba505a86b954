"""Accelerated proximal gradient solvers for the linear and kernel models."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .core import (Dataset, HyperParams, KernelModel, LabelPredictions, LinearModel,
                   PredictionScores, add_bias_column, augment_bias, sign, validate_dataset)
from .errors import NonFiniteObjective, ShapeMismatch, SvdFailure
from .kernel import KernelSpec, cross_gram, gram
from .lowrank import (certified_lipschitz_kernel, certified_lipschitz_linear,
                      lipschitz_kernel, lipschitz_linear)
from .objective import (br_score_terms, check_gram, rank_pair_weights, rank_score_terms)

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITERS = {"linear": 1000, "kernel": 3000}
STEP_RULES = ("guarded", "closed-form")


@dataclass(frozen=True, eq=False)
class SolveTrace:
    """Per-iteration composite objective of the prox iterates ``W_1, W_2, ...``.

    ``initial_objective`` is the objective at the zero starting point.
    """

    objective_per_iter: np.ndarray
    iterations: int
    stop_reason: str
    l_f_used: float
    l_f_closed_form: float
    initial_objective: float
    rank_rows_skipped: int = 0


def _svt_norm(M: np.ndarray, eps: float):
    """SVT that also returns the trace norm of the result."""
    try:
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(str(exc)) from exc
    s = np.maximum(s - eps, 0.0)
    keep = s > 0
    return (U[:, keep] * s[keep]) @ Vt[keep], float(s.sum())


class _Problem:
    """Smooth part of either formulation, written against a design matrix.

    ``D`` maps parameters to scores (``X`` or ``K``) and ``DT`` is its
    adjoint. For the kernel model the Frobenius penalty is ``1/2 tr(A^T K A)``.
    """

    def __init__(self, D, ds: Dataset, hp: HyperParams, kernel: bool):
        self.D = D
        self.DT = D if kernel else np.ascontiguousarray(D.T)
        self.ds = ds
        self.hp = hp
        self.kernel = kernel
        self.weights = rank_pair_weights(ds)

    def __call__(self, P, need_grad=True):
        hp = self.hp
        S = self.D @ P
        value, dS = br_score_terms(S, self.ds.labels)
        if hp.lambda2 > 0:
            rv, rdS = rank_score_terms(S, self.ds, self.weights)
            value += hp.lambda2 * rv
            dS += hp.lambda2 * rdS
        reg = S if self.kernel else P
        value += 0.5 * hp.lambda1 * float(np.sum(P * reg))
        if not need_grad:
            return value, None
        return value, self.DT @ dS + hp.lambda1 * reg


def next_momentum(b: float) -> float:
    return (1.0 + math.sqrt(1.0 + 4.0 * b * b)) / 2.0


def accelerated_prox_grad(smooth, shape, lambda3: float, l_f: float, max_iters: int,
                          rel_tol: float, monotone: bool = True):
    """Run the momentum loop from the zero matrix.

    ``smooth(P, need_grad)`` returns ``(value, gradient)``. Returns the kept
    iterate, the objective sequence, the stop reason and the starting objective.

    With ``monotone`` a prox step that would raise the objective is not
    accepted: the previous iterate is kept and the momentum term is built from
    the rejected step instead. When every step descends this is the plain
    momentum scheme, and the worst-case rate is unchanged.
    """
    P_prev = np.zeros(shape)
    F0 = F_prev = smooth(P_prev, False)[0]
    history = []
    if l_f == 0:
        # zero design matrix: the smooth part is constant and zero is optimal
        return P_prev, np.asarray(history), "converged", F0
    G = P_prev
    b = 1.0
    stop = "max_iters"
    eps = lambda3 / l_f
    for _ in range(max_iters):
        _, grad = smooth(G, True)
        step = G - grad / l_f
        if lambda3 > 0:
            Z, tn = _svt_norm(step, eps)
        else:
            Z, tn = step, 0.0
        F = smooth(Z, False)[0] + lambda3 * tn
        if not math.isfinite(F):
            raise NonFiniteObjective(f"objective became {F} at iteration {len(history) + 1}")
        # the stop rule looks at the candidate, so a rejected step cannot end the run
        change = abs(F - F_prev) / max(1.0, abs(F_prev))
        if monotone and F > F_prev:
            P, F = P_prev, F_prev
        else:
            P = Z
        history.append(F)
        if change < rel_tol:
            stop = "converged"
            break
        b_next = next_momentum(b)
        G = P + (b / b_next) * (Z - P) + ((b - 1.0) / b_next) * (P - P_prev)
        P_prev, b, F_prev = P, b_next, F
    return P, np.asarray(history), stop, F0


def _step_constant(closed: float, certified: float, rule: str) -> float:
    if rule not in STEP_RULES:
        raise ValueError(f"unknown step rule {rule!r}; choose from {STEP_RULES}")
    if rule == "closed-form":
        return closed
    if certified > closed:
        logger.info("closed-form L_f=%.6g is below the certified bound %.6g; using the latter",
                    closed, certified)
    return max(closed, certified)


def fit_linear(ds: Dataset, hp: HyperParams, step_rule: str = "guarded"):
    """Fit ``W`` on raw features; the bias column is appended here, once.

    ``step_rule="closed-form"`` uses the closed-form constant as the step even where it
    underestimates the true gradient Lipschitz constant; ``"guarded"`` takes the
    larger of that and a certified bound.
    """
    validate_dataset(ds)
    W, trace = solve_linear(augment_bias(ds), hp, step_rule)
    return LinearModel(W), trace


def solve_linear(dsa: Dataset, hp: HyperParams, step_rule: str = "guarded"):
    """Solve for ``W`` on features used exactly as given (no bias handling)."""
    closed = lipschitz_linear(dsa, hp).l_f
    l_f = _step_constant(closed, certified_lipschitz_linear(dsa, hp), step_rule)
    max_iters = hp.max_iters or DEFAULT_MAX_ITERS["linear"]
    problem = _Problem(dsa.features, dsa, hp, kernel=False)
    W, hist, stop, F0 = accelerated_prox_grad(problem, (dsa.m, dsa.l), hp.lambda3, l_f,
                                              max_iters, hp.rel_tol)
    return W, SolveTrace(hist, len(hist), stop, l_f, closed, F0, dsa.n_rank_skipped)


def fit_kernel(ds: Dataset, hp: HyperParams, step_rule: str = "guarded"):
    """Fit the coefficient matrix ``A``; the Gram matrix is built once, on raw features."""
    validate_dataset(ds)
    spec = (hp.kernel or KernelSpec("rbf")).resolve(ds.m)
    K = check_gram(gram(spec, ds.features), ds.n)
    closed = lipschitz_kernel(K, ds, hp).l_f
    l_f = _step_constant(closed, certified_lipschitz_kernel(K, ds, hp), step_rule)
    max_iters = hp.max_iters or DEFAULT_MAX_ITERS["kernel"]
    problem = _Problem(K, ds, hp, kernel=True)
    A, hist, stop, F0 = accelerated_prox_grad(problem, (ds.n, ds.l), hp.lambda3, l_f,
                                              max_iters, hp.rel_tol)
    trace = SolveTrace(hist, len(hist), stop, l_f, closed, F0, ds.n_rank_skipped)
    return KernelModel(A, spec, ds.features), trace


def fit(ds: Dataset, hp: HyperParams, step_rule: str = "guarded"):
    """Dispatch on ``hp.kernel``: ``None`` trains the linear model."""
    if hp.kernel is None:
        return fit_linear(ds, hp, step_rule)
    return fit_kernel(ds, hp, step_rule)


def decision_scores(model, X_test) -> np.ndarray:
    X_test = np.asarray(X_test, dtype=float)
    if X_test.ndim != 2 or X_test.shape[1] != model.n_features:
        raise ShapeMismatch(
            f"test features have shape {X_test.shape}, model expects width {model.n_features}")
    if isinstance(model, LinearModel):
        return add_bias_column(X_test) @ model.weights
    Kt = cross_gram(model.kernel, model.train_features, X_test)
    return Kt.T @ model.coefficients


def predict(model, X_test):
    """Return real-valued scores and their zero-thresholded sign labels."""
    F = decision_scores(model, X_test)
    return PredictionScores(F), LabelPredictions(sign(F))
