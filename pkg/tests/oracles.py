"""Slow reference implementations used only as test oracles.

Written independently of the package (explicit loops where affordable) and
sharing no code with it.
"""

from __future__ import annotations

import itertools

import numpy as np


def naive_br(S, Y):
    total = 0.0
    for i in range(S.shape[0]):
        for j in range(S.shape[1]):
            total += 0.5 * max(0.0, 1.0 - Y[i, j] * S[i, j]) ** 2
    return total


def naive_rank(S, Y):
    total = 0.0
    for i in range(S.shape[0]):
        pos = [j for j in range(Y.shape[1]) if Y[i, j] > 0]
        neg = [j for j in range(Y.shape[1]) if Y[i, j] < 0]
        if not pos or not neg:
            continue
        acc = sum(max(0.0, 2.0 - (S[i, p] - S[i, q])) ** 2 for p in pos for q in neg)
        total += 0.5 * acc / (len(pos) * len(neg))
    return total


def naive_smooth_linear(W, X, Y, lam1, lam2):
    S = X @ W
    return naive_br(S, Y) + 0.5 * lam1 * np.sum(W ** 2) + lam2 * naive_rank(S, Y)


def naive_smooth_kernel(A, K, Y, lam1, lam2):
    S = K @ A
    return naive_br(S, Y) + 0.5 * lam1 * np.trace(A.T @ K @ A) + lam2 * naive_rank(S, Y)


def central_diff(f, P, h=1e-6):
    G = np.zeros_like(P)
    for idx in np.ndindex(P.shape):
        E = np.zeros_like(P)
        E[idx] = h
        G[idx] = (f(P + E) - f(P - E)) / (2 * h)
    return G


# -- metrics -----------------------------------------------------------------


def _rank_of(f):
    """1-based ranks, ties broken by lower label index (counted by hand)."""
    l = len(f)
    return [1 + sum(1 for k in range(l) if f[k] > f[j] or (f[k] == f[j] and k < j))
            for j in range(l)]


def bf_hamming(H, Y):
    n, l = Y.shape
    return sum(H[i, j] != Y[i, j] for i in range(n) for j in range(l)) / (n * l)


def bf_subset(H, Y):
    return sum(all(H[i, j] == Y[i, j] for j in range(Y.shape[1])) for i in range(Y.shape[0])) / Y.shape[0]


def bf_f1(H, Y):
    out = []
    for i in range(Y.shape[0]):
        P = {j for j in range(Y.shape[1]) if H[i, j] > 0}
        T = {j for j in range(Y.shape[1]) if Y[i, j] > 0}
        out.append(1.0 if not P and not T else 2 * len(P & T) / (len(P) + len(T)))
    return sum(out) / len(out)


def bf_ranking_loss(F, Y):
    vals = []
    for i in range(Y.shape[0]):
        pos = [j for j in range(Y.shape[1]) if Y[i, j] > 0]
        neg = [j for j in range(Y.shape[1]) if Y[i, j] < 0]
        if not pos or not neg:
            continue
        bad = sum(1 for p, q in itertools.product(pos, neg) if F[i, p] <= F[i, q])
        vals.append(bad / (len(pos) * len(neg)))
    return sum(vals) / len(vals)


def bf_coverage(F, Y):
    vals = []
    for i in range(Y.shape[0]):
        r = _rank_of(F[i])
        pos = [j for j in range(Y.shape[1]) if Y[i, j] > 0]
        if pos:
            vals.append(max(r[j] for j in pos))
    return (sum(vals) / len(vals) - 1) / Y.shape[1]


def bf_average_precision(F, Y):
    vals = []
    for i in range(Y.shape[0]):
        r = _rank_of(F[i])
        pos = [j for j in range(Y.shape[1]) if Y[i, j] > 0]
        if not pos:
            continue
        acc = 0.0
        for j in pos:
            acc += sum(1 for k in pos if r[k] <= r[j]) / r[j]
        vals.append(acc / len(pos))
    return sum(vals) / len(vals)


# -- singular value thresholding ----------------------------------------------


def prox_objective(Z, M, eps):
    return 0.5 * np.sum((Z - M) ** 2) + eps * np.linalg.svd(Z, compute_uv=False).sum()


def compass_search(M, eps, tol=1e-11):
    """Derivative-free minimization from zero; shares nothing with svt."""
    Z = np.zeros_like(M)
    best = prox_objective(Z, M, eps)
    step = max(1.0, np.abs(M).max())
    dirs = []
    for idx in np.ndindex(M.shape):
        E = np.zeros_like(M)
        E[idx] = 1.0
        dirs += [E, -E]
    rot = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
    dirs += [d @ rot for d in dirs] + [rot @ d for d in dirs]
    while step > tol:
        improved = False
        for d in dirs:
            cand = Z + step * d
            val = prox_objective(cand, M, eps)
            if val < best:
                Z, best, improved = cand, val, True
        if not improved:
            step *= 0.5
    return Z, best


def subgradient_residual(M, eps, Z):
    """Distance of (M - Z) / eps from the trace-norm subdifferential at Z."""
    U, s, Vt = np.linalg.svd(Z)
    r = int(np.sum(s > 1e-12 * max(1.0, s.max(initial=0))))
    G = (M - Z) / eps
    Ur, Vr = U[:, :r], Vt[:r].T
    head = Ur.T @ G @ Vr - np.eye(r)
    R = G - Ur @ Ur.T @ G - G @ Vr @ Vr.T + Ur @ Ur.T @ G @ Vr @ Vr.T
    cross = np.linalg.norm(Ur.T @ G - Ur.T @ G @ Vr @ Vr.T) + np.linalg.norm(
        G @ Vr - Ur @ Ur.T @ G @ Vr)
    spec = np.linalg.norm(R, 2) if R.size else 0.0
    return np.abs(head).max(initial=0.0), cross, spec


# -- solver oracle ------------------------------------------------------------


def svt_oracle(M, eps):
    U, s, Vt = np.linalg.svd(M)
    k = len(s)
    return U[:, :k] @ np.diag(np.maximum(s - eps, 0)) @ Vt[:k]


def safe_step_constant(D, Y, lam1, lam2, kernel):
    """Loose but provable Lipschitz bound from elementwise norms (no spectral norms)."""
    fro2 = float(np.sum(D * D))
    n_pos = (Y > 0).sum(1)
    l = Y.shape[1]
    ok = (n_pos > 0) & (n_pos < l)
    c = np.zeros(len(Y))
    c[ok] = l / (n_pos[ok] * (l - n_pos[ok]))
    rank = float(np.max(c)) * fro2 if ok.any() else 0.0
    reg = lam1 * np.sqrt(fro2) if kernel else lam1
    return fro2 + reg + lam2 * rank


def prox_grad_oracle(D, Y, lam1, lam2, lam3, iters=100_000, kernel=False):
    """Plain proximal gradient (no momentum) with its own loop-free gradient."""
    shape = (D.shape[1], Y.shape[1])
    L = safe_step_constant(D, Y, lam1, lam2, kernel)
    pos = Y > 0
    n_pos = pos.sum(1)
    l = Y.shape[1]
    ok = (n_pos > 0) & (n_pos < l)
    c = np.where(ok, 1.0 / np.maximum(n_pos * (l - n_pos), 1), 0.0)
    pp, qq = np.array([(p, q) for p in range(l) for q in range(l) if p != q]).T
    active = (pos[:, pp] & ~pos[:, qq]) * (c * lam2)[:, None]
    spread = np.zeros((len(pp), l))
    spread[np.arange(len(pp)), qq] += 1.0
    spread[np.arange(len(pp)), pp] -= 1.0
    P = np.zeros(shape)
    for _ in range(iters):
        S = D @ P
        g_s = -Y * np.maximum(0, 1 - Y * S)
        h = np.maximum(0, 2 - S[:, pp] + S[:, qq]) * active
        g_s = g_s + h @ spread
        grad = D.T @ g_s + lam1 * (S if kernel else P)
        P = svt_oracle(P - grad / L, lam3 / L)
    return P


# -- exhaustive metric sweep ---------------------------------------------------

_LABEL_BF = {"hamming_loss": bf_hamming, "subset_accuracy": bf_subset, "f1_example": bf_f1}
_RANK_BF = {"ranking_loss": bf_ranking_loss, "coverage": bf_coverage,
            "average_precision": bf_average_precision}


def _row_table(bf, rows_a, rows_b):
    # oracle values are row means, so per-row oracle values compose exactly
    out = {}
    for a in rows_a:
        for b in rows_b:
            try:
                out[a, b] = bf(np.array([a], float), np.array([b], float))
            except ZeroDivisionError:
                out[a, b] = None
    return out


def _compose(vals):
    vals = [v for v in vals if v is not None]
    if not vals:
        return None
    return sum(vals) / len(vals)


def metric_sweep(funcs, max_n, max_l, tol=1e-12):
    """Compare ``funcs[name](A, Y)`` with the brute-force oracles on every
    sign pattern (label metrics) and every tie-free score pattern (ranking
    metrics) up to ``max_n`` rows and ``max_l`` labels.

    Returns ``(instances checked, list of mismatches)``.
    """
    checked, bad = 0, []
    for l in range(1, max_l + 1):
        signs = list(itertools.product((-1.0, 1.0), repeat=l))
        perms = [tuple(float(v) for v in p) for p in itertools.permutations(range(1, l + 1))]
        groups = [(_LABEL_BF, signs), (_RANK_BF, perms)]
        for table, first in groups:
            rowvals = {k: _row_table(bf, first, signs) for k, bf in table.items()}
            for n in range(1, max_n + 1):
                for A_rows in itertools.product(first, repeat=n):
                    A = np.array(A_rows)
                    for Y_rows in itertools.product(signs, repeat=n):
                        Y = np.array(Y_rows)
                        for name in table:
                            want = _compose([rowvals[name][a, y] for a, y in zip(A_rows, Y_rows)])
                            try:
                                got = funcs[name](A, Y)
                            except Exception as exc:  # noqa: BLE001
                                got = exc
                            checked += 1
                            if want is None:
                                if not isinstance(got, Exception):
                                    bad.append((name, A, Y, got, want))
                            elif isinstance(got, Exception) or abs(got - want) > tol:
                                bad.append((name, A, Y, got, want))
    return checked, bad
