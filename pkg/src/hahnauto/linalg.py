"""Exact linear algebra over F_q (numpy code arrays) and over F_q(t) (small, dense)."""

from __future__ import annotations

import numpy as np

from .field import FieldConfig
from .poly import RatFunc


def rref(field: FieldConfig, M):
    """Reduced row echelon form.  Returns (matrix, pivot columns)."""
    A = np.array(M, dtype=np.int64, copy=True)
    if A.ndim != 2:
        raise ValueError("rref needs a 2-d matrix")
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = field.vmul(A[r], field.inv(int(A[r, c])))
        col = A[:, c].copy()
        col[r] = 0
        mask = col != 0
        if mask.any():
            A[mask] = field.vsub(A[mask], field.vmul(col[mask][:, None], A[r][None, :]))
        pivots.append(c)
        r += 1
    return A, pivots


def rank(field: FieldConfig, M) -> int:
    M = np.asarray(M, dtype=np.int64)
    if M.size == 0:
        return 0
    return len(rref(field, M)[1])


def nullspace(field: FieldConfig, M, ncols: int | None = None) -> list[np.ndarray]:
    """Basis of {v : M v = 0}, one vector per free column."""
    M = np.asarray(M, dtype=np.int64)
    if M.size == 0:
        n = ncols if ncols is not None else (M.shape[1] if M.ndim == 2 else 0)
        return [np.eye(n, dtype=np.int64)[i] for i in range(n)]
    R, pivots = rref(field, M)
    n = R.shape[1]
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = field.neg(int(R[i, f]))
        basis.append(v)
    return basis


def solve(field: FieldConfig, M, b):
    """One solution x of M x = b (free variables zero), or None if inconsistent."""
    M = np.asarray(M, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    aug = np.hstack([M, b])
    R, pivots = rref(field, aug)
    n = M.shape[1]
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = R[i, n]
    return x


def matmul(field: FieldConfig, A, B):
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if field.e == 1:
        return (A @ B) % field.p
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for k in range(A.shape[1]):
        out = field.vadd(out, field.vmul(A[:, k][:, None], B[k][None, :]))
    return out


# -- dense elimination over F_q(t) ------------------------------------------------

def rf_rref(rows: list[list[RatFunc]]):
    A = [list(r) for r in rows]
    if not A:
        return A, []
    nrows, ncols = len(A), len(A[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        i = next((i for i in range(r, nrows) if A[i][c]), None)
        if i is None:
            continue
        A[r], A[i] = A[i], A[r]
        inv = A[r][c].inv()
        A[r] = [x * inv for x in A[r]]
        for k in range(nrows):
            if k != r and A[k][c]:
                f = A[k][c]
                A[k] = [x - f * y for x, y in zip(A[k], A[r])]
        pivots.append(c)
        r += 1
    return A, pivots


def rf_solve(columns: list[list[RatFunc]], target: list[RatFunc]):
    """Coefficients b with sum_k b_k columns[k] = target, free variables zero.

    Returns None when target is outside the span.
    """
    field = target[0].field
    n = len(target)
    k = len(columns)
    rows = [[columns[j][i] for j in range(k)] + [target[i]] for i in range(n)]
    R, pivots = rf_rref(rows)
    if k in pivots:
        return None
    sol = [RatFunc.zero(field) for _ in range(k)]
    for i, pc in enumerate(pivots):
        sol[pc] = R[i][k]
    return sol


def rf_inverse(M: list[list[RatFunc]]) -> list[list[RatFunc]]:
    n = len(M)
    field = M[0][0].field
    one, zero = RatFunc.one(field), RatFunc.zero(field)
    rows = [list(M[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    R, pivots = rf_rref(rows)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix over F_q(t)")
    return [row[n:] for row in R]


def rf_matvec(M, v):
    field = v[0].field
    out = []
    for row in M:
        acc = RatFunc.zero(field)
        for a, b in zip(row, v):
            if a and b:
                acc = acc + a * b
        out.append(acc)
    return out
