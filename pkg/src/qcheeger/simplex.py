"""Dense two-phase tableau simplex with Bland's rule.

Solves  min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.
Sized for the per-class LPs here (tens of variables); Bland's rule makes the
pivot sequence, and so the returned vertex, reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    fun: float
    iterations: int


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    col_vals = T[:, col].copy()
    col_vals[row] = 0.0
    T -= np.outer(col_vals, T[row])


def _run(T: np.ndarray, basis: list[int], allowed: int, tol: float, max_iter: int) -> tuple[str, int]:
    """Minimize the objective stored in the last row of T (reduced costs)."""
    m = T.shape[0] - 1
    it = 0
    while it < max_iter:
        costs = T[-1, :allowed]
        entering = next((j for j in range(allowed) if costs[j] < -tol), None)
        if entering is None:
            return "optimal", it
        col = T[:m, entering]
        best, leaving = None, None
        for i in range(m):
            if col[i] > tol:
                ratio = T[i, -1] / col[i]
                if best is None or ratio < best - tol or (abs(ratio - best) <= tol and basis[i] < basis[leaving]):
                    best, leaving = ratio, i
        if leaving is None:
            return "unbounded", it
        _pivot(T, leaving, entering)
        basis[leaving] = entering
        it += 1
    raise RuntimeError("simplex iteration cap reached")


def linprog_simplex(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, tol: float = 1e-11, max_iter: int = 10000) -> LPResult:
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq

    # columns: x (n) | slacks (m_ub) | artificials (m) | rhs
    A = np.zeros((m, n + m_ub))
    b = np.concatenate([b_ub, b_eq])
    A[:m_ub, :n] = A_ub
    A[:m_ub, n:] = np.eye(m_ub)
    A[m_ub:, :n] = A_eq
    neg = b < 0
    A[neg] *= -1
    b = np.abs(b)

    n_struct = n + m_ub
    T = np.zeros((m + 1, n_struct + m + 1))
    T[:m, :n_struct] = A
    T[:m, n_struct : n_struct + m] = np.eye(m)
    T[:m, -1] = b
    basis = list(range(n_struct, n_struct + m))
    # phase 1 objective: sum of artificials, expressed in reduced form
    T[-1, :n_struct] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    status, it1 = _run(T, basis, n_struct, tol, max_iter)
    if T[-1, -1] < -1e-9 * max(1.0, np.abs(b).max(initial=0.0)):
        return LPResult("infeasible", None, np.nan, it1)

    # drive remaining artificials out of the basis or drop redundant rows
    keep = []
    for i in range(m):
        if basis[i] >= n_struct:
            j = next((j for j in range(n_struct) if abs(T[i, j]) > 1e-9), None)
            if j is None:
                continue
            _pivot(T, i, j)
            basis[i] = j
        keep.append(i)
    T = np.vstack([T[keep][:, list(range(n_struct)) + [T.shape[1] - 1]], np.zeros((1, n_struct + 1))])
    basis = [basis[i] for i in keep]

    cost = np.zeros(n_struct)
    cost[:n] = c
    T[-1, :n_struct] = cost
    for i, j in enumerate(basis):
        T[-1] -= cost[j] * T[i]
    status, it2 = _run(T, basis, n_struct, tol, max_iter)
    if status == "unbounded":
        return LPResult("unbounded", None, -np.inf, it1 + it2)
    x = np.zeros(n_struct)
    for i, j in enumerate(basis):
        x[j] = T[i, -1]
    x = np.maximum(x[:n], 0.0)
    return LPResult("optimal", x, float(c @ x), it1 + it2)
