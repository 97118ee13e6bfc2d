"""Dense primal simplex for packing LPs ``max c.x  s.t.  A x <= 1, x >= 0``.

The all-slack basis is feasible because the right-hand side is nonnegative,
so a single phase suffices.  Dantzig pricing is used until a run of
degenerate pivots suggests stalling, after which Bland's rule takes over and
guarantees termination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LPError(RuntimeError):
    pass


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    duals: np.ndarray
    iterations: int


def solve_packing_lp(A: np.ndarray, c: np.ndarray, b: np.ndarray | None = None,
                     tol: float = 1e-11, max_iter: int | None = None) -> LPResult:
    A = np.asarray(A, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    m, n = A.shape
    if b is None:
        b = np.ones(m)
    if n == 0:
        return LPResult(np.zeros(0), 0.0, np.zeros(m), 0)
    if m == 0:
        if np.any(c > tol):
            raise LPError("unbounded packing LP (column with no constraint)")
        return LPResult(np.zeros(n), 0.0, np.zeros(0), 0)

    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    basis = np.arange(n, n + m)
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000

    bland = False
    degenerate_run = 0
    it = 0
    while True:
        red = T[m, :-1]
        if bland:
            cand = np.flatnonzero(red < -tol)
            if cand.size == 0:
                break
            j = int(cand[0])
        else:
            j = int(np.argmin(red))
            if red[j] >= -tol:
                break
        col = T[:m, j]
        pos = col > tol
        if not pos.any():
            raise LPError("unbounded packing LP")
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / col[pos]
        rmin = ratios.min()
        ties = np.flatnonzero(ratios <= rmin + tol)
        # lowest basic-variable index among ties (Bland)
        r = int(ties[np.argmin(basis[ties])])
        if ratios[r] <= tol:
            degenerate_run += 1
            if degenerate_run > 2 * (m + n):
                bland = True
        else:
            degenerate_run = 0
        piv = T[r, j]
        T[r] /= piv
        colv = T[:, j].copy()
        colv[r] = 0.0
        T -= np.outer(colv, T[r])
        basis[r] = j
        it += 1
        if it > max_iter:
            raise LPError(f"simplex did not converge in {max_iter} pivots")

    x = np.zeros(n + m)
    x[basis] = T[:m, -1]
    x = np.clip(x[:n], 0.0, None)
    duals = T[m, n:n + m].copy()
    return LPResult(x, float(c @ x), duals, it)
