"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Solves  min c.x  subject to  A x = b, x >= 0.  Small and deterministic;
adequate up to a few thousand variables, which covers every linear
program this package builds.
"""

import numpy as np

__all__ = ["Infeasible", "SimplexError", "minimize"]

PIVOT_TOL = 1e-9


class Infeasible(ValueError):
    """The equality system admits no nonnegative solution."""


class SimplexError(RuntimeError):
    """Iteration cap hit or an unbounded direction encountered."""


def _pivot(tableau, basis, row, col):
    tableau[row] /= tableau[row, col]
    for i in range(tableau.shape[0]):
        if i != row and tableau[i, col] != 0.0:
            tableau[i] -= tableau[i, col] * tableau[row]
    basis[row] = col


def _run(tableau, basis, ncols, max_iter, tol):
    """Optimize the tableau in place; the objective row is the last row."""
    iterations = 0
    m = tableau.shape[0] - 1
    while True:
        iterations += 1
        if iterations > max_iter:
            raise SimplexError(
                f"iteration cap {max_iter} exceeded "
                f"({m} rows, {ncols} columns, basis {sorted(basis)})"
            )
        reduced = tableau[-1, :ncols]
        entering = -1
        for j in range(ncols):  # Bland: smallest eligible index
            if reduced[j] < -tol:
                entering = j
                break
        if entering < 0:
            return
        leaving = -1
        best = np.inf
        for i in range(m):
            a = tableau[i, entering]
            if a > tol:
                ratio = tableau[i, -1] / a
                if ratio < best - tol or (
                    ratio < best + tol and (leaving < 0 or basis[i] < basis[leaving])
                ):
                    best = ratio
                    leaving = i
        if leaving < 0:
            raise SimplexError("unbounded objective direction")
        _pivot(tableau, basis, leaving, entering)


def minimize(c, A, b, tol=PIVOT_TOL, max_iter=None):
    """Optimal basic solution of  min c.x  s.t.  A x = b, x >= 0.

    Returns (x, value).  Raises Infeasible when phase one cannot zero
    the artificial variables.
    """
    A = np.asarray(A, dtype=float).copy()
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    if max_iter is None:
        max_iter = 10 * (m + n) ** 2

    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # phase 1: [A | I | b] minimizing the artificial sum
    tableau = np.zeros((m + 1, n + m + 1))
    tableau[:m, :n] = A
    tableau[:m, n : n + m] = np.eye(m)
    tableau[:m, -1] = b
    tableau[-1, n : n + m] = 1.0
    tableau[-1] -= tableau[:m].sum(axis=0)  # zero out the basic artificials
    basis = list(range(n, n + m))
    _run(tableau, basis, n + m, max_iter, tol)
    if tableau[-1, -1] < -tol:
        raise Infeasible(f"phase-one objective {-tableau[-1, -1]:.3e} > 0")

    # drive any residual artificial out of the basis, or drop its row
    keep = []
    for i in range(m):
        if basis[i] >= n:
            pivot_col = -1
            for j in range(n):
                if abs(tableau[i, j]) > tol:
                    pivot_col = j
                    break
            if pivot_col >= 0:
                _pivot(tableau, basis, i, pivot_col)
                keep.append(i)
            # else: redundant row, dropped below
        else:
            keep.append(i)
    rows = keep + [m]
    tableau = tableau[rows][:, list(range(n)) + [n + m]]
    basis = [basis[i] for i in keep]

    # phase 2: original objective, reduced against the current basis
    tableau[-1, :] = 0.0
    tableau[-1, :n] = c
    for i, j in enumerate(basis):
        tableau[-1] -= tableau[-1, j] * tableau[i]
    _run(tableau, basis, n, max_iter, tol)

    x = np.zeros(n)
    for i, j in enumerate(basis):
        x[j] = tableau[i, -1]
    return x, float(c @ x)
