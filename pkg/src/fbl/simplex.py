"""Dense revised simplex for small packing linear programs.

Solves  maximize c.x  subject to  A x <= b, x >= 0  with b >= 0, so the
slack basis is an immediate feasible start.  Bland's rule (smallest index
enters, smallest basic variable leaves on ties) guarantees termination
without cycling.  Problem sizes here are a dozen rows and up to a few
hundred thousand columns, so each iteration factors the basis afresh via
numpy solves; determinism matters more than speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence

TOL = 1e-9

_MAX_ITER = 100_000


@dataclass(frozen=True)
class LpResult:
    objective: float
    x: np.ndarray        # structural variable values, length m
    duals: np.ndarray    # one multiplier per row, length n
    iterations: int


def simplex_max(c: np.ndarray, a: np.ndarray, b: np.ndarray | None = None,
                *, tol: float = TOL, max_iter: int = _MAX_ITER) -> LpResult:
    """Maximize c.x over A x <= b, x >= 0 (b defaults to all-ones)."""
    a = np.asarray(a, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    nrows, ncols = a.shape
    if b is None:
        b = np.ones(nrows)
    b = np.asarray(b, dtype=np.float64)
    if (b < 0).any():
        raise ValueError("right-hand side must be nonnegative")
    if c.shape != (ncols,):
        raise ValueError("objective length does not match column count")

    if ncols == 0:
        return LpResult(0.0, np.zeros(0), np.zeros(nrows), 0)

    # variables 0..ncols-1 structural, ncols..ncols+nrows-1 slack
    full_c = np.concatenate([c, np.zeros(nrows)])
    basis = list(range(ncols, ncols + nrows))

    def column(var: int) -> np.ndarray:
        if var < ncols:
            return a[:, var]
        unit = np.zeros(nrows)
        unit[var - ncols] = 1.0
        return unit

    for iteration in range(max_iter):
        bmat = np.column_stack([column(v) for v in basis])
        xb = np.linalg.solve(bmat, b)
        lam = np.linalg.solve(bmat.T, full_c[basis])

        reduced = np.concatenate([c - lam @ a, -lam])
        reduced[basis] = 0.0
        candidates = np.flatnonzero(reduced > tol)
        if candidates.size == 0:
            x = np.zeros(ncols)
            for pos_idx, var in enumerate(basis):
                if var < ncols:
                    x[var] = max(xb[pos_idx], 0.0)
            return LpResult(float(full_c[basis] @ xb), x, lam, iteration)

        enter = int(candidates[0])  # Bland: smallest index
        direction = np.linalg.solve(bmat, column(enter))
        movable = direction > tol
        if not movable.any():
            raise NonConvergence("LP is unbounded; packing structure violated")
        ratios = np.full(nrows, np.inf)
        ratios[movable] = np.maximum(xb[movable], 0.0) / direction[movable]
        best = ratios.min()
        ties = np.flatnonzero(ratios == best)
        leave_pos = min(ties, key=lambda i: basis[i])  # Bland on ties
        basis[leave_pos] = enter

    raise NonConvergence(f"simplex did not terminate within {max_iter} iterations")
