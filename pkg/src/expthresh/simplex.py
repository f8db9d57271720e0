"""Exact rational simplex for  max b.y  s.t.  A y <= c, y >= 0  with c >= 0.

The all-slack basis is feasible because c >= 0, so no phase one is needed.
Bland's rule prevents cycling.  The optimal dual of this program (the
objective-row coefficients of the slacks) is returned alongside y.
"""

from fractions import Fraction
from typing import Sequence

from .errors import DegeneratePivotLimit, ExpThreshError

PIVOT_LIMIT = 100_000


class Unbounded(ExpThreshError):
    code = "Unbounded"


def maximize(A: Sequence[Sequence[int]], b: Sequence[Fraction], c: Sequence[Fraction],
             pivot_limit: int = PIVOT_LIMIT):
    """Return (value, y, x) with y primal-optimal and x the optimal dual multipliers.

    ``A`` has one row per inequality (len(c) rows) and one column per y.
    """
    R, m = len(c), len(b)
    if any(ci < 0 for ci in c):
        raise ValueError("right-hand side must be nonnegative")
    width = m + R
    rows = []
    for i in range(R):
        row = [Fraction(v) for v in A[i]] + [Fraction(0)] * R
        row[m + i] = Fraction(1)
        rows.append(row)
    rhs = [Fraction(ci) for ci in c]
    z = [-Fraction(bj) for bj in b] + [Fraction(0)] * R
    zval = Fraction(0)
    basis = [m + i for i in range(R)]
    pivots = 0
    while True:
        enter = next((j for j in range(width) if z[j] < 0), None)
        if enter is None:
            break
        best, leave = None, None
        for i in range(R):
            a = rows[i][enter]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            raise Unbounded("objective unbounded")
        pivots += 1
        if pivots > pivot_limit:
            raise DegeneratePivotLimit(f"no optimum after {pivot_limit} pivots")
        prow = rows[leave]
        inv = 1 / prow[enter]
        if inv != 1:
            prow = [v * inv for v in prow]
            rows[leave] = prow
            rhs[leave] *= inv
        nz = [j for j in range(width) if prow[j]]
        for i in range(R):
            if i == leave:
                continue
            f = rows[i][enter]
            if f:
                r = rows[i]
                for j in nz:
                    r[j] -= f * prow[j]
                rhs[i] -= f * rhs[leave]
        f = z[enter]
        for j in nz:
            z[j] -= f * prow[j]
        zval -= f * rhs[leave]
        basis[leave] = enter
    y = [Fraction(0)] * m
    for i, j in enumerate(basis):
        if j < m:
            y[j] = rhs[i]
    x = [z[m + i] for i in range(R)]
    return zval, y, x
