"""Exact rational linear algebra on constant matrices, delegated to sympy."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import sympy

Matrix = list[list[Fraction]]


def _to_sympy(rows: Sequence[Sequence[Fraction]], ncols: int) -> sympy.Matrix:
    return sympy.Matrix(len(rows), ncols,
                        lambda i, j: sympy.Rational(rows[i][j].numerator, rows[i][j].denominator))


def _from_sympy(m: sympy.Matrix) -> Matrix:
    return [[Fraction(int(m[i, j].p), int(m[i, j].q)) for j in range(m.cols)] for i in range(m.rows)]


def rank(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    if not rows or not ncols:
        return 0
    return _to_sympy(rows, ncols).rank()


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of the kernel, one vector per entry, normalized to reduced form."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    return [[v[0] for v in _from_sympy(vec)] for vec in _to_sympy(rows, ncols).nullspace()]


def right_inverse(rows: Sequence[Sequence[Fraction]], ncols: int) -> Matrix | None:
    """A right inverse supported on pivot columns, or None if not surjective.

    Returns an ``ncols x nrows`` matrix S with ``rows @ S = id``.
    """
    nrows = len(rows)
    if nrows == 0:
        return []
    m = _to_sympy(rows, ncols)
    _, pivots = m.rref()
    if len(pivots) < nrows:
        return None
    sub = m.extract(list(range(nrows)), list(pivots))
    inv = sub.inv()
    out = [[Fraction(0)] * nrows for _ in range(ncols)]
    for r, p in enumerate(pivots):
        for j in range(nrows):
            out[p][j] = Fraction(int(inv[r, j].p), int(inv[r, j].q))
    return out


def left_inverse(cols: Sequence[Sequence[Fraction]], nrows: int) -> Matrix | None:
    """Left inverse of the matrix whose columns are ``cols``.

    Returns an ``len(cols) x nrows`` matrix L with ``L @ F = id`` or None when
    the columns are dependent.
    """
    r = len(cols)
    if r == 0:
        return []
    f = sympy.Matrix(nrows, r, lambda i, j: sympy.Rational(cols[j][i].numerator, cols[j][i].denominator))
    if f.rank() < r:
        return None
    lt = (f.T * f).inv() * f.T
    return _from_sympy(lt)
