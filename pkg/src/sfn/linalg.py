"""Fraction-free (Bareiss) elimination over the rationals.

Rational rows are first scaled by the lcm of their denominators so that the
elimination itself runs on Python integers; every intermediate entry is then
an exact minor of the scaled matrix, which keeps growth polynomial.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


class SingularSystem(ArithmeticError):
    """det(A) == 0; for an absorbing chain this means a trap escaped validation."""


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], list[int]]:
    out, scales = [], []
    for row in rows:
        row = [Fraction(v) for v in row]
        s = lcm(*(v.denominator for v in row)) if row else 1
        out.append([v.numerator * (s // v.denominator) for v in row])
        scales.append(s)
    return out, scales


def _bareiss(a: list[list[int]], ncols: int) -> tuple[int, int]:
    """In-place forward elimination on the first ``len(a)`` columns.

    Pivot is the first nonzero entry at or below the diagonal. Returns
    ``(last_pivot, sign)`` where ``sign * last_pivot`` is the determinant of
    the leading square block, or ``(0, sign)`` if it is singular.
    """
    n = len(a)
    prev, sign = 1, 1
    for k in range(n):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0, sign
        pk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            if aik == 0:
                for j in range(k + 1, ncols):
                    rowi[j] = rowi[j] * pk // prev
            else:
                for j in range(k + 1, ncols):
                    rowi[j] = (rowi[j] * pk - aik * rowk[j]) // prev
            rowi[k] = 0
        prev = pk
    return prev, sign


def determinant(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant of a square rational matrix."""
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    if any(len(r) != n for r in matrix):
        raise ValueError("matrix must be square")
    a, scales = _integer_rows(matrix)
    piv, sign = _bareiss(a, n)
    scale = 1
    for s in scales:
        scale *= s
    return Fraction(sign * piv, scale)


def solve_integer(a: list[list[int]], rhs: list[list[int]]) -> tuple[int, list[list[int]]]:
    """Fraction-free solve of an integer system; ``a`` and ``rhs`` are consumed.

    Returns ``(d, y)`` with ``x = y / d`` exactly and every ``y[i][c]`` an
    integer (Cramer numerators of the row-permuted system).
    """
    n = len(a)
    k = len(rhs[0]) if n else 0
    aug = [a[i] + rhs[i] for i in range(n)]
    piv, _ = _bareiss(aug, n + k)
    if piv == 0:
        raise SingularSystem("matrix is singular")
    y = [[0] * k for _ in range(n)]
    for i in range(n - 1, -1, -1):
        row = aug[i]
        nz = [j for j in range(i + 1, n) if row[j]]
        for c in range(k):
            acc = piv * row[n + c]
            for j in nz:
                acc -= row[j] * y[j][c]
            q, r = divmod(acc, row[i])
            assert r == 0, "fraction-free back substitution lost exactness"
            y[i][c] = q
    return piv, y


def solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction] | Sequence[Sequence[Fraction]]):
    """Solve ``A x = b`` exactly.

    ``rhs`` is either a vector (returns a list) or an ``n x k`` matrix given
    as a list of rows (returns an ``n x k`` list).
    """
    n = len(matrix)
    vector = n > 0 and not isinstance(rhs[0], (list, tuple))
    b_rows = [[v] for v in rhs] if vector else [list(r) for r in rhs]
    if len(b_rows) != n or any(len(r) != n for r in matrix):
        raise ValueError("dimension mismatch")
    if n == 0:
        return []
    rows, _ = _integer_rows([list(matrix[i]) + b_rows[i] for i in range(n)])
    d, y = solve_integer([r[:n] for r in rows], [r[n:] for r in rows])
    x = [[Fraction(v, d) for v in row] for row in y]
    return [r[0] for r in x] if vector else x


def identity_minus(q: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    n = len(q)
    return [[(1 if i == j else 0) - Fraction(q[i][j]) for j in range(n)] for i in range(n)]
