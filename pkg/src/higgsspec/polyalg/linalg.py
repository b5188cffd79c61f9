"""Small dense matrices with exact entries (Scalars or MultiPolys)."""

from __future__ import annotations

from typing import Sequence

from .scalar import ONE, ZERO, Scalar

Matrix = list  # list of rows


def identity(r: int, one=ONE, zero=ZERO) -> Matrix:
    return [[one if i == j else zero for j in range(r)] for i in range(r)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    n, m, p = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = a[i][0] * b[0][j]
            for k in range(1, m):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def matadd(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def matsub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def matscale(a: Matrix, c) -> Matrix:
    return [[x * c for x in row] for row in a]


def trace(a: Matrix):
    acc = a[0][0]
    for i in range(1, len(a)):
        acc = acc + a[i][i]
    return acc


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def is_zero_matrix(a: Matrix) -> bool:
    return all(x.is_zero() for row in a for x in row)


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over Scalars and the pivot columns."""
    m = [row[:] for row in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def nullspace(a: Matrix, ncols: int | None = None) -> list[list[Scalar]]:
    """Basis of {v : a v = 0}, one basis vector per free column."""
    if not a:
        n = ncols or 0
        return [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    n = len(a[0])
    m, piv = rref(a)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for row_i, pc in enumerate(piv):
            v[pc] = -m[row_i][f]
        basis.append(v)
    return basis


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [row[:] + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(a)]
    m, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in m]


def det(a: Matrix) -> Scalar:
    n = len(a)
    work = [row[:] for row in a]
    d = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if not work[i][c].is_zero()), None)
        if p is None:
            return ZERO
        if p != c:
            work[c], work[p] = work[p], work[c]
            d = -d
        d = d * work[c][c]
        inv = work[c][c].inverse()
        for i in range(c + 1, n):
            f = work[i][c] * inv
            if not f.is_zero():
                work[i] = [x - f * y for x, y in zip(work[i], work[c])]
    return d


def charpoly(a: Matrix) -> list[Scalar]:
    """Coefficients of det(t I - a), lowest degree first (Faddeev-LeVerrier)."""
    n = len(a)
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    m = [[ZERO] * n for _ in range(n)]
    ident = identity(n)
    for k in range(1, n + 1):
        m = matadd(matmul(a, m), matscale(ident, coeffs[n - k + 1]))
        am = matmul(a, m)
        coeffs[n - k] = -trace(am) / k
    return coeffs


def to_complex(a: Sequence[Sequence]) -> list[list[complex]]:
    return [[complex(x) for x in row] for row in a]
