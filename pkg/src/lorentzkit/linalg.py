"""Small exact linear algebra over the rationals (row reduction, kernels)."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    mat = [[Fraction(x) for x in row] for row in rows]
    if ncols is None:
        ncols = len(mat[0]) if mat else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                factor = mat[i][c]
                mat[i] = [a - factor * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows . x = 0}."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    reduced, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        x = [Fraction(0)] * ncols
        x[fc] = Fraction(1)
        for row, pc in zip(reduced, pivots):
            x[pc] = -row[fc]
        basis.append(x)
    return basis


def primitive(v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Scale a nonzero rational vector to a primitive integer vector (same direction)."""
    den = lcm(*(Fraction(x).denominator for x in v))
    ints = [int(Fraction(x) * den) for x in v]
    g = gcd(*ints)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(Fraction(i // g) for i in ints)


def det(mat: Sequence[Sequence]) -> Fraction:
    m = [[Fraction(x) for x in row] for row in mat]
    n = len(m)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            sign = -sign
        result *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                factor = m[i][c] / m[c][c]
                m[i] = [a - factor * b for a, b in zip(m[i], m[c])]
    return sign * result


def sparse_rref(rows) -> dict[int, dict[int, Fraction]]:
    """Fully reduced echelon form of sparse rows ``{col: value}``.

    Returns ``{pivot column: row}`` with each row normalized to 1 at its pivot.
    """
    basis: dict[int, dict[int, Fraction]] = {}
    for raw in rows:
        row = {c: Fraction(v) for c, v in raw.items() if v}
        # basis rows vanish on every other pivot, so one pass clears them all
        for p in [c for c in row if c in basis]:
            _axpy(row, -row[p], basis[p])
        if not row:
            continue
        pivot = min(row)
        inv = 1 / row[pivot]
        row = {c: v * inv for c, v in row.items()}
        for other in basis.values():
            if pivot in other:
                _axpy(other, -other[pivot], row)
        basis[pivot] = row
    return basis


def _axpy(target: dict, factor: Fraction, source: dict) -> None:
    for c, v in source.items():
        nv = target.get(c, 0) + factor * v
        if nv:
            target[c] = nv
        else:
            target.pop(c, None)


def sparse_nullspace(rows, ncols: int) -> list[dict[int, Fraction]]:
    basis = sparse_rref(rows)
    free = [c for c in range(ncols) if c not in basis]
    out = []
    for fc in free:
        vec = {fc: Fraction(1)}
        for p, row in basis.items():
            if fc in row:
                vec[p] = -row[fc]
        out.append(vec)
    return out
