"""Dense exact matrices over a cyclotomic field, stored as lists of rows."""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction

import numpy as np

from .cyclotomic import Automorphism, CycloElement, CycloField, apply_aut

Matrix = list[list[CycloElement]]


def zeros(field: CycloField, rows: int, cols: int | None = None) -> Matrix:
    cols = rows if cols is None else cols
    return [[field.zero] * cols for _ in range(rows)]


def identity(field: CycloField, size: int) -> Matrix:
    out = zeros(field, size)
    for i in range(size):
        out[i][i] = field.one
    return out


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    field = a[0][0].field
    cols = len(b[0])
    out = []
    for row in a:
        new = []
        for j in range(cols):
            acc = field.zero
            for x, brow in zip(row, b):
                y = brow[j]
                if x and y:
                    acc = acc + x * y
            new.append(acc)
        out.append(new)
    return out


def mat_vec(a: Matrix, v: Sequence[CycloElement]) -> list[CycloElement]:
    field = v[0].field
    out = []
    for row in a:
        acc = field.zero
        for x, y in zip(row, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return out


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: Matrix, s) -> Matrix:
    return [[x * s for x in row] for row in a]


def mat_map(a: Matrix, phi: Automorphism) -> Matrix:
    """Apply a field automorphism entrywise."""
    return [[apply_aut(phi, x) for x in row] for row in a]


def conj_transpose(a: Matrix) -> Matrix:
    conj = a[0][0].field.conjugation
    return [[apply_aut(conj, a[i][j]) for i in range(len(a))] for j in range(len(a[0]))]


def block_matrix(blocks: list[list[Matrix]]) -> Matrix:
    out: Matrix = []
    for brow in blocks:
        for r in range(len(brow[0])):
            row: list[CycloElement] = []
            for blk in brow:
                row.extend(blk[r])
            out.append(row)
    return out


def is_zero_matrix(a: Matrix) -> bool:
    return not any(x for row in a for x in row)


def det(a: Matrix) -> CycloElement:
    """Exact determinant by Gaussian elimination with first-nonzero pivoting."""
    n = len(a)
    if n == 0:
        raise ValueError("empty matrix")
    field = a[0][0].field
    m = [list(row) for row in a]
    result = field.one
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k]), None)
        if piv is None:
            return field.zero
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            result = -result
        p = m[k][k]
        result = result * p
        if k == n - 1:
            break
        inv = p.inverse()
        pivot_row = m[k]
        for i in range(k + 1, n):
            if m[i][k]:
                factor = m[i][k] * inv
                row = m[i]
                for j in range(k + 1, n):
                    if pivot_row[j]:
                        row[j] = row[j] - factor * pivot_row[j]
    return result


def solve(a: Matrix, b: Sequence[CycloElement]) -> list[CycloElement]:
    """Solve ``a x = b`` for square nonsingular ``a``."""
    n = len(a)
    m = [list(row) + [b[i]] for i, row in enumerate(a)]
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[k], m[piv] = m[piv], m[k]
        inv = m[k][k].inverse()
        m[k] = [x * inv for x in m[k]]
        for i in range(n):
            if i != k and m[i][k]:
                f = m[i][k]
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return [row[n] for row in m]


def nullspace_vector(a: Matrix) -> list[CycloElement] | None:
    """A nonzero kernel vector of a square or wide matrix, or None if injective."""
    rows, cols = len(a), len(a[0])
    field = a[0][0].field
    m = [list(r) for r in a]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    if not free:
        return None
    fc = free[0]
    vec = [field.zero] * cols
    vec[fc] = field.one
    for i, pc in enumerate(pivots):
        vec[pc] = -m[i][fc]
    return vec


def to_complex(a: Matrix) -> np.ndarray:
    """Double-precision image of a matrix under the canonical embedding."""
    field = a[0][0].field
    rows, cols = len(a), len(a[0])
    coeffs = np.empty((rows, cols, field.degree))
    for i, row in enumerate(a):
        for j, x in enumerate(row):
            coeffs[i, j] = np.array(x.numerators, dtype=float) / x.denominator
    return coeffs @ field._numeric_basis


def rational_nullspace(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Basis of {v : rows v = 0} over Q."""
    m = [list(map(Fraction, r)) for r in rows]
    cols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][c]
        m[r] = [x / lead for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    basis = []
    for fc in (c for c in range(cols) if c not in pivots):
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis


def rational_rows(vectors: Sequence[CycloElement]) -> list[list[Fraction]]:
    return [list(v.coeffs) for v in vectors]


class RationalSpan:
    """Q-span of finitely many field elements, with exact coordinate recovery."""

    def __init__(self, vectors: Sequence[CycloElement]) -> None:
        if not vectors:
            raise ValueError("need at least one vector")
        self.field = vectors[0].field
        self.vectors = list(vectors)
        dim = self.field.degree
        k = len(vectors)
        # row-reduce [coeff rows | identity] to read off coordinates
        rows = [list(v.coeffs) + [Fraction(int(i == j)) for j in range(k)] for i, v in enumerate(vectors)]
        pivots: list[int] = []
        r = 0
        for c in range(dim):
            piv = next((i for i in range(r, k) if rows[i][c] != 0), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            lead = rows[r][c]
            rows[r] = [x / lead for x in rows[r]]
            for i in range(k):
                if i != r and rows[i][c] != 0:
                    f = rows[i][c]
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
        self.rank = r
        self._rows = rows[:r]
        self._pivots = pivots
        self._dim = dim

    @property
    def independent(self) -> bool:
        return self.rank == len(self.vectors)

    def coordinates(self, v: CycloElement) -> list[Fraction] | None:
        """Rational coordinates of ``v`` over the spanning vectors, or None."""
        target = list(v.coeffs)
        combo = [Fraction(0)] * len(self.vectors)
        for row, c in zip(self._rows, self._pivots):
            f = target[c]
            if f:
                target = [x - f * y for x, y in zip(target, row[: self._dim])]
                combo = [x + f * y for x, y in zip(combo, row[self._dim :])]
        if any(target):
            return None
        return combo

    def __contains__(self, v: CycloElement) -> bool:
        return self.coordinates(v) is not None
