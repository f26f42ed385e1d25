"""Iterated algebras on D + fD + ... + f^(n-1)D.

Basis rule: (f^i x)(f^j y) = f^(i+j) tau~^j(x) y when i + j < n.  On wrap-around
(i + j >= n) the element d is inserted on the left, in the middle, or on the
right of tau~^j(x) y depending on the variant.
"""

from __future__ import annotations

import enum
import itertools
import random
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .cyclic_algebra import CyclicAlgebra, DElement, d_mul, d_norm, left_regular
from .cyclotomic import Automorphism, CycloElement
from .linalg import Matrix, block_matrix, det, identity, mat_map, mat_scale, nullspace_vector, to_complex, zeros


class IterVariant(enum.Enum):
    LEFT = "left"
    MIDDLE = "middle"
    RIGHT = "right"

    @classmethod
    def parse(cls, value: str | IterVariant) -> IterVariant:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown variant {value!r}; choose left, middle or right") from None


class IteratedAlgebra:
    """The iterated algebra over D with twist tau (default: the tower's tau) and wrap element d."""

    def __init__(
        self,
        D: CyclicAlgebra,
        d,
        variant: IterVariant | str = IterVariant.LEFT,
        n: int | None = None,
        tau: Automorphism | None = None,
    ) -> None:
        self.D = D
        self.variant = IterVariant.parse(variant)
        self.n = D.tower.n if n is None else n
        self.tau = D.tau if tau is None else tau
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if any((self.tau ** self.n)(b) != b for b in D.tower.k_basis):
            raise ValueError("tau must have order dividing n on K")
        if not isinstance(d, DElement):
            d = D.scalar(d)
        if d_norm(d).is_zero():
            raise ValueError("d must be invertible in D")
        self.d = d
        self.m = D.m
        self.field = D.field
        self._tau_pows = [self.tau ** j for j in range(self.n)]

    def __repr__(self) -> str:
        return f"IteratedAlgebra({self.variant.value}, n={self.n}, d={list(self.d.coords)!r})"

    @property
    def dim_K(self) -> int:
        return self.m * self.n

    # -- helpers -----------------------------------------------------------

    def tt(self, x: DElement, j: int) -> DElement:
        """tau~^j(x) for this algebra's tau."""
        j %= self.n
        return x if j == 0 else x.map(self._tau_pows[j])

    def d_in_K(self) -> bool:
        return self.d.in_K()

    def d_in_L(self) -> bool:
        return self.d.in_K() and self.D.tower.in_K(self.d.coords[0]) and self.tau(self.d.coords[0]) == self.d.coords[0]

    def d_in_F(self) -> bool:
        return self.d.in_K() and self.D.tower.in_F(self.d.coords[0])

    # -- elements ------------------------------------------------------------

    def element(self, coords: Sequence) -> AElement:
        if len(coords) != self.n:
            raise ValueError(f"expected {self.n} D-coordinates, got {len(coords)}")
        out = []
        for c in coords:
            out.append(c if isinstance(c, DElement) else self.D.scalar(c))
        return AElement(self, tuple(out))

    def from_D(self, x: DElement) -> AElement:
        return self.element([x] + [self.D.zero] * (self.n - 1))

    @property
    def zero(self) -> AElement:
        return self.from_D(self.D.zero)

    @property
    def one(self) -> AElement:
        return self.from_D(self.D.one)

    def f_power(self, i: int) -> AElement:
        coords = [self.D.zero] * self.n
        coords[i] = self.D.one
        return self.element(coords)

    @property
    def f(self) -> AElement:
        return self.f_power(1)

    def from_phi(self, vec: Sequence[CycloElement]) -> AElement:
        m = self.m
        return self.element([self.D.element(vec[i * m:(i + 1) * m]) for i in range(self.n)])

    def random(self, rng: random.Random, bound: int = 3, basis: Sequence[CycloElement] | None = None) -> AElement:
        return self.element([self.D.random(rng, bound, basis) for _ in range(self.n)])


class AElement:
    """x = x_0 + f x_1 + ... + f^(n-1) x_(n-1), x_i in D."""

    __slots__ = ("algebra", "coords")

    def __init__(self, algebra: IteratedAlgebra, coords: tuple[DElement, ...]) -> None:
        self.algebra = algebra
        self.coords = coords

    def __repr__(self) -> str:
        return f"AElement({[list(c.coords) for c in self.coords]!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, AElement):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coords)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def _check(self, other: AElement) -> None:
        if not isinstance(other, AElement) or other.algebra is not self.algebra:
            raise ValueError("algebra mismatch")

    def __add__(self, other: AElement) -> AElement:
        self._check(other)
        return AElement(self.algebra, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: AElement) -> AElement:
        self._check(other)
        return AElement(self.algebra, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> AElement:
        return AElement(self.algebra, tuple(-a for a in self.coords))

    def __mul__(self, other: AElement) -> AElement:
        return a_mul(self, other)

    def phi(self) -> list[CycloElement]:
        return flatten(self)


def flatten(x: AElement) -> list[CycloElement]:
    """Coordinates over the right K-basis 1, e, ..., e^(m-1), f, fe, ..., f^(n-1)e^(m-1)."""
    out: list[CycloElement] = []
    for c in x.coords:
        out.extend(c.coords)
    return out


def _wrap_term(A: IteratedAlgebra, tx: DElement, y: DElement) -> DElement:
    d = A.d
    if A.variant is IterVariant.LEFT:
        return d_mul(d, d_mul(tx, y))
    if A.variant is IterVariant.MIDDLE:
        return d_mul(tx, d_mul(d, y))
    return d_mul(d_mul(tx, y), d)


def a_mul(x: AElement, y: AElement) -> AElement:
    x._check(y)
    A = x.algebra
    n = A.n
    out = [A.D.zero] * n
    for j, yj in enumerate(y.coords):
        if yj.is_zero():
            continue
        for i, xi in enumerate(x.coords):
            if xi.is_zero():
                continue
            tx = A.tt(xi, j)
            k = i + j
            if k < n:
                out[k] = out[k] + d_mul(tx, yj)
            else:
                out[k - n] = out[k - n] + _wrap_term(A, tx, yj)
    return AElement(A, tuple(out))


def associator(x: AElement, y: AElement, z: AElement) -> AElement:
    """[x, y, z] = (xy)z - x(yz)."""
    return a_mul(a_mul(x, y), z) - a_mul(x, a_mul(y, z))


@dataclass(frozen=True)
class DMatrix:
    """n x n matrix over D with an optional right factor per entry.

    The product is (xy)_r = sum_j entries[r][j] * y_j * (right[r][j] or 1);
    right factors only occur for the RIGHT variant.
    """

    entries: list[list[DElement]]
    right: list[list[DElement | None]]

    def apply(self, ys: Sequence[DElement]) -> list[DElement]:
        out = []
        for row, rrow in zip(self.entries, self.right):
            acc = None
            for a, r, y in zip(row, rrow, ys):
                term = d_mul(a, y)
                if r is not None:
                    term = d_mul(term, r)
                acc = term if acc is None else acc + term
            out.append(acc)
        return out


def m_matrix(x: AElement) -> DMatrix:
    """M(x) with xy = M(x) y; column j holds tau~^j of the rotated coordinates of x."""
    A = x.algebra
    n = A.n
    entries: list[list[DElement]] = []
    right: list[list[DElement | None]] = []
    for r in range(n):
        row, rrow = [], []
        for j in range(n):
            i = (r - j) % n
            tx = A.tt(x.coords[i], j)
            wrap = i + j >= n
            rf = None
            if wrap:
                if A.variant is IterVariant.LEFT:
                    tx = d_mul(A.d, tx)
                elif A.variant is IterVariant.MIDDLE:
                    tx = d_mul(tx, A.d)
                else:
                    rf = A.d
            row.append(tx)
            rrow.append(rf)
        entries.append(row)
        right.append(rrow)
    return DMatrix(entries, right)


def _lambda_blocks(x: AElement) -> Matrix:
    A = x.algebra
    if A.variant is IterVariant.RIGHT and not A.d.in_K():
        raise ValueError("a K-matrix representation of the right variant needs d in K")
    M = m_matrix(x)
    blocks = []
    for r in range(A.n):
        brow = []
        for j in range(A.n):
            blk = left_regular(M.entries[r][j])
            rf = M.right[r][j]
            if rf is not None:
                blk = mat_scale(blk, rf.coords[0])
            brow.append(blk)
        blocks.append(brow)
    return block_matrix(blocks)


def big_lambda(x: AElement) -> Matrix:
    """Lambda(x), the mn x mn K-matrix of left multiplication: flatten(xy) = Lambda(x) flatten(y)."""
    A = x.algebra
    if A.variant is IterVariant.RIGHT and not A.d_in_L():
        raise ValueError("the right variant is represented over K only for d in L")
    return _lambda_blocks(x)


def shift_matrix(A: IteratedAlgebra, inverse: bool = False) -> Matrix:
    """Block cyclic shift P (d I_m in the top-right corner) or its inverse."""
    n, m = A.n, A.m
    fld = A.field
    Z = zeros(fld, m)
    I = identity(fld, m)
    d = A.d.coords[0]
    blocks = [[Z] * n for _ in range(n)]
    if not inverse:
        blocks[0][n - 1] = mat_scale(I, d)
        for r in range(1, n):
            blocks[r][r - 1] = I
    else:
        blocks[n - 1][0] = mat_scale(I, d.inverse())
        for r in range(n - 1):
            blocks[r][r + 1] = I
    return block_matrix(blocks)


def tau_conjugate(mat: Matrix, A: IteratedAlgebra) -> Matrix:
    return mat_map(mat, A.tau)


# -- zero divisor search ------------------------------------------------------


@dataclass(frozen=True)
class ZeroDivisorWitness:
    x: AElement
    y: AElement
    coefficients: tuple[int, ...]


@dataclass(frozen=True)
class NotFound:
    box: int
    support: tuple[tuple[int, int], ...]
    checked: int
    exact_checks: int = 0


def full_support(A: IteratedAlgebra) -> tuple[tuple[int, int], ...]:
    """All basis positions (i, l) standing for f^i e^l."""
    return tuple((i, l) for i in range(A.n) for l in range(A.m))


def _basis_element(A: IteratedAlgebra, pos: tuple[int, int]) -> AElement:
    i, l = pos
    coords = [A.D.zero] * A.n
    coords[i] = A.D.e_power(l)
    return A.element(coords)


def _lex_vectors(size: int, box: int):
    """Nonzero integer vectors in [-box, box]^size with first nonzero entry positive, lexicographic."""
    rng = range(-box, box + 1)
    for vec in itertools.product(rng, repeat=size):
        for v in vec:
            if v:
                if v > 0:
                    yield vec
                break


def zero_divisor_search(
    A: IteratedAlgebra,
    box: int = 1,
    support: Sequence[tuple[int, int]] | None = None,
    chunk: int = 4096,
    rel_tol: float = 1e-8,
) -> ZeroDivisorWitness | NotFound:
    """Look for a left zero divisor x with small integer coordinates.

    Every candidate x is screened by the singular values of the float image of
    Lambda(x); anything not clearly invertible gets an exact determinant, and a
    zero determinant is turned into an exact pair (x, y) with xy = 0.
    """
    if box < 1:
        raise ValueError("box must be at least 1")
    if A.variant is IterVariant.RIGHT and not A.d.in_K():
        raise ValueError("zero divisor search for the right variant needs d in K")
    rep = A
    support = tuple(full_support(A) if support is None else support)
    basis_elems = [_basis_element(rep, p) for p in support]
    basis_float = np.stack([to_complex(_lambda_blocks(b)) for b in basis_elems])
    checked = 0
    exact_checks = 0
    gen = _lex_vectors(len(support), box)
    while True:
        batch = list(itertools.islice(gen, chunk))
        if not batch:
            break
        coeffs = np.array(batch, dtype=float)
        mats = np.tensordot(coeffs, basis_float, axes=(1, 0))
        sv = np.linalg.svd(mats, compute_uv=False)
        suspicious = np.nonzero(sv[:, -1] <= rel_tol * sv[:, 0])[0]
        for idx in suspicious:
            exact_checks += 1
            vec = batch[idx]
            x = rep.zero
            for c, b in zip(vec, basis_elems):
                if c:
                    x = x + AElement(rep, tuple(bc * c for bc in b.coords))
            lam = _lambda_blocks(x)
            if not det(lam).is_zero():
                continue
            ker = nullspace_vector(lam)
            assert ker is not None
            y = rep.from_phi(ker)
            xa = AElement(A, x.coords)
            ya = AElement(A, y.coords)
            if not a_mul(xa, ya).is_zero():
                raise AssertionError("kernel vector of Lambda(x) is not annihilated by x")
            return ZeroDivisorWitness(xa, ya, tuple(vec))
        checked += len(batch)
    return NotFound(box, support, checked, exact_checks)
