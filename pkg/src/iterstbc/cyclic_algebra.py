"""The associative cyclic algebra D = K + eK + ... + e^(m-1)K with e^m = c and xe = e sigma(x)."""

from __future__ import annotations

import random
from collections.abc import Sequence

from .cyclotomic import Automorphism, CycloElement, apply_aut
from .linalg import Matrix, det, solve, to_complex
from .tower import TowerSpec


class CyclicAlgebra:
    """(K/F, sigma, c) over a tower; c must lie in F0 so that tau extends to D."""

    def __init__(self, tower: TowerSpec, c) -> None:
        c = tower.field(c)
        if c.is_zero():
            raise ValueError("c must be nonzero")
        if not tower.in_F0(c):
            raise ValueError("c must be fixed by both sigma and tau")
        self.tower = tower
        self.field = tower.field
        self.c = c
        self.m = tower.m
        self.sigma = tower.sigma
        self.tau = tower.tau
        self._sigma_pows = [tower.sigma ** j for j in range(self.m)]

    def __repr__(self) -> str:
        return f"CyclicAlgebra({self.tower.name or 'tower'}, m={self.m}, c={self.c})"

    def __eq__(self, other) -> bool:
        return isinstance(other, CyclicAlgebra) and other.tower is self.tower and other.c == self.c

    def __hash__(self) -> int:
        return hash((id(self.tower), self.c))

    # -- element constructors ----------------------------------------------

    def element(self, coords: Sequence) -> DElement:
        if len(coords) != self.m:
            raise ValueError(f"expected {self.m} coordinates, got {len(coords)}")
        return DElement(self, tuple(self.field(x) for x in coords))

    def scalar(self, k) -> DElement:
        """The image of k in K under K -> D."""
        return self.element([k] + [0] * (self.m - 1))

    @property
    def zero(self) -> DElement:
        return self.scalar(0)

    @property
    def one(self) -> DElement:
        return self.scalar(1)

    @property
    def e(self) -> DElement:
        if self.m == 1:
            return self.scalar(self.c)
        coords = [0] * self.m
        coords[1] = 1
        return self.element(coords)

    def e_power(self, j: int) -> DElement:
        """Basis element e^j, 0 <= j < m."""
        if not 0 <= j < self.m:
            raise ValueError(f"e^j is a basis element only for 0 <= j < {self.m}")
        coords = [0] * self.m
        coords[j] = 1
        return self.element(coords)

    def random(self, rng: random.Random, bound: int = 3, basis: Sequence[CycloElement] | None = None) -> DElement:
        basis = self.tower.k_basis if basis is None else basis
        return self.element([self.tower.random_element(rng, list(basis), bound) for _ in range(self.m)])

    def is_division_quaternion_definite(self) -> bool:
        return is_division_quaternion_definite(self)


class DElement:
    """x = x_0 + e x_1 + ... + e^(m-1) x_(m-1) with x_i in K."""

    __slots__ = ("algebra", "coords")

    def __init__(self, algebra: CyclicAlgebra, coords: tuple[CycloElement, ...]) -> None:
        self.algebra = algebra
        self.coords = coords

    def __repr__(self) -> str:
        return f"DElement({list(self.coords)!r})"

    def _check(self, other: DElement) -> None:
        if not isinstance(other, DElement) or (other.algebra is not self.algebra and other.algebra != self.algebra):
            raise ValueError("algebra mismatch")

    def __eq__(self, other) -> bool:
        if not isinstance(other, DElement):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other: DElement) -> DElement:
        self._check(other)
        return DElement(self.algebra, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: DElement) -> DElement:
        self._check(other)
        return DElement(self.algebra, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> DElement:
        return DElement(self.algebra, tuple(-a for a in self.coords))

    def __mul__(self, other) -> DElement:
        if isinstance(other, DElement):
            return d_mul(self, other)
        # right multiplication by a scalar of K
        k = self.algebra.field(other)
        return DElement(self.algebra, tuple(a * k for a in self.coords))

    def __rmul__(self, other) -> DElement:
        # k * e^i x_i = e^i sigma^i(k) x_i
        k = self.algebra.field(other)
        sp = self.algebra._sigma_pows
        return DElement(self.algebra, tuple(apply_aut(sp[i], k) * a for i, a in enumerate(self.coords)))

    def inverse(self) -> DElement:
        return d_inverse(self)

    def map(self, phi: Automorphism) -> DElement:
        return DElement(self.algebra, tuple(apply_aut(phi, a) for a in self.coords))

    def in_K(self) -> bool:
        return not any(self.coords[1:])


def d_mul(x: DElement, y: DElement) -> DElement:
    """(e^i a)(e^j b) = e^(i+j) sigma^j(a) b, with e^m = c."""
    x._check(y)
    alg = x.algebra
    m = alg.m
    out = [alg.field.zero] * m
    for j, b in enumerate(y.coords):
        if not b:
            continue
        sj = alg._sigma_pows[j]
        for i, a in enumerate(x.coords):
            if not a:
                continue
            term = apply_aut(sj, a) * b
            k = i + j
            if k >= m:
                k -= m
                term = term * alg.c
            out[k] = out[k] + term
    return DElement(alg, tuple(out))


def left_regular(x: DElement) -> Matrix:
    """lambda(x): column l holds the coordinates of x e^l."""
    alg = x.algebra
    m = alg.m
    mat = [[alg.field.zero] * m for _ in range(m)]
    for l in range(m):
        sl = alg._sigma_pows[l]
        for i, a in enumerate(x.coords):
            if not a:
                continue
            v = apply_aut(sl, a)
            r = i + l
            if r >= m:
                r -= m
                v = v * alg.c
            mat[r][l] = v
    return mat


# the name the rest of the package uses
lam = left_regular


def d_norm(x: DElement) -> CycloElement:
    """Reduced norm det(lambda(x)); lies in F."""
    return det(left_regular(x))


def d_inverse(x: DElement) -> DElement:
    if x.is_zero():
        raise ZeroDivisionError("zero has no inverse")
    alg = x.algebra
    rhs = [alg.field.one] + [alg.field.zero] * (alg.m - 1)
    return DElement(alg, tuple(solve(left_regular(x), rhs)))


def tau_tilde(x: DElement, power: int = 1) -> DElement:
    """Coefficientwise tau^power (negative powers allowed)."""
    if power % x.algebra.tower.n == 0:
        return x
    return x.map(x.algebra.tau ** power)


def is_division_quaternion_definite(alg: CyclicAlgebra) -> bool:
    """Sufficient test: m = 2, sigma is complex conjugation on K and c is totally negative.

    Then the norm form |x0|^2 - c |x1|^2 is positive definite at every
    embedding, so no nonzero element has zero norm.  False means "not decided
    here", not "has zero divisors".
    """
    t = alg.tower
    if alg.m != 2:
        return False
    conj = t.field.conjugation
    if any(apply_aut(conj, b) != apply_aut(t.sigma, b) for b in t.k_basis):
        return False
    for k in t.field.units:
        z = complex(apply_aut(t.field.automorphism(k), alg.c).to_complex())
        if not z.real < 0:
            return False
    return True


def lambda_complex(x: DElement):
    return to_complex(left_regular(x))
