"""Exact arithmetic in a cyclotomic field Q(zeta_N).

Elements are dense rational coefficient vectors over the power basis
1, zeta, ..., zeta^(phi(N)-1).  Internally a vector is stored as a tuple of
integer numerators over one positive common denominator, which keeps the
hot loops (products, automorphisms) in machine-friendly integer arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC

import mpmath
import numpy as np

Rational = Fraction

__all__ = [
    "Rational",
    "CycloField",
    "CycloElement",
    "Automorphism",
    "cyclotomic_polynomial",
    "cyclo_mul",
    "cyclo_inv",
    "apply_aut",
    "embed_complex",
]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, constant term first."""
    if n < 1:
        raise ValueError("conductor must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _divide_monic(poly, cyclotomic_polynomial(d))
    return tuple(poly)


def _divide_monic(num: list[int], den: tuple[int, ...]) -> list[int]:
    num = list(num)
    dd = len(den) - 1
    quot = [0] * (len(num) - dd)
    for k in range(len(num) - 1, dd - 1, -1):
        q = num[k]
        quot[k - dd] = q
        if q:
            for j, c in enumerate(den):
                num[k - dd + j] -= q * c
    if any(num[:dd]):
        raise ArithmeticError("inexact polynomial division")
    return quot


def _normalize(num: list[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        num = [-a for a in num]
        den = -den
    g = math.gcd(den, *num)
    if g > 1:
        num = [a // g for a in num]
        den //= g
    return tuple(num), den


class CycloField:
    """The field Q(zeta_N); one shared instance per conductor."""

    _cache: dict[int, CycloField] = {}

    def __new__(cls, conductor: int) -> CycloField:
        if conductor in cls._cache:
            return cls._cache[conductor]
        self = super().__new__(cls)
        self._setup(conductor)
        cls._cache[conductor] = self
        return self

    def _setup(self, conductor: int) -> None:
        if conductor < 1:
            raise ValueError("conductor must be positive")
        # Q(zeta_N) = Q(zeta_2N) for odd N; keep N as given, it only fixes the embedding.
        self.conductor = conductor
        self.minimal_polynomial = cyclotomic_polynomial(conductor)
        self.degree = len(self.minimal_polynomial) - 1
        deg = self.degree
        # sparse reductions of zeta^j for 0 <= j < N
        powers: list[tuple[tuple[int, int], ...]] = []
        vec = [0] * deg
        vec[0] = 1
        for _ in range(conductor):
            powers.append(tuple((i, c) for i, c in enumerate(vec) if c))
            top = vec[-1]
            vec = [0] + vec[:-1]
            if top:
                for i in range(deg):
                    vec[i] -= top * self.minimal_polynomial[i]
        self._powers = powers
        self.units = tuple(k for k in range(1, conductor + 1) if math.gcd(k, conductor) == 1)
        if conductor == 1:
            self.units = (1,)
        angles = 2 * np.pi * np.arange(deg) / conductor
        self._numeric_basis = np.exp(1j * angles)
        self._zero = CycloElement._raw(self, (0,) * deg, 1)
        self._one = CycloElement._raw(self, (1,) + (0,) * (deg - 1), 1)

    def __repr__(self) -> str:
        return f"CycloField({self.conductor})"

    def __reduce__(self):
        return (CycloField, (self.conductor,))

    @property
    def zero(self) -> CycloElement:
        return self._zero

    @property
    def one(self) -> CycloElement:
        return self._one

    def zeta(self, k: int = 1) -> CycloElement:
        """zeta_N^k for any integer k."""
        num = [0] * self.degree
        for i, c in self._powers[k % self.conductor]:
            num[i] = c
        return CycloElement._raw(self, tuple(num), 1)

    def __call__(self, value) -> CycloElement:
        if isinstance(value, CycloElement):
            if value.field is not self:
                raise ValueError("conductor mismatch")
            return value
        if isinstance(value, (int, _RationalABC)):
            q = Fraction(value)
            return CycloElement._raw(
                self, (q.numerator,) + (0,) * (self.degree - 1), q.denominator
            )
        if isinstance(value, (list, tuple)):
            return self.from_coeffs(value)
        raise TypeError(f"cannot coerce {type(value).__name__} into {self!r}")

    def from_coeffs(self, coeffs) -> CycloElement:
        if len(coeffs) != self.degree:
            raise ValueError(f"expected {self.degree} coefficients, got {len(coeffs)}")
        qs = [Fraction(c) for c in coeffs]
        den = math.lcm(*(q.denominator for q in qs)) if qs else 1
        num = [q.numerator * (den // q.denominator) for q in qs]
        return CycloElement._make(self, num, den)

    def automorphism(self, k: int) -> Automorphism:
        return Automorphism(self, k)

    @property
    def conjugation(self) -> Automorphism:
        """Complex conjugation under the embedding zeta -> exp(2 pi i / N)."""
        return Automorphism(self, self.conductor - 1)


class CycloElement:
    """An immutable element of Q(zeta_N)."""

    __slots__ = ("field", "_num", "_den", "_hash")

    field: CycloField

    def __init__(self, field: CycloField, coeffs) -> None:
        other = field.from_coeffs(coeffs)
        self.field = field
        self._num = other._num
        self._den = other._den
        self._hash = None

    @classmethod
    def _raw(cls, field: CycloField, num: tuple[int, ...], den: int) -> CycloElement:
        obj = object.__new__(cls)
        obj.field = field
        obj._num = num
        obj._den = den
        obj._hash = None
        return obj

    @classmethod
    def _make(cls, field: CycloField, num, den: int) -> CycloElement:
        n, d = _normalize(list(num), den)
        return cls._raw(field, n, d)

    # -- inspection -------------------------------------------------------

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        d = self._den
        return tuple(Fraction(a, d) for a in self._num)

    @property
    def numerators(self) -> tuple[int, ...]:
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    def is_zero(self) -> bool:
        return not any(self._num)

    def __bool__(self) -> bool:
        return any(self._num)

    def is_rational(self) -> bool:
        return not any(self._num[1:])

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(self._num[0], self._den)

    def __repr__(self) -> str:
        terms = []
        for i, q in enumerate(self.coeffs):
            if q:
                terms.append(f"{q}" if i == 0 else f"{q}*z^{i}")
        body = " + ".join(terms) if terms else "0"
        return f"<Q(zeta_{self.field.conductor}): {body}>"

    def __eq__(self, other) -> bool:
        if isinstance(other, CycloElement):
            return (
                self.field is other.field
                and self._den == other._den
                and self._num == other._num
            )
        if isinstance(other, (int, _RationalABC)):
            return self.is_rational() and Fraction(self._num[0], self._den) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.field.conductor, self._num, self._den))
        return self._hash

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> CycloElement:
        if isinstance(other, CycloElement):
            if other.field is not self.field:
                raise ValueError(
                    f"conductor mismatch: {self.field.conductor} vs {other.field.conductor}"
                )
            return other
        if isinstance(other, (int, _RationalABC)):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        da, db = self._den, other._den
        if da == db:
            return CycloElement._make(self.field, [a + b for a, b in zip(self._num, other._num)], da)
        return CycloElement._make(
            self.field, [a * db + b * da for a, b in zip(self._num, other._num)], da * db
        )

    __radd__ = __add__

    def __neg__(self) -> CycloElement:
        return CycloElement._raw(self.field, tuple(-a for a in self._num), self._den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            return CycloElement._make(self.field, [a * other for a in self._num], self._den)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return cyclo_mul(self, other)

    __rmul__ = __mul__

    def inverse(self) -> CycloElement:
        return cyclo_inv(self)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_rational():
            q = other.rational()
            if q == 0:
                raise ZeroDivisionError("division by zero in cyclotomic field")
            return CycloElement._make(
                self.field, [a * q.denominator for a in self._num], self._den * q.numerator
            )
        return self * cyclo_inv(other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * cyclo_inv(self)

    def __pow__(self, exponent: int) -> CycloElement:
        if exponent < 0:
            return cyclo_inv(self) ** (-exponent)
        result = self.field.one
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conj(self) -> CycloElement:
        return apply_aut(self.field.conjugation, self)

    def to_complex(self) -> complex:
        """Double-precision value under zeta -> exp(2 pi i / N)."""
        vec = np.array(self._num, dtype=float) / self._den
        return complex(vec @ self.field._numeric_basis)

    def __complex__(self) -> complex:
        return self.to_complex()


def _check_same(a: CycloElement, b: CycloElement) -> None:
    if a.field is not b.field:
        raise ValueError(f"conductor mismatch: {a.field.conductor} vs {b.field.conductor}")


def cyclo_mul(a: CycloElement, b: CycloElement) -> CycloElement:
    """Exact product reduced modulo the cyclotomic polynomial."""
    _check_same(a, b)
    field = a.field
    deg = field.degree
    prod = [0] * (2 * deg - 1)
    bn = [(j, y) for j, y in enumerate(b._num) if y]
    if not bn:
        return field.zero
    for i, x in enumerate(a._num):
        if x:
            for j, y in bn:
                prod[i + j] += x * y
    out = prod[:deg]
    powers = field._powers
    N = field.conductor
    for j in range(deg, 2 * deg - 1):
        c = prod[j]
        if c:
            for i, r in powers[j % N]:
                out[i] += c * r
    return CycloElement._make(field, out, a._den * b._den)


def _poly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        coef = a[-1] / lead
        q[shift] = coef
        for i, c in enumerate(b):
            a[shift + i] -= coef * c
        _poly_trim(a)
    return q, a


def _poly_sub_mul(a: list[Fraction], q: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = list(a) + [Fraction(0)] * max(0, len(q) + len(b) - 1 - len(a))
    for i, x in enumerate(q):
        if x:
            for j, y in enumerate(b):
                out[i + j] -= x * y
    return _poly_trim(out)


def cyclo_inv(a: CycloElement) -> CycloElement:
    """Inverse via the extended Euclidean algorithm against the minimal polynomial."""
    if a.is_zero():
        raise ZeroDivisionError("zero has no inverse")
    field = a.field
    if a.is_rational():
        return field(1 / a.rational())
    # invariant: s * a == r  (mod minimal polynomial)
    r0 = [Fraction(c) for c in field.minimal_polynomial]
    r1 = _poly_trim([Fraction(x) for x in a._num])
    s0: list[Fraction] = []
    s1 = [Fraction(a._den)]
    while len(r1) > 1:
        q, rem = _poly_divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, _poly_sub_mul(s0, q, s1)
    const = r1[0]
    coeffs = [c / const for c in s1] + [Fraction(0)] * (field.degree - len(s1))
    return field.from_coeffs(coeffs[: field.degree])


class Automorphism:
    """The automorphism zeta -> zeta^k of Q(zeta_N), gcd(k, N) = 1."""

    __slots__ = ("field", "exponent", "_images")

    def __init__(self, field: CycloField, k: int) -> None:
        N = field.conductor
        k %= N
        if N > 1 and math.gcd(k, N) != 1:
            raise ValueError(f"exponent {k} is not a unit modulo {N}")
        self.field = field
        self.exponent = k if N > 1 else 1
        self._images = [field._powers[(j * self.exponent) % N] for j in range(field.degree)]

    def __repr__(self) -> str:
        return f"Automorphism(N={self.field.conductor}, k={self.exponent})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Automorphism)
            and other.field is self.field
            and other.exponent == self.exponent
        )

    def __hash__(self) -> int:
        return hash((self.field.conductor, self.exponent))

    def __call__(self, a: CycloElement) -> CycloElement:
        return apply_aut(self, a)

    def __mul__(self, other: Automorphism) -> Automorphism:
        """Composition; the group is abelian so the order is immaterial."""
        if other.field is not self.field:
            raise ValueError("conductor mismatch")
        return Automorphism(self.field, self.exponent * other.exponent)

    def __pow__(self, r: int) -> Automorphism:
        N = self.field.conductor
        if r < 0:
            return Automorphism(self.field, pow(self.exponent, -1, N)) ** (-r)
        return Automorphism(self.field, pow(self.exponent, r, N))

    def inverse(self) -> Automorphism:
        return self ** -1

    def is_identity(self) -> bool:
        return self.exponent == 1


def apply_aut(phi: Automorphism, a: CycloElement) -> CycloElement:
    """Image of ``a`` under ``phi``; a ring homomorphism."""
    if phi.field is not a.field:
        raise ValueError("conductor mismatch")
    if phi.exponent == 1:
        return a
    out = [0] * a.field.degree
    for x, image in zip(a._num, phi._images):
        if x:
            for i, r in image:
                out[i] += x * r
    return CycloElement._make(a.field, out, a._den)


def embed_complex(a: CycloElement, precision: int = 64) -> mpmath.mpc:
    """Evaluate at zeta_N = exp(2 pi i / N) carrying ``precision`` mantissa bits."""
    N = a.field.conductor
    with mpmath.workprec(precision + 8):
        z = mpmath.expjpi(mpmath.mpf(2) / N)
        acc = mpmath.mpc(0)
        p = mpmath.mpc(1)
        for c in a._num:
            if c:
                acc += c * p
            p *= z
        acc /= a._den
    with mpmath.workprec(precision):
        return +acc
