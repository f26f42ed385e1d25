"""Twisted polynomials D[t; phi] with t a = phi(a) t, right/left division, S_f products
and bounded searches for factorizations of t^n - d."""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .cyclic_algebra import CyclicAlgebra, DElement, d_inverse, d_mul, is_division_quaternion_definite, left_regular
from .cyclotomic import Automorphism
from .iterated import AElement, IteratedAlgebra
from .linalg import rational_nullspace, to_complex


class SkewPoly:
    """p = sum_i coeffs[i] t^i (left coefficients) with t a = twist(a) t.

    ``twist`` is an automorphism of K applied coefficientwise to D; it must
    fix c so that it is an automorphism of D.
    """

    __slots__ = ("D", "twist", "coeffs")

    def __init__(self, D: CyclicAlgebra, twist: Automorphism, coeffs: Sequence[DElement]) -> None:
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.D = D
        self.twist = twist
        self.coeffs = tuple(coeffs)

    @classmethod
    def monomial(cls, D: CyclicAlgebra, twist: Automorphism, a: DElement, k: int) -> SkewPoly:
        return cls(D, twist, [D.zero] * k + [a])

    def __repr__(self) -> str:
        return f"SkewPoly(deg={self.degree}, twist={self.twist.exponent})"

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> DElement:
        return self.coeffs[-1]

    def coeff(self, i: int) -> DElement:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.D.zero

    def _check(self, other: SkewPoly) -> None:
        if other.twist != self.twist:
            raise ValueError("twist mismatch")

    def __eq__(self, other) -> bool:
        if not isinstance(other, SkewPoly):
            return NotImplemented
        return self.twist == other.twist and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.twist.exponent, self.coeffs))

    def __add__(self, other: SkewPoly) -> SkewPoly:
        self._check(other)
        k = max(len(self.coeffs), len(other.coeffs))
        return SkewPoly(self.D, self.twist, [self.coeff(i) + other.coeff(i) for i in range(k)])

    def __neg__(self) -> SkewPoly:
        return SkewPoly(self.D, self.twist, [-a for a in self.coeffs])

    def __sub__(self, other: SkewPoly) -> SkewPoly:
        return self + (-other)

    def __mul__(self, other: SkewPoly) -> SkewPoly:
        return sp_mul(self, other)

    def twisted(self, a: DElement, power: int) -> DElement:
        """twist^power(a), negative powers allowed."""
        if power == 0:
            return a
        return a.map(self.twist ** power)


def sp_mul(p: SkewPoly, q: SkewPoly) -> SkewPoly:
    """(a t^i)(b t^j) = a twist^i(b) t^(i+j)."""
    p._check(q)
    if p.is_zero() or q.is_zero():
        return SkewPoly(p.D, p.twist, [])
    out = [p.D.zero] * (p.degree + q.degree + 1)
    for i, a in enumerate(p.coeffs):
        if a.is_zero():
            continue
        for j, b in enumerate(q.coeffs):
            if b.is_zero():
                continue
            out[i + j] = out[i + j] + d_mul(a, p.twisted(b, i))
    return SkewPoly(p.D, p.twist, out)


def right_divide(g: SkewPoly, f: SkewPoly) -> tuple[SkewPoly, SkewPoly]:
    """(q, r) with g = q f + r and deg r < deg f."""
    g._check(f)
    if f.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lead_inv = d_inverse(f.lead())
    n = f.degree
    q = [g.D.zero] * max(g.degree - n + 1, 1)
    r = g
    while r.degree >= n:
        k = r.degree
        # (c t^(k-n)) (b t^n) has leading coefficient c twist^(k-n)(b)
        c = d_mul(r.lead(), f.twisted(lead_inv, k - n))
        q[k - n] = q[k - n] + c
        r = r - sp_mul(SkewPoly.monomial(g.D, g.twist, c, k - n), f)
        if r.degree >= k:
            raise ArithmeticError("leading term did not cancel")
    return SkewPoly(g.D, g.twist, q), r


def left_divide(g: SkewPoly, f: SkewPoly) -> tuple[SkewPoly, SkewPoly]:
    """(q, r) with g = f q + r and deg r < deg f."""
    g._check(f)
    if f.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lead_inv = d_inverse(f.lead())
    n = f.degree
    q = [g.D.zero] * max(g.degree - n + 1, 1)
    r = g
    while r.degree >= n:
        k = r.degree
        # (b t^n)(c t^(k-n)) has leading coefficient b twist^n(c)
        c = f.twisted(d_mul(lead_inv, r.lead()), -n)
        q[k - n] = q[k - n] + c
        r = r - sp_mul(f, SkewPoly.monomial(g.D, g.twist, c, k - n))
        if r.degree >= k:
            raise ArithmeticError("leading term did not cancel")
    return SkewPoly(g.D, g.twist, q), r


def t_power_minus(D: CyclicAlgebra, twist: Automorphism, n: int, d: DElement) -> SkewPoly:
    """t^n - d."""
    return SkewPoly(D, twist, [-d] + [D.zero] * (n - 1) + [D.one])


def sf_mul(g: SkewPoly, h: SkewPoly, f: SkewPoly, side: str = "right") -> SkewPoly:
    """g o h = g h mod_r f (``side="left"`` uses the left remainder instead)."""
    if g.degree >= f.degree or h.degree >= f.degree:
        raise ValueError("operands must have degree below deg f")
    if f.degree < 1:
        raise ValueError("f must have positive degree")
    prod = sp_mul(g, h)
    if side == "right":
        return right_divide(prod, f)[1]
    if side == "left":
        return left_divide(prod, f)[1]
    raise ValueError("side must be 'right' or 'left'")


# -- identification with the iterated algebras --------------------------------


def sf_twist(A: IteratedAlgebra) -> Automorphism:
    """The twist tau^-1 of D[t; tau~^-1]."""
    return A.tau.inverse()


def to_skew(x: AElement, twist: Automorphism | None = None) -> SkewPoly:
    """f^i x_i  ->  t^i x_i = twist^i(x_i) t^i."""
    A = x.algebra
    twist = sf_twist(A) if twist is None else twist
    coeffs = [c if i == 0 else c.map(twist ** i) for i, c in enumerate(x.coords)]
    return SkewPoly(A.D, twist, coeffs)


def from_skew(p: SkewPoly, A: IteratedAlgebra) -> AElement:
    coords = [p.coeff(i) if i == 0 else p.coeff(i).map(p.twist ** (-i)) for i in range(A.n)]
    return A.element(coords)


def sf_product_for(A: IteratedAlgebra, x: AElement, y: AElement, twist: Automorphism | None = None, side: str = "right") -> AElement:
    """x o y computed in S_f, f = t^n - d, and mapped back to A."""
    twist = sf_twist(A) if twist is None else twist
    f = t_power_minus(A.D, twist, A.n, A.d)
    return from_skew(sf_mul(to_skew(x, twist), to_skew(y, twist), f, side), A)


# -- numeric slot model of D ----------------------------------------------------


class SlotModel:
    """D -> prod_s Mat_m(C), z -> (lambda(tau~^s z))_s under the fixed complex embedding.

    tau~ acts as a cyclic shift of slots; slot 0 alone is injective.  Used only
    as a filter; every hit is confirmed exactly.
    """

    def __init__(self, D: CyclicAlgebra, tau: Automorphism, n: int) -> None:
        self.D = D
        self.tau = tau
        self.n = n
        self.q_basis: list[DElement] = []
        for l in range(D.m):
            for b in D.tower.k_basis:
                coords = [D.field.zero] * D.m
                coords[l] = b
                self.q_basis.append(D.element(coords))
        self.basis_slots = np.stack([self.slots(b) for b in self.q_basis])

    def slots(self, z: DElement) -> np.ndarray:
        return np.stack([to_complex(left_regular(z.map(self.tau ** s))) for s in range(self.n)])

    def q_coords(self, z: DElement) -> list[Fraction]:
        """Exact coordinates of z over ``q_basis``."""
        span = self.D.tower.k_span
        out: list[Fraction] = []
        for x in z.coords:
            c = span.coordinates(x)
            if c is None:
                raise ValueError("coefficient outside K")
            out.extend(c)
        return out

    def from_coefficients(self, coeffs: Sequence) -> DElement:
        z = self.D.zero
        for c, b in zip(coeffs, self.q_basis):
            if c:
                z = z + b * c
        return z

    @staticmethod
    def shift(arr: np.ndarray, k: int) -> np.ndarray:
        """tau~^k on a batch (..., n, m, m)."""
        return np.roll(arr, -k, axis=-3)


def _box_chunks(size: int, box: int, chunk: int) -> Iterator[np.ndarray]:
    """All integer vectors in [-box, box]^size except 0, in lexicographic chunks."""
    base = 2 * box + 1
    total = base ** size
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = np.empty((len(idx), size), dtype=np.int64)
        rem = idx.copy()
        for pos in range(size - 1, -1, -1):
            digits[:, pos] = rem % base
            rem //= base
        vecs = digits - box
        keep = np.any(vecs != 0, axis=1)
        yield vecs[keep]


@dataclass(frozen=True)
class ProductWitness:
    """d = z tau~(z) ... tau~^(n-1)(z); t - tau~^(n-1)(z) right-divides t^n - d."""

    z: DElement
    coefficients: tuple[int, ...]


@dataclass(frozen=True)
class QuadraticWitness:
    """t^2 - z1 t - z0 right-divides t^4 - d."""

    z0: DElement
    z1: DElement
    coefficients: tuple[int, ...]


@dataclass(frozen=True)
class SearchBound:
    """No witness among the integer vectors in [-box, box] over the Q-basis of D."""

    box: int
    candidates: int
    exact_checks: int
    completed_over: str = ""
    unresolved: int = 0


def twisted_norm(z: DElement, tau: Automorphism, n: int) -> DElement:
    """z tau~(z) ... tau~^(n-1)(z)."""
    out = z
    for s in range(1, n):
        out = d_mul(out, z.map(tau ** s))
    return out


def linear_right_factor(z: DElement, tau: Automorphism, n: int) -> SkewPoly:
    """t - tau~^(n-1)(z) in D[t; tau~^-1]."""
    D = z.algebra
    return SkewPoly(D, tau.inverse(), [-z.map(tau ** (n - 1)), D.one])


def quadratic_conditions(z0: DElement, z1: DElement, d: DElement, tau: Automorphism) -> tuple[DElement, DElement]:
    """Remainder equations of t^4 - d modulo t^2 - z1 t - z0 in D[t; tau~^-1].

    Reducing t^2 -> z1 t + z0 twice leaves (first) t + (second - d); the
    quadratic right-divides t^4 - d iff first == 0 and second == d.
    """
    t2 = tau ** 2
    t3 = tau ** 3
    z1_2, z1_3 = z1.map(t2), z1.map(t3)
    first = d_mul(d_mul(z1_2, z1_3), z1) + d_mul(z0.map(t2), z1) + d_mul(z1_2, z0.map(t3))
    second = d_mul(d_mul(z1_2, z1_3), z0) + d_mul(z0.map(t2), z0)
    return first, second


def quadratic_right_factor(z0: DElement, z1: DElement, tau: Automorphism) -> SkewPoly:
    """t^2 - z1 t - z0 in D[t; tau~^-1]."""
    D = z0.algebra
    return SkewPoly(D, tau.inverse(), [-z0, -z1, D.one])


def _solve_z1(model: SlotModel, z0: DElement, d: DElement, tau: Automorphism) -> tuple[DElement | None, bool]:
    """A nonzero z1 with (z0, z1) solving the quadratic equations, given z0 != 0.

    With Q = (d - tau~^2(z0) z0) z0^-1 the second equation reads
    tau~^2(z1) tau~^3(z1) = Q, and substituting it into the first one gives the
    Q-linear equation (Q + tau~^2(z0)) z1 + tau~^2(z1) tau~^3(z0) = 0.  On the
    kernel of that map the second equation is a quadratic system over Q, which
    is settled with a Groebner basis.  Returns (z1 or None, resolved); resolved
    is False only when the system has infinitely many complex solutions.
    """
    t2, t3 = tau ** 2, tau ** 3
    Q = d_mul(d - d_mul(z0.map(t2), z0), d_inverse(z0))
    left = Q + z0.map(t2)
    z0_3 = z0.map(t3)
    columns = [model.q_coords(d_mul(left, b) + d_mul(b.map(t2), z0_3)) for b in model.q_basis]
    rows = [[col[j] for col in columns] for j in range(len(columns))]
    kernel = rational_nullspace(rows)
    if not kernel:
        return None, True
    if Q.is_zero():
        # in a division algebra tau~^2(z1) tau~^3(z1) = 0 forces z1 = 0
        return None, is_division_quaternion_definite(model.D)
    return _kernel_point(model, [model.from_coefficients(v) for v in kernel], Q, t2, t3)


def _kernel_point(model: SlotModel, kernel: list[DElement], Q: DElement, t2: Automorphism, t3: Automorphism) -> tuple[DElement | None, bool]:
    """Rational z1 in the span of ``kernel`` with tau~^2(z1) tau~^3(z1) = Q."""
    xs = sympy.symbols(f"x0:{len(kernel)}")
    polys = [-sympy.Rational(q.numerator, q.denominator) for q in model.q_coords(Q)]
    shifted = [(v.map(t2), v.map(t3)) for v in kernel]
    for a, (va, _) in enumerate(shifted):
        for b, (_, vb) in enumerate(shifted):
            for j, c in enumerate(model.q_coords(d_mul(va, vb))):
                if c:
                    polys[j] += sympy.Rational(c.numerator, c.denominator) * xs[a] * xs[b]
    polys = [p for p in (sympy.expand(p) for p in polys) if p != 0]
    basis = sympy.groebner(polys, *xs, order="grevlex")
    if list(basis.exprs) == [1]:
        return None, True
    if not basis.is_zero_dimensional:
        return None, False
    for sol in sympy.solve_poly_system(polys, *xs) or []:
        if all(v.is_rational for v in sol):
            z1 = model.D.zero
            for v, basis_vec in zip(sol, kernel):
                z1 = z1 + basis_vec * Fraction(int(v.p), int(v.q))
            return z1, True
    return None, True


def _slot_prod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.matmul(a, b)


def product_search(
    D: CyclicAlgebra,
    tau: Automorphism,
    n: int,
    d: DElement,
    box: int = 1,
    chunk: int = 1 << 15,
    rel_tol: float = 1e-7,
) -> ProductWitness | SearchBound:
    """Exhaustive bounded search for z with d = z tau~(z) ... tau~^(n-1)(z)."""
    model = SlotModel(D, tau, n)
    target = model.slots(d)[0]
    size = len(model.q_basis)
    basis0 = model.basis_slots  # (size, n, m, m)
    candidates = 0
    exact = 0
    for vecs in _box_chunks(size, box, chunk):
        Z = np.tensordot(vecs.astype(float), basis0, axes=(1, 0))  # (B, n, m, m)
        prod = Z[:, 0]
        for s in range(1, n):
            prod = _slot_prod(prod, Z[:, s])
        scale = np.abs(prod).max(axis=(1, 2)) + np.abs(target).max() + 1.0
        resid = np.abs(prod - target).max(axis=(1, 2))
        hits = np.nonzero(resid <= rel_tol * scale)[0]
        for h in hits:
            exact += 1
            z = model.from_coefficients(vecs[h].tolist())
            if twisted_norm(z, tau, n) == d:
                return ProductWitness(z, tuple(int(v) for v in vecs[h]))
        candidates += len(vecs)
    return SearchBound(box, candidates, exact)


def _quat_left(W: np.ndarray) -> np.ndarray:
    """Real 4x4 matrices of y -> W y on quaternion-form 2x2 blocks [[p, -conj q], [q, conj p]],
    coordinates (Re p, Im p, Re q, Im q)."""
    x0, x1 = W[..., 0, 0].real, W[..., 0, 0].imag
    x2, x3 = W[..., 1, 0].real, W[..., 1, 0].imag
    rows = [[x0, -x1, -x2, -x3], [x1, x0, x3, -x2], [x2, -x3, x0, x1], [x3, x2, -x1, x0]]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def _quat_right(W: np.ndarray) -> np.ndarray:
    """Real 4x4 matrices of y -> y W, same coordinates as ``_quat_left``."""
    a, b = W[..., 0, 0].real, W[..., 0, 0].imag
    c, e = W[..., 1, 0].real, W[..., 1, 0].imag
    rows = [[a, -b, -c, -e], [b, a, -e, c], [c, e, a, -b], [e, -c, b, a]]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def quadratic_search(
    D: CyclicAlgebra,
    tau: Automorphism,
    d: DElement,
    box: int = 1,
    chunk: int = 1 << 11,
    rel_tol: float = 1e-9,
) -> QuadraticWitness | SearchBound:
    """Search z0 in the box for a monic quadratic right factor t^2 - z1 t - z0 of t^4 - d.

    For each z0 every z1 in D is covered: z1 = 0 needs tau~^2(z0) z0 = d,
    and z1 != 0 needs the linear map of ``_solve_z1`` to be singular, which is
    screened by float singular values and then settled exactly.  z0 = 0 would
    force 0 = d.
    """
    n = 4
    model = SlotModel(D, tau, n)
    dslot = model.slots(d)
    basis = model.basis_slots  # (size, n, m, m)
    size = len(model.q_basis)
    candidates = 0
    exact = 0
    unresolved = 0

    def confirm(z0: DElement, z1: DElement, vec) -> QuadraticWitness | None:
        first, second = quadratic_conditions(z0, z1, d, tau)
        if not (first.is_zero() and second == d):
            return None
        f = t_power_minus(D, tau.inverse(), n, d)
        if not right_divide(f, quadratic_right_factor(z0, z1, tau))[1].is_zero():
            raise AssertionError("quadratic conditions hold but the factor does not divide")
        return QuadraticWitness(z0, z1, tuple(int(v) for v in vec))

    for vecs in _box_chunks(size, box, chunk):
        Z0 = np.tensordot(vecs.astype(float), basis, axes=(1, 0))
        s2 = SlotModel.shift(Z0, 2)
        s3 = SlotModel.shift(Z0, 3)
        half = np.matmul(s2, Z0)
        # z1 = 0 branch
        resid = np.abs(half - dslot[None])[:, 0].max(axis=(1, 2))
        scale = np.abs(half)[:, 0].max(axis=(1, 2)) + np.abs(dslot).max() + 1.0
        hits = set(np.nonzero(resid <= 1e-7 * scale)[0].tolist())
        # z1 != 0 branch.  The map z1 -> A z1 + tau~^2(z1) B commutes with right
        # multiplication by the tau^2-fixed part of the centre, so it is singular
        # iff its block on slots 0 and 2 (one real place of that subfield) is.
        A = np.matmul(dslot[None] - half, np.linalg.inv(Z0)) + s2
        mats = np.empty((len(vecs), 8, 8))
        mats[:, :4, :4] = _quat_left(A[:, 0])
        mats[:, :4, 4:] = _quat_right(s3[:, 0])
        mats[:, 4:, :4] = _quat_right(s3[:, 2])
        mats[:, 4:, 4:] = _quat_left(A[:, 2])
        # |det| <= (s_min / s_max) ||M||_F^8, so this prefilter keeps every near-singular block
        fro8 = np.square(mats).sum(axis=(1, 2)) ** 4
        rough = np.nonzero(np.abs(np.linalg.det(mats)) <= rel_tol * fro8)[0]
        if len(rough):
            sv = np.linalg.svd(mats[rough], compute_uv=False)
            hits.update(rough[sv[:, -1] <= rel_tol * sv[:, 0]].tolist())
        for h in sorted(hits):
            exact += 1
            z0 = model.from_coefficients(vecs[h].tolist())
            if d_mul(z0.map(tau ** 2), z0) == d:
                w = confirm(z0, D.zero, vecs[h])
                if w is not None:
                    return w
            z1, resolved = _solve_z1(model, z0, d, tau)
            if not resolved:
                unresolved += 1
            elif z1 is not None:
                w = confirm(z0, z1, vecs[h])
                if w is not None:
                    return w
        candidates += len(vecs)
    return SearchBound(box, candidates, exact, completed_over="z1 in D", unresolved=unresolved)


def reducibility_search(A: IteratedAlgebra, box: int = 1) -> ProductWitness | QuadraticWitness | SearchBound:
    """Bounded search for a factorization witness of t^n - d, n in {2, 3, 4}."""
    n = A.n
    if n not in (2, 3, 4):
        raise ValueError(f"no factorization criterion for n = {n}")
    res = product_search(A.D, A.tau, n, A.d, box)
    if n != 4 or not isinstance(res, SearchBound):
        return res
    quad = quadratic_search(A.D, A.tau, A.d, box)
    if isinstance(quad, QuadraticWitness):
        return quad
    return SearchBound(
        box,
        res.candidates + quad.candidates,
        res.exact_checks + quad.exact_checks,
        "z1 in D",
        quad.unresolved,
    )
