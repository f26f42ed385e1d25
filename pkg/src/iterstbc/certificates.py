"""Division certificates for the iterated algebras, each with a three-way outcome.

A certificate never upgrades bounded search evidence to a proof.  PROVED is
only issued by exact membership tests; DISPROVED always carries an exact
witness; everything else is UNKNOWN (with the bound that was searched) or
INAPPLICABLE (the criterion's hypotheses do not hold).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .cyclic_algebra import d_mul, d_norm, is_division_quaternion_definite
from .cyclotomic import CycloElement
from .iterated import IteratedAlgebra, IterVariant, NotFound, ZeroDivisorWitness, a_mul, zero_divisor_search
from .serialize import to_jsonable
from .skew_poly import (
    ProductWitness,
    QuadraticWitness,
    SearchBound,
    from_skew,
    linear_right_factor,
    quadratic_right_factor,
    reducibility_search,
    right_divide,
    t_power_minus,
)
from .tower import rel_norm


class Verdict(enum.Enum):
    PROVED = "proved"
    PROVED_ASSUMING_NONNORM = "proved-assuming-nonnorm"
    DISPROVED = "disproved"
    UNKNOWN = "unknown"
    INAPPLICABLE = "inapplicable"
    RECORDED = "recorded"

    @property
    def is_proof(self) -> bool:
        return self in (Verdict.PROVED, Verdict.PROVED_ASSUMING_NONNORM)


@dataclass
class CertResult:
    name: str
    verdict: Verdict
    detail: str
    criterion: str
    bound: int | None = None
    witness: Any = None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "verdict": self.verdict.value,
            "detail": self.detail,
            "criterion": self.criterion,
            "bound": self.bound,
            "witness": to_jsonable(self.witness),
        }


@dataclass
class CertificateReport:
    algebra_id: str
    results: list[CertResult] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    soundness: dict = field(default_factory=dict)

    def get(self, name: str) -> CertResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def proved(self) -> bool:
        return any(r.verdict.is_proof for r in self.results)

    @property
    def disproved(self) -> bool:
        return any(r.verdict is Verdict.DISPROVED for r in self.results)

    @property
    def consistent(self) -> bool:
        if self.proved and self.disproved:
            return False
        return not self.soundness.get("zero_divisor_found", False)

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra_id,
            "results": [r.to_json() for r in self.results],
            "notes": list(self.notes),
            "soundness": to_jsonable(self.soundness),
            "consistent": self.consistent,
        }


# -- shared hypotheses ------------------------------------------------------------


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, int(n ** 0.5) + 1))


def prime_with_roots(A: IteratedAlgebra) -> bool:
    """n prime, and for n > 3 the base F0 must contain a primitive n-th root of unity."""
    if not _is_prime(A.n):
        return False
    return A.n in (2, 3) or A.D.tower.f0_has_primitive_root(A.n)


def _scalar_d(A: IteratedAlgebra) -> CycloElement | None:
    return A.d.coords[0] if A.d.in_K() else None


def _in_F0(A: IteratedAlgebra, a: CycloElement) -> bool:
    t = A.D.tower
    return t.in_F(a) and A.tau(a) == a


def _in_L(A: IteratedAlgebra, a: CycloElement) -> bool:
    return A.D.tower.in_K(a) and A.tau(a) == a


def algebra_id(A: IteratedAlgebra) -> str:
    coords = [[str(c) for c in x.coeffs] for x in A.d.coords]
    return f"{A.D.tower.name or 'tower'}:{A.variant.value}:n={A.n}:d={coords}"


ROOTS_TEXT = "n prime, with a primitive n-th root of unity in F0 when n > 3"


# -- individual certificates -----------------------------------------------------


def cert_dm_not_in_F0(A: IteratedAlgebra) -> CertResult:
    name = "d_power_outside_F0"
    crit = f"{ROOTS_TEXT}; d in F minus F0 with d^m not in F0 gives a division algebra (left iteration)"
    if not prime_with_roots(A):
        return CertResult(name, Verdict.INAPPLICABLE, "n does not satisfy the prime/root-of-unity hypothesis", crit)
    k = _scalar_d(A)
    in_F = k is not None and A.D.tower.in_F(k)
    if A.variant is not IterVariant.LEFT and not in_F:
        return CertResult(name, Verdict.INAPPLICABLE, "criterion is stated for the left iteration; variants agree only for d in F", crit)
    if not in_F:
        return CertResult(name, Verdict.UNKNOWN, "d is not in F", crit)
    if _in_F0(A, k):
        return CertResult(name, Verdict.UNKNOWN, "d lies in F0", crit)
    if _in_F0(A, k ** A.m):
        return CertResult(name, Verdict.UNKNOWN, "d^m lies in F0", crit)
    return CertResult(name, Verdict.PROVED, "d in F minus F0 and d^m not in F0 (exact)", crit)


def cert_tau_dm(A: IteratedAlgebra) -> CertResult:
    name = "tau_moves_d_power"
    crit = f"{ROOTS_TEXT}; tau(d^m) != d^m gives a division algebra for d in F, or for d in K minus L (right iteration)"
    if not prime_with_roots(A):
        return CertResult(name, Verdict.INAPPLICABLE, "n does not satisfy the prime/root-of-unity hypothesis", crit)
    k = _scalar_d(A)
    if k is None:
        return CertResult(name, Verdict.INAPPLICABLE, "d is not in K", crit)
    in_F = A.D.tower.in_F(k)
    if not in_F:
        if A.variant is not IterVariant.RIGHT:
            return CertResult(name, Verdict.INAPPLICABLE, "needs d in F for this variant", crit)
        if _in_L(A, k):
            return CertResult(name, Verdict.INAPPLICABLE, "d lies in L, so tau fixes d^m", crit)
    dm = k ** A.m
    if A.tau(dm) != dm:
        return CertResult(name, Verdict.PROVED, "tau(d^m) != d^m (exact)", crit)
    return CertResult(name, Verdict.UNKNOWN, "tau fixes d^m", crit)


def cert_norm_not_in_F0(A: IteratedAlgebra) -> CertResult:
    name = "reduced_norm_outside_F0"
    crit = f"{ROOTS_TEXT}; reduced norm of d not in F0 gives a division algebra (right iteration)"
    if not prime_with_roots(A):
        return CertResult(name, Verdict.INAPPLICABLE, "n does not satisfy the prime/root-of-unity hypothesis", crit)
    k = _scalar_d(A)
    if A.variant is not IterVariant.RIGHT and not (k is not None and A.D.tower.in_F(k)):
        return CertResult(name, Verdict.INAPPLICABLE, "criterion is stated for the right iteration; variants agree only for d in F", crit)
    nrm = d_norm(A.d)
    if _in_F0(A, nrm):
        return CertResult(name, Verdict.UNKNOWN, f"reduced norm {nrm} lies in F0", crit, witness=nrm)
    return CertResult(name, Verdict.PROVED, "reduced norm of d is not fixed by tau (exact)", crit, witness=nrm)


# Non-norm facts shipped with the presets; see the README for the local argument.
KNOWN_NON_NORMS: dict[tuple[str, tuple[str, ...]], str] = {}


def _register_non_norms() -> None:
    from .tower import tower_6x3

    t = tower_6x3()
    omega = t.l_generators["omega"]
    KNOWN_NON_NORMS[(t.name, tuple(str(c) for c in omega.coeffs))] = (
        "omega is not a local norm at the primes above 7 (tame cubic ramification, omega has order 3 in F_7^*)"
    )


def norm_image_search(A: IteratedAlgebra, target: CycloElement, box: int) -> CycloElement | None:
    """x in K with integer k_basis coordinates in [-box, box] and N_{K/L}(x) = target."""
    t = A.D.tower
    basis = t.k_basis
    n = A.n
    emb = np.array([[complex((A.tau ** s)(b).to_complex()) for b in basis] for s in range(n)])  # (n, deg)
    goal = complex(target.to_complex())
    rng = range(-box, box + 1)
    vecs = np.array(list(itertools.product(rng, repeat=len(basis))), dtype=float)
    vals = vecs @ emb.T  # (N, n)
    prod = np.prod(vals, axis=1)
    scale = np.prod(np.abs(vals), axis=1) + abs(goal) + 1.0
    for idx in np.nonzero(np.abs(prod - goal) <= 1e-8 * scale)[0]:
        x = t.field.zero
        for c, b in zip(vecs[idx], basis):
            if c:
                x = x + b * int(c)
        if not x.is_zero() and rel_norm(x, A.tau, n) == target:
            return x
    return None


def cert_quaternion_deg3(A: IteratedAlgebra, box: int = 2) -> CertResult:
    name = "quaternion_cubic_nonnorm"
    crit = "m = 2, n = 3, right iteration, D a quaternion division algebra, d in L minus F0 and d not a norm from K to L gives a division algebra"
    if A.m != 2 or A.n != 3 or A.variant is not IterVariant.RIGHT:
        return CertResult(name, Verdict.INAPPLICABLE, "needs m = 2, n = 3 and the right iteration", crit)
    if not is_division_quaternion_definite(A.D):
        return CertResult(name, Verdict.INAPPLICABLE, "D is not certified to be a division algebra", crit)
    k = _scalar_d(A)
    if k is None or not _in_L(A, k) or _in_F0(A, k):
        return CertResult(name, Verdict.INAPPLICABLE, "d is not in L minus F0", crit)
    x = norm_image_search(A, k, box)
    if x is not None:
        return CertResult(name, Verdict.INAPPLICABLE, "precondition disproved: d is a norm from K", crit, box, witness=x)
    if not KNOWN_NON_NORMS:
        _register_non_norms()
    key = (A.D.tower.name, tuple(str(c) for c in k.coeffs))
    detail = f"no norm preimage with coordinates in [-{box}, {box}]"
    if key in KNOWN_NON_NORMS:
        detail += f"; preset non-norm: {KNOWN_NON_NORMS[key]}"
    return CertResult(name, Verdict.PROVED_ASSUMING_NONNORM, detail, crit, box)


def _criterion_exact(A: IteratedAlgebra) -> bool:
    """Whether t^n - d reducible <=> A not division is available for this algebra."""
    k = _scalar_d(A)
    d_in_F = k is not None and A.D.tower.in_F(k)
    if A.n == 2:
        return True
    if A.variant is not IterVariant.RIGHT and not d_in_F:
        return False
    return A.n == 4 or prime_with_roots(A)


def _zero_divisor_from_factor(A: IteratedAlgebra, h) -> tuple | None:
    """Turn a right factor h of t^n - d into x, y in A with xy = 0 (right iteration, or d in F)."""
    k = _scalar_d(A)
    if A.variant is not IterVariant.RIGHT and not (k is not None and A.D.tower.in_F(k)):
        return None
    f = t_power_minus(A.D, A.tau.inverse(), A.n, A.d)
    g, r = right_divide(f, h)
    if not r.is_zero():
        raise AssertionError("claimed factor does not divide t^n - d")
    x, y = from_skew(g, A), from_skew(h, A)
    if not a_mul(x, y).is_zero():
        raise AssertionError("factorization did not produce a zero divisor")
    return x, y


def cert_product_search(A: IteratedAlgebra, box: int = 1) -> CertResult:
    name = "factor_search"
    crit = (
        "A is division iff t^n - d has no nontrivial factor in D[t; tau~^-1]; for prime n (with roots of unity "
        "when n > 3) iff d != z tau~(z)...tau~^(n-1)(z); for n = 4 also no monic quadratic right factor"
    )
    if A.n not in (2, 3, 4):
        return CertResult(name, Verdict.INAPPLICABLE, f"no factorization criterion for n = {A.n}", crit)
    if not _criterion_exact(A):
        return CertResult(name, Verdict.INAPPLICABLE, "factor criterion describes this variant only for d in F", crit)
    res = reducibility_search(A, box)
    if isinstance(res, ProductWitness):
        h = linear_right_factor(res.z, A.tau, A.n)
        pair = _zero_divisor_from_factor(A, h)
        return CertResult(name, Verdict.DISPROVED, "d = z tau~(z)...tau~^(n-1)(z)", crit, box, witness={"z": res.z, "zero_divisor": pair})
    if isinstance(res, QuadraticWitness):
        h = quadratic_right_factor(res.z0, res.z1, A.tau)
        pair = _zero_divisor_from_factor(A, h)
        return CertResult(name, Verdict.DISPROVED, "t^2 - z1 t - z0 right-divides t^4 - d", crit, box, witness={"z0": res.z0, "z1": res.z1, "zero_divisor": pair})
    detail = f"no counterexample within bound (checked {res.candidates} candidates"
    if res.completed_over:
        detail += f", {res.completed_over} for each"
    detail += ")"
    if res.unresolved:
        detail += f"; {res.unresolved} candidates with a degenerate kernel were not settled"
    return CertResult(name, Verdict.UNKNOWN, detail, crit, box)


def cert_left_factor(A: IteratedAlgebra, product: CertResult) -> CertResult:
    name = "low_degree_non_zero_divisors"
    crit = "if d != z tau~(z)...tau~^(n-1)(z) for all z, no x = x0 + f x1 is a left zero divisor"
    if product.verdict is Verdict.DISPROVED:
        return CertResult(name, Verdict.UNKNOWN, "not recorded: a factor witness exists", crit)
    if product.verdict is Verdict.UNKNOWN:
        return CertResult(name, Verdict.RECORDED, f"recorded, conditional on the bounded search ({product.detail})", crit, product.bound)
    return CertResult(name, Verdict.UNKNOWN, "not recorded: factor search not applicable", crit)


def soundness_check(A: IteratedAlgebra, box: int = 1) -> dict:
    """Box-limited zero divisor search used to cross-check PROVED verdicts."""
    try:
        res = zero_divisor_search(A, box)
    except ValueError as exc:
        return {"ran": False, "reason": str(exc), "zero_divisor_found": False}
    if isinstance(res, ZeroDivisorWitness):
        return {"ran": True, "box": box, "zero_divisor_found": True, "witness": [res.x, res.y]}
    return {"ran": True, "box": box, "zero_divisor_found": False, "checked": res.checked}


def certify(A: IteratedAlgebra, box: int = 1, norm_box: int = 2, check_soundness: bool = True) -> CertificateReport:
    report = CertificateReport(algebra_id(A))
    report.results.append(cert_dm_not_in_F0(A))
    report.results.append(cert_tau_dm(A))
    report.results.append(cert_norm_not_in_F0(A))
    report.results.append(cert_quaternion_deg3(A, norm_box))
    product = cert_product_search(A, box)
    report.results.append(product)
    report.results.append(cert_left_factor(A, product))
    if A.n == 4:
        report.notes.append(
            "degree-4 quadratic test uses the remainder of t^4 - d modulo t^2 - z1 t - z0, "
            "i.e. tau~^2(z1) tau~^3(z1) z0 + tau~^2(z0) z0 = d together with the vanishing linear coefficient"
        )
        report.notes.append(
            "the non-norm condition for [K:L] = 4 is read as d^s not a norm for s = 1, 2, 3; it is only used through the factor search"
        )
    if check_soundness and report.proved:
        report.soundness = soundness_check(A, 1)
    return report
