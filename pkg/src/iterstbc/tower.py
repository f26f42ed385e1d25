"""The double tower K/F (cyclic, generator sigma) and K/L (cyclic, generator tau).

Every field in the tower lives inside one ambient Q(zeta_N).  Subfields are
identified by fixed points: K is the fixed field of the stabilizer of the
K-generators, F = Fix(sigma) in K, L = Fix(tau) in K and F0 = F meet L.
Q-bases are obtained as trace images, so they never depend on the choice
of named generators.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from typing import Callable

from .cyclotomic import Automorphism, CycloElement, CycloField, apply_aut
from .linalg import RationalSpan


def fixed_by(a: CycloElement, phi: Automorphism) -> bool:
    """True iff ``phi(a) == a`` exactly."""
    return apply_aut(phi, a) == a


def rel_norm(a: CycloElement, generator: Automorphism, order: int) -> CycloElement:
    """a * phi(a) * ... * phi^(order-1)(a)."""
    if order < 1:
        raise ValueError("order must be at least 1")
    out = a
    conj = a
    for _ in range(order - 1):
        conj = apply_aut(generator, conj)
        out = out * conj
    return out


def rel_trace(a: CycloElement, generator: Automorphism, order: int) -> CycloElement:
    out = a
    conj = a
    for _ in range(order - 1):
        conj = apply_aut(generator, conj)
        out = out + conj
    return out


def solve_exponents(field: CycloField, conditions: list[tuple[CycloElement, CycloElement]]) -> list[int]:
    """All k coprime to N with zeta -> zeta^k mapping each source to its image."""
    found = []
    for k in field.units:
        phi = field.automorphism(k)
        if all(apply_aut(phi, src) == img for src, img in conditions):
            found.append(phi.exponent)
    return found


def _order_on(phi: Automorphism, elems: list[CycloElement]) -> int:
    r, psi = 1, phi
    while not all(apply_aut(psi, g) == g for g in elems):
        psi = psi * phi
        r += 1
    return r


def _qbasis(elements: list[CycloElement], dim: int | None = None) -> list[CycloElement]:
    """Greedy Q-independent subset, in input order."""
    chosen: list[CycloElement] = []
    for e in elements:
        if e.is_zero():
            continue
        if not chosen or RationalSpan(chosen + [e]).independent:
            chosen.append(e)
            if dim is not None and len(chosen) == dim:
                break
    return chosen


@dataclass(frozen=True, eq=False)
class TowerSpec:
    """K/F of degree m with Gal = <sigma>, K/L of degree n with Gal = <tau>."""

    field: CycloField
    sigma: Automorphism
    tau: Automorphism
    m: int
    n: int
    k_generators: dict[str, CycloElement]
    f_generators: dict[str, CycloElement] = dc_field(default_factory=dict)
    l_generators: dict[str, CycloElement] = dc_field(default_factory=dict)
    name: str = ""

    def __post_init__(self) -> None:
        if not self.k_generators:
            raise ValueError("K needs at least one generator")
        for g in self.all_generators().values():
            if g.field is not self.field:
                raise ValueError("generator lives in a different ambient field")
        kg = list(self.k_generators.values())
        if _order_on(self.sigma, kg) != self.m:
            raise ValueError(f"sigma does not have order {self.m} on K")
        if _order_on(self.tau, kg) != self.n:
            raise ValueError(f"tau does not have order {self.n} on K")
        if (self.sigma * self.tau) != (self.tau * self.sigma):
            raise AssertionError("sigma and tau must commute")
        for name, g in self.f_generators.items():
            if not (self.in_K(g) and fixed_by(g, self.sigma)):
                raise ValueError(f"F-generator {name!r} is not fixed by sigma")
        for name, g in self.l_generators.items():
            if not (self.in_K(g) and fixed_by(g, self.tau)):
                raise ValueError(f"L-generator {name!r} is not fixed by tau")

    def __repr__(self) -> str:
        label = self.name or "tower"
        return (
            f"TowerSpec({label}: N={self.field.conductor}, sigma={self.sigma.exponent}, "
            f"tau={self.tau.exponent}, m={self.m}, n={self.n})"
        )

    def all_generators(self) -> dict[str, CycloElement]:
        out = dict(self.k_generators)
        out.update(self.f_generators)
        out.update(self.l_generators)
        return out

    # -- subfields ---------------------------------------------------------

    @cached_property
    def k_stabilizer(self) -> tuple[Automorphism, ...]:
        gens = list(self.k_generators.values())
        return tuple(
            self.field.automorphism(k)
            for k in self.field.units
            if all(apply_aut(self.field.automorphism(k), g) == g for g in gens)
        )

    @cached_property
    def k_degree(self) -> int:
        return self.field.degree // len(self.k_stabilizer)

    @cached_property
    def k_basis(self) -> list[CycloElement]:
        """Q-basis of K from monomials in the K-generators (graded order)."""
        gens = list(self.k_generators.values())
        monomials = [self.field.one]
        frontier = [self.field.one]
        basis = _qbasis(monomials)
        while len(basis) < self.k_degree:
            frontier = [m * g for m in frontier for g in gens]
            basis = _qbasis(basis + frontier, self.k_degree)
            if not frontier:
                break
        if len(basis) != self.k_degree:
            raise ValueError("K-generators do not generate K")
        return basis

    @cached_property
    def k_span(self) -> RationalSpan:
        return RationalSpan(self.k_basis)

    def _group(self, gens: list[Automorphism]) -> list[Automorphism]:
        """Distinct restrictions to K of the group generated by ``gens``."""
        kb = self.k_basis
        seen: dict[tuple, Automorphism] = {}
        stack = [self.field.automorphism(1)]
        while stack:
            phi = stack.pop()
            key = tuple(apply_aut(phi, b) for b in kb)
            if key in seen:
                continue
            seen[key] = phi
            stack.extend(phi * g for g in gens)
        return list(seen.values())

    def _fixed_basis(self, gens: list[Automorphism]) -> list[CycloElement]:
        group = self._group(gens)
        traces = []
        for b in self.k_basis:
            acc = self.field.zero
            for phi in group:
                acc = acc + apply_aut(phi, b)
            traces.append(acc)
        return _qbasis(traces, self.k_degree // len(group))

    @cached_property
    def f_basis(self) -> list[CycloElement]:
        return self._fixed_basis([self.sigma])

    @cached_property
    def l_basis(self) -> list[CycloElement]:
        return self._fixed_basis([self.tau])

    @cached_property
    def f0_basis(self) -> list[CycloElement]:
        return self._fixed_basis([self.sigma, self.tau])

    def in_K(self, a: CycloElement) -> bool:
        return all(fixed_by(a, h) for h in self.k_stabilizer)

    def in_F(self, a: CycloElement) -> bool:
        return self.in_K(a) and fixed_by(a, self.sigma)

    def in_L(self, a: CycloElement) -> bool:
        return self.in_K(a) and fixed_by(a, self.tau)

    def in_F0(self, a: CycloElement) -> bool:
        return self.in_F(a) and fixed_by(a, self.tau)

    def norm_K_F(self, a: CycloElement) -> CycloElement:
        return rel_norm(a, self.sigma, self.m)

    def norm_K_L(self, a: CycloElement) -> CycloElement:
        return rel_norm(a, self.tau, self.n)

    def f0_has_primitive_root(self, r: int) -> bool:
        """Whether F0 contains a primitive r-th root of unity (x^r - 1 splits over F0)."""
        N = self.field.conductor
        roots = [s * self.field.zeta(k) for k in range(N) for s in (1, -1)]
        for z in roots:
            if self.in_F0(z) and z ** r == 1 and all(z ** q != 1 for q in range(1, r)):
                return True
        return False

    # -- derived towers and sampling -----------------------------------------

    def with_tau_power(self, s: int) -> TowerSpec:
        """The tower with tau replaced by tau^s (requires s | n)."""
        if self.n % s:
            raise ValueError("s must divide n")
        return TowerSpec(
            field=self.field,
            sigma=self.sigma,
            tau=self.tau ** s,
            m=self.m,
            n=self.n // s,
            k_generators=dict(self.k_generators),
            f_generators=dict(self.f_generators),
            name=f"{self.name}[tau^{s}]",
        )

    def random_element(self, rng: random.Random, basis: list[CycloElement] | None = None, bound: int = 3) -> CycloElement:
        basis = self.k_basis if basis is None else basis
        acc = self.field.zero
        for b in basis:
            c = rng.randint(-bound, bound)
            if c:
                acc = acc + b * c
        return acc

    def random_K(self, rng: random.Random, bound: int = 3) -> CycloElement:
        return self.random_element(rng, self.k_basis, bound)

    def random_F(self, rng: random.Random, bound: int = 3) -> CycloElement:
        return self.random_element(rng, self.f_basis, bound)

    def random_L(self, rng: random.Random, bound: int = 3) -> CycloElement:
        return self.random_element(rng, self.l_basis, bound)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        def enc(gens: dict[str, CycloElement]) -> dict:
            return {k: [str(c) for c in v.coeffs] for k, v in gens.items()}

        return {
            "name": self.name,
            "conductor": self.field.conductor,
            "sigma_exp": self.sigma.exponent,
            "tau_exp": self.tau.exponent,
            "m": self.m,
            "n": self.n,
            "generators": {
                "K": enc(self.k_generators),
                "F": enc(self.f_generators),
                "L": enc(self.l_generators),
            },
        }

    @classmethod
    def from_json(cls, doc: dict | str) -> TowerSpec:
        if isinstance(doc, str):
            doc = json.loads(doc)
        fld = CycloField(int(doc["conductor"]))
        gens = doc.get("generators", {})

        def dec(key: str) -> dict[str, CycloElement]:
            return {k: fld.from_coeffs([Fraction(c) for c in v]) for k, v in gens.get(key, {}).items()}

        return cls(
            field=fld,
            sigma=fld.automorphism(int(doc["sigma_exp"])),
            tau=fld.automorphism(int(doc["tau_exp"])),
            m=int(doc["m"]),
            n=int(doc["n"]),
            k_generators=dec("K"),
            f_generators=dec("F"),
            l_generators=dec("L"),
            name=doc.get("name", ""),
        )


def _pick(candidates: list[int], prefer: int | None = None) -> int:
    if not candidates:
        raise ValueError("no automorphism satisfies the stated images")
    if prefer is not None and prefer in candidates:
        return prefer
    return min(candidates)


def tower_6x3() -> TowerSpec:
    """K = Q(omega, theta), theta = zeta_7 + zeta_7^-1, inside Q(zeta_21).

    F = Q(theta), L = Q(omega), sigma is complex conjugation (omega -> omega^2),
    tau sends theta to zeta_7^2 + zeta_7^-2.
    """
    fld = CycloField(21)
    omega = fld.zeta(7)
    z7 = fld.zeta(3)
    theta = z7 + z7 ** 6
    theta2 = z7 ** 2 + z7 ** 5
    sigma = _pick(solve_exponents(fld, [(omega, omega * omega), (theta, theta)]), prefer=fld.conductor - 1)
    tau = _pick(solve_exponents(fld, [(omega, omega), (theta, theta2)]))
    return TowerSpec(
        field=fld,
        sigma=fld.automorphism(sigma),
        tau=fld.automorphism(tau),
        m=2,
        n=3,
        k_generators={"omega": omega, "theta": theta},
        f_generators={"theta": theta},
        l_generators={"omega": omega},
        name="6x3",
    )


def tower_8x4() -> TowerSpec:
    """K = Q(i, theta), theta = zeta_15 + zeta_15^-1, inside Q(zeta_60).

    F = Q(theta), L = Q(i), sigma is complex conjugation, tau sends theta to
    zeta_15^2 + zeta_15^-2.
    """
    fld = CycloField(60)
    i = fld.zeta(15)
    z15 = fld.zeta(4)
    theta = z15 + z15 ** 14
    theta2 = z15 ** 2 + z15 ** 13
    sigma = _pick(solve_exponents(fld, [(i, -i), (theta, theta)]), prefer=fld.conductor - 1)
    tau = _pick(solve_exponents(fld, [(i, i), (theta, theta2)]))
    return TowerSpec(
        field=fld,
        sigma=fld.automorphism(sigma),
        tau=fld.automorphism(tau),
        m=2,
        n=4,
        k_generators={"i": i, "theta": theta},
        f_generators={"theta": theta},
        l_generators={"i": i},
        name="8x4",
    )


TOWER_PRESETS: dict[str, Callable[[], TowerSpec]] = {
    "6x3": tower_6x3,
    "8x4": tower_8x4,
}


def tower_preset(name: str) -> TowerSpec:
    try:
        return TOWER_PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown tower preset {name!r}; choose from {sorted(TOWER_PRESETS)}") from None
