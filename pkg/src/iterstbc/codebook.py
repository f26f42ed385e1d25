"""Space-time codewords from the iterated algebras: encoding, exact determinants, surveys."""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .cyclic_algebra import CyclicAlgebra
from .cyclotomic import CycloElement
from .iterated import AElement, IteratedAlgebra, IterVariant, big_lambda
from .linalg import Matrix, RationalSpan, det, to_complex
from .tower import TowerSpec, tower_6x3, tower_8x4

Symbol = tuple[int, int]


@dataclass(frozen=True)
class Constellation:
    """Square M-point constellation {a + b g : a, b odd, |a|, |b| < sqrt(M)} with g = i (QAM) or omega (HEX)."""

    kind: str
    size: int

    def __post_init__(self) -> None:
        if self.kind not in ("QAM", "HEX"):
            raise ValueError("constellation kind must be QAM or HEX")
        q = math.isqrt(self.size)
        if q < 2 or q * q != self.size:
            raise ValueError(f"constellation size must be a square >= 4, got {self.size}")

    @classmethod
    def parse(cls, text: str) -> Constellation:
        t = text.strip().lower()
        for kind in ("qam", "hex"):
            if t.startswith(kind):
                return cls(kind.upper(), int(t[len(kind):]))
        raise ValueError(f"cannot parse constellation {text!r} (expected e.g. hex4, qam16)")

    @property
    def name(self) -> str:
        return f"{self.kind.lower()}{self.size}"

    @property
    def levels(self) -> list[int]:
        q = math.isqrt(self.size)
        return list(range(-(q - 1), q, 2))

    @property
    def points(self) -> list[Symbol]:
        """a-major, then b."""
        return [(a, b) for a in self.levels for b in self.levels]

    def energy_of(self, s: Symbol) -> int:
        a, b = s
        return a * a + b * b if self.kind == "QAM" else a * a - a * b + b * b

    @property
    def average_energy(self) -> Fraction:
        pts = self.points
        return Fraction(sum(self.energy_of(p) for p in pts), len(pts))

    def complex_points(self) -> np.ndarray:
        g = 1j if self.kind == "QAM" else complex(-0.5, math.sqrt(3) / 2)
        return np.array([a + b * g for a, b in self.points])

    def contains(self, s: Symbol) -> bool:
        lv = set(self.levels)
        return s[0] in lv and s[1] in lv


@dataclass
class CodeSpec:
    """A preset code: algebra, theta-basis, constellation and bookkeeping for integrality checks."""

    name: str
    algebra: IteratedAlgebra
    theta: list[CycloElement]
    constellation: Constellation
    generator: CycloElement
    det_ring: list[CycloElement]
    det_ring_name: str
    normalization: int | None = None
    label: str = ""

    def __post_init__(self) -> None:
        check_l_basis(self.algebra, self.theta)

    @property
    def tower(self) -> TowerSpec:
        return self.algebra.D.tower

    @property
    def m(self) -> int:
        return self.algebra.m

    @property
    def n(self) -> int:
        return self.algebra.n

    @property
    def symbols_per_layer(self) -> int:
        return self.m * self.n

    @property
    def symbol_count(self) -> int:
        return self.m * self.n * self.n

    @property
    def size(self) -> int:
        return self.m * self.n

    def with_constellation(self, const: Constellation) -> CodeSpec:
        expected = "QAM" if self.constellation.kind == "QAM" else "HEX"
        if const.kind != expected:
            raise ValueError(f"{self.name} uses {expected} symbols (generator of L)")
        return CodeSpec(self.name, self.algebra, self.theta, const, self.generator, self.det_ring,
                        self.det_ring_name, self.normalization, self.label)

    def with_d(self, d, name: str | None = None, variant: IterVariant | None = None) -> CodeSpec:
        A = IteratedAlgebra(self.algebra.D, d, variant or self.algebra.variant)
        return CodeSpec(name or f"{self.name}[d]", A, self.theta, self.constellation, self.generator,
                        self.det_ring, self.det_ring_name, self.normalization, self.label)

    def symbol_value(self, s: Symbol) -> CycloElement:
        return self.generator * s[1] + s[0]

    @cached_property
    def det_ring_span(self) -> RationalSpan:
        return RationalSpan(self.det_ring)


def check_l_basis(A: IteratedAlgebra, theta: Sequence[CycloElement]) -> None:
    """theta_1..theta_n must be in K and L-linearly independent (nonzero det of tau-conjugates)."""
    n = A.n
    if len(theta) != n:
        raise ValueError(f"need {n} basis elements, got {len(theta)}")
    t = A.D.tower
    for th in theta:
        if not t.in_K(th):
            raise ValueError("basis element outside K")
    mat = [[(A.tau ** j)(th) for j in range(n)] for th in theta]
    if det(mat).is_zero():
        raise ValueError("basis elements are L-linearly dependent")


def _preset_6x3(variant: str) -> CodeSpec:
    t = tower_6x3()
    D = CyclicAlgebra(t, -1)
    w = t.l_generators["omega"]
    th = t.f_generators["theta"]
    theta = [
        1 + w + th,
        -1 - 2 * w + w * th * th,
        (-1 - 2 * w) + (1 + w) * th + (1 + w) * th * th,
    ]
    if variant == "right":
        A = IteratedAlgebra(D, w, IterVariant.RIGHT)
        return CodeSpec("6x3-right", A, theta, Constellation("HEX", 4), w, [t.field.one, w], "Z[omega]", 28,
                        "right iteration, d = omega")
    A = IteratedAlgebra(D, th, IterVariant.LEFT)
    return CodeSpec("6x3-left", A, theta, Constellation("HEX", 4), w, [t.field.one, th, th * th], "Z[theta]", 28,
                    "left iteration, d = theta")


def _preset_8x4() -> CodeSpec:
    t = tower_8x4()
    D = CyclicAlgebra(t, -1)
    i = t.l_generators["i"]
    th = t.f_generators["theta"]
    alpha = 1 - 3 * i + i * th * th
    theta = [alpha, alpha * th, alpha * th * (th * th - 3), alpha * (-1 - 3 * th + th * th + th ** 3)]
    A = IteratedAlgebra(D, i, IterVariant.RIGHT)
    return CodeSpec("8x4-right", A, theta, Constellation("QAM", 4), i, [t.field.one, i], "Z[i]", None,
                    "right iteration, d = i")


CODE_PRESETS: dict[str, Callable[[], CodeSpec]] = {
    "6x3-right": lambda: _preset_6x3("right"),
    "6x3-left": lambda: _preset_6x3("left"),
    "8x4-right": _preset_8x4,
}


def code_preset(name: str) -> CodeSpec:
    try:
        return CODE_PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown code preset {name!r}; choose from {sorted(CODE_PRESETS)}") from None


# -- encoding -------------------------------------------------------------------


@dataclass
class Codeword:
    symbols: tuple[Symbol, ...]
    element: AElement
    exact_matrix: Matrix

    @cached_property
    def complex_matrix(self) -> np.ndarray:
        return to_complex(self.exact_matrix)


def layer_elements(symbols: Sequence[Symbol], spec: CodeSpec) -> list:
    """D-coordinates x_0..x_(n-1); layer j uses symbols[j*mn:(j+1)*mn] and
    K-coordinate k of x_j is sum_i s_(kn+i) theta_i."""
    m, n = spec.m, spec.n
    D = spec.algebra.D
    fld = spec.tower.field
    layers = []
    for j in range(n):
        block = symbols[j * m * n:(j + 1) * m * n]
        coords = []
        for k in range(m):
            acc = fld.zero
            for i in range(n):
                s = block[k * n + i]
                if s[0] or s[1]:
                    acc = acc + spec.symbol_value(s) * spec.theta[i]
            coords.append(acc)
        layers.append(D.element(coords))
    return layers


def encode(symbols: Sequence[Symbol], spec: CodeSpec, check: bool = True) -> Codeword:
    """Codeword Lambda(x) for the mn^2 symbols; ``check`` restricts symbols to the constellation or 0."""
    symbols = tuple((int(a), int(b)) for a, b in symbols)
    if len(symbols) != spec.symbol_count:
        raise ValueError(f"{spec.name} takes {spec.symbol_count} symbols, got {len(symbols)}")
    if check:
        for s in symbols:
            if s != (0, 0) and not spec.constellation.contains(s):
                raise ValueError(f"symbol {s} is not in {spec.constellation.name}")
    x = spec.algebra.element(layer_elements(symbols, spec))
    return Codeword(symbols, x, big_lambda(x))


def pad_layers(symbols: Sequence[Symbol], spec: CodeSpec) -> tuple[Symbol, ...]:
    """Zero-fill symbols for the remaining D-layers."""
    return tuple(symbols) + ((0, 0),) * (spec.symbol_count - len(symbols))


# -- determinants ------------------------------------------------------------------


def exact_det(w: Codeword, spec: CodeSpec, check_ring: bool = True) -> CycloElement:
    """det of the codeword; membership in L (right) or F (left/middle) is asserted,
    and integrality over the preset's ring when ``check_ring``."""
    value = det(w.exact_matrix)
    t = spec.tower
    if spec.algebra.variant is IterVariant.RIGHT:
        if not (t.in_K(value) and spec.algebra.tau(value) == value):
            raise AssertionError("determinant of a right-iteration codeword left L")
    elif not t.in_F(value):
        raise AssertionError("determinant left F")
    if check_ring:
        coords = spec.det_ring_span.coordinates(value)
        if coords is None or any(c.denominator != 1 for c in coords):
            raise AssertionError(f"determinant not in {spec.det_ring_name}")
    return value


def abs2(z: CycloElement) -> CycloElement:
    """|z|^2 = z * conj(z), exact."""
    return z * z.conj()


def abs2_value(z: CycloElement) -> Fraction | CycloElement:
    a = abs2(z)
    return a.rational() if a.is_rational() else a


# -- surveys ----------------------------------------------------------------------------


def random_symbols(rng: np.random.Generator, spec: CodeSpec, count: int, layers: int | None = None) -> list[tuple[Symbol, ...]]:
    pts = spec.constellation.points
    per = spec.symbol_count if layers is None else layers * spec.symbols_per_layer
    out = []
    for _ in range(count):
        idx = rng.integers(0, len(pts), size=per)
        out.append(pad_layers([pts[k] for k in idx], spec))
    return out


def exhaustive_symbols(spec: CodeSpec, layers: int = 1) -> list[tuple[Symbol, ...]]:
    if spec.constellation.size > 4 or layers != 1:
        raise ValueError("exhaustive mode is limited to 4-point constellations on one D-layer")
    pts = spec.constellation.points
    return [pad_layers(c, spec) for c in itertools.product(pts, repeat=spec.symbols_per_layer)]


@dataclass
class SurveyResult:
    count: int
    min_abs2: Fraction | CycloElement
    min_abs2_float: float
    argmin: tuple[Symbol, ...]
    zero_dets: int
    normalized: Fraction | float | None
    energy: Fraction
    seed: int | None
    rows: list[dict] = field(default_factory=list)


def normalized_value(value: Fraction | CycloElement, spec: CodeSpec) -> Fraction | float | None:
    """|det|^2 of the code scaled by 1/sqrt(norm*E): divide by (norm*E)^(mn)."""
    if spec.normalization is None:
        return None
    scale = (spec.normalization * spec.constellation.average_energy) ** spec.size
    if isinstance(value, Fraction):
        return value / scale
    return float(value.to_complex().real) / float(scale)


def min_det_survey(
    spec: CodeSpec,
    sample: int = 1000,
    seed: int = 0,
    layers: int | None = None,
    exhaustive: bool = False,
    keep_rows: bool = False,
) -> SurveyResult:
    """Minimum exact |det|^2 over seeded random (or exhaustive one-layer) codewords."""
    if exhaustive:
        vectors = exhaustive_symbols(spec, layers or 1)
    else:
        if sample <= 0:
            raise ValueError("sample must be positive")
        vectors = random_symbols(np.random.default_rng(seed), spec, sample, layers)
    best: tuple[float, Fraction | CycloElement, tuple] | None = None
    zero = 0
    nonzero = 0
    rows = []
    for vec in vectors:
        if all(s == (0, 0) for s in vec):
            continue
        nonzero += 1
        w = encode(vec, spec)
        dv = exact_det(w, spec)
        val = abs2_value(dv)
        fv = float(val) if isinstance(val, Fraction) else float(val.to_complex().real)
        if dv.is_zero():
            zero += 1
        if best is None or fv < best[0]:
            best = (fv, val, vec)
        if keep_rows:
            rows.append({"symbols": vec, "det": dv, "abs2": val})
    if nonzero == 0 or best is None:
        raise ValueError("survey contains only the zero codeword")
    return SurveyResult(nonzero, best[1], best[0], best[2], zero, normalized_value(best[1], spec),
                        spec.constellation.average_energy, None if exhaustive else seed, rows)


def normalization_identity(E: Fraction | int) -> tuple[Fraction, Fraction]:
    """Both sides of 49 (2/sqrt(28E))^18 = 1/(7^7 E^9), evaluated exactly.

    (2/sqrt(28E))^18 = 2^18/(28E)^9, so no square roots are needed.
    """
    E = Fraction(E)
    lhs = 49 * Fraction(2 ** 18) / (28 * E) ** 9
    rhs = 1 / (Fraction(7) ** 7 * E ** 9)
    return lhs, rhs


def normalization_identity_coefficients() -> tuple[Fraction, Fraction]:
    """Coefficients of E^-9 on both sides; equal iff the identity holds for all E."""
    return Fraction(49 * 2 ** 18, 28 ** 9), Fraction(1, 7 ** 7)


# -- diversity evidence ------------------------------------------------------------------


def symbol_basis_complex(spec: CodeSpec) -> np.ndarray:
    """Float codewords for symbol value 1 and g at each position: shape (symbols, 2, mn, mn)."""
    out = []
    for p in range(spec.symbol_count):
        pair = []
        for s in ((1, 0), (0, 1)):
            vec = [(0, 0)] * spec.symbol_count
            vec[p] = s
            pair.append(encode(vec, spec, check=False).complex_matrix)
        out.append(pair)
    return np.array(out)


@dataclass
class DiversityReport:
    random_checked: int
    sweep_checked: int
    exact_checks: int
    violations: list[tuple[Symbol, ...]]

    @property
    def ok(self) -> bool:
        return not self.violations


def diversity_evidence(
    spec: CodeSpec,
    sample: int = 200,
    seed: int = 0,
    sweep_weight: int = 2,
    max_violations: int = 5,
    rel_tol: float = 1e-9,
) -> DiversityReport:
    """Look for nonzero codeword differences with zero determinant.

    Random pairs of codewords are differenced, and every difference vector of
    weight <= ``sweep_weight`` (nonzero entries drawn from the constellation's
    point differences) is swept.  Floats screen, exact determinants decide.
    """
    basis = symbol_basis_complex(spec)  # (P, 2, N, N)
    P = spec.symbol_count
    pts = spec.constellation.points
    diffs = sorted({(a - c, b - e) for a, b in pts for c, e in pts} - {(0, 0)})
    rng = np.random.default_rng(seed)

    vectors: list[tuple[Symbol, ...]] = []
    for _ in range(sample):
        i1 = rng.integers(0, len(pts), size=P)
        i2 = rng.integers(0, len(pts), size=P)
        vec = tuple((pts[a][0] - pts[b][0], pts[a][1] - pts[b][1]) for a, b in zip(i1, i2))
        if any(s != (0, 0) for s in vec):
            vectors.append(vec)
    random_count = len(vectors)
    for w in range(1, sweep_weight + 1):
        for positions in itertools.combinations(range(P), w):
            for values in itertools.product(diffs, repeat=w):
                vec = [(0, 0)] * P
                for p, v in zip(positions, values):
                    vec[p] = v
                vectors.append(tuple(vec))

    violations: list[tuple[Symbol, ...]] = []
    exact = 0
    chunk = 2048
    for start in range(0, len(vectors), chunk):
        batch = vectors[start:start + chunk]
        coeffs = np.array([[s for s in vec] for vec in batch], dtype=float)  # (B, P, 2)
        mats = np.einsum("bpk,pkij->bij", coeffs, basis)
        sv = np.linalg.svd(mats, compute_uv=False)
        for idx in np.nonzero(sv[:, -1] <= rel_tol * sv[:, 0])[0]:
            exact += 1
            w_ = encode(batch[idx], spec, check=False)
            if det(w_.exact_matrix).is_zero():
                violations.append(batch[idx])
                if len(violations) >= max_violations:
                    return DiversityReport(random_count, len(vectors) - random_count, exact, violations)
    return DiversityReport(random_count, len(vectors) - random_count, exact, violations)
