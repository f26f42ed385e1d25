"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``python3 tests/test_acceptance.py`` or ``pytest tests/test_acceptance.py``.
"""

import random
import time
from fractions import Fraction

import pytest
import sympy

from iterstbc import cli
from iterstbc.certificates import (
    CertificateReport,
    CertResult,
    Verdict,
    cert_dm_not_in_F0,
    cert_product_search,
)
from iterstbc.channel import ChannelConfig, decoder_agreement, layer_codebook, simulate
from iterstbc.codebook import (
    abs2_value,
    code_preset,
    encode,
    exact_det,
    min_det_survey,
    normalization_identity,
    normalization_identity_coefficients,
)
from iterstbc.cyclic_algebra import CyclicAlgebra
from iterstbc.decodability import basis_matrices, complexity_exponent, find_partition
from iterstbc.iterated import (
    IteratedAlgebra,
    NotFound,
    ZeroDivisorWitness,
    a_mul,
    associator,
    big_lambda,
    shift_matrix,
    tau_conjugate,
    zero_divisor_search,
)
from iterstbc.linalg import det, mat_mul, mat_vec
from iterstbc.skew_poly import sf_product_for
from iterstbc.tower import tower_6x3, tower_8x4

SAMPLES = 1000
MINUTE = 60.0


@pytest.fixture(scope="module")
def t63():
    return tower_6x3()


@pytest.fixture(scope="module")
def D63(t63):
    return CyclicAlgebra(t63, -1)


@pytest.fixture(scope="module")
def D84():
    return CyclicAlgebra(tower_8x4(), -1)


def variant_algebras(D, t, seed):
    """LEFT and MIDDLE with a general d in D, RIGHT with d = omega in L."""
    general = D.random(random.Random(seed), 2)
    return [
        IteratedAlgebra(D, general, "left"),
        IteratedAlgebra(D, general, "middle"),
        IteratedAlgebra(D, t.l_generators["omega"], "right"),
    ]


@pytest.mark.criterion(1, "group decodability: l=2, exponent 15 (6x3); l=4, exponent 26 (8x4)")
def test_criterion_1_complexity_exponents():
    start = time.perf_counter()
    expected = {"6x3-right": (2, 15), "6x3-left": (2, 15), "8x4-right": (4, 26)}
    for name, (groups, exponent) in expected.items():
        spec = code_preset(name)
        mats = basis_matrices(spec, "diagonal")
        part = find_partition(mats)
        assert part.count == groups, name
        assert complexity_exponent(spec, part, mats) == Fraction(exponent), name
    assert time.perf_counter() - start < MINUTE


@pytest.mark.criterion(2, "normalization identity 49 (2/sqrt(28E))^18 = 1/(7^7 E^9), exact")
def test_criterion_2_normalization_identity():
    lhs, rhs = normalization_identity_coefficients()
    assert lhs == rhs
    for E in (Fraction(2), Fraction(10), Fraction(7, 3)):
        a, b = normalization_identity(E)
        assert a == b
    # independent symbolic route with the square root left in place
    E = sympy.symbols("E", positive=True)
    expr = 49 * (2 / sympy.sqrt(28 * E)) ** 18 - 1 / (7 ** 7 * E ** 9)
    assert sympy.simplify(expr) == 0


@pytest.mark.criterion(3, "det Lambda(x) in F (left, middle) and in L (right); 6x3-right dets in Z[omega] with |det|^2 >= 1")
def test_criterion_3_determinant_membership(D63, t63):
    start = time.perf_counter()
    rng = random.Random(30)
    for A in variant_algebras(D63, t63, 3):
        for _ in range(SAMPLES):
            value = det(big_lambda(A.random(rng, 2)))
            if A.variant.value == "right":
                assert t63.in_L(value)
            else:
                assert t63.in_F(value)
    spec = code_preset("6x3-right")
    res = min_det_survey(spec, sample=SAMPLES, seed=3)  # exact_det asserts membership in Z[omega]
    assert res.count == SAMPLES and res.zero_dets == 0
    assert res.min_abs2 >= 1
    assert time.perf_counter() - start < 5 * MINUTE


@pytest.mark.criterion(4, "Phi(xy) = Lambda(x) Phi(y) per variant; Lambda(x) = P tau(Lambda(x)) P^-1 for right")
def test_criterion_4_representation(D63, t63):
    start = time.perf_counter()
    rng = random.Random(40)
    for A in variant_algebras(D63, t63, 4):
        for _ in range(SAMPLES):
            x, y = A.random(rng, 2), A.random(rng, 2)
            assert mat_vec(big_lambda(x), y.phi()) == a_mul(x, y).phi()
    A = IteratedAlgebra(D63, t63.l_generators["omega"], "right")
    P, Pinv = shift_matrix(A), shift_matrix(A, inverse=True)
    for _ in range(SAMPLES):
        L = big_lambda(A.random(rng, 2))
        assert mat_mul(mat_mul(P, tau_conjugate(L, A)), Pinv) == L
    assert time.perf_counter() - start < 5 * MINUTE


@pytest.mark.criterion(5, "skew-polynomial quotient product equals the iterated product per variant")
def test_criterion_5_skew_quotient(D63, t63):
    start = time.perf_counter()
    rng = random.Random(50)
    theta = t63.f_generators["theta"]
    general = D63.random(random.Random(5), 2)
    algebras = [
        IteratedAlgebra(D63, theta, "left"),
        IteratedAlgebra(D63, theta, "middle"),
        IteratedAlgebra(D63, general, "right"),
    ]
    for A in algebras:
        for _ in range(SAMPLES):
            x, y = A.random(rng, 2), A.random(rng, 2)
            assert sf_product_for(A, x, y) == a_mul(x, y)
    # the opposite twist does not reproduce the product
    A = algebras[2]
    x, y = A.random(rng, 2), A.random(rng, 2)
    assert sf_product_for(A, x, y, twist=t63.tau) != a_mul(x, y)
    assert time.perf_counter() - start < 5 * MINUTE


@pytest.mark.criterion(6, "structure probes: middle nucleus, tau~^n = id, f^(n-1) f = d, variants agree for d in F, subalgebras")
def test_criterion_6_structure(D63, D84, t63):
    start = time.perf_counter()
    rng = random.Random(60)
    general = D63.random(rng, 2)
    left = IteratedAlgebra(D63, general, "left")
    for _ in range(50):
        x, z = left.random(rng, 2), left.random(rng, 2)
        assert associator(x, left.from_D(D63.random(rng, 2)), z).is_zero()
    for D in (D63, D84):
        n = D.tower.n
        for _ in range(50):
            a = D.random(rng, 3)
            assert a.map(D.tau ** n) == a
    for A in variant_algebras(D63, t63, 6) + [IteratedAlgebra(D84, D84.random(rng, 2), v) for v in ("left", "middle", "right")]:
        fn1 = A.f_power(A.n - 1)
        assert a_mul(fn1, A.f) == A.from_D(A.d) == a_mul(A.f, fn1)
    theta = t63.f_generators["theta"]
    trio = [IteratedAlgebra(D63, theta, v) for v in ("left", "middle", "right")]
    for _ in range(50):
        x, y = trio[0].random(rng, 2), trio[0].random(rng, 2)
        prods = [a_mul(A.element(x.coords), A.element(y.coords)).coords for A in trio]
        assert prods[0] == prods[1] == prods[2]
    # K-coordinates close up into the nonassociative cyclic algebra (K/L, tau, d), d in K
    for v in ("left", "middle", "right"):
        A = IteratedAlgebra(D63, D63.scalar(t63.random_K(rng, 2)), v)
        d = A.d.coords[0]
        for _ in range(20):
            a = [t63.random_K(rng, 2) for _ in range(A.n)]
            b = [t63.random_K(rng, 2) for _ in range(A.n)]
            got = a_mul(A.element([D63.scalar(c) for c in a]), A.element([D63.scalar(c) for c in b]))
            want = [t63.field.zero] * A.n
            for i in range(A.n):
                for j in range(A.n):
                    term = (A.tau ** j)(a[i]) * b[j]
                    k = i + j
                    if k >= A.n:
                        term, k = term * d, k - A.n
                    want[k] = want[k] + term
            assert got == A.element([D63.scalar(c) for c in want])
    # even powers of f span It^2(D, tau^2, d) inside It^4(D, tau, d)
    for v in ("left", "middle", "right"):
        d = D84.random(rng, 2)
        A = IteratedAlgebra(D84, d, v)
        B = IteratedAlgebra(D84, d, v, n=2, tau=D84.tau ** 2)
        z = D84.zero
        for _ in range(20):
            a, b, c, e = (D84.random(rng, 2) for _ in range(4))
            big = a_mul(A.element([a, z, b, z]), A.element([c, z, e, z]))
            small = a_mul(B.element([a, b]), B.element([c, e]))
            assert big == A.element([small.coords[0], z, small.coords[1], z])
    assert time.perf_counter() - start < 5 * MINUTE


@pytest.mark.criterion(7, "box-1 zero divisor search: none for the three presets; (1-f, 1+f+...+f^(n-1)) for d=1")
def test_criterion_7_zero_divisor_search(D63, D84, t63):
    start = time.perf_counter()
    presets = [
        IteratedAlgebra(D63, t63.l_generators["omega"], "right"),
        IteratedAlgebra(D63, t63.f_generators["theta"], "left"),
        IteratedAlgebra(D84, D84.tower.l_generators["i"], "right"),
    ]
    for A in presets:
        res = zero_divisor_search(A, 1)
        assert isinstance(res, NotFound), A
        assert res.checked == 3 ** (A.m * A.n) // 2
    for D in (D63, D84):
        A = IteratedAlgebra(D, 1, "left")
        res = zero_divisor_search(A, 1, support=((0, 0), (1, 0)))
        assert isinstance(res, ZeroDivisorWitness)
        y = A.zero
        for k in range(A.n):
            y = y + A.f_power(k)
        assert res.x == A.one - A.f and res.y == y
        assert a_mul(res.x, res.y).is_zero()
        full = zero_divisor_search(A, 1)
        assert isinstance(full, ZeroDivisorWitness) and a_mul(full.x, full.y).is_zero()
    assert time.perf_counter() - start < 30 * MINUTE


@pytest.mark.criterion(8, "certificates: d=theta proved; no factor at box 1 for d=omega and d=i; inconsistency exits 2")
def test_criterion_8_certificates(D63, D84, t63, monkeypatch, capsys):
    start = time.perf_counter()
    assert cert_dm_not_in_F0(IteratedAlgebra(D63, t63.f_generators["theta"], "left")).verdict is Verdict.PROVED
    omega = cert_product_search(IteratedAlgebra(D63, t63.l_generators["omega"], "right"), 1)
    assert omega.verdict is Verdict.UNKNOWN and "no counterexample" in omega.detail
    i = cert_product_search(IteratedAlgebra(D84, D84.tower.l_generators["i"], "right"), 1)
    assert i.verdict is Verdict.UNKNOWN and "no counterexample" in i.detail
    assert "degenerate kernel" not in i.detail, i.detail

    def inconsistent(A, box, norm_box, soundness):
        return CertificateReport("forced", [CertResult("x", Verdict.PROVED, "", "")], soundness={"zero_divisor_found": True})

    monkeypatch.setattr(cli, "certify", inconsistent)
    assert cli.run(["certify", "--preset", "6x3-right"]) == 2
    capsys.readouterr()
    assert time.perf_counter() - start < 30 * MINUTE


@pytest.mark.criterion(9, "sphere decoder equals exhaustive ML on 100 instances (6x3 one layer, 4-HEX); noiseless is error-free")
def test_criterion_9_decoder_agreement():
    start = time.perf_counter()
    spec = code_preset("6x3-right")
    cb = layer_codebook(spec, 1)
    assert cb.size == 4 ** 6
    assert decoder_agreement(cb, 100, seed=9, rho=1.0) == []
    assert decoder_agreement(cb, 100, seed=10, rho=10.0) == []
    res = simulate(ChannelConfig(spec, rho=1.0, trials=100, seed=9, noise_scale=0.0), cb)
    assert res.errors == 0
    assert time.perf_counter() - start < 2 * MINUTE


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
