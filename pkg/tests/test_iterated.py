import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iterstbc.cyclic_algebra import d_mul
from iterstbc.iterated import (
    IteratedAlgebra,
    IterVariant,
    NotFound,
    ZeroDivisorWitness,
    a_mul,
    associator,
    big_lambda,
    m_matrix,
    shift_matrix,
    tau_conjugate,
    zero_divisor_search,
)
from iterstbc.linalg import det, mat_mul, mat_vec


def oracle_mul(A, x, y):
    """Monomial-by-monomial product (f^i a)(f^j b) = f^(i+j) tau^j(a) b with d placed on wrap."""
    n = A.n
    out = [A.D.zero] * n
    for i, a in enumerate(x.coords):
        for j, b in enumerate(y.coords):
            ta = a.map(A.tau ** j)
            if i + j < n:
                out[i + j] = out[i + j] + d_mul(ta, b)
            elif A.variant is IterVariant.LEFT:
                out[i + j - n] = out[i + j - n] + d_mul(A.d, d_mul(ta, b))
            elif A.variant is IterVariant.MIDDLE:
                out[i + j - n] = out[i + j - n] + d_mul(d_mul(ta, A.d), b)
            else:
                out[i + j - n] = out[i + j - n] + d_mul(d_mul(ta, b), A.d)
    return A.element(out)


def algebras(D, t):
    om, th = t.l_generators, t.f_generators["theta"]
    (g,) = om.values()
    rng = random.Random(3)
    general = D.random(rng, 2)
    return [
        IteratedAlgebra(D, th, "left"),
        IteratedAlgebra(D, general, "left"),
        IteratedAlgebra(D, general, "middle"),
        IteratedAlgebra(D, g, "right"),
        IteratedAlgebra(D, general, "right"),
    ]


@pytest.mark.parametrize("idx", range(5))
def test_product_matches_monomial_oracle(D63, t63, idx, rng):
    A = algebras(D63, t63)[idx]
    for _ in range(5):
        x, y = A.random(rng, 2), A.random(rng, 2)
        assert a_mul(x, y) == oracle_mul(A, x, y)


@pytest.mark.parametrize("idx", range(5))
def test_f_power_wraps_to_d(D63, t63, idx):
    A = algebras(D63, t63)[idx]
    assert A.f_power(A.n - 1) * A.f == A.from_D(A.d)
    assert A.f * A.f_power(A.n - 1) == A.from_D(A.d)
    assert A.one * A.f == A.f and A.f * A.one == A.f


@pytest.mark.parametrize("idx", range(5))
def test_m_matrix_represents_left_multiplication(D63, t63, idx, rng):
    A = algebras(D63, t63)[idx]
    x, y = A.random(rng, 2), A.random(rng, 2)
    assert m_matrix(x).apply(y.coords) == list((x * y).coords)


@pytest.mark.parametrize("idx", [0, 1, 2, 3])
def test_big_lambda_is_left_multiplication(D63, t63, idx, rng):
    A = algebras(D63, t63)[idx]
    x, y = A.random(rng, 2), A.random(rng, 2)
    assert mat_vec(big_lambda(x), y.phi()) == (x * y).phi()


def test_big_lambda_needs_d_in_L_for_right(D63, rng):
    A = IteratedAlgebra(D63, D63.random(rng, 2), "right")
    with pytest.raises(ValueError):
        big_lambda(A.one)


@pytest.mark.parametrize("variant,dname", [("left", "theta"), ("middle", "theta"), ("right", "omega")])
def test_determinant_membership(D63, t63, variant, dname, rng):
    A = IteratedAlgebra(D63, t63.all_generators()[dname], variant)
    for _ in range(5):
        v = det(big_lambda(A.random(rng, 2)))
        if variant == "right":
            assert t63.in_L(v)
        else:
            assert t63.in_F(v)


def test_shift_conjugation_identity(D63, t63, rng):
    A = IteratedAlgebra(D63, t63.l_generators["omega"], "right")
    P, Pinv = shift_matrix(A), shift_matrix(A, inverse=True)
    L = big_lambda(A.random(rng, 2))
    assert mat_mul(L, P) == mat_mul(P, tau_conjugate(L, A))
    assert mat_mul(mat_mul(P, tau_conjugate(L, A)), Pinv) == L


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_distributive_and_unital(D63, t63, seed):
    rng = random.Random(seed)
    A = IteratedAlgebra(D63, t63.l_generators["omega"], "right")
    x, y, z = A.random(rng, 2), A.random(rng, 2), A.random(rng, 2)
    assert x * (y + z) == x * y + x * z
    assert (x + y) * z == x * z + y * z
    assert A.one * x == x == x * A.one


def test_associative_exactly_when_d_in_base(D63, t63, rng):
    A = IteratedAlgebra(D63, -1, "left")
    for _ in range(3):
        assert associator(A.random(rng, 1), A.random(rng, 1), A.random(rng, 1)).is_zero()
    B = IteratedAlgebra(D63, t63.l_generators["omega"], "right")
    assert any(not associator(B.random(rng, 1), B.random(rng, 1), B.random(rng, 1)).is_zero() for _ in range(3))


def test_invalid_construction(D63, t63):
    with pytest.raises(ValueError):
        IteratedAlgebra(D63, 0, "left")
    with pytest.raises(ValueError):
        IteratedAlgebra(D63, 1, "left", n=2)  # tau has order 3 on K
    with pytest.raises(ValueError):
        IterVariant.parse("sideways")


def test_d_one_zero_divisor_witness(D63):
    A = IteratedAlgebra(D63, 1, "left")
    x = A.one - A.f
    y = A.one + A.f + A.f_power(2)
    assert (x * y).is_zero()
    res = zero_divisor_search(A, 1, support=((0, 0), (1, 0)))
    assert isinstance(res, ZeroDivisorWitness)
    assert res.x == x and res.y == y
    full = zero_divisor_search(A, 1)
    assert isinstance(full, ZeroDivisorWitness) and (full.x * full.y).is_zero()


def test_division_presets_have_no_small_zero_divisor(D63, t63):
    for d, var in [(t63.l_generators["omega"], "right"), (t63.f_generators["theta"], "left")]:
        res = zero_divisor_search(IteratedAlgebra(D63, d, var), 1)
        assert isinstance(res, NotFound)
        assert res.checked == 3 ** 6 // 2
