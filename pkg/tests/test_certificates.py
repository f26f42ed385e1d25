import random

import pytest

from iterstbc.certificates import (
    Verdict,
    cert_dm_not_in_F0,
    cert_left_factor,
    cert_norm_not_in_F0,
    cert_product_search,
    cert_quaternion_deg3,
    cert_tau_dm,
    certify,
    norm_image_search,
    prime_with_roots,
)
from iterstbc.cyclic_algebra import CyclicAlgebra, d_mul
from iterstbc.iterated import IteratedAlgebra, a_mul


def test_root_of_unity_hypothesis(D63, D84, t84):
    assert prime_with_roots(IteratedAlgebra(D63, 1, "left"))
    assert not prime_with_roots(IteratedAlgebra(D84, 1, "right"))
    # a two-step tower over the same K meets it trivially
    assert prime_with_roots(IteratedAlgebra(D84, 1, "right", n=2, tau=t84.tau ** 2))


def test_d_power_outside_base(D63, t63):
    th = t63.f_generators["theta"]
    assert cert_dm_not_in_F0(IteratedAlgebra(D63, th, "left")).verdict is Verdict.PROVED
    assert cert_dm_not_in_F0(IteratedAlgebra(D63, th * th - 2, "left")).verdict is Verdict.PROVED
    assert cert_dm_not_in_F0(IteratedAlgebra(D63, 3, "left")).verdict is Verdict.UNKNOWN
    assert t63.in_F0(th * th) is False


def test_tau_moves_d_power(D63, t63):
    th = t63.f_generators["theta"]
    assert cert_tau_dm(IteratedAlgebra(D63, th, "left")).verdict is Verdict.PROVED
    r = cert_tau_dm(IteratedAlgebra(D63, t63.l_generators["omega"], "right"))
    assert r.verdict is Verdict.INAPPLICABLE and "L" in r.detail
    assert cert_tau_dm(IteratedAlgebra(D63, 2, "left")).verdict is Verdict.UNKNOWN


def test_reduced_norm_outside_base(D63, t63):
    th = t63.f_generators["theta"]
    r = cert_norm_not_in_F0(IteratedAlgebra(D63, th, "right"))
    assert r.verdict is Verdict.PROVED and r.witness == th * th
    assert cert_norm_not_in_F0(IteratedAlgebra(D63, 1, "right")).verdict is Verdict.UNKNOWN


def test_reduced_norm_of_i_evaluated_exactly(D84):
    # the degree-4 tower fails the prime hypothesis; the norm itself is still exact
    from iterstbc.cyclic_algebra import d_norm

    i = D84.tower.l_generators["i"]
    assert d_norm(D84.scalar(i)) == i * D84.tower.sigma(i) == D84.field.one
    assert cert_norm_not_in_F0(IteratedAlgebra(D84, i, "right")).verdict is Verdict.INAPPLICABLE


def test_quaternion_cubic_omega(D63, t63):
    r = cert_quaternion_deg3(IteratedAlgebra(D63, t63.l_generators["omega"], "right"), box=1)
    assert r.verdict is Verdict.PROVED_ASSUMING_NONNORM
    assert "local norm" in r.detail and r.bound == 1


def test_quaternion_cubic_inapplicable_cases(D63, t63):
    assert cert_quaternion_deg3(IteratedAlgebra(D63, 1, "right")).verdict is Verdict.INAPPLICABLE
    assert cert_quaternion_deg3(IteratedAlgebra(D63, t63.l_generators["omega"], "left")).verdict is Verdict.INAPPLICABLE


def test_norm_precondition_disproved_with_witness(D63, t63):
    rng = random.Random(2)
    x = t63.random_K(rng, 1)
    target = t63.norm_K_L(x)
    if t63.in_F0(target):
        x = x + t63.l_generators["omega"]
        target = t63.norm_K_L(x)
    A = IteratedAlgebra(D63, target, "right")
    assert not t63.in_F0(target)
    r = cert_quaternion_deg3(A, box=1)
    assert r.verdict is Verdict.INAPPLICABLE and "disproved" in r.detail
    assert t63.norm_K_L(r.witness) == target
    assert norm_image_search(A, target, 1) is not None


def test_product_search_d_one_disproved_with_zero_divisor(D63):
    A = IteratedAlgebra(D63, 1, "right")
    r = cert_product_search(A, 1)
    assert r.verdict is Verdict.DISPROVED
    x, y = r.witness["zero_divisor"]
    assert a_mul(x, y).is_zero() and not x.is_zero() and not y.is_zero()


def test_product_search_n2_constructed(D84, t84):
    tau = t84.tau ** 2
    z = D84.random(random.Random(11), 1)
    d = d_mul(z, z.map(tau))
    r = cert_product_search(IteratedAlgebra(D84, d, "right", n=2, tau=tau), 1)
    assert r.verdict is Verdict.DISPROVED


def test_product_search_omega_no_counterexample(D63, t63):
    A = IteratedAlgebra(D63, t63.l_generators["omega"], "right")
    r = cert_product_search(A, 1)
    assert r.verdict is Verdict.UNKNOWN and "no counterexample" in r.detail and r.bound == 1
    lf = cert_left_factor(A, r)
    assert lf.verdict is Verdict.RECORDED


def test_product_search_left_needs_d_in_F(D63, t63):
    r = cert_product_search(IteratedAlgebra(D63, t63.l_generators["omega"], "left"), 1)
    assert r.verdict is Verdict.INAPPLICABLE


def test_certify_report_is_consistent_and_deterministic(D63, t63):
    A = IteratedAlgebra(D63, t63.f_generators["theta"], "left")
    rep1 = certify(A, 1, 1)
    rep2 = certify(A, 1, 1)
    assert rep1.to_json() == rep2.to_json()
    assert rep1.get("d_power_outside_F0").verdict is Verdict.PROVED
    assert rep1.soundness["ran"] and not rep1.soundness["zero_divisor_found"]
    assert rep1.consistent


def test_split_quaternion_never_proved(t63):
    D = CyclicAlgebra(t63, 1)
    A = IteratedAlgebra(D, t63.l_generators["omega"], "right")
    assert cert_quaternion_deg3(A).verdict is Verdict.INAPPLICABLE


def test_monotone_in_box(D63):
    A = IteratedAlgebra(D63, 1, "right")
    assert cert_product_search(A, 1).verdict is Verdict.DISPROVED
    assert cert_product_search(A, 2).verdict is Verdict.DISPROVED


def test_inconsistency_is_flagged(D63):
    from iterstbc.certificates import CertificateReport, CertResult

    rep = CertificateReport("x", [CertResult("a", Verdict.PROVED, "", ""), CertResult("b", Verdict.DISPROVED, "", "")])
    assert not rep.consistent
    rep2 = CertificateReport("y", [CertResult("a", Verdict.PROVED, "", "")], soundness={"zero_divisor_found": True})
    assert not rep2.consistent


@pytest.mark.parametrize("n", [5])
def test_unsupported_degree(D63, n):
    A = IteratedAlgebra(D63, 1, "left")
    A.n = n
    assert cert_product_search(A, 1).verdict is Verdict.INAPPLICABLE
