from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iterstbc.codebook import (
    Constellation,
    abs2_value,
    code_preset,
    diversity_evidence,
    encode,
    exact_det,
    exhaustive_symbols,
    min_det_survey,
    normalization_identity,
    normalization_identity_coefficients,
    normalized_value,
    pad_layers,
)
from iterstbc.iterated import IterVariant
from iterstbc.linalg import det, to_complex

PRESETS = ["6x3-right", "6x3-left", "8x4-right"]


@pytest.fixture(scope="module", params=PRESETS)
def spec(request):
    return code_preset(request.param)


# -- constellations -------------------------------------------------------------


@pytest.mark.parametrize(
    "name, levels, energy",
    [
        ("hex4", [-1, 1], Fraction(2)),
        ("qam4", [-1, 1], Fraction(2)),
        ("qam16", [-3, -1, 1, 3], Fraction(10)),
        ("hex16", [-3, -1, 1, 3], Fraction(10)),
    ],
)
def test_constellation_levels_and_energy(name, levels, energy):
    c = Constellation.parse(name)
    assert c.name == name and c.levels == levels
    assert len(c.points) == c.size
    assert c.average_energy == energy
    # E = mean|a + b g|^2 computed from the complex points
    assert np.mean(np.abs(c.complex_points()) ** 2) == pytest.approx(float(energy))


@pytest.mark.parametrize("bad", ["psk8", "qam8", "hex1", ""])
def test_constellation_rejects_bad_names(bad):
    with pytest.raises(ValueError):
        Constellation.parse(bad)


def test_symbol_value_matches_complex_points(spec):
    c = spec.constellation
    vals = [complex(spec.symbol_value(p).to_complex()) for p in c.points]
    assert np.allclose(vals, c.complex_points())


def test_unknown_preset_and_wrong_constellation():
    with pytest.raises(ValueError):
        code_preset("5x5")
    with pytest.raises(ValueError):
        code_preset("6x3-right").with_constellation(Constellation("QAM", 4))


# -- encoding -----------------------------------------------------------------------


def test_wrong_symbol_count_or_value_rejected(spec):
    with pytest.raises(ValueError):
        encode([(1, 1)] * (spec.symbol_count - 1), spec)
    with pytest.raises(ValueError):
        encode([(3, 1)] + [(1, 1)] * (spec.symbol_count - 1), spec)


def test_single_symbol_codeword_is_block_diagonal(spec):
    vec = pad_layers([(1, 0)], spec)
    w = encode(vec, spec, check=False)
    m, n = spec.m, spec.n
    M = w.exact_matrix
    for r in range(m * n):
        for c in range(m * n):
            if r // m != c // m:
                assert M[r][c].is_zero()
    # hand formula: x = theta_1 in K, det lambda(k) = k sigma(k), conjugated by tau^j per block
    k = spec.theta[0]
    t = spec.tower
    expected = t.field.one
    for j in range(n):
        expected = expected * (spec.algebra.tau ** j)(k * t.sigma(k))
    assert det(M) == expected


def test_encoding_is_additive(spec):
    rng = np.random.default_rng(3)
    pts = spec.constellation.points
    a = [pts[i] for i in rng.integers(0, len(pts), spec.symbol_count)]
    b = [pts[i] for i in rng.integers(0, len(pts), spec.symbol_count)]
    s = [(x[0] + y[0], x[1] + y[1]) for x, y in zip(a, b)]
    wa, wb, ws = encode(a, spec), encode(b, spec), encode(s, spec, check=False)
    for ra, rb, rs in zip(wa.exact_matrix, wb.exact_matrix, ws.exact_matrix):
        for xa, xb, xs in zip(ra, rb, rs):
            assert xa + xb == xs


def test_float_and_exact_determinants_agree(spec):
    rng = np.random.default_rng(9)
    pts = spec.constellation.points
    vec = [pts[i] for i in rng.integers(0, len(pts), spec.symbol_count)]
    w = encode(vec, spec)
    exact = complex(exact_det(w, spec).to_complex())
    approx = complex(np.linalg.det(w.complex_matrix))
    assert abs(exact - approx) <= 1e-6 * max(1.0, abs(exact))
    assert np.allclose(w.complex_matrix, to_complex(w.exact_matrix))


@settings(max_examples=12, deadline=None)
@given(st.data())
def test_determinant_lies_in_preset_ring(data):
    spec = code_preset(data.draw(st.sampled_from(PRESETS)))
    pts = spec.constellation.points
    vec = data.draw(st.lists(st.sampled_from(pts + [(0, 0)]), min_size=spec.symbol_count, max_size=spec.symbol_count))
    w = encode(vec, spec)
    value = exact_det(w, spec)  # asserts L/F membership and ring integrality
    t = spec.tower
    if spec.algebra.variant is IterVariant.RIGHT:
        assert t.in_L(value)
    else:
        assert t.in_F(value)


# -- surveys ---------------------------------------------------------------------


def test_survey_minimum_at_least_one_6x3_right():
    spec = code_preset("6x3-right")
    res = min_det_survey(spec, sample=40, seed=1)
    assert res.count == 40 and res.zero_dets == 0
    assert isinstance(res.min_abs2, Fraction) and res.min_abs2 >= 1
    assert res.normalized == res.min_abs2 / Fraction(28 * 2) ** 6


def test_survey_is_deterministic():
    spec = code_preset("6x3-left")
    a = min_det_survey(spec, sample=5, seed=4)
    b = min_det_survey(spec, sample=5, seed=4)
    assert a.min_abs2 == b.min_abs2 and a.argmin == b.argmin


def test_survey_rejects_empty_input():
    spec = code_preset("6x3-right")
    with pytest.raises(ValueError):
        min_det_survey(spec, sample=0)
    with pytest.raises(ValueError):
        exhaustive_symbols(spec.with_constellation(Constellation("HEX", 16)))


def test_abs2_of_omega_is_one(t63):
    assert abs2_value(t63.l_generators["omega"]) == 1


def test_normalized_value_unavailable_without_normalization():
    assert normalized_value(Fraction(5), code_preset("8x4-right")) is None


# -- normalization identity -----------------------------------------------------------


@given(st.fractions(min_value=Fraction(1, 100), max_value=100))
def test_normalization_identity_holds_for_every_energy(E):
    lhs, rhs = normalization_identity(E)
    assert lhs == rhs


def test_normalization_identity_coefficients_match():
    lhs, rhs = normalization_identity_coefficients()
    assert lhs == rhs == Fraction(1, 7 ** 7)


# -- diversity ---------------------------------------------------------------------------


def test_diversity_evidence_clean_for_left_preset():
    rep = diversity_evidence(code_preset("6x3-left"), sample=30, seed=0, sweep_weight=2)
    assert rep.ok and rep.sweep_checked > 0


def test_diversity_evidence_catches_d_equal_one():
    spec = code_preset("6x3-left").with_d(1, "d=1")
    rep = diversity_evidence(spec, sample=10, seed=0, sweep_weight=2, max_violations=1)
    assert not rep.ok
    bad = encode(rep.violations[0], spec, check=False)
    assert det(bad.exact_matrix).is_zero()
