import csv
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iterstbc.channel import (
    ChannelConfig,
    codeword_from_vector,
    complex_gaussian,
    decoder_agreement,
    layer_codebook,
    simulate,
    snr_grid,
    sphere_decode,
    trial_generator,
    write_csv,
)
from iterstbc.codebook import Constellation, code_preset


@pytest.fixture(scope="module")
def spec():
    return code_preset("6x3-right")


@pytest.fixture(scope="module")
def cb(spec):
    return layer_codebook(spec, 1)


def test_trial_streams_are_reproducible():
    a = trial_generator(7, 3).random(5)
    b = trial_generator(7, 3).random(5)
    c = trial_generator(7, 4).random(5)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    with pytest.raises(ValueError):
        trial_generator(-1, 0)


def test_complex_gaussian_moments():
    z = complex_gaussian(trial_generator(1, 0), (200000,))
    assert abs(np.mean(z)) < 0.01
    assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, abs=0.01)
    assert np.mean(z.real ** 2) == pytest.approx(0.5, abs=0.01)


def test_codebook_shape_and_energy(spec, cb):
    assert cb.real_dim == 12 and cb.size == 4096
    mats = cb.all_matrices()
    energy = np.mean(np.sum(np.abs(mats) ** 2, axis=(1, 2)))
    assert energy == pytest.approx(spec.size * spec.size, rel=1e-9)


def test_codeword_from_vector_matches_float_matrix(cb):
    g = [1, -1] * 6
    w = codeword_from_vector(cb, g)
    assert np.allclose(cb.scale * w.complex_matrix, cb.matrix(g))


def test_oversized_codebook_rejected(spec):
    big = layer_codebook(spec, 2)
    with pytest.raises(ValueError):
        big.all_vectors()
    with pytest.raises(ValueError):
        layer_codebook(spec, 4)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 5), st.sampled_from([[-1, 1], [-3, -1, 1, 3]]))
def test_sphere_decoder_matches_brute_force(seed, k, alphabet):
    rng = np.random.default_rng(seed)
    G = rng.normal(size=(k + 2, k))
    y = rng.normal(size=k + 2) * 3
    best = min(itertools.product(alphabet, repeat=k), key=lambda g: float(np.sum((y - G @ np.array(g)) ** 2)))
    got = sphere_decode(y, G, alphabet)
    d_best = float(np.sum((y - G @ np.array(best)) ** 2))
    d_got = float(np.sum((y - G @ got) ** 2))
    assert d_got <= d_best + 1e-9


def test_sphere_decoder_dimension_mismatch():
    with pytest.raises(ValueError):
        sphere_decode(np.zeros(3), np.eye(4), [-1, 1])


def test_decoders_agree(cb):
    assert decoder_agreement(cb, 15, seed=5, rho=2.0) == []


def test_noiseless_decoding_is_error_free(spec, cb):
    for decoder in ("sphere", "ml"):
        res = simulate(ChannelConfig(spec, rho=1.0, trials=20, seed=3, decoder=decoder, noise_scale=0.0), cb)
        assert res.errors == 0


def test_simulation_is_deterministic_and_decoders_match(spec, cb):
    a = simulate(ChannelConfig(spec, rho=2.0, trials=25, seed=11), cb)
    b = simulate(ChannelConfig(spec, rho=2.0, trials=25, seed=11), cb)
    c = simulate(ChannelConfig(spec, rho=2.0, trials=25, seed=11, decoder="ml"), cb)
    assert a.errors == b.errors == c.errors


def test_more_power_fewer_errors(spec, cb):
    low = simulate(ChannelConfig(spec, rho=0.5, trials=60, seed=2), cb)
    high = simulate(ChannelConfig(spec, rho=200.0, trials=60, seed=2), cb)
    assert high.errors <= low.errors and low.errors > 0


@pytest.mark.parametrize("kw", [{"trials": 0}, {"rho": 0.0}, {"decoder": "zf"}, {"n_r": 0}])
def test_bad_config_rejected(spec, kw):
    args = {"rho": 1.0, "trials": 1} | kw
    with pytest.raises(ValueError):
        ChannelConfig(spec, **args)


def test_codebook_with_other_constellation(spec):
    cb16 = layer_codebook(spec, 1, Constellation("HEX", 16))
    assert cb16.alphabet == [-3, -1, 1, 3] and cb16.real_dim == 12
    with pytest.raises(ValueError):
        layer_codebook(spec, 1, Constellation("QAM", 4))


def test_snr_grid_and_csv(tmp_path, spec, cb):
    assert snr_grid("0:5:20") == [0, 5, 10, 15, 20]
    assert snr_grid("1,2.5") == [1.0, 2.5]
    with pytest.raises(ValueError):
        snr_grid("0:0:3")
    res = simulate(ChannelConfig(spec, rho=1.0, trials=3, seed=0), cb)
    path = tmp_path / "out.csv"
    write_csv(str(path), [(0.0, res)])
    rows = list(csv.reader(path.open(encoding="utf-8")))
    assert rows[0] == ["snr_db", "trials", "errors", "rate"]
    assert rows[1][:3] == ["0", "3", str(res.errors)]
