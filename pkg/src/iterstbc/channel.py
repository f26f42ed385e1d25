"""Seeded Monte-Carlo simulation of Y = sqrt(rho/n_t) H S + N with exhaustive ML and sphere decoding."""

from __future__ import annotations

import csv
import itertools
import math
import time
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .codebook import CodeSpec, Constellation, encode, pad_layers, symbol_basis_complex

MAX_EXHAUSTIVE = 1 << 16


# -- randomness ------------------------------------------------------------------------


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    """Philox stream keyed by (seed, trial) so each trial is reproducible on its own."""
    if not (0 <= seed < 1 << 64) or trial < 0:
        raise ValueError("seed must be a 64-bit unsigned integer and trial nonnegative")
    return np.random.Generator(np.random.Philox(key=(seed << 64) | trial))


def complex_gaussian(gen: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """CN(0, 1) samples by Box-Muller on the generator's uniforms."""
    count = int(np.prod(shape))
    u1 = 1.0 - gen.random(count)  # in (0, 1]
    u2 = gen.random(count)
    r = np.sqrt(-np.log(u1))  # radius for variance 1/2 per real component
    return (r * np.exp(2j * np.pi * u2)).reshape(shape)


# -- codebooks -----------------------------------------------------------------------


@dataclass
class LayerCodebook:
    """Codewords of the first ``layers`` D-layers over a finite constellation, with their real lattice form."""

    spec: CodeSpec
    layers: int
    basis: np.ndarray  # (real symbols, mn, mn) complex
    alphabet: list[int]
    scale: float  # normalizes the average codeword energy to n_t * T

    @property
    def real_dim(self) -> int:
        return len(self.basis)

    @property
    def size(self) -> int:
        return len(self.alphabet) ** self.real_dim

    def matrix(self, g: Sequence[int]) -> np.ndarray:
        return self.scale * np.tensordot(np.asarray(g, dtype=float), self.basis, axes=(0, 0))

    def symbols(self, g: Sequence[int]) -> tuple[tuple[int, int], ...]:
        pairs = [(int(g[2 * k]), int(g[2 * k + 1])) for k in range(len(g) // 2)]
        return pad_layers(pairs, self.spec)

    def all_vectors(self) -> np.ndarray:
        if self.size > MAX_EXHAUSTIVE:
            raise ValueError(f"codebook of {self.size} codewords is too large for exhaustive decoding")
        return np.array(list(itertools.product(self.alphabet, repeat=self.real_dim)), dtype=float)

    def all_matrices(self) -> np.ndarray:
        return self.scale * np.tensordot(self.all_vectors(), self.basis, axes=(1, 0))


def layer_codebook(spec: CodeSpec, layers: int = 1, constellation: Constellation | None = None) -> LayerCodebook:
    if not 1 <= layers <= spec.n:
        raise ValueError(f"layers must lie in 1..{spec.n}")
    if constellation is not None:
        spec = spec.with_constellation(constellation)
    full = symbol_basis_complex(spec)  # (P, 2, N, N)
    count = layers * spec.symbols_per_layer
    basis = full[:count].reshape(2 * count, spec.size, spec.size)
    alphabet = spec.constellation.levels
    # each real coordinate is uniform on the levels, independently
    var = float(np.mean(np.square(alphabet)))
    gram = np.einsum("kij,lij->kl", basis, basis.conj()).real
    energy = var * float(np.trace(gram))
    scale = math.sqrt(spec.size * spec.size / energy)
    return LayerCodebook(spec, layers, basis, alphabet, scale)


# -- decoders -----------------------------------------------------------------------------


def ml_decode_exhaustive(Y: np.ndarray, H: np.ndarray, codebook: np.ndarray, gain: float = 1.0) -> int:
    """Index minimizing ||Y - gain H S||_F^2; ties go to the lowest index."""
    if len(codebook) == 0:
        raise ValueError("empty codebook")
    resid = Y[None] - gain * np.matmul(H[None], codebook)
    metric = np.sum(np.abs(resid) ** 2, axis=(1, 2))
    return int(np.argmin(metric))


def lattice_generator(H: np.ndarray, basis: np.ndarray, gain: float = 1.0) -> np.ndarray:
    """Real matrix G with vec_R(gain H S(g)) = G g."""
    cols = gain * np.matmul(H[None], basis)  # (k, n_r, T)
    flat = cols.reshape(len(basis), -1)
    return np.concatenate([flat.real, flat.imag], axis=1).T


def sphere_decode(
    y: np.ndarray,
    G: np.ndarray,
    alphabet: Sequence[int],
    radius: float | None = None,
) -> np.ndarray:
    """argmin_g ||y - G g||^2 over g in alphabet^k by depth-first search on the QR form.

    The search starts from the Babai point's residual and doubles the squared
    radius until a point is found; ``radius=inf`` makes it exhaustive.
    """
    if G.shape[0] != len(y):
        raise ValueError("dimension mismatch between y and the lattice generator")
    k = G.shape[1]
    Q, R = np.linalg.qr(G)
    z = Q.T @ y
    tail = float(y @ y - z @ z)  # part of the residual outside the column span
    alph = np.array(sorted(alphabet), dtype=float)

    babai = np.zeros(k)
    for i in range(k - 1, -1, -1):
        c = (z[i] - R[i, i + 1:] @ babai[i + 1:]) / R[i, i]
        babai[i] = alph[np.argmin(np.abs(alph - c))]
    r2 = float(np.sum((z - R @ babai) ** 2)) * (1 + 1e-9) + 1e-12 if radius is None else radius ** 2

    while True:
        best = _dfs(z, R, alph, r2)
        if best is not None:
            return best
        r2 *= 2.0


def _dfs(z: np.ndarray, R: np.ndarray, alph: np.ndarray, r2: float) -> np.ndarray | None:
    k = len(z)
    g = np.zeros(k)
    best: np.ndarray | None = None
    bound = r2
    partial = [0.0] * (k + 1)

    def rec(i: int) -> None:
        nonlocal best, bound
        c = (z[i] - R[i, i + 1:] @ g[i + 1:]) / R[i, i]
        order = np.argsort(np.abs(alph - c), kind="stable")
        for a in alph[order]:
            d = partial[i + 1] + (R[i, i] * (c - a)) ** 2
            if d > bound:
                break
            g[i] = a
            if i == 0:
                best = g.copy()
                bound = d
            else:
                partial[i] = d
                rec(i - 1)

    rec(k - 1)
    return best


# -- simulation ------------------------------------------------------------------------------------


@dataclass
class ChannelConfig:
    spec: CodeSpec
    rho: float
    trials: int
    seed: int = 0
    n_r: int | None = None
    layers: int = 1
    constellation: Constellation | None = None
    decoder: str = "sphere"
    noise_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if self.n_r is None:
            self.n_r = self.spec.size
        if self.n_r < 1:
            raise ValueError("n_r must be at least 1")
        if self.decoder not in ("sphere", "ml"):
            raise ValueError("decoder must be sphere or ml")


@dataclass
class SimResult:
    errors: int
    trials: int
    decoder: str
    seconds: float
    rho: float
    seed: int
    mismatches: list[int] = field(default_factory=list)

    @property
    def rate(self) -> float:
        return self.errors / self.trials


def draw_trial(cb: LayerCodebook, n_r: int, seed: int, trial: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Transmitted real-symbol vector, H and N, drawn in that order from the (seed, trial) stream."""
    gen = trial_generator(seed, trial)
    g = np.array(cb.alphabet)[gen.integers(0, len(cb.alphabet), size=cb.real_dim)]
    T = cb.spec.size
    H = complex_gaussian(gen, (n_r, T))
    N = complex_gaussian(gen, (n_r, T))
    return g, H, N


def simulate(cfg: ChannelConfig, codebook: LayerCodebook | None = None) -> SimResult:
    cb = codebook or layer_codebook(cfg.spec, cfg.layers, cfg.constellation)
    gain = math.sqrt(cfg.rho / cb.spec.size)
    basis = cb.scale * cb.basis
    if cfg.decoder == "ml":
        vectors = cb.all_vectors()
        mats = np.tensordot(vectors, basis, axes=(1, 0))
    start = time.perf_counter()
    errors = 0
    for trial in range(cfg.trials):
        g, H, N = draw_trial(cb, cfg.n_r, cfg.seed, trial)
        S = np.tensordot(g, basis, axes=(0, 0))
        Y = gain * H @ S + cfg.noise_scale * N
        if cfg.decoder == "ml":
            est = vectors[ml_decode_exhaustive(Y, H, mats, gain)]
        else:
            G = lattice_generator(H, basis, gain)
            est = sphere_decode(np.concatenate([Y.reshape(-1).real, Y.reshape(-1).imag]), G, cb.alphabet)
        if not np.array_equal(est, g):
            errors += 1
    return SimResult(errors, cfg.trials, cfg.decoder, time.perf_counter() - start, cfg.rho, cfg.seed)


def decoder_agreement(cb: LayerCodebook, instances: int, seed: int, rho: float = 1.0, n_r: int | None = None) -> list[int]:
    """Trials where the sphere decoder and exhaustive ML disagree (empty means agreement)."""
    n_r = n_r or cb.spec.size
    gain = math.sqrt(rho / cb.spec.size)
    basis = cb.scale * cb.basis
    vectors = cb.all_vectors()
    mats = np.tensordot(vectors, basis, axes=(1, 0))
    bad = []
    for trial in range(instances):
        g, H, N = draw_trial(cb, n_r, seed, trial)
        Y = gain * H @ np.tensordot(g, basis, axes=(0, 0)) + N
        ml = vectors[ml_decode_exhaustive(Y, H, mats, gain)]
        sd = sphere_decode(np.concatenate([Y.reshape(-1).real, Y.reshape(-1).imag]), lattice_generator(H, basis, gain), cb.alphabet)
        if not np.array_equal(ml, sd):
            bad.append(trial)
    return bad


def snr_grid(text: str) -> list[float]:
    """'start:step:stop' in dB (inclusive) or a comma list."""
    if ":" in text:
        a, s, b = (float(x) for x in text.split(":"))
        if s <= 0:
            raise ValueError("SNR step must be positive")
        count = int(math.floor((b - a) / s + 1e-9)) + 1
        return [a + i * s for i in range(count)]
    return [float(x) for x in text.split(",") if x.strip()]


def write_csv(path: str, rows: Sequence[tuple[float, SimResult]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["snr_db", "trials", "errors", "rate"])
        for snr_db, res in rows:
            w.writerow([f"{snr_db:g}", res.trials, res.errors, f"{res.rate:.6g}"])


def codeword_from_vector(cb: LayerCodebook, g: Sequence[int]):
    """Exact codeword for a real-symbol vector of the layer codebook."""
    return encode(cb.symbols(g), cb.spec)
