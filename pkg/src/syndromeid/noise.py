"""Channel-support noise models, exact syndrome statistics and a shot sampler.

Each channel acts on a support ``gamma`` (a set of phase-space or bit
coordinates) with a dense table over ``2**|gamma|`` local outcomes; local bit
``j`` is the ``j``-th smallest coordinate of ``gamma``.  For a single-qubit
support ``{x_i, z_i}`` the table is therefore ``(p_I, p_X, p_Z, p_Y)``.
"""

from __future__ import annotations

import itertools
import os
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import fourier
from .codes import Code
from .gf2 import indices_from_mask, mask_from_indices, popcount, submasks
from .pauli import bar_mask

DENSE_CAP_BITS = 20
SHARD_SIZE = 1 << 16
THREADS_ENV = "SYNDROMEID_THREADS"


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Channel:
    support: tuple[int, ...]
    dist: np.ndarray

    def __post_init__(self) -> None:
        support = tuple(sorted(set(self.support)))
        dist = np.asarray(self.dist, dtype=float)
        if len(support) != len(self.support):
            raise ModelError(f"repeated coordinate in support {self.support}")
        if dist.shape != (1 << len(support),):
            raise ModelError(
                f"support {list(support)} needs {1 << len(support)} probabilities, got {dist.shape}"
            )
        if np.any(dist < -1e-12) or abs(dist.sum() - 1.0) > 1e-9:
            raise ModelError(f"channel on {list(support)} is not a probability distribution")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "dist", dist)

    @property
    def mask(self) -> int:
        return mask_from_indices(self.support)

    def lift(self, local: int) -> int:
        return fourier.lift_local(local, list(self.support))

    def moment(self, a: int) -> float:
        """Untwisted moment ``E_gamma(a) = sum_e (-1)^(a.e) P_gamma(e)``."""
        local = fourier.restrict_to_local(a, list(self.support))
        signs = 1.0 - 2.0 * (np.bitwise_count(np.arange(self.dist.shape[0]) & local) & 1)
        return float(signs @ self.dist)


@dataclass(frozen=True)
class SupportModel:
    N: int
    n_qubits: int
    channels: tuple[Channel, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "channels", tuple(self.channels))
        seen = set()
        for ch in self.channels:
            if ch.support and ch.support[-1] >= self.N:
                raise ModelError(f"support {list(ch.support)} outside [0, {self.N})")
            if ch.mask in seen:
                raise ModelError(f"duplicate channel support {list(ch.support)}")
            seen.add(ch.mask)

    @classmethod
    def for_code(cls, code: Code, channels: Iterable[Channel]) -> SupportModel:
        return cls(code.N, code.data_qubits, tuple(channels))

    @property
    def supports(self) -> list[int]:
        return [ch.mask for ch in self.channels]

    def bar(self, mask: int) -> int:
        return bar_mask(mask, self.n_qubits)

    def satisfies_positivity(self) -> bool:
        return all(ch.dist[0] > 0.5 for ch in self.channels)


def pauli_channel(qubit: int, rates: Sequence[float], n: int) -> Channel:
    """Single-qubit channel from ``(p_I, p_X, p_Z, p_Y)``."""
    if len(rates) != 4:
        raise ModelError("Pauli rates need four entries (p_I, p_X, p_Z, p_Y)")
    return Channel((qubit, n + qubit), np.asarray(rates, dtype=float))


def flip_channel(coord: int, p: float) -> Channel:
    return Channel((coord,), np.array([1.0 - p, p]))


def single_qubit_model(code: Code, rates: Sequence[Sequence[float]] | Sequence[float],
                       flip: Sequence[float] | float | None = None) -> SupportModel:
    """Independent Pauli channels per qubit, plus optional flips per measurement bit."""
    n = code.n
    rates = np.asarray(rates, dtype=float)
    if rates.ndim == 1:
        rates = np.tile(rates, (n, 1))
    channels = [pauli_channel(i, rates[i], n) for i in range(n)]
    if flip is not None:
        flips = np.broadcast_to(np.asarray(flip, dtype=float), (code.m,))
        channels += [flip_channel(2 * n + j, float(flips[j])) for j in range(code.m)]
    return SupportModel.for_code(code, channels)


# --- support families -----------------------------------------------------


def make_weight_t_supports(N: int, t: int, metric: str = "hamming", n: int = 0,
                           m: int = 0) -> list[int]:
    """Maximal supports of weight ``t``.

    ``hamming``: all ``t``-subsets of ``[N]``.  ``pauli``: for ``N = 2n + m``,
    both phase-space bits of ``k`` qubits plus ``t - k`` measurement bits.
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    if metric == "hamming":
        return [mask_from_indices(c) for c in itertools.combinations(range(N), t)]
    if metric != "pauli":
        raise ValueError(f"unknown metric {metric!r}")
    if N != 2 * n + m:
        raise ValueError(f"N={N} does not match 2n+m with n={n}, m={m}")
    sites = [(1 << i) | (1 << (n + i)) for i in range(n)] + [1 << (2 * n + j) for j in range(m)]
    out = []
    for chosen in itertools.combinations(sites, min(t, len(sites))):
        mask = 0
        for s in chosen:
            mask |= s
        out.append(mask)
    return sorted(out, key=lambda s: (popcount(s), indices_from_mask(s)))


def weight_t_supports_for_code(code: Code, t: int) -> list[int]:
    if code.kind == "classical":
        return make_weight_t_supports(code.N, t, "hamming")
    return make_weight_t_supports(code.N, t, "pauli", code.n, code.m)


def label_order(masks: Iterable[int]) -> list[int]:
    """(weight, lexicographic) order on subset masks."""
    return sorted(set(masks), key=lambda s: (popcount(s), indices_from_mask(s)))


def gamma_hat(supports: Iterable[int], n_qubits: int | None = None) -> list[int]:
    """Nonempty subsets of the supports; with ``n_qubits`` given, of the barred supports."""
    out = set()
    for g in supports:
        if n_qubits is not None:
            g = bar_mask(g, n_qubits)
        out.update(b for b in submasks(g) if b)
    return label_order(out)


# --- exact oracle ---------------------------------------------------------


def _check_dense(N: int) -> None:
    if N > DENSE_CAP_BITS:
        raise fourier.DenseSizeError(f"N={N} exceeds the dense oracle cap {DENSE_CAP_BITS}")


def total_distribution(model: SupportModel) -> np.ndarray:
    """Convolution of all embedded channel distributions over F_2^N."""
    _check_dense(model.N)
    total = fourier.point_mass(model.N)
    for ch in model.channels:
        total = fourier.convolve(fourier.embed(ch.dist, ch.support, model.N), total)
    return total


def all_syndromes(code: Code) -> np.ndarray:
    """Syndrome (packed int) of every error ``e`` in ``range(2**N)``."""
    _check_dense(code.N)
    syn = np.zeros(1 << code.N, dtype=np.int64)
    for j in range(code.N):
        half = 1 << j
        syn[half:2 * half] = syn[:half] ^ code.syndrome_mask(1 << j)
    return syn


def exact_syndrome_statistics(model: SupportModel, code: Code) -> dict[int, float]:
    _check_model_fits(model, code)
    P = total_distribution(model)
    syn = all_syndromes(code)
    keys, inverse = np.unique(syn, return_inverse=True)
    probs = np.bincount(inverse, weights=P)
    return {int(k): float(p) for k, p in zip(keys, probs) if p != 0.0}


def exact_moment(model: SupportModel, s: int, twist: bool = True) -> float:
    """``E(s)`` as the product of per-channel moments, without forming ``P``."""
    a = model.bar(s) if twist else s
    out = 1.0
    for ch in model.channels:
        if a & ch.mask:
            out *= ch.moment(a)
    return out


def exact_stabilizer_moments(model: SupportModel, code: Code, rows: Sequence[int]) -> np.ndarray:
    """Exact ``E(s)`` for the group elements with coefficient vectors ``rows``."""
    gens = code.generator_rows
    out = []
    for zeta in rows:
        s = 0
        for i in indices_from_mask(zeta):
            s ^= gens[i]
        out.append(exact_moment(model, s))
    return np.array(out)


def _check_model_fits(model: SupportModel, code: Code) -> None:
    if model.N != code.N or model.n_qubits != code.data_qubits:
        raise ModelError(f"model (N={model.N}) does not match code {code.describe()} (N={code.N})")


# --- sampling -------------------------------------------------------------


@dataclass(frozen=True)
class SampleBatch:
    syndromes: np.ndarray = field(repr=False)
    seed: int
    num_checks: int
    code_name: str = ""

    @property
    def count(self) -> int:
        return int(self.syndromes.shape[0])

    def histogram(self) -> dict[int, int]:
        keys, counts = np.unique(self.syndromes, return_counts=True)
        return {int(k): int(c) for k, c in zip(keys, counts)}


def shard_generator(seed: int, shard: int) -> np.random.Generator:
    """Philox stream for one shard; the 128-bit key is ``(seed, shard)``."""
    if not 0 <= seed < 1 << 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.Philox(key=seed | (shard << 64)))


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def sample(model: SupportModel, code: Code, K: int, seed: int,
           threads: int | None = None) -> SampleBatch:
    """Draw ``K`` syndromes; identical output for identical ``(model, code, K, seed)``.

    Shots are split into fixed shards of ``SHARD_SIZE``; shard ``k`` uses
    its own Philox stream, so the result does not depend on ``threads``.
    """
    _check_model_fits(model, code)
    if K < 1:
        raise ValueError("K must be positive")
    tables = []
    for ch in model.channels:
        cdf = np.cumsum(ch.dist)
        syn = np.array([code.syndrome_mask(ch.lift(loc)) for loc in range(ch.dist.shape[0])],
                       dtype=np.int64)
        tables.append((cdf, syn))

    def run(shard: int) -> np.ndarray:
        size = min(SHARD_SIZE, K - shard * SHARD_SIZE)
        rng = shard_generator(seed, shard)
        out = np.zeros(size, dtype=np.int64)
        for cdf, syn in tables:
            u = rng.random(size)
            idx = np.minimum(np.searchsorted(cdf, u, side="right"), cdf.shape[0] - 1)
            out ^= syn[idx]
        return out

    nshards = -(-K // SHARD_SIZE)
    threads = threads or default_threads()
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(run, range(nshards)))
    else:
        parts = [run(k) for k in range(nshards)]
    return SampleBatch(np.concatenate(parts), seed, code.num_checks, code.describe())


# --- configuration --------------------------------------------------------


def model_from_config(config: Mapping, code: Code) -> SupportModel:
    """Build a model from ``{"channels": [...]}`` records.

    Accepted channel records: ``{"support": [...], "dist": [...]}``,
    ``{"qubit": i, "pauli": [pI, pX, pZ, pY]}``, ``{"bit": j, "flip": p}``
    (``j`` indexes the measurement bits for data-syndrome codes, the code bits
    for classical codes).  ``uniform_pauli`` and ``uniform_flip`` add one
    channel per qubit / per bit.
    """
    channels: list[Channel] = []
    n = code.n
    bit_offset = 0 if code.kind == "classical" else 2 * n
    num_bits = code.n if code.kind == "classical" else code.m
    if "uniform_pauli" in config:
        if code.kind == "classical":
            raise ModelError("uniform_pauli needs a quantum code")
        channels += [pauli_channel(i, config["uniform_pauli"], n) for i in range(n)]
    if "uniform_flip" in config:
        channels += [flip_channel(bit_offset + j, config["uniform_flip"]) for j in range(num_bits)]
    for rec in config.get("channels", []):
        if "support" in rec:
            channels.append(Channel(tuple(rec["support"]), np.asarray(rec["dist"], dtype=float)))
        elif "qubit" in rec:
            if code.kind == "classical":
                raise ModelError("qubit channels need a quantum code")
            channels.append(pauli_channel(int(rec["qubit"]), rec["pauli"], n))
        elif "bit" in rec:
            j = int(rec["bit"])
            if not 0 <= j < num_bits:
                raise ModelError(f"bit {j} out of range [0, {num_bits})")
            channels.append(flip_channel(bit_offset + j, float(rec["flip"])))
        else:
            raise ModelError(f"unrecognised channel record {dict(rec)}")
    return SupportModel.for_code(code, channels)

