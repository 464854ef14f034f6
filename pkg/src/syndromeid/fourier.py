"""Boolean Fourier analysis on F_2^k with dense arrays indexed by bit patterns.

A function on F_2^k is a float array of length ``2**k``; entry ``e`` is the
value at the point whose bit ``j`` is coordinate ``j``.  Moment tables map
subset masks to reals and are filled lazily.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping

import numpy as np

from .gf2 import indices_from_mask, mask_from_indices, popcount, submasks
from .pauli import bar_mask

DENSE_CAP_BITS = 24
ABS_TOL = 1e-12
REL_TOL = 1e-10


class DenseSizeError(ValueError):
    pass


class SingularMomentError(ZeroDivisionError):
    """A moment needed by the inclusion-exclusion transform vanishes."""


class MissingMomentError(KeyError):
    pass


def _domain_bits(f: np.ndarray, cap: int = DENSE_CAP_BITS) -> int:
    size = f.shape[0]
    k = size.bit_length() - 1
    if f.ndim != 1 or size != 1 << k:
        raise ValueError(f"expected a 1-d array of length 2**k, got shape {f.shape}")
    if k > cap:
        raise DenseSizeError(f"domain of {k} bits exceeds cap {cap}")
    return k


def _parity_array(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x) & 1


def fourier_transform(f: np.ndarray) -> np.ndarray:
    """``out[s] = sum_e f[e] (-1)^(s.e)``."""
    out = np.array(f, dtype=float)
    k = _domain_bits(out)
    h = 1
    for _ in range(k):
        view = out.reshape(-1, 2, h)
        a = view[:, 0, :].copy()
        b = view[:, 1, :]
        view[:, 0, :] = a + b
        view[:, 1, :] = a - b
        h *= 2
    return out


def inverse_fourier_transform(g: np.ndarray) -> np.ndarray:
    out = fourier_transform(g)
    return out / out.shape[0]


def convolve(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """``(f * g)[e] = sum_e' f[e'] g[e + e']``, summed directly over the support of ``f``."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape:
        raise ValueError(f"domain mismatch: {f.shape} vs {g.shape}")
    _domain_bits(f)
    idx = np.arange(f.shape[0])
    out = np.zeros_like(g)
    for e1 in np.flatnonzero(f):
        out += f[e1] * g[idx ^ e1]
    return out


def point_mass(k: int, e: int = 0) -> np.ndarray:
    out = np.zeros(1 << k)
    out[e] = 1.0
    return out


def is_distribution(f: np.ndarray, tol: float = ABS_TOL) -> bool:
    return bool(np.all(f >= -tol) and abs(f.sum() - 1.0) <= tol)


def moment(dist: np.ndarray, a: int, twist: bool = False, n_qubits: int = 0) -> float:
    """Expectation of ``(-1)^(a.e)``, or of ``(-1)^<a,e>`` with the symplectic twist."""
    dist = np.asarray(dist, dtype=float)
    _domain_bits(dist)
    mask = bar_mask(a, n_qubits) if twist else a
    idx = np.arange(dist.shape[0])
    signs = 1 - 2 * _parity_array(idx & mask).astype(float)
    return float(signs @ dist)


class MomentTable(dict):
    """Map from subset mask to moment value.

    Serialized as records ``{"subset": [sorted indices], "value": float}``.
    """

    def to_records(self) -> list[dict]:
        return [
            {"subset": indices_from_mask(k), "value": float(v)}
            for k, v in sorted(self.items(), key=lambda kv: (popcount(kv[0]), indices_from_mask(kv[0])))
        ]

    @classmethod
    def from_records(cls, records: Iterable[Mapping]) -> MomentTable:
        return cls((mask_from_indices(r["subset"]), float(r["value"])) for r in records)


MomentSource = Mapping[int, float] | Callable[[int], float]


def _getter(table: MomentSource) -> Callable[[int], float]:
    if callable(table):
        return table

    def get(b: int) -> float:
        if b == 0 and b not in table:
            return 1.0
        try:
            return table[b]
        except KeyError:
            raise MissingMomentError(f"no moment for subset {indices_from_mask(b)}") from None

    return get


def inclusion_exclusion_transform(E: MomentSource, a: int, tol: float = ABS_TOL) -> float:
    """``F(a) = prod_{b subset a} E(b)^((-1)^(|a|+|b|))``."""
    get = _getter(E)
    out = 1.0
    wa = popcount(a)
    for b in submasks(a):
        v = get(b)
        if abs(v) <= tol:
            raise SingularMomentError(f"E({indices_from_mask(b)}) = {v} is numerically zero")
        out = out * v if (wa - popcount(b)) % 2 == 0 else out / v
    return out


def moebius_inverse(F: MomentSource, a: int) -> float:
    """``E(a) = prod_{b subset a} F(b)``; every subset's entry must be present."""
    get = _getter(F)
    out = 1.0
    for b in submasks(a):
        out *= get(b)
    return out


def moebius_inverse_restricted(F: Mapping[int, float], a: int) -> float:
    """Product of ``F(b)`` over stored labels ``b`` inside ``a``; absent labels count as 1."""
    out = 1.0
    for b, v in F.items():
        if b and b & a == b:
            out *= v
    return out


def fourier_moments(dist: np.ndarray) -> MomentTable:
    """All ``2**k`` untwisted moments of ``dist`` at once."""
    ft = fourier_transform(dist)
    return MomentTable(enumerate(ft.tolist()))


def embed(local: np.ndarray, support: Iterable[int], N: int) -> np.ndarray:
    """Lift a distribution on the coordinates ``support`` (sorted) to F_2^N."""
    coords = sorted(support)
    local = np.asarray(local, dtype=float)
    if local.shape[0] != 1 << len(coords):
        raise ValueError(f"table of length {local.shape[0]} for support of size {len(coords)}")
    if N > DENSE_CAP_BITS:
        raise DenseSizeError(f"N={N} exceeds dense cap {DENSE_CAP_BITS}")
    out = np.zeros(1 << N)
    for loc, p in enumerate(local):
        out[lift_local(loc, coords)] += p
    return out


def lift_local(local_index: int, coords: list[int]) -> int:
    mask = 0
    for j, c in enumerate(coords):
        if (local_index >> j) & 1:
            mask |= 1 << c
    return mask


def restrict_to_local(mask: int, coords: list[int]) -> int:
    out = 0
    for j, c in enumerate(coords):
        if (mask >> c) & 1:
            out |= 1 << j
    return out
