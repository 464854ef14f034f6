"""Phase-space form of Pauli strings, optionally extended by measurement bits.

Bit layout of a packed vector (wire-format contract used by every module)::

    x_0 .. x_{n-1} | z_0 .. z_{n-1} | m_0 .. m_{m-1}

so qubit ``i`` owns bits ``i`` and ``n + i`` and measurement bit ``j`` is bit
``2n + j``.  Phases are dropped.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass

from .gf2 import BitVector, parity, popcount

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}


class PauliParseError(ValueError):
    pass


def bar_mask(mask: int, n: int) -> int:
    """Swap the X and Z halves of the data part; measurement bits stay put."""
    if n == 0:
        return mask
    low = (1 << n) - 1
    x = mask & low
    z = (mask >> n) & low
    rest = mask >> (2 * n)
    return z | (x << n) | (rest << (2 * n))


def symplectic_mask(a: int, b: int, n: int) -> int:
    return parity(bar_mask(a, n) & b)


def pauli_weight_mask(mask: int, n: int) -> int:
    low = (1 << n) - 1
    data = (mask & low) | ((mask >> n) & low)
    return popcount(data) + popcount(mask >> (2 * n))


def qubit_mask(i: int, n: int) -> int:
    """Both phase-space bits of qubit ``i``."""
    return (1 << i) | (1 << (n + i))


@dataclass(frozen=True)
class PhaseSpaceVector:
    bits: int
    n: int
    m: int = 0

    def __post_init__(self) -> None:
        if self.n < 0 or self.m < 0:
            raise ValueError("negative dimension")
        if self.bits < 0 or self.bits >> self.N:
            raise ValueError(f"bits {self.bits:#x} do not fit in N={self.N}")

    @property
    def N(self) -> int:
        return 2 * self.n + self.m

    @property
    def data_x(self) -> BitVector:
        return BitVector(self.bits & ((1 << self.n) - 1), self.n)

    @property
    def data_z(self) -> BitVector:
        return BitVector((self.bits >> self.n) & ((1 << self.n) - 1), self.n)

    @property
    def meas(self) -> BitVector:
        return BitVector(self.bits >> (2 * self.n), self.m)

    def as_bitvector(self) -> BitVector:
        return BitVector(self.bits, self.N)

    def __add__(self, other: PhaseSpaceVector) -> PhaseSpaceVector:
        _check_same_shape(self, other)
        return PhaseSpaceVector(self.bits ^ other.bits, self.n, self.m)

    def __iter__(self) -> Iterator[int]:
        return iter(self.as_bitvector())

    def letters(self) -> str:
        x, z = self.data_x, self.data_z
        return "".join(_BITS_LETTER[(x[i], z[i])] for i in range(self.n))

    def __str__(self) -> str:
        if self.m:
            return f"{self.letters()}|{self.meas}"
        return self.letters()


def _check_same_shape(a: PhaseSpaceVector, b: PhaseSpaceVector) -> None:
    if (a.n, a.m) != (b.n, b.m):
        raise ValueError(f"dimension mismatch: (n={a.n}, m={a.m}) vs (n={b.n}, m={b.m})")


def encode_pauli(letters: str, meas: BitVector | None = None) -> PhaseSpaceVector:
    n = len(letters)
    x = z = 0
    for i, ch in enumerate(letters):
        try:
            xb, zb = _LETTER_BITS[ch]
        except KeyError:
            raise PauliParseError(f"invalid Pauli letter {ch!r} in {letters!r}") from None
        x |= xb << i
        z |= zb << i
    m = 0 if meas is None else meas.length
    mbits = 0 if meas is None else meas.bits
    return PhaseSpaceVector(x | (z << n) | (mbits << (2 * n)), n, m)


def parse_pauli(text: str) -> PhaseSpaceVector:
    """Parse ``"XIZY"`` or ``"XIZY|01"`` (letters, then measurement bits)."""
    text = text.strip()
    if "|" in text:
        letters, _, meas = text.partition("|")
        try:
            mvec = BitVector.from_string(meas)
        except ValueError as exc:
            raise PauliParseError(str(exc)) from None
        return encode_pauli(letters.strip(), mvec)
    return encode_pauli(text)


def decode_pauli(e: PhaseSpaceVector) -> str:
    return str(e)


def bar(e: PhaseSpaceVector) -> PhaseSpaceVector:
    return PhaseSpaceVector(bar_mask(e.bits, e.n), e.n, e.m)


def symplectic_product(a: PhaseSpaceVector, b: PhaseSpaceVector) -> int:
    _check_same_shape(a, b)
    return symplectic_mask(a.bits, b.bits, a.n)


def pauli_weight(e: PhaseSpaceVector) -> int:
    return pauli_weight_mask(e.bits, e.n)
