"""Dense linear algebra over F_2 with rows packed into Python ints.

Bit ``j`` of a packed row is column ``j``.  Everything here is exact; no
floating point is involved.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass

SPAN_CAP_BITS = 24


class SpanTooLargeError(ValueError):
    """Raised when enumerating a row span would exceed the configured cap."""


def popcount(x: int) -> int:
    return bin(x).count("1")


def parity(x: int) -> int:
    return popcount(x) & 1


def mask_from_indices(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def indices_from_mask(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def submasks(mask: int) -> Iterator[int]:
    """Yield every submask of ``mask``, including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


@dataclass(frozen=True)
class BitVector:
    bits: int
    length: int

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError(f"bits {self.bits:#x} do not fit in length {self.length}")

    @classmethod
    def from_list(cls, values: Sequence[int]) -> BitVector:
        return cls(mask_from_indices(i for i, v in enumerate(values) if v % 2), len(values))

    @classmethod
    def from_string(cls, text: str) -> BitVector:
        text = text.strip()
        if any(ch not in "01" for ch in text):
            raise ValueError(f"not a bit string: {text!r}")
        return cls.from_list([int(ch) for ch in text])

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(0, length)

    def __add__(self, other: BitVector) -> BitVector:
        if self.length != other.length:
            raise ValueError(f"length mismatch: {self.length} vs {other.length}")
        return BitVector(self.bits ^ other.bits, self.length)

    def __getitem__(self, i: int) -> int:
        if not -self.length <= i < self.length:
            raise IndexError(i)
        return (self.bits >> (i % self.length)) & 1

    def __iter__(self) -> Iterator[int]:
        return (self[i] for i in range(self.length))

    def __len__(self) -> int:
        return self.length

    def dot(self, other: BitVector) -> int:
        if self.length != other.length:
            raise ValueError(f"length mismatch: {self.length} vs {other.length}")
        return parity(self.bits & other.bits)

    @property
    def weight(self) -> int:
        return popcount(self.bits)

    def support(self) -> list[int]:
        return indices_from_mask(self.bits)

    def to_list(self) -> list[int]:
        return list(self)

    def __str__(self) -> str:
        return "".join(str(b) for b in self)


@dataclass(frozen=True)
class BitMatrix:
    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(self.rows))
        for r in self.rows:
            if r < 0 or r >> self.ncols:
                raise ValueError(f"row {r:#x} does not fit in {self.ncols} columns")

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> BitMatrix:
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        packed = []
        for row in rows:
            if len(row) != ncols:
                raise ValueError("ragged matrix")
            packed.append(mask_from_indices(j for j, v in enumerate(row) if v % 2))
        return cls(tuple(packed), ncols)

    @classmethod
    def from_vectors(cls, vectors: Sequence[BitVector]) -> BitMatrix:
        if not vectors:
            raise ValueError("need at least one vector to infer the column count")
        ncols = vectors[0].length
        if any(v.length != ncols for v in vectors):
            raise ValueError("vectors of different lengths")
        return cls(tuple(v.bits for v in vectors), ncols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> BitMatrix:
        return cls((0,) * nrows, ncols)

    @classmethod
    def from_text(cls, text: str) -> BitMatrix:
        """Parse ``"rows cols"`` followed by one line of 0/1 characters per row."""
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty matrix text")
        try:
            nrows, ncols = (int(tok) for tok in lines[0].split())
        except ValueError as exc:
            raise ValueError(f"bad matrix header: {lines[0]!r}") from exc
        body = lines[1:]
        if len(body) != nrows:
            raise ValueError(f"expected {nrows} rows, found {len(body)}")
        rows = []
        for ln in body:
            if len(ln) != ncols or any(ch not in "01" for ch in ln):
                raise ValueError(f"bad matrix row: {ln!r}")
            rows.append([int(ch) for ch in ln])
        return cls.from_lists(rows, ncols)

    def to_text(self) -> str:
        lines = [f"{self.nrows} {self.ncols}"]
        lines += ["".join(str(b) for b in self.row(i)) for i in range(self.nrows)]
        return "\n".join(lines) + "\n"

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def row(self, i: int) -> BitVector:
        return BitVector(self.rows[i], self.ncols)

    def to_lists(self) -> list[list[int]]:
        return [self.row(i).to_list() for i in range(self.nrows)]

    def column(self, j: int) -> int:
        return mask_from_indices(i for i, r in enumerate(self.rows) if (r >> j) & 1)

    def transpose(self) -> BitMatrix:
        return BitMatrix(tuple(self.column(j) for j in range(self.ncols)), self.nrows)

    def restrict_columns(self, cols: Sequence[int]) -> BitMatrix:
        out = []
        for r in self.rows:
            out.append(mask_from_indices(k for k, j in enumerate(cols) if (r >> j) & 1))
        return BitMatrix(tuple(out), len(cols))

    def mul_mask(self, x: int) -> int:
        """Return ``self @ x`` with ``x`` and the result as packed ints."""
        out = 0
        for i, r in enumerate(self.rows):
            if parity(r & x):
                out |= 1 << i
        return out

    def __matmul__(self, v: BitVector) -> BitVector:
        if v.length != self.ncols:
            raise ValueError(f"cannot multiply {self.shape} matrix by length-{v.length} vector")
        return BitVector(self.mul_mask(v.bits), self.nrows)

    def hstack(self, other: BitMatrix) -> BitMatrix:
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return BitMatrix(
            tuple(a | (b << self.ncols) for a, b in zip(self.rows, other.rows)),
            self.ncols + other.ncols,
        )


def _echelon(rows: Sequence[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form; leftmost pivot column, topmost candidate row.

    Returns the nonzero reduced rows and their pivot columns.
    """
    work = list(rows)
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        bit = 1 << col
        pivot = next((i for i in range(r, len(work)) if work[i] & bit), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        for i in range(len(work)):
            if i != r and work[i] & bit:
                work[i] ^= work[r]
        pivots.append(col)
        r += 1
        if r == len(work):
            break
    return work[:r], pivots


def rank(m: BitMatrix) -> int:
    return len(_echelon(m.rows, m.ncols)[1])


def rank_of_rows(rows: Sequence[int], ncols: int) -> int:
    return len(_echelon(rows, ncols)[1])


def independent_rows(m: BitMatrix) -> list[int]:
    """Indices of a maximal independent subset of rows, greedily in row order."""
    basis: dict[int, int] = {}  # pivot bit -> reduced vector
    keep = []
    for i, r in enumerate(m.rows):
        v = r
        while v:
            top = v.bit_length() - 1
            if top in basis:
                v ^= basis[top]
            else:
                basis[top] = v
                keep.append(i)
                break
    return keep


def span_masks(rows: Sequence[int], cap_bits: int = SPAN_CAP_BITS) -> list[int]:
    """All ``2**len(rows)`` combinations; element ``k`` sums rows with bit set in ``k``."""
    if len(rows) > cap_bits:
        raise SpanTooLargeError(f"span of {len(rows)} generators exceeds cap 2^{cap_bits}")
    span = [0]
    for r in rows:
        span += [s ^ r for s in span]
    return span


def row_span(m: BitMatrix, cap_bits: int = SPAN_CAP_BITS) -> list[BitVector]:
    basis = [m.rows[i] for i in independent_rows(m)]
    return [BitVector(s, m.ncols) for s in span_masks(basis, cap_bits)]


def nullspace(m: BitMatrix) -> list[BitVector]:
    """Basis of ``{v : m v = 0}``, one vector per free column in increasing order."""
    reduced, pivots = _echelon(m.rows, m.ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.ncols):
        if free in pivot_set:
            continue
        v = 1 << free
        for row, p in zip(reduced, pivots):
            if (row >> free) & 1:
                v |= 1 << p
        basis.append(BitVector(v, m.ncols))
    return basis


def columns_independent(m: BitMatrix, cols: Iterable[int]) -> bool:
    cols = sorted(set(cols))
    if any(not 0 <= j < m.ncols for j in cols):
        raise IndexError(f"column index out of range for {m.ncols} columns")
    if not cols:
        return True
    return rank(m.restrict_columns(cols)) == len(cols)


class RowSpaceBasis:
    """Incremental basis for fast membership tests in a fixed row space."""

    def __init__(self, rows: Iterable[int] = ()) -> None:
        self._basis: dict[int, int] = {}
        for r in rows:
            self.add(r)

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            b = self._basis.get(top)
            if b is None:
                return v
            v ^= b
        return 0

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if v:
            self._basis[v.bit_length() - 1] = v
            return True
        return False

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0

    def __len__(self) -> int:
        return len(self._basis)
