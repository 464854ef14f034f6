"""Classical, stabilizer and data-syndrome codes behind one interface.

A classical code on ``n`` bits uses ``bar`` = identity and Hamming weight; the
quantum kinds use the phase-space layout from :mod:`syndromeid.pauli`.  In all
cases the syndrome of an error ``e`` is ``check @ bar(e)``.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property

from . import gf2
from .gf2 import BitMatrix, BitVector, RowSpaceBasis, popcount
from .pauli import PhaseSpaceVector, bar_mask, parse_pauli, pauli_weight_mask, symplectic_mask

KINDS = ("classical", "stabilizer", "data_syndrome")
DEFAULT_MAX_WEIGHT = 6
DEFAULT_SEARCH_CAP = 50_000_000


class CodeError(ValueError):
    pass


class SearchCapError(RuntimeError):
    """The exhaustive distance search would enumerate too many errors."""


@dataclass(frozen=True, eq=False)
class Code:
    kind: str
    n: int
    m: int
    check: BitMatrix
    name: str = ""

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise CodeError(f"unknown code kind {self.kind!r}")
        if self.kind == "classical" and self.m:
            raise CodeError("classical codes carry no measurement bits")
        if self.kind == "stabilizer" and self.m:
            raise CodeError("use kind='data_syndrome' for measurement bits")
        if self.check.ncols != self.N:
            raise CodeError(f"check matrix has {self.check.ncols} columns, expected N={self.N}")
        if self.kind != "classical":
            rows = self.check.rows
            for i, j in itertools.combinations(range(len(rows)), 2):
                if symplectic_mask(self._data(rows[i]), self._data(rows[j]), self.n):
                    raise CodeError(f"check rows {i} and {j} do not commute")
        if self.kind == "data_syndrome":
            for i, r in enumerate(self.check.rows):
                if r >> (2 * self.n) != 1 << i:
                    raise CodeError("data-syndrome check must have the block form [F | I_m]")

    def _data(self, mask: int) -> int:
        return mask & ((1 << (2 * self.n)) - 1)

    @property
    def N(self) -> int:
        if self.kind == "classical":
            return self.n
        return 2 * self.n + self.m

    @property
    def data_qubits(self) -> int:
        """Number of qubits whose X/Z bits are swapped by ``bar``; 0 for classical codes."""
        return 0 if self.kind == "classical" else self.n

    @property
    def num_checks(self) -> int:
        return self.check.nrows

    def bar(self, mask: int) -> int:
        return bar_mask(mask, self.data_qubits)

    def weight(self, mask: int) -> int:
        if self.kind == "classical":
            return popcount(mask)
        return pauli_weight_mask(mask, self.n)

    @cached_property
    def _bit_syndromes(self) -> tuple[int, ...]:
        # syndrome of the single-coordinate error {j}
        cols = []
        for j in range(self.N):
            cols.append(self.check.column(self.bar(1 << j).bit_length() - 1))
        return tuple(cols)

    @cached_property
    def check_columns(self) -> tuple[int, ...]:
        return tuple(self.check.column(j) for j in range(self.N))

    def syndrome_mask(self, e: int) -> int:
        out = 0
        j = 0
        while e:
            if e & 1:
                out ^= self._bit_syndromes[j]
            e >>= 1
            j += 1
        return out

    @cached_property
    def generator_rows(self) -> tuple[int, ...]:
        """An independent subset of the check rows, in their original order."""
        return tuple(self.check.rows[i] for i in gf2.independent_rows(self.check))

    @property
    def num_generators(self) -> int:
        return len(self.generator_rows)

    @property
    def group_size(self) -> int:
        return 1 << self.num_generators

    def group(self, cap_bits: int = gf2.SPAN_CAP_BITS) -> list[int]:
        """Stabilizer group (or dual code) in span order; element 0 is the identity."""
        return gf2.span_masks(list(self.generator_rows), cap_bits)

    @cached_property
    def _stabilizer_data_basis(self) -> RowSpaceBasis:
        return RowSpaceBasis(self._data(r) for r in self.check.rows)

    def is_stabilizer_error(self, e: int) -> bool:
        """True if ``e`` acts as a stabilizer: ``(h, 0)`` with ``h`` in the group."""
        if self.kind == "classical":
            return e == 0
        if e >> (2 * self.n):
            return False
        return e in self._stabilizer_data_basis

    def describe(self) -> str:
        return self.name or f"{self.kind}(n={self.n}, m={self.m})"


def _as_mask(code: Code, e: BitVector | PhaseSpaceVector | int) -> int:
    if isinstance(e, int):
        mask, length = e, None
    elif isinstance(e, PhaseSpaceVector):
        if code.kind == "classical" or (e.n, e.m) != (code.n, code.m):
            raise CodeError(f"error shape (n={e.n}, m={e.m}) does not match {code.describe()}")
        mask, length = e.bits, e.N
    else:
        mask, length = e.bits, e.length
    if length is not None and length != code.N:
        raise CodeError(f"error of length {length} for code with N={code.N}")
    if mask >> code.N:
        raise CodeError(f"error does not fit in N={code.N}")
    return mask


def syndrome(code: Code, e: BitVector | PhaseSpaceVector | int) -> BitVector:
    return BitVector(code.syndrome_mask(_as_mask(code, e)), code.num_checks)


# --- detectability --------------------------------------------------------


def is_detectable_support(code: Code, support: int | Iterable[int]) -> bool:
    """True iff every nonzero error inside ``support`` has a nonzero syndrome."""
    mask = support if isinstance(support, int) else gf2.mask_from_indices(support)
    cols = [code.check_columns[j] for j in gf2.indices_from_mask(code.bar(mask))]
    return gf2.rank_of_rows(cols, code.num_checks) == len(cols)


def is_detectable_support_bruteforce(code: Code, support: int) -> bool:
    return all(code.syndrome_mask(e) for e in gf2.submasks(support) if e)


def undetectable_errors(code: Code, support: int) -> list[int]:
    """All nonzero errors inside ``support`` with zero syndrome."""
    positions = gf2.indices_from_mask(code.bar(support))
    restricted = BitMatrix(tuple(code.check_columns[j] for j in positions), code.num_checks)
    kernel = gf2.nullspace(restricted.transpose())
    out = []
    for combo in gf2.span_masks([v.bits for v in kernel])[1:]:
        barred = gf2.mask_from_indices(positions[k] for k in gf2.indices_from_mask(combo))
        out.append(code.bar(barred))
    return out


def min_weight_undetectable(code: Code, support: int) -> int | None:
    errors = undetectable_errors(code, support)
    if not errors:
        return None
    return min(errors, key=lambda e: (code.weight(e), e))


# --- distances ------------------------------------------------------------


def _sites(code: Code) -> list[tuple[int, ...]]:
    """Per site, the nonzero error masks that occupy exactly that site."""
    if code.kind == "classical":
        return [(1 << j,) for j in range(code.n)]
    n = code.n
    sites = [(1 << i, 1 << (n + i), (1 << i) | (1 << (n + i))) for i in range(n)]
    sites += [(1 << (2 * n + j),) for j in range(code.m)]
    return sites


def errors_of_weight(code: Code, w: int) -> Iterator[int]:
    sites = _sites(code)
    for chosen in itertools.combinations(range(len(sites)), w):
        for parts in itertools.product(*(sites[s] for s in chosen)):
            e = 0
            for p in parts:
                e |= p
            yield e


def _search_size(code: Code, w: int) -> int:
    sites = _sites(code)
    qubit_sites = sum(1 for s in sites if len(s) == 3)
    bit_sites = len(sites) - qubit_sites
    return sum(
        math.comb(qubit_sites, k) * 3**k * math.comb(bit_sites, w - k) for k in range(w + 1)
    )


def _min_weight_undetectable(code: Code, max_weight: int, exclude_stabilizers: bool,
                             search_cap: int) -> int | None:
    if max_weight < 1:
        raise ValueError("max_weight must be at least 1")
    site_syn = [tuple(code.syndrome_mask(v) for v in site) for site in _sites(code)]
    site_vals = _sites(code)
    budget = 0
    for w in range(1, max_weight + 1):
        budget += _search_size(code, w)
        if budget > search_cap:
            raise SearchCapError(
                f"distance search to weight {w} needs {budget} errors (cap {search_cap})"
            )
        for chosen in itertools.combinations(range(len(site_vals)), w):
            for picks in itertools.product(*(range(len(site_vals[s])) for s in chosen)):
                syn = 0
                for s, k in zip(chosen, picks):
                    syn ^= site_syn[s][k]
                if syn:
                    continue
                if exclude_stabilizers:
                    e = 0
                    for s, k in zip(chosen, picks):
                        e |= site_vals[s][k]
                    if code.is_stabilizer_error(e):
                        continue
                return w
    return None


def distance(code: Code, max_weight: int = DEFAULT_MAX_WEIGHT,
             search_cap: int = DEFAULT_SEARCH_CAP) -> int | None:
    """Smallest weight of an undetectable error that is not a stabilizer.

    Returns ``None`` when no such error has weight ``<= max_weight``; the
    distance is then at least ``max_weight + 1``.
    """
    return _min_weight_undetectable(code, max_weight, True, search_cap)


def pure_distance(code: Code, max_weight: int = DEFAULT_MAX_WEIGHT,
                  search_cap: int = DEFAULT_SEARCH_CAP) -> int | None:
    """Smallest weight of any nonzero undetectable error (``None`` beyond ``max_weight``)."""
    return _min_weight_undetectable(code, max_weight, False, search_cap)


# --- construction ---------------------------------------------------------


def classical_code(H: BitMatrix | Sequence[Sequence[int]], name: str = "") -> Code:
    if not isinstance(H, BitMatrix):
        H = BitMatrix.from_lists(H)
    return Code("classical", H.ncols, 0, H, name)


def stabilizer_code(generators: Sequence[str | PhaseSpaceVector], name: str = "") -> Code:
    vecs = [parse_pauli(g) if isinstance(g, str) else g for g in generators]
    if not vecs:
        raise CodeError("need at least one generator")
    n = vecs[0].n
    if any(v.n != n or v.m for v in vecs):
        raise CodeError("generators must be measurement-free Pauli strings of equal length")
    return Code("stabilizer", n, 0, BitMatrix(tuple(v.bits for v in vecs), 2 * n), name)


def build_data_syndrome(base: Code, A: BitMatrix | Sequence[Sequence[int]] | None = None,
                        name: str = "") -> Code:
    """Measure ``f_i = sum_j G[j, i] g_j`` for ``G = [I | A]`` and append ``I_m``.

    ``A`` has one row per generator of ``base``; its columns describe the
    redundant measurements.  ``A=None`` measures the generators once each.
    """
    if base.kind != "stabilizer":
        raise CodeError("data-syndrome codes extend a stabilizer code")
    gens = list(base.check.rows)
    l = len(gens)
    if A is None:
        A = BitMatrix.zeros(l, 0)
    elif not isinstance(A, BitMatrix):
        A = BitMatrix.from_lists(A, len(A[0]) if len(A) and len(A[0]) else 0)
    if A.nrows != l:
        raise CodeError(f"A has {A.nrows} rows but the base code has {l} generators")
    F = list(gens)
    for k in range(A.ncols):
        f = 0
        for j in range(l):
            if (A.rows[j] >> k) & 1:
                f ^= gens[j]
        F.append(f)
    m = len(F)
    n = base.n
    rows = tuple(f | (1 << (2 * n + i)) for i, f in enumerate(F))
    return Code("data_syndrome", n, m, BitMatrix(rows, 2 * n + m),
                name or f"{base.describe()}+ds{m}")


def repetition(n: int) -> Code:
    if n < 2:
        raise CodeError("repetition code needs n >= 2")
    H = [[1 if j in (i, i + 1) else 0 for j in range(n)] for i in range(n - 1)]
    return classical_code(H, f"repetition({n})")


_HAMMING_H = [
    [1, 0, 1, 0, 1, 0, 1],
    [0, 1, 1, 0, 0, 1, 1],
    [0, 0, 0, 1, 1, 1, 1],
]


def hamming74() -> Code:
    return classical_code(_HAMMING_H, "hamming74")


FIVE_QUBIT_GENERATORS = ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")


def five_qubit() -> Code:
    return stabilizer_code(FIVE_QUBIT_GENERATORS, "five_qubit")


def steane() -> Code:
    gens = []
    for row in _HAMMING_H:
        gens.append("".join("X" if b else "I" for b in row))
    for row in _HAMMING_H:
        gens.append("".join("Z" if b else "I" for b in row))
    return stabilizer_code(gens, "steane")


def toric(L: int) -> Code:
    """Toric code on an ``L x L`` periodic lattice, qubits on edges.

    Edge ``r*L + c`` runs from vertex (r, c) to (r, c+1); edge ``L*L + r*L + c``
    runs from (r, c) to (r+1, c).  The last star and last plaquette are dropped.
    """
    if L < 2:
        raise CodeError("toric code needs L >= 2")
    n = 2 * L * L

    def h(r: int, c: int) -> int:
        return (r % L) * L + (c % L)

    def v(r: int, c: int) -> int:
        return L * L + (r % L) * L + (c % L)

    stars, plaquettes = [], []
    for r in range(L):
        for c in range(L):
            stars.append({h(r, c), h(r, c - 1), v(r, c), v(r - 1, c)})
            plaquettes.append({h(r, c), h(r + 1, c), v(r, c), v(r, c + 1)})
    gens = []
    for edges in stars[:-1]:
        gens.append("".join("X" if q in edges else "I" for q in range(n)))
    for edges in plaquettes[:-1]:
        gens.append("".join("Z" if q in edges else "I" for q in range(n)))
    return stabilizer_code(gens, f"toric({L})")


CATALOG = {
    "repetition": repetition,
    "hamming74": hamming74,
    "five_qubit": five_qubit,
    "steane": steane,
    "toric": toric,
}


def catalog(name: str, **params: int) -> Code:
    try:
        factory = CATALOG[name]
    except KeyError:
        raise CodeError(f"unknown catalog code {name!r}; known: {sorted(CATALOG)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise CodeError(f"bad parameters for {name}: {exc}") from None


# --- text format ----------------------------------------------------------


def parse_code_text(text: str, name: str = "") -> Code:
    """Header ``"kind n m"`` followed by a gf2 matrix, or Pauli strings for stabilizer codes."""
    lines = [ln.strip() for ln in text.strip().splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise CodeError("empty code file")
    head = lines[0].split()
    if len(head) != 3 or head[0] not in KINDS:
        raise CodeError(f"bad code header {lines[0]!r}; expected 'kind n m'")
    kind = head[0]
    try:
        n, m = int(head[1]), int(head[2])
    except ValueError:
        raise CodeError(f"bad code header {lines[0]!r}") from None
    body = lines[1:]
    if kind == "stabilizer" and body and body[0][0] in "IXYZ":
        code = stabilizer_code(body, name)
        if code.n != n:
            raise CodeError(f"header says n={n} but generators have length {code.n}")
        return code
    try:
        H = BitMatrix.from_text("\n".join(body))
    except ValueError as exc:
        raise CodeError(str(exc)) from None
    return Code(kind, n, m, H, name)


def format_code_text(code: Code) -> str:
    return f"{code.kind} {code.n} {code.m}\n" + code.check.to_text()
