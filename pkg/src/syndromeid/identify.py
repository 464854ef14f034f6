"""Identifiability of channel-support noise from syndrome statistics.

The moment system ``E(s) = prod_{b subset s} F(b)`` over nonzero group
elements ``s`` and barred closure labels ``b`` is linear in the log domain
with the 0/1 coefficient matrix ``D[s, b] = [b subset s]``.  Rank decisions
here are exact; numpy floats are only used as a quick pre-check.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _exact, gf2
from .codes import Code, is_detectable_support, min_weight_undetectable, undetectable_errors
from .gf2 import BitMatrix, BitVector, indices_from_mask, popcount
from .noise import gamma_hat, label_order

INTERSECTION_CAP = 5000


class IdentifiabilityError(ValueError):
    pass


class ConditionViolatedError(ValueError):
    """The rescaled Gram matrix is not integral: the pairwise-union condition fails."""


# --- labels and ordering --------------------------------------------------


def xzy_order(labels: Iterable[int], n: int) -> list[int]:
    """Single-qubit labels ordered X_1..X_n, Z_1..Z_n, Y_1..Y_n; others after, by weight."""

    def key(a: int) -> tuple:
        for i in range(n):
            x, z = 1 << i, 1 << (n + i)
            if a == x:
                return (0, i)
            if a == z:
                return (1, i)
            if a == x | z:
                return (2, i)
        return (3, popcount(a), indices_from_mask(a))

    return sorted(set(labels), key=key)


def barred_closure(code: Code, supports: Iterable[int], order: str = "weight") -> list[int]:
    """Column labels: nonempty subsets of the barred supports."""
    labels = gamma_hat(supports, code.data_qubits)
    if order == "weight":
        return labels
    if order == "xzy":
        return xzy_order(labels, code.data_qubits)
    raise ValueError(f"unknown label order {order!r}")


def coefficient_vectors(num_generators: int, order: str = "span") -> list[int]:
    """Nonzero coefficient vectors ``zeta`` of the group.

    ``span``: increasing integer value (generator ``i`` is bit ``i``).
    ``weight``: by number of generators, then lexicographically by index
    tuple, i.e. g1, g2, ..., g1+g2, g1+g3, ...
    """
    if order == "span":
        return list(range(1, 1 << num_generators))
    if order == "weight":
        out = []
        for w in range(1, num_generators + 1):
            out += [gf2.mask_from_indices(c) for c in itertools.combinations(range(num_generators), w)]
        return out
    raise ValueError(f"unknown row order {order!r}")


def group_element(code: Code, zeta: int) -> int:
    s = 0
    for i in indices_from_mask(zeta):
        s ^= code.generator_rows[i]
    return s


# --- coefficient matrix ---------------------------------------------------


@dataclass(frozen=True)
class MomentSystem:
    row_coeffs: tuple[int, ...]
    row_labels: tuple[int, ...]
    col_labels: tuple[int, ...]
    D: np.ndarray = field(repr=False)
    group_size: int
    full_group: bool

    @property
    def shape(self) -> tuple[int, int]:
        return self.D.shape

    def gram(self) -> np.ndarray:
        D = self.D.astype(np.int64)
        return D.T @ D


def build_coefficient_matrix(code: Code, col_labels: Sequence[int],
                             rows: str | Sequence[int] = "full_group",
                             row_order: str = "span") -> MomentSystem:
    """``D[s, b] = 1`` iff label ``b`` is contained in group element ``s``.

    ``rows`` is ``"full_group"`` (every nonzero element, ordered by
    ``row_order``) or an explicit list of coefficient vectors.
    """
    l = code.num_generators
    if isinstance(rows, str):
        if rows != "full_group":
            raise ValueError(f"unknown row source {rows!r}")
        if l > gf2.SPAN_CAP_BITS:
            raise gf2.SpanTooLargeError(
                f"group with {l} generators is too large; pass an explicit row subset"
            )
        coeffs = coefficient_vectors(l, row_order)
        full = True
    else:
        coeffs = [int(z) for z in rows]
        if any(not 0 < z < 1 << l for z in coeffs):
            raise ValueError("coefficient vectors must be nonzero and fit the generator count")
        full = False
    cols = np.array(col_labels, dtype=object)
    elems = [group_element(code, z) for z in coeffs]
    D = np.zeros((len(elems), len(col_labels)), dtype=np.uint8)
    if len(col_labels) and elems:
        if code.N < 63:
            s = np.array(elems, dtype=np.int64)[:, None]
            c = np.array(col_labels, dtype=np.int64)[None, :]
            D[:] = (s & c) == c
        else:
            for i, e in enumerate(elems):
                D[i] = [(e & b) == b for b in cols]
    return MomentSystem(tuple(coeffs), tuple(elems), tuple(col_labels), D, 1 << l, full)


def rescaled_gram(ms: MomentSystem, group_size: int | None = None) -> list[list[int]]:
    """``2^(|a|+|b|) (D^T D)[a, b] / |S|`` as exact integers.

    Raises :class:`ConditionViolatedError` when an entry is not an integer.
    """
    size = ms.group_size if group_size is None else group_size
    G = ms.gram()
    out = []
    for i, a in enumerate(ms.col_labels):
        row = []
        for j, b in enumerate(ms.col_labels):
            v = Fraction(int(G[i, j]) << (popcount(a) + popcount(b)), size)
            if v.denominator != 1:
                raise ConditionViolatedError(
                    f"rescaled Gram entry for {indices_from_mask(a)}, {indices_from_mask(b)} is {v}"
                )
            row.append(int(v))
        out.append(row)
    return out


def intersection_pattern(labels: Sequence[int]) -> list[list[int]]:
    return [[1 << popcount(a & b) for b in labels] for a in labels]


# --- intersection matrix and Schur chain ----------------------------------


def alpha(n: int, t: int) -> int:
    return sum(math.comb(n, k) for k in range(t + 1))


def subsets_up_to(n: int, t: int) -> list[int]:
    """Nonempty subsets of ``[n]`` of size at most ``t`` in (size, lexicographic) order."""
    out = []
    for k in range(1, t + 1):
        out += [gf2.mask_from_indices(c) for c in itertools.combinations(range(n), k)]
    return out


@dataclass(frozen=True)
class IntersectionMatrix:
    n: int
    t: int
    labels: tuple[int, ...]
    entries: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.labels)

    def block_start(self, w: int) -> int:
        """Index of the first label of size ``w`` (== alpha_{w-1} - 1)."""
        return alpha(self.n, w - 1) - 1


def intersection_matrix(n: int, t: int, cap: int = INTERSECTION_CAP) -> IntersectionMatrix:
    if t < 1 or n < 1:
        raise ValueError("need n >= 1 and t >= 1")
    size = alpha(n, t) - 1
    if size > cap:
        raise ValueError(f"intersection matrix of size {size} exceeds cap {cap}")
    labels = subsets_up_to(n, t)
    entries = tuple(tuple(row) for row in intersection_pattern(labels))
    return IntersectionMatrix(n, t, tuple(labels), entries)


@dataclass(frozen=True)
class SchurStep:
    i: int
    labels: tuple[int, ...]
    matrix: _exact.Matrix = field(repr=False)


def schur_chain(M: IntersectionMatrix) -> list[SchurStep]:
    """``M^(i) = M_t / M_i`` for ``i = 0..t-1`` by exact rational elimination.

    ``M^(t-1)`` is the final complement ``M_t / M_{t-1}``.
    """
    cuts = [M.block_start(i + 1) for i in range(M.t)]
    try:
        blocks = _exact.schur_sequence(_exact.to_fractions(M.entries), cuts)
    except ZeroDivisionError as exc:  # pragma: no cover - would contradict positive definiteness
        raise ArithmeticError(f"singular leading block in the intersection matrix: {exc}") from exc
    return [SchurStep(i, M.labels[cut:], blk) for i, (cut, blk) in enumerate(zip(cuts, blocks))]


def f_tail(i: int, x: int) -> int:
    """``sum_{k=i}^{x} C(x, k)``."""
    return sum(math.comb(x, k) for k in range(i, x + 1))


def closed_form_entry(n: int, i: int, a: int, b: int) -> Fraction:
    """Predicted ``M^(i)[a, b] = f^(i+1)(|a & b|) + C(|a|-1, i) C(|b|-1, i) / alpha_i``."""
    wa, wb = popcount(a), popcount(b)
    return f_tail(i + 1, popcount(a & b)) + Fraction(
        math.comb(wa - 1, i) * math.comb(wb - 1, i), alpha(n, i)
    )


def closed_form_matrix(n: int, i: int, labels: Sequence[int]) -> _exact.Matrix:
    return [[closed_form_entry(n, i, a, b) for b in labels] for a in labels]


def final_complement_prediction(n: int, t: int) -> _exact.Matrix:
    """``I + 1 1^T / alpha_{t-1}`` of size ``C(n, t)``."""
    size = math.comb(n, t)
    a = alpha(n, t - 1)
    return [[Fraction(int(i == j)) + Fraction(1, a) for j in range(size)] for i in range(size)]


def sherman_morrison_prediction(n: int, t: int) -> _exact.Matrix:
    """``I - 1 1^T / alpha_t``, the inverse of :func:`final_complement_prediction`."""
    size = math.comb(n, t)
    a = alpha(n, t)
    return [[Fraction(int(i == j)) - Fraction(1, a) for j in range(size)] for i in range(size)]


# --- rank certificates ----------------------------------------------------


@dataclass(frozen=True)
class RankCertificate:
    full_rank: bool
    rank: int
    ncols: int
    method: str
    partial: bool
    positive_definite_certificate: bool
    detail: str


def exact_rank(ms: MomentSystem) -> int:
    """Rank of ``D`` over the reals, computed exactly as the rank of ``D^T D``."""
    if ms.D.shape[1] == 0:
        return 0
    return _exact.integer_rank(ms.gram().tolist())


def certify_full_rank(ms: MomentSystem, exact: bool = True) -> RankCertificate:
    ncols = ms.D.shape[1]
    if ncols == 0:
        return RankCertificate(True, 0, 0, "exact", not ms.full_group, False, "no columns")
    float_rank = int(np.linalg.matrix_rank(ms.D.astype(float))) if ms.D.shape[0] else 0
    if not exact:
        return RankCertificate(float_rank == ncols, float_rank, ncols, "float",
                               not ms.full_group, False, "numpy SVD rank")
    r = exact_rank(ms)
    pd = False
    detail = f"exact rank of D^T D is {r} of {ncols}"
    if ms.full_group:
        try:
            pd = rescaled_gram(ms) == intersection_pattern(ms.col_labels)
        except ConditionViolatedError:
            pd = False
        if pd:
            detail += "; rescaled Gram equals 2^|a&b|, a principal submatrix of the positive-definite M_t"
    if not ms.full_group:
        detail += f"; partial certificate on {ms.D.shape[0]} chosen rows"
    return RankCertificate(r == ncols, r, ncols, "exact", not ms.full_group, pd, detail)


# --- identifiability conditions -------------------------------------------


@dataclass(frozen=True)
class Witness:
    gamma1: int
    gamma2: int
    error: int


@dataclass(frozen=True)
class Verdict:
    identifiable: bool
    witness: Witness | None = None


def violations(code: Code, supports: Sequence[int]) -> Iterator[Witness]:
    """Every support pair whose union holds an undetectable error."""
    supports = list(supports)
    for i, g1 in enumerate(supports):
        for g2 in supports[i:]:
            union = g1 | g2
            if not is_detectable_support(code, union):
                yield Witness(g1, g2, min_weight_undetectable(code, union))


def check_identifiability(code: Code, supports: Sequence[int]) -> Verdict:
    """Identifiable iff the union of every pair of supports (a support with itself included) is detectable."""
    for w in violations(code, supports):
        return Verdict(False, w)
    return Verdict(True)


def stabilizer_witness(code: Code, supports: Sequence[int]) -> Witness | None:
    """First support pair whose union contains a nonzero stabilizer, with the lightest such stabilizer.

    Unions failing detectability only through logical operators are skipped.
    """
    supports = list(supports)
    for i, g1 in enumerate(supports):
        for g2 in supports[i:]:
            union = g1 | g2
            if is_detectable_support(code, union):
                continue
            stabs = [e for e in undetectable_errors(code, union) if code.is_stabilizer_error(e)]
            if stabs:
                return Witness(g1, g2, min(stabs, key=lambda e: (code.weight(e), e)))
    return None


@dataclass(frozen=True)
class ClosureVerdict:
    holds: bool
    e1: int | None = None
    e2: int | None = None


def check_equivalent_condition(code: Code, supports: Sequence[int]) -> ClosureVerdict:
    """``syn(e1) != 0`` and ``syn(e1 + e2) != 0`` for all distinct ``e1, e2`` in the closure.

    By linearity the second condition says the closure's syndromes are
    pairwise distinct, which is how it is evaluated.
    """
    seen: dict[int, int] = {}
    for e in gamma_hat(supports):
        syn = code.syndrome_mask(e)
        if syn == 0:
            return ClosureVerdict(False, e, None)
        if syn in seen:
            return ClosureVerdict(False, seen[syn], e)
        seen[syn] = e
    return ClosureVerdict(True)


def is_identifiable(code: Code, supports: Sequence[int]) -> bool:
    return check_identifiability(code, supports).identifiable


# --- orthogonal arrays ----------------------------------------------------


def pattern_counts(code: Code, columns: int, group: Sequence[int] | None = None) -> dict[int, int]:
    """Occurrences of each restricted pattern among group elements on ``columns``."""
    cols = indices_from_mask(columns)
    counts = {p: 0 for p in range(1 << len(cols))}
    for s in (code.group() if group is None else group):
        counts[gf2.mask_from_indices(k for k, c in enumerate(cols) if (s >> c) & 1)] += 1
    return counts


def orthogonal_array_check(code: Code, columns: int, group: Sequence[int] | None = None) -> bool:
    """Every pattern on ``columns`` appears exactly ``2^(l - |columns|)`` times."""
    k = popcount(columns)
    l = code.num_generators
    if k > l:
        return False
    return all(c == 1 << (l - k) for c in pattern_counts(code, columns, group).values())


# --- sign symmetries ------------------------------------------------------


def sign_symmetries(ms: MomentSystem) -> list[BitVector]:
    """Basis of ``{eps : D eps = 0 mod 2}`` over the column labels."""
    ncols = ms.D.shape[1]
    if ncols == 0:
        return []
    weights = 1 << np.arange(ncols, dtype=object)
    rows = {int(r) for r in (ms.D.astype(object) @ weights)} if ms.D.shape[0] else set()
    rows.discard(0)
    if not rows:
        return [BitVector(1 << j, ncols) for j in range(ncols)]
    return gf2.nullspace(BitMatrix(tuple(sorted(rows)), ncols))


def flip_signs(F: dict[int, float], labels: Sequence[int], eps: BitVector) -> dict[int, float]:
    out = dict(F)
    for j in eps.support():
        out[labels[j]] = -out[labels[j]]
    return out


@dataclass(frozen=True)
class OrthogonalArrayReport:
    checked: int
    failures: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def orthogonal_array_sweep(code: Code, max_size: int = 4) -> OrthogonalArrayReport:
    """Check pattern counts on ``bar(gamma)`` for every detectable ``gamma`` with ``|gamma| <= max_size``.

    Group elements are unpacked into a bit table once; column sets sharing a
    prefix reuse the partial pattern codes, and each set costs one bincount.
    """
    group = np.array(code.group(), dtype=np.int64)
    l = code.num_generators
    N = code.N
    bits = ((group[:, None] >> np.arange(N, dtype=np.int64)) & 1).astype(np.uint8)
    checked = 0
    failures: list[int] = []

    def visit(gamma: int, codes_so_far: np.ndarray, k: int, start: int) -> None:
        nonlocal checked
        for c in range(start, N):
            g = gamma | (1 << c)
            col = code.bar(1 << c).bit_length() - 1
            codes_c = codes_so_far | (bits[:, col] << np.uint8(k))
            if is_detectable_support(code, g):
                checked += 1
                counts = np.bincount(codes_c, minlength=1 << (k + 1))
                if k + 1 > l or np.any(counts != 1 << (l - k - 1)):
                    failures.append(g)
            if k + 1 < max_size:
                visit(g, codes_c, k + 1, c + 1)

    if max_size > 8:
        raise ValueError("max_size is limited to 8")
    visit(0, np.zeros(group.shape[0], dtype=np.uint8), 0, 0)
    return OrthogonalArrayReport(checked, tuple(failures))
