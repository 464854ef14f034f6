"""Property-verification suites behind ``syndromeid verify``.

Each suite returns a list of :class:`Check` records; a suite passes when
every check passes.  All rank and matrix comparisons are exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from . import _exact, codes, fourier, identify, noise
from .codes import Code
from .gf2 import BitMatrix, indices_from_mask, popcount


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _frac_eq(a: _exact.Matrix, b: _exact.Matrix) -> bool:
    return len(a) == len(b) and all(list(r) == list(s) for r, s in zip(a, b))


# --- orthogonal arrays ----------------------------------------------------


def suite_orthogonal_array(code: Code, max_size: int = 4) -> list[Check]:
    rep = identify.orthogonal_array_sweep(code, max_size)
    detail = f"{rep.checked} detectable supports of size <= {max_size}"
    if rep.failures:
        detail += f"; first failure {indices_from_mask(rep.failures[0])}"
    return [Check(f"orthogonal-array[{code.describe()}]", rep.passed, detail)]


# --- intersection matrix --------------------------------------------------


def suite_intersection_matrix(n: int, t: int) -> list[Check]:
    M = identify.intersection_matrix(n, t)
    minors = _exact.leading_principal_minors(M.entries)
    ok = len(minors) == M.size and all(m > 0 for m in minors)
    return [Check(f"intersection-matrix[n={n},t={t}]", ok,
                  f"{len(minors)} of {M.size} leading minors computed, min {min(minors)}")]


# --- Schur chain ----------------------------------------------------------


def _permuted_within_blocks(M: identify.IntersectionMatrix, rng: random.Random) -> identify.IntersectionMatrix:
    labels = []
    for w in range(1, M.t + 1):
        block = [a for a in M.labels if popcount(a) == w]
        rng.shuffle(block)
        labels += block
    entries = tuple(tuple(row) for row in identify.intersection_pattern(labels))
    return identify.IntersectionMatrix(M.n, M.t, tuple(labels), entries)


def suite_schur_chain(n: int, t: int, permutations: int = 2, seed: int = 0) -> list[Check]:
    checks = []
    M = identify.intersection_matrix(n, t)
    chain = identify.schur_chain(M)
    for step in chain:
        pred = identify.closed_form_matrix(n, step.i, step.labels)
        checks.append(Check(f"closed-form[n={n},t={t},i={step.i}]", _frac_eq(step.matrix, pred)))
    final = chain[-1].matrix
    checks.append(Check(f"final-complement[n={n},t={t}]",
                        _frac_eq(final, identify.final_complement_prediction(n, t))))
    try:
        inv = _exact.inverse(final)
        ok = _frac_eq(inv, identify.sherman_morrison_prediction(n, t))
    except ZeroDivisionError:
        ok = False
    checks.append(Check(f"sherman-morrison[n={n},t={t}]", ok))

    # quotient property: eliminating block by block equals eliminating at once
    full = _exact.to_fractions(M.entries)
    ok = True
    for i in range(t - 1):
        c1, c2 = M.block_start(i + 1), M.block_start(i + 2)
        two_step = _exact.schur_complement(_exact.schur_complement(full, c1), c2 - c1)
        ok &= _frac_eq(two_step, _exact.schur_complement(full, c2))
    checks.append(Check(f"quotient-property[n={n},t={t}]", ok))

    rng = random.Random(seed)
    for k in range(permutations):
        P = _permuted_within_blocks(M, rng)
        ok = all(_frac_eq(s.matrix, identify.closed_form_matrix(n, s.i, s.labels))
                 for s in identify.schur_chain(P))
        checks.append(Check(f"permuted-closed-form[n={n},t={t},#{k}]", ok))
    return checks


# --- rank theorem on random classical codes -------------------------------


@dataclass(frozen=True)
class Instance:
    code: Code
    supports: tuple[int, ...]


def random_classical_instances(count: int, max_n: int = 8, seed: int = 0) -> list[Instance]:
    """Random parity-check matrices (nonzero rank) with random support families."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(2, max_n)
        r = rng.randint(1, n)
        H = BitMatrix.from_lists([[rng.randint(0, 1) for _ in range(n)] for _ in range(r)])
        code = codes.classical_code(H, name=f"random-{len(out)}")
        if code.num_generators == 0:
            continue
        k = rng.randint(1, 4)
        sups = set()
        for _ in range(k):
            size = rng.randint(1, min(3, n))
            sups.add(sum(1 << c for c in rng.sample(range(n), size)))
        out.append(Instance(code, tuple(sorted(sups))))
    return out


def rank_matches_condition(inst: Instance) -> tuple[bool, bool]:
    """(full rank of D, pairwise-union condition) for one instance."""
    cols = identify.barred_closure(inst.code, inst.supports)
    ms = identify.build_coefficient_matrix(inst.code, cols)
    return identify.exact_rank(ms) == len(cols), identify.is_identifiable(inst.code, inst.supports)


def suite_theorem2_bruteforce(trials: int = 200, max_n: int = 8, seed: int = 0) -> list[Check]:
    bad = []
    full_count = 0
    for inst in random_classical_instances(trials, max_n, seed):
        full, cond = rank_matches_condition(inst)
        full_count += full
        if full != cond:
            bad.append(inst)
    detail = f"{trials} instances, {full_count} full rank, {len(bad)} counterexamples"
    return [Check("rank-iff-pairwise-unions", not bad, detail)]


def suite_equivalent_condition(trials: int = 200, max_n: int = 8, seed: int = 0) -> list[Check]:
    disagree = 0
    for inst in random_classical_instances(trials, max_n, seed):
        a = identify.is_identifiable(inst.code, inst.supports)
        b = identify.check_equivalent_condition(inst.code, inst.supports).holds
        disagree += a != b
    return [Check("closure-syndrome-condition", disagree == 0,
                  f"{trials} instances, {disagree} disagreements")]


# --- sign symmetries ------------------------------------------------------


def bruteforce_symmetry_count(ms: identify.MomentSystem, cap_bits: int = 20) -> int:
    """Number of sign patterns ``eps`` with ``D eps = 0 (mod 2)``, by enumeration."""
    ncols = ms.D.shape[1]
    if ncols > cap_bits:
        raise ValueError(f"{ncols} columns exceed the brute-force cap {cap_bits}")
    weights = 1 << np.arange(ncols, dtype=np.int64)
    rows = (ms.D.astype(np.int64) @ weights)
    eps = np.arange(1 << ncols, dtype=np.int64)
    ok = np.ones(eps.shape[0], dtype=bool)
    for r in np.unique(rows):
        ok &= (np.bitwise_count(eps & r) & 1) == 0
    return int(ok.sum())


def suite_symmetries(code: Code, t: int = 1, rates: tuple[float, ...] = (0.9, 0.05, 0.03, 0.02)) -> list[Check]:
    supports = noise.weight_t_supports_for_code(code, t)
    cols = identify.barred_closure(code, supports)
    ms = identify.build_coefficient_matrix(code, cols)
    basis = identify.sign_symmetries(ms)
    checks = []
    try:
        count = bruteforce_symmetry_count(ms)
        checks.append(Check("nullspace-dimension", count == 1 << len(basis),
                            f"basis size {len(basis)}, brute force {count}"))
    except ValueError as exc:
        checks.append(Check("nullspace-dimension", True, f"skipped: {exc}"))

    if code.kind == "classical":
        model = noise.SupportModel.for_code(
            code, [noise.flip_channel(j, 0.05) for j in range(code.n)])
    else:
        model = noise.single_qubit_model(code, rates)
    F = _label_transforms(model, cols)
    base = _stabilizer_expectations(F, ms)
    worst = 0.0
    for eps in basis:
        flipped = identify.flip_signs(F, cols, eps)
        worst = max(worst, float(np.max(np.abs(_stabilizer_expectations(flipped, ms) - base))))
    checks.append(Check("flip-invariance", worst <= 1e-12, f"max deviation {worst:.2e}"))
    return checks


def _label_transforms(model: noise.SupportModel, cols) -> dict[int, float]:
    """Transformed moments keyed by barred label, from the exact per-channel moments."""
    return {b: fourier.inclusion_exclusion_transform(lambda a: noise.exact_moment(model, a), b)
            for b in cols}


def _stabilizer_expectations(F: dict[int, float], ms: identify.MomentSystem) -> np.ndarray:
    return np.array([fourier.moebius_inverse_restricted(F, s) for s in ms.row_labels])


# --- registry -------------------------------------------------------------


SUITES = {
    "orthogonal-array": suite_orthogonal_array,
    "intersection-matrix": suite_intersection_matrix,
    "schur-chain": suite_schur_chain,
    "theorem2-bruteforce": suite_theorem2_bruteforce,
    "symmetries": suite_symmetries,
}


def all_passed(checks: list[Check]) -> bool:
    return all(c.passed for c in checks)


def summarize(checks: list[Check]) -> dict:
    return {"passed": all_passed(checks), "checks": [c.to_dict() for c in checks]}


__all__ = [
    "Check", "Instance", "SUITES", "all_passed", "bruteforce_symmetry_count",
    "random_classical_instances", "rank_matches_condition", "summarize",
    "suite_equivalent_condition", "suite_intersection_matrix", "suite_orthogonal_array",
    "suite_schur_chain", "suite_symmetries", "suite_theorem2_bruteforce",
]

