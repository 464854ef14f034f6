"""Method-of-moments estimation of channel-support noise from syndromes.

Stabilizer expectations are turned into transformed moments by solving
``log E(s) = sum_{b subset s} log F(b)`` in the least-squares sense, then
standard moments, marginals and single-qubit Pauli rates are rebuilt.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import fourier, gf2
from .codes import Code
from .gf2 import indices_from_mask
from .identify import (
    IdentifiabilityError,
    MomentSystem,
    build_coefficient_matrix,
    barred_closure,
    check_identifiability,
    coefficient_vectors,
    exact_rank,
)
from .noise import SampleBatch, SupportModel, exact_stabilizer_moments
from .pauli import bar_mask

FULL_GROUP_MAX_GENERATORS = 20
MARGINAL_TOL = 1e-9
RATE_TOL = 1e-12


class NonPositiveMomentError(ValueError):
    """Some empirical stabilizer expectation is not strictly positive."""

    def __init__(self, rows: Sequence[int], values: Sequence[float]):
        self.rows = list(rows)
        self.values = list(values)
        shown = ", ".join(f"zeta={z:#x}: {v:.3g}" for z, v in list(zip(rows, values))[:8])
        more = "" if len(rows) <= 8 else f" (+{len(rows) - 8} more)"
        super().__init__(
            f"{len(rows)} non-positive moment(s): {shown}{more}; too few shots or "
            "the positivity assumption is violated"
        )


# --- moments --------------------------------------------------------------


def _generator_check_rows(code: Code) -> list[int]:
    return gf2.independent_rows(code.check)


def empirical_moments(batch: SampleBatch, rows: Sequence[int], code: Code | None = None) -> dict[int, float]:
    """``E(s) = mean_k (-1)^(zeta . sigma_k)`` for each coefficient vector ``zeta``.

    ``zeta`` indexes the independent check rows (all rows when they are
    independent); ``code`` is only needed when some check rows are redundant.
    """
    if batch.count == 0:
        raise ValueError("empty sample batch")
    gen_rows = list(range(batch.num_checks)) if code is None else _generator_check_rows(code)
    syn = batch.syndromes
    if gen_rows != list(range(len(gen_rows))) or len(gen_rows) != batch.num_checks:
        proj = np.zeros_like(syn)
        for k, r in enumerate(gen_rows):
            proj |= ((syn >> r) & 1) << k
        syn = proj
    l = len(gen_rows)
    K = batch.count
    if l <= FULL_GROUP_MAX_GENERATORS:
        hist = np.bincount(syn, minlength=1 << l).astype(float)
        all_moments = fourier.fourier_transform(hist) / K
        return {int(z): float(all_moments[z]) for z in rows}
    out = {}
    for z in rows:
        out[int(z)] = float(1.0 - 2.0 * np.mean(np.bitwise_count(syn & z) & 1))
    return out


def select_rows(code: Code, col_labels: Sequence[int], seed: int = 0,
                max_rows: int | None = None) -> list[int]:
    """Coefficient vectors for the moment system.

    Full group when small; otherwise generators plus random products until
    ``D`` has exact full column rank on the chosen rows.
    """
    l = code.num_generators
    if l <= FULL_GROUP_MAX_GENERATORS:
        return coefficient_vectors(l)
    rng = np.random.default_rng(seed)
    chosen = [1 << i for i in range(l)]
    seen = set(chosen)
    target = len(col_labels)
    max_rows = max_rows or 50 * max(target, 1)
    while True:
        ms = build_coefficient_matrix(code, col_labels, chosen)
        if exact_rank(ms) == target:
            return chosen
        if len(chosen) >= max_rows:
            raise IdentifiabilityError(
                f"no full-rank row subset found within {max_rows} rows"
            )
        for _ in range(max(target, 8)):
            z = int(rng.integers(1, 1 << 62)) & ((1 << l) - 1)
            if z and z not in seen:
                seen.add(z)
                chosen.append(z)


# --- solving --------------------------------------------------------------


@dataclass(frozen=True)
class Solution:
    F: dict[int, float]
    residual_norm: float


def solve_binomial_system(ms: MomentSystem, E_hat: Mapping[int, float] | Sequence[float],
                          weights: Sequence[float] | None = None) -> Solution:
    """Least-squares solution of ``D log F = log E`` on the positive branch.

    ``E_hat`` is keyed by coefficient vector (or aligned with ``ms`` rows).
    """
    if isinstance(E_hat, Mapping):
        y_raw = np.array([E_hat[z] for z in ms.row_coeffs], dtype=float)
    else:
        y_raw = np.asarray(E_hat, dtype=float)
    if y_raw.shape != (ms.D.shape[0],):
        raise ValueError("moment vector does not match the moment system rows")
    bad = np.flatnonzero(y_raw <= 0)
    if bad.size:
        raise NonPositiveMomentError([ms.row_coeffs[i] for i in bad], y_raw[bad].tolist())
    ncols = ms.D.shape[1]
    if ncols == 0:
        return Solution({}, float(np.linalg.norm(np.log(y_raw))))
    y = np.log(y_raw)
    D = ms.D.astype(float)
    W = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    gram = D.T @ (W[:, None] * D)
    if exact_rank(ms) < ncols:
        raise IdentifiabilityError("coefficient matrix is rank deficient")
    x = np.linalg.solve(gram, D.T @ (W * y))
    residual = float(np.linalg.norm(D @ x - y))
    return Solution({a: float(np.exp(v)) for a, v in zip(ms.col_labels, x)}, residual)


def reconstruct_moments(F: Mapping[int, float], a: int) -> float:
    """``E(a) = prod_{b in labels, b subset a} F(b)``."""
    return fourier.moebius_inverse_restricted(F, a)


def reconstruct_marginal(F: Mapping[int, float], support: int, n_qubits: int) -> np.ndarray:
    """Marginal of the total distribution on ``support`` (local bit ``j`` = ``j``-th coordinate)."""
    coords = indices_from_mask(support)
    if len(coords) > 20:
        raise fourier.DenseSizeError("marginal support larger than 20 coordinates")
    values = np.empty(1 << len(coords))
    for loc in range(values.shape[0]):
        a = fourier.lift_local(loc, coords)
        values[loc] = reconstruct_moments(F, bar_mask(a, n_qubits))
    return fourier.inverse_fourier_transform(values)


def pauli_rates_from_moments(E_X: float, E_Z: float, E_Y: float) -> tuple[float, float, float, float]:
    """Invert the single-qubit moment relations; returns ``(p_I, p_X, p_Z, p_Y)``."""
    return (
        (1 + E_X + E_Z + E_Y) / 4,
        (1 + E_X - E_Z - E_Y) / 4,
        (1 - E_X + E_Z - E_Y) / 4,
        (1 - E_X - E_Z + E_Y) / 4,
    )


# --- pipeline -------------------------------------------------------------


@dataclass
class EstimationReport:
    F_hat: dict[int, float]
    E_hat: dict[int, float]
    marginals: dict[int, np.ndarray]
    pauli_rates: dict[int, tuple[float, float, float, float]]
    flip_rates: dict[int, float]
    residual_norm: float
    rows_used: int
    shots: int | None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        def records(table: Mapping[int, float]) -> list[dict]:
            return fourier.MomentTable(table).to_records()

        return {
            "f_moments": records(self.F_hat),
            "e_moments": records(self.E_hat),
            "marginals": [
                {"support": indices_from_mask(g), "dist": [float(p) for p in q]}
                for g, q in self.marginals.items()
            ],
            "pauli_rates": [
                {"qubit": i, "p_I": r[0], "p_X": r[1], "p_Z": r[2], "p_Y": r[3]}
                for i, r in sorted(self.pauli_rates.items())
            ],
            "flip_rates": [{"coord": j, "p": p} for j, p in sorted(self.flip_rates.items())],
            "residual": self.residual_norm,
            "rows_used": self.rows_used,
            "shots": self.shots,
            "warnings": list(self.warnings),
        }

    def rates_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "index", "p_I", "p_X", "p_Z", "p_Y"])
        for i, r in sorted(self.pauli_rates.items()):
            w.writerow(["qubit", i, *(repr(float(x)) for x in r)])
        for j, p in sorted(self.flip_rates.items()):
            w.writerow(["flip", j, repr(1.0 - p), repr(float(p)), "", ""])
        return buf.getvalue()


def run_estimation(code: Code, supports: Sequence[int], *, batch: SampleBatch | None = None,
                   model: SupportModel | None = None, clamp: bool = False,
                   weighting: str = "none", override: bool = False,
                   row_seed: int = 0) -> EstimationReport:
    """Estimate from a sample batch, or from exact oracle moments of ``model``."""
    if (batch is None) == (model is None):
        raise ValueError("pass exactly one of batch (sampled) or model (exact oracle)")
    warnings: list[str] = []
    verdict = check_identifiability(code, supports)
    if not verdict.identifiable:
        w = verdict.witness
        msg = (f"supports {indices_from_mask(w.gamma1)} and {indices_from_mask(w.gamma2)} "
               f"contain the undetectable error {indices_from_mask(w.error)}")
        if not override:
            raise IdentifiabilityError(msg)
        warnings.append("identifiability override: " + msg)

    cols = barred_closure(code, supports)
    rows = select_rows(code, cols, seed=row_seed)
    ms = build_coefficient_matrix(code, cols, rows)
    if batch is not None:
        E_hat = empirical_moments(batch, rows, code)
        shots = batch.count
    else:
        E_hat = dict(zip(rows, exact_stabilizer_moments(model, code, rows).tolist()))
        shots = None
    y = np.array([E_hat[z] for z in rows])
    if clamp and shots:
        eps = 10.0 / shots
        low = y <= 0
        if np.any(low):
            warnings.append(f"clamped {int(low.sum())} non-positive moment(s) to {eps:g}")
            y = np.where(low, eps, y)
    weights = None
    if weighting == "variance":
        if not shots:
            raise ValueError("variance weighting needs sampled moments")
        weights = shots / np.maximum(1.0 - y**2, 1.0 / shots)
    elif weighting != "none":
        raise ValueError(f"unknown weighting {weighting!r}")
    sol = solve_binomial_system(ms, y, weights)
    F = sol.F

    E_table = {a: reconstruct_moments(F, a) for a in cols}
    if any(not 0 < v <= 1 + 1e-12 for v in E_table.values()):
        warnings.append("some reconstructed moments fall outside (0, 1]")

    marginals = {}
    for g in supports:
        q = reconstruct_marginal(F, g, code.data_qubits)
        if np.any(q < -MARGINAL_TOL) or abs(q.sum() - 1) > MARGINAL_TOL:
            warnings.append(f"marginal on {indices_from_mask(g)} renormalized")
            q = np.clip(q, 0.0, None)
            q = q / q.sum()
        marginals[g] = q

    rates, flips = {}, {}
    covered = 0
    for g in supports:
        covered |= code.bar(g)
    if code.kind != "classical":
        n = code.n
        for i in range(n):
            x, z = 1 << i, 1 << (n + i)
            if covered & (x | z) == x | z:
                r = pauli_rates_from_moments(
                    reconstruct_moments(F, x), reconstruct_moments(F, z),
                    reconstruct_moments(F, x | z),
                )
                if min(r) < -RATE_TOL:
                    warnings.append(f"infeasible Pauli rates on qubit {i}: {r}")
                rates[i] = r
    first_bit = 0 if code.kind == "classical" else 2 * code.n
    for j in range(first_bit, code.N):
        if covered >> j & 1:
            flips[j - first_bit] = (1.0 - reconstruct_moments(F, 1 << j)) / 2

    return EstimationReport(F, E_table, marginals, rates, flips, sol.residual_norm,
                            len(rows), shots, warnings)
