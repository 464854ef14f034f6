import itertools

import numpy as np
import pytest

from syndromeid import codes, estimate, fourier, identify, noise
from syndromeid.estimate import NonPositiveMomentError
from syndromeid.gf2 import mask_from_indices
from syndromeid.noise import SampleBatch

RATES = (0.9, 0.05, 0.03, 0.02)


def test_pauli_rates_examples():
    assert estimate.pauli_rates_from_moments(1, 1, 1) == (1, 0, 0, 0)
    assert estimate.pauli_rates_from_moments(0, 0, 0) == (0.25, 0.25, 0.25, 0.25)
    r = estimate.pauli_rates_from_moments(0.90, 0.86, 0.84)
    assert np.allclose(r, RATES, atol=1e-15)
    assert sum(r) == pytest.approx(1)


def test_empirical_moments_examples(five):
    quiet = SampleBatch(np.zeros(100, dtype=np.int64), 0, 4)
    assert all(v == 1 for v in estimate.empirical_moments(quiet, range(1, 16)).values())
    ones = SampleBatch(np.ones(50, dtype=np.int64), 0, 1)
    assert estimate.empirical_moments(ones, [1]) == {1: -1.0}
    with pytest.raises(ValueError):
        estimate.empirical_moments(SampleBatch(np.zeros(0, dtype=np.int64), 0, 1), [1])


def test_empirical_moments_dense_and_direct_agree(five):
    model = noise.single_qubit_model(five, RATES)
    batch = noise.sample(model, five, 20_000, seed=1)
    dense = estimate.empirical_moments(batch, range(1, 16))
    for z in range(1, 16):
        direct = 1 - 2 * np.mean(np.bitwise_count(batch.syndromes & z) & 1)
        assert dense[z] == pytest.approx(direct, abs=1e-12)


def test_empirical_moments_redundant_checks():
    # a redundant check row is ignored when the code is supplied
    c = codes.classical_code([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    model = noise.SupportModel.for_code(c, [noise.flip_channel(j, 0.1) for j in range(3)])
    batch = noise.sample(model, c, 5000, seed=3)
    E = estimate.empirical_moments(batch, [1, 2, 3], c)
    exact = noise.exact_stabilizer_moments(model, c, [1, 2, 3])
    assert np.allclose(list(E.values()), exact, atol=0.05)


def test_noiseless_fixed_point(five):
    ms = identify.build_coefficient_matrix(
        five, identify.barred_closure(five, noise.weight_t_supports_for_code(five, 1)))
    sol = estimate.solve_binomial_system(ms, np.ones(15))
    assert all(v == pytest.approx(1.0) for v in sol.F.values())


def test_solver_errors(five):
    ms = identify.build_coefficient_matrix(
        five, identify.barred_closure(five, noise.weight_t_supports_for_code(five, 1)))
    y = np.full(15, 0.5)
    y[3] = -0.1
    with pytest.raises(NonPositiveMomentError) as info:
        estimate.solve_binomial_system(ms, y)
    assert info.value.rows == [ms.row_coeffs[3]]
    with pytest.raises(ValueError):
        estimate.solve_binomial_system(ms, np.ones(3))
    bad = identify.build_coefficient_matrix(five, identify.barred_closure(five, [five.generator_rows[0]]))
    with pytest.raises(identify.IdentifiabilityError):
        estimate.solve_binomial_system(bad, np.full(bad.shape[0], 0.9))


def test_plant_recover_five_qubit(five):
    rng = np.random.default_rng(0)
    rates = []
    for _ in range(5):
        p = rng.dirichlet([1, 1, 1]) * rng.uniform(0.05, 0.3)
        rates.append([1 - p.sum(), *p])
    model = noise.single_qubit_model(five, rates)
    rep = estimate.run_estimation(five, model.supports, model=model)
    for i in range(5):
        assert np.allclose(rep.pauli_rates[i], rates[i], atol=1e-10)
        assert np.allclose(rep.marginals[model.supports[i]], rates[i], atol=1e-10)
    assert rep.residual_norm <= 1e-10 and not rep.warnings
    for a, F in rep.F_hat.items():
        assert F == pytest.approx(fourier.inclusion_exclusion_transform(lambda b: noise.exact_moment(model, b), a),
                                  rel=1e-10)
    assert all(0 < v <= 1 for v in rep.E_hat.values())


def test_toric2_single_qubit_not_identifiable():
    # pure distance 2 admits no nontrivial weight-t family
    code = codes.toric(2)
    model = noise.single_qubit_model(code, RATES)
    with pytest.raises(identify.IdentifiabilityError):
        estimate.run_estimation(code, model.supports, model=model)


@pytest.mark.parametrize("name", ["repetition", "hamming74", "steane", "toric3"])
def test_plant_recover_catalog(name):
    code = {"repetition": codes.repetition(5), "hamming74": codes.hamming74(), "steane": codes.steane(),
            "toric3": codes.toric(3)}[name]
    rng = np.random.default_rng(len(name))
    if code.kind == "classical":
        flips = rng.uniform(0.01, 0.2, size=code.n)
        model = noise.SupportModel.for_code(code, [noise.flip_channel(j, p) for j, p in enumerate(flips)])
    else:
        rates = [[0.85, *rng.dirichlet([1, 1, 1]) * 0.15] for _ in range(code.n)]
        model = noise.single_qubit_model(code, rates)
    rep = estimate.run_estimation(code, model.supports, model=model)
    for ch in model.channels:
        assert np.allclose(rep.marginals[ch.mask], ch.dist, atol=1e-9)
    for a, v in rep.E_hat.items():
        assert v == pytest.approx(noise.exact_moment(model, a), abs=1e-9)


def test_plant_recover_correlated_classical():
    code = codes.repetition(7)
    sup = [mask_from_indices([0, 1]), mask_from_indices([2]), mask_from_indices([4, 5]), mask_from_indices([6])]
    assert identify.is_identifiable(code, sup)
    chans = [noise.Channel((0, 1), np.array([0.8, 0.08, 0.07, 0.05])), noise.flip_channel(2, 0.1),
             noise.Channel((4, 5), np.array([0.75, 0.1, 0.1, 0.05])), noise.flip_channel(6, 0.2)]
    model = noise.SupportModel.for_code(code, chans)
    rep = estimate.run_estimation(code, sup, model=model)
    for ch in chans:
        assert np.allclose(rep.marginals[ch.mask], ch.dist, atol=1e-9)


def test_overlapping_support_marginal_is_total_marginal():
    code = codes.repetition(7)
    a = noise.Channel((0, 1), np.array([0.8, 0.1, 0.06, 0.04]))
    b = noise.Channel((1, 2), np.array([0.85, 0.05, 0.07, 0.03]))
    model = noise.SupportModel.for_code(code, [a, b])
    assert identify.is_identifiable(code, model.supports)
    rep = estimate.run_estimation(code, model.supports, model=model)
    P = noise.total_distribution(model)
    brute = np.zeros(4)
    for e, p in enumerate(P):
        brute[(e & 1) | ((e >> 1 & 1) << 1)] += p
    assert np.allclose(rep.marginals[a.mask], brute, atol=1e-10)
    assert not np.allclose(brute, a.dist)


def test_data_syndrome_plant_recover(five):
    ds = codes.build_data_syndrome(five, [[1, 0], [1, 0], [0, 1], [0, 1]])
    flips = [0.01, 0.02, 0.03, 0.04, 0.05, 0.06]
    model = noise.single_qubit_model(ds, RATES, flip=flips)
    rep = estimate.run_estimation(ds, model.supports, model=model)
    assert rep.rows_used == 63 and len(rep.F_hat) == 21
    assert all(np.allclose(r, RATES, atol=1e-10) for r in rep.pauli_rates.values())
    assert np.allclose([rep.flip_rates[j] for j in range(6)], flips, atol=1e-10)


def test_non_identifiable_gate(five):
    sup = noise.weight_t_supports_for_code(five, 2)
    model = noise.single_qubit_model(five, RATES)
    with pytest.raises(identify.IdentifiabilityError, match="undetectable"):
        estimate.run_estimation(five, sup, model=model)


def test_argument_checks(five):
    model = noise.single_qubit_model(five, RATES)
    with pytest.raises(ValueError):
        estimate.run_estimation(five, model.supports)
    with pytest.raises(ValueError):
        estimate.run_estimation(five, model.supports, model=model, weighting="variance")
    with pytest.raises(ValueError):
        estimate.run_estimation(five, model.supports, model=model, weighting="bogus")


def test_sampled_estimation_and_weighting(five):
    model = noise.single_qubit_model(five, RATES)
    batch = noise.sample(model, five, 400_000, seed=4)
    for weighting in ("none", "variance"):
        rep = estimate.run_estimation(five, model.supports, batch=batch, weighting=weighting)
        err = max(abs(np.array(r) - RATES).max() for r in rep.pauli_rates.values())
        assert err < 5e-3 and rep.shots == 400_000


def test_too_few_shots(five):
    model = noise.single_qubit_model(five, (0.55, 0.15, 0.15, 0.15))
    batch = noise.sample(model, five, 10, seed=0)
    with pytest.raises(NonPositiveMomentError):
        estimate.run_estimation(five, model.supports, batch=batch)
    rep = estimate.run_estimation(five, model.supports, batch=batch, clamp=True)
    assert any("clamped" in w for w in rep.warnings)


def test_monotone_consistency(five):
    model = noise.single_qubit_model(five, RATES)
    for seed in (0, 1):
        errs = []
        for K in (10**3, 10**4, 10**5, 10**6):
            rep = estimate.run_estimation(five, model.supports, batch=noise.sample(model, five, K, seed))
            errs.append(np.array([np.array(rep.pauli_rates[i]) for i in range(5)]).ravel() - np.tile(RATES, 5))
        errs = np.abs(np.array(errs))
        for col in errs.T:
            violations = sum(b > a for a, b in zip(col, col[1:]))
            assert violations <= 1 or col[-1] < 2e-3


def test_symmetry_invariance(five):
    model = noise.single_qubit_model(five, RATES)
    cols = identify.barred_closure(five, model.supports)
    ms = identify.build_coefficient_matrix(five, cols)
    F = {b: fourier.inclusion_exclusion_transform(lambda a: noise.exact_moment(model, a), b) for b in cols}
    base_stats = noise.exact_syndrome_statistics(model, five)
    base = estimate.solve_binomial_system(ms, noise.exact_stabilizer_moments(model, five, ms.row_coeffs))
    basis = identify.sign_symmetries(ms)
    base_E = np.array([fourier.moebius_inverse_restricted(F, s) for s in ms.row_labels])
    valid = 0
    for coeffs in itertools.product((0, 1), repeat=len(basis)):
        eps = None
        for c, v in zip(coeffs, basis):
            if c:
                eps = v if eps is None else eps + v
        if eps is None:
            continue
        flipped = identify.flip_signs(F, cols, eps)
        E_flip = np.array([fourier.moebius_inverse_restricted(flipped, s) for s in ms.row_labels])
        assert np.allclose(E_flip, base_E, atol=1e-12)
        rates = []
        for i in range(5):
            x, z = 1 << i, 1 << (5 + i)
            E = [fourier.moebius_inverse_restricted(flipped, a) for a in (x, z, x | z)]
            rates.append(estimate.pauli_rates_from_moments(*E))
        # only flips whose mirrored rates form a distribution describe a physical model
        if min(min(r) for r in rates) < -1e-15:
            continue
        valid += 1
        other = noise.single_qubit_model(five, np.clip(rates, 0, 1))
        stats = noise.exact_syndrome_statistics(other, five)
        assert stats.keys() == base_stats.keys()
        assert all(stats[k] == pytest.approx(base_stats[k], abs=1e-12) for k in stats)
        sol = estimate.solve_binomial_system(ms, noise.exact_stabilizer_moments(other, five, ms.row_coeffs))
        assert all(sol.F[b] == pytest.approx(base.F[b], rel=1e-10) for b in cols)
    assert valid > 0


def test_row_subset_for_large_group():
    code = codes.toric(4)
    assert code.num_generators > estimate.FULL_GROUP_MAX_GENERATORS
    model = noise.single_qubit_model(code, (0.94, 0.02, 0.03, 0.01))
    rep = estimate.run_estimation(code, model.supports, model=model, row_seed=1)
    assert rep.rows_used < code.group_size
    assert all(np.allclose(r, (0.94, 0.02, 0.03, 0.01), atol=1e-9) for r in rep.pauli_rates.values())


def test_report_serialization(five):
    model = noise.single_qubit_model(five, RATES)
    rep = estimate.run_estimation(five, model.supports, model=model)
    d = rep.to_dict()
    assert {"f_moments", "e_moments", "marginals", "pauli_rates", "residual", "shots", "warnings"} <= d.keys()
    assert d["pauli_rates"][0]["qubit"] == 0
    lines = rep.rates_csv().splitlines()
    assert lines[0] == "kind,index,p_I,p_X,p_Z,p_Y" and len(lines) == 6
    row = lines[1].split(",")
    assert np.allclose([float(x) for x in row[2:]], RATES, atol=1e-10)


def test_reconstruct_helpers():
    F = {0b01: 0.9, 0b10: 0.8, 0b11: 1.1}
    assert estimate.reconstruct_moments(F, 0b01) == 0.9
    assert estimate.reconstruct_moments(F, 0b11) == pytest.approx(0.9 * 0.8 * 1.1)
    assert estimate.reconstruct_moments({b: 1.0 for b in range(1, 4)}, 0b11) == 1.0
    q = estimate.reconstruct_marginal({0b01: 1.0, 0b10: 1.0, 0b11: 1.0}, 0b11, 1)
    assert np.allclose(q, [1, 0, 0, 0])
