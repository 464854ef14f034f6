import itertools
import math

import numpy as np
import pytest

from syndromeid import codes, fourier, noise
from syndromeid.gf2 import indices_from_mask, mask_from_indices, submasks
from syndromeid.pauli import encode_pauli

RATES = (0.9, 0.05, 0.03, 0.02)


def test_weight_t_supports_examples():
    assert noise.make_weight_t_supports(3, 1) == [0b001, 0b010, 0b100]
    assert noise.make_weight_t_supports(4, 2, "pauli", n=2, m=0) == [0b1111]
    assert noise.make_weight_t_supports(4, 1, "pauli", n=2, m=0) == [0b0101, 0b1010]
    assert len(noise.make_weight_t_supports(7, 3)) == math.comb(7, 3)
    with pytest.raises(ValueError):
        noise.make_weight_t_supports(3, 0)
    with pytest.raises(ValueError):
        noise.make_weight_t_supports(5, 1, "pauli", n=2, m=0)


def test_gamma_hat_examples(five):
    assert noise.gamma_hat([0b011]) == [0b001, 0b010, 0b011]
    closure = noise.gamma_hat(noise.make_weight_t_supports(5, 2))
    assert closure == sorted(closure, key=lambda a: (bin(a).count("1"), indices_from_mask(a)))
    assert set(closure) == {a for a in range(1, 32) if bin(a).count("1") <= 2}
    sup = noise.weight_t_supports_for_code(five, 1)
    assert len(noise.gamma_hat(sup, five.n)) == 15


def test_gamma_hat_downward_closed():
    closure = set(noise.gamma_hat([0b10110, 0b01101]))
    for b in closure:
        assert all(c in closure for c in submasks(b) if c)


def test_channel_validation():
    with pytest.raises(noise.ModelError):
        noise.Channel((0, 1), np.array([0.5, 0.5]))
    with pytest.raises(noise.ModelError):
        noise.Channel((0,), np.array([0.7, 0.7]))
    with pytest.raises(noise.ModelError):
        noise.SupportModel(2, 0, (noise.flip_channel(0, 0.1), noise.flip_channel(0, 0.2)))


def test_total_distribution_single_and_trivial():
    ch = noise.Channel((1, 2), np.array([0.4, 0.3, 0.2, 0.1]))
    model = noise.SupportModel(3, 0, (ch,))
    assert np.allclose(noise.total_distribution(model), fourier.embed(ch.dist, ch.support, 3))
    quiet = noise.SupportModel(3, 0, (noise.Channel((0, 1), np.array([1.0, 0, 0, 0])),))
    assert np.allclose(noise.total_distribution(quiet), fourier.point_mass(3))


def test_total_distribution_overlapping_bruteforce():
    a = noise.Channel((0, 1), np.array([0.5, 0.2, 0.2, 0.1]))
    b = noise.Channel((1, 2), np.array([0.6, 0.1, 0.25, 0.05]))
    model = noise.SupportModel(3, 0, (a, b))
    expected = np.zeros(8)
    for la, lb in itertools.product(range(4), repeat=2):
        expected[a.lift(la) ^ b.lift(lb)] += a.dist[la] * b.dist[lb]
    assert np.allclose(noise.total_distribution(model), expected, atol=1e-15)


def test_exact_syndrome_statistics_examples():
    rep = codes.repetition(3)
    quiet = noise.SupportModel.for_code(rep, [noise.flip_channel(0, 0.0)])
    assert noise.exact_syndrome_statistics(quiet, rep) == {0: 1.0}
    p = 0.13
    m = noise.SupportModel.for_code(rep, [noise.flip_channel(1, p)])
    stats = noise.exact_syndrome_statistics(m, rep)
    assert stats[0b11] == pytest.approx(p)
    assert sum(stats.values()) == pytest.approx(1)


def test_exact_moment_matches_dense(five):
    model = noise.single_qubit_model(five, RATES)
    P = noise.total_distribution(model)
    for s in noise.gamma_hat(model.supports, five.n) + five.group():
        assert noise.exact_moment(model, s) == pytest.approx(
            fourier.moment(P, s, twist=True, n_qubits=five.n), abs=1e-12)
    assert noise.exact_moment(model, 0) == 1.0


def test_exact_moment_stabilizer_factorization(five):
    model = noise.single_qubit_model(five, RATES)
    pI, pX, pZ, pY = RATES
    EX, EZ, EY = pI + pX - pZ - pY, pI + pZ - pX - pY, pI + pY - pX - pZ
    s = encode_pauli("YZIZY").bits
    assert noise.exact_moment(model, s) == pytest.approx(EY * EZ * EZ * EY)


def test_exact_moment_disjoint_supports():
    a = noise.Channel((0, 1), np.array([0.5, 0.2, 0.2, 0.1]))
    b = noise.Channel((2,), np.array([0.7, 0.3]))
    model = noise.SupportModel(3, 0, (a, b))
    assert noise.exact_moment(model, 0b011, twist=False) == pytest.approx(a.moment(0b011))


def test_sampler_determinism_and_threads(five):
    model = noise.single_qubit_model(five, RATES)
    b1 = noise.sample(model, five, 200_000, seed=11, threads=1)
    b2 = noise.sample(model, five, 200_000, seed=11, threads=4)
    assert np.array_equal(b1.syndromes, b2.syndromes)
    b3 = noise.sample(model, five, 200_000, seed=12)
    assert not np.array_equal(b1.syndromes, b3.syndromes)


def test_sampler_noiseless(five):
    model = noise.single_qubit_model(five, (1.0, 0.0, 0.0, 0.0))
    assert not noise.sample(model, five, 1000, seed=0).syndromes.any()


def test_sampler_matches_oracle(five):
    model = noise.single_qubit_model(five, (0.85, 0.05, 0.06, 0.04))
    stats = noise.exact_syndrome_statistics(model, five)
    K = 100_000
    batch = noise.sample(model, five, K, seed=2)
    hist = batch.histogram()
    for syn, p in stats.items():
        sigma = math.sqrt(p * (1 - p) / K)
        assert abs(hist.get(syn, 0) / K - p) <= 4 * sigma + 1e-12


def test_sampler_moments_within_four_sigma(five):
    model = noise.single_qubit_model(five, RATES)
    K = 100_000
    batch = noise.sample(model, five, K, seed=5)
    zetas = list(range(1, 16))
    exact = noise.exact_stabilizer_moments(model, five, zetas)
    for z, e in zip(zetas, exact):
        emp = np.mean(1 - 2 * (np.bitwise_count(batch.syndromes & z) & 1).astype(float))
        assert abs(emp - e) <= 4 / math.sqrt(K)


def test_shard_generator_keys_distinct():
    a = noise.shard_generator(1, 0).random(4)
    b = noise.shard_generator(0, 1).random(4)
    c = noise.shard_generator(1, 0).random(4)
    assert np.array_equal(a, c) and not np.array_equal(a, b)
    with pytest.raises(ValueError):
        noise.shard_generator(-1, 0)


def test_default_threads_env(monkeypatch):
    monkeypatch.setenv(noise.THREADS_ENV, "3")
    assert noise.default_threads() == 3
    monkeypatch.setenv(noise.THREADS_ENV, "x")
    assert noise.default_threads() == 1


def test_model_from_config(five):
    cfg = {"uniform_pauli": list(RATES), "channels": []}
    m = noise.model_from_config(cfg, five)
    assert len(m.channels) == 5 and m.satisfies_positivity()
    ds = codes.build_data_syndrome(five, [[1], [1], [0], [0]])
    m2 = noise.model_from_config({"channels": [{"qubit": 0, "pauli": list(RATES)},
                                               {"bit": 4, "flip": 0.1},
                                               {"support": [1, 6], "dist": [0.7, 0.1, 0.1, 0.1]}]}, ds)
    assert m2.supports[1] == 1 << (2 * 5 + 4)
    with pytest.raises(noise.ModelError):
        noise.model_from_config({"channels": [{"bit": 9, "flip": 0.1}]}, ds)
    with pytest.raises(noise.ModelError):
        noise.model_from_config({"uniform_pauli": list(RATES)}, codes.repetition(3))


def test_model_code_mismatch(five):
    model = noise.SupportModel.for_code(codes.repetition(3), [noise.flip_channel(0, 0.1)])
    with pytest.raises(noise.ModelError):
        noise.sample(model, five, 10, seed=0)


def test_pauli_supports_with_measurements():
    sup = noise.make_weight_t_supports(2 * 2 + 1, 1, "pauli", n=2, m=1)
    assert sup == [mask_from_indices([4]), mask_from_indices([0, 2]), mask_from_indices([1, 3])]
