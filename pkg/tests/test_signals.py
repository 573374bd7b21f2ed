import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from caspectral.signals import (
    NoiseSpec,
    Observation,
    SpectralModel,
    matched_rmse,
    min_separation,
    observe,
    random_frequencies,
    random_model,
    snr_to_sigma,
    steering,
    success,
    synthesize,
    uniform_frequencies,
    wrap,
)
from caspectral.structured import DimensionError, InvariantError


def test_synthesize_matches_double_sum():
    rng = np.random.default_rng(0)
    m = random_model(rng, N=7, L=3, K=2)
    X = synthesize(m)
    for j in range(7):
        for l in range(3):
            want = sum(m.amplitudes[k] * np.exp(1j * (2 * np.pi * m.frequencies[k] * j + m.phases[k, l]))
                       for k in range(2))
            assert abs(X[j, l] - want) < 1e-12


def test_synthesize_has_constant_modulus_components():
    rng = np.random.default_rng(1)
    m = random_model(rng, N=9, L=6, K=3, separation=0.2)
    X = synthesize(m)
    A = np.exp(2j * np.pi * np.outer(np.arange(9), m.frequencies))
    C = np.linalg.lstsq(A, X, rcond=None)[0]
    np.testing.assert_allclose(np.abs(C), np.repeat(m.amplitudes[:, None], 6, axis=1), atol=1e-10)


def test_model_validation():
    with pytest.raises(InvariantError):
        SpectralModel([0.5], [1.0], [[0.0]], 4)
    with pytest.raises(InvariantError):
        SpectralModel([0.1], [0.0], [[0.0]], 4)
    with pytest.raises(InvariantError):
        SpectralModel([0.1, 0.1], [1.0, 1.0], [[0.0], [0.0]], 4)
    with pytest.raises(DimensionError):
        SpectralModel([0.1, 0.2], [1.0], [[0.0], [0.0]], 4)


def test_observation_validation_and_helpers():
    obs = Observation([1, 3], np.ones((2, 2)), 4)
    assert obs.M == 2 and obs.L == 2 and obs.span == 3
    np.testing.assert_array_equal(obs.mask, [True, False, True, False])
    np.testing.assert_array_equal(obs.zero_filled()[:, 0], [1, 0, 1, 0])
    with pytest.raises(InvariantError):
        Observation([3, 1], np.ones((2, 2)), 4)
    with pytest.raises(InvariantError):
        Observation([1, 5], np.ones((2, 2)), 4)
    with pytest.raises(DimensionError):
        Observation([1, 2], np.ones((3, 2)), 4)


def test_observe_noiseless_examples():
    X = np.arange(6, dtype=complex).reshape(3, 2)
    np.testing.assert_array_equal(observe(X, [1, 2, 3]).values, X)
    np.testing.assert_array_equal(observe(X, [1, 3]).values, X[[0, 2]])


def test_noise_variance_and_determinism():
    X = np.zeros((1000, 100), dtype=complex)
    sigma = 0.37
    E = observe(X, np.arange(1, 1001), NoiseSpec(sigma, 5)).values
    assert abs(np.mean(np.abs(E) ** 2) / sigma - 1) < 0.02
    assert abs(np.var(E.real) / (sigma / 2) - 1) < 0.02
    assert abs(np.mean(E.real * E.imag)) < 0.01 * sigma
    np.testing.assert_array_equal(E, observe(X, np.arange(1, 1001), NoiseSpec(sigma, 5)).values)


def test_snr_to_sigma_examples():
    X = np.ones((4, 5), dtype=complex)
    assert snr_to_sigma(X, 0) == pytest.approx(1.0)
    assert snr_to_sigma(X, 20) == pytest.approx(0.01)


def test_realized_snr_matches_target():
    rng = np.random.default_rng(2)
    m = random_model(rng, N=11, L=20, K=3)
    X = synthesize(m)
    sigma = snr_to_sigma(X, 20)
    noise_energy = [np.linalg.norm(observe(X, np.arange(1, 12), NoiseSpec(sigma, s)).values - X) ** 2
                    for s in range(1000)]
    realized = 10 * np.log10(np.linalg.norm(X) ** 2 / np.mean(noise_energy))
    assert abs(realized - 20) < 0.2


def test_matched_rmse_examples():
    assert matched_rmse([0.1, 0.2], [0.2, 0.1]) == 0
    assert matched_rmse([-0.499], [0.499]) == pytest.approx(0.002)
    assert matched_rmse([0.0, 0.3], [0.01, 0.3]) == pytest.approx(0.01 / np.sqrt(2))
    with pytest.raises(DimensionError):
        matched_rmse([0.1], [0.1, 0.2])


freqs = st.lists(st.floats(-0.5, 0.4999, allow_nan=False), min_size=1, max_size=6)


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_matched_rmse_is_a_pseudometric(data):
    a = np.array(data.draw(freqs))
    b = np.array(data.draw(st.lists(st.floats(-0.5, 0.4999), min_size=a.size, max_size=a.size)))
    c = np.array(data.draw(st.lists(st.floats(-0.5, 0.4999), min_size=a.size, max_size=a.size)))
    assert matched_rmse(a, b) == pytest.approx(matched_rmse(b, a), abs=1e-12)
    assert matched_rmse(a, a[::-1]) <= 1e-12
    assert matched_rmse(a, wrap(a + 1.0)) <= 1e-12
    # triangle inequality holds for the optimal-assignment RMSE
    assert matched_rmse(a, c) <= matched_rmse(a, b) + matched_rmse(b, c) + 1e-12


def test_matched_rmse_large_k_uses_cyclic_matching():
    f = uniform_frequencies(12)
    perm = np.random.default_rng(3).permutation(12)
    assert matched_rmse(f, f[perm] + 1e-6) == pytest.approx(1e-6, rel=1e-6)


def test_success_rule():
    assert success([0.1, 0.2], [0.2, 0.1 + 5e-5])
    assert not success([0.1, 0.2], [0.2, 0.1 + 5e-4])
    assert not success([0.1, 0.2], [0.1])


def test_uniform_frequencies():
    np.testing.assert_allclose(uniform_frequencies(2), [-0.45, 0.05])
    f = uniform_frequencies(7)
    assert min_separation(f) == pytest.approx(1 / 7)


def test_random_frequencies_respects_separation():
    rng = np.random.default_rng(4)
    for _ in range(20):
        f = random_frequencies(4, rng, separation=1.2 / 11)
        assert min_separation(f) > 1.2 / 11
        assert np.all((f >= -0.5) & (f < 0.5))
    with pytest.raises(ValueError):
        random_frequencies(3, rng, separation=0.4)


def test_steering_is_unit_modulus():
    a = steering(0.123, 8)
    np.testing.assert_allclose(np.abs(a), 1)
    assert a[0] == 1
