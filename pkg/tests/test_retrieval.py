import numpy as np
import pytest

from caspectral.retrieval import (
    ConditioningError,
    DegenerateSpectrumError,
    UnidentifiableError,
    estimate_rank,
    identifiability_sweep,
    recover_gains,
    toeplitz_atoms,
    vandermonde_decompose,
)
from caspectral.signals import SpectralModel, matched_rmse, steering, synthesize, uniform_frequencies
from caspectral.structured import impulse, toeplitz_adjoint, toeplitz_lift


def t_from_atoms(f, p, n):
    return toeplitz_atoms(f, n) @ np.asarray(p, dtype=float)


def test_toeplitz_atoms_give_rank_one_outer_products():
    a = steering(0.1, 4)
    np.testing.assert_allclose(toeplitz_lift(t_from_atoms([0.1], [1], 4)), np.outer(a, a.conj()),
                               atol=1e-12)


def test_estimate_rank_examples():
    assert estimate_rank(impulse(4)) == 4
    assert estimate_rank(np.zeros(7)) == 0
    assert estimate_rank(t_from_atoms([0.1], [1], 4)) == 1


def test_decompose_single_and_double_atom():
    est = vandermonde_decompose(t_from_atoms([0.1], [1.0], 8), 1)
    assert abs(est.frequencies[0] - 0.1) < 1e-6 and abs(est.powers[0] - 1) < 1e-6
    est = vandermonde_decompose(t_from_atoms([-0.2, 0.3], [1.0, 2.0], 8), 2)
    np.testing.assert_allclose(est.frequencies, [-0.2, 0.3], atol=1e-6)
    np.testing.assert_allclose(est.powers, [1.0, 2.0], rtol=1e-6)
    assert vandermonde_decompose(np.zeros(15), 0).order == 0


@pytest.mark.parametrize("seed", range(10))
def test_round_trip_and_scale_invariance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 10))
    K = int(rng.integers(1, n))
    f = np.sort(uniform_frequencies(K) + rng.uniform(0, 1 / K - 1 / n))
    if K > 1:
        assert np.min(np.diff(f)) >= 1 / n - 1e-12
    p = rng.uniform(0.5, 2, K)
    t = t_from_atoms(f, p, n)
    est = vandermonde_decompose(t, K)
    assert matched_rmse(est.frequencies, f) < 1e-6
    np.testing.assert_allclose(est.powers, p[np.argsort(np.argsort(f))], rtol=1e-6)
    est2 = vandermonde_decompose(3.7 * t, K)
    np.testing.assert_allclose(est2.frequencies, est.frequencies, atol=1e-9)


def test_decompose_errors():
    with pytest.raises(DegenerateSpectrumError):
        vandermonde_decompose(impulse(3), 3)


def test_recover_gains_on_generator_data():
    rng = np.random.default_rng(0)
    f = np.array([-0.3, 0.05, 0.27])
    b = np.array([0.7, 1.2, 0.9])
    ph = rng.uniform(-np.pi, np.pi, (3, 5))
    X = synthesize(SpectralModel(f, b, ph, 9))
    amp, phases, spread = recover_gains(X, f)
    np.testing.assert_allclose(amp, b, atol=1e-8)
    np.testing.assert_allclose(np.angle(np.exp(1j * (phases - ph))), 0, atol=1e-8)
    assert spread.max() < 1e-8

    _, phases, _ = recover_gains(synthesize(SpectralModel([0.2], [1.0], np.zeros((1, 3)), 6)), [0.2])
    np.testing.assert_allclose(phases, 0, atol=1e-12)


def test_recover_gains_conditioning():
    X = np.ones((6, 2))
    with pytest.raises(ConditioningError):
        recover_gains(X, [0.1, 0.1 + 1e-10])
    with pytest.raises(ConditioningError):
        recover_gains(X[:2], [0.1, 0.2, 0.3])


def test_toeplitz_adjoint_of_atoms_is_consistent():
    # the powers solve the weighted least squares of t on the atoms exactly
    t = t_from_atoms([0.1, -0.35], [1.5, 0.5], 5)
    np.testing.assert_allclose(toeplitz_adjoint(toeplitz_lift(t)), np.r_[1:6, 4:0:-1] * t, atol=1e-12)


def test_sweep_trivial_atom_returns_first_n():
    X = synthesize(SpectralModel([0.2], [1.0], np.zeros((1, 4)), 5))
    est, results = identifiability_sweep(X, full_output=True)
    assert len(results) == 1 and est.n == 3
    assert abs(est.frequencies[0] - 0.2) < 1e-4


def test_sweep_identifies_more_frequencies_than_samples():
    rng = np.random.default_rng(2)
    f = uniform_frequencies(6)
    X = synthesize(SpectralModel(f, np.ones(6), rng.uniform(0, 2 * np.pi, (6, 100)), 5))
    est = identifiability_sweep(X)
    assert est.order == 6 and matched_rmse(est.frequencies, f) <= 1e-4
    assert est.phases.shape == (6, 100)


def test_sweep_reports_unidentifiable():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2))
    with pytest.raises(UnidentifiableError):
        identifiability_sweep(X, n_max=4)
    est, results = identifiability_sweep(X, n_max=4, full_output=True)
    assert est is None and len(results) == 2
