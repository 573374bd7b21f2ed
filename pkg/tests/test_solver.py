import numpy as np
import pytest

from caspectral.admm import AdmmOptions
from caspectral.retrieval import estimate_rank, vandermonde_decompose
from caspectral.signals import (
    NoiseSpec,
    Observation,
    SpectralModel,
    matched_rmse,
    observe,
    random_model,
    synthesize,
    uniform_frequencies,
)
from caspectral.solver import default_n, slra_value, solve_denoising, solve_noiseless
from caspectral.structured import DimensionError, assemble_block, is_conj_symmetric

TIGHT = AdmmOptions(abs_tol=1e-7, rel_tol=1e-8, max_iter=20000)


def ca_data(f, b, N, L, seed=0):
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0, 2 * np.pi, (len(f), L))
    return synthesize(SpectralModel(f, b, phases, N))


def test_default_n():
    assert [default_n(N) for N in (5, 10, 11)] == [3, 6, 6]


def test_zero_data_gives_zero_solution():
    obs = Observation(np.arange(1, 6), np.zeros((5, 3)), 5)
    for opts, tol in ((None, 1e-3), (TIGHT, 1e-6)):
        for res in (solve_denoising(obs, 0.5, opts), solve_noiseless(obs, opts)):
            assert res.converged
            assert np.abs(res.t).max() < tol and np.abs(res.Z).max() < tol
    assert slra_value(np.zeros((5, 2))) == pytest.approx(0, abs=1e-3)


def test_argument_errors():
    obs = Observation(np.arange(1, 6), np.ones((5, 1)), 5)
    for tau in (0, -1.0):
        with pytest.raises(ValueError):
            solve_denoising(obs, tau)
    with pytest.raises(DimensionError):
        solve_noiseless(obs, AdmmOptions(n=2))


def test_single_atom_value_is_its_amplitude():
    X = ca_data([0.13], [1.5], 11, 4)
    assert slra_value(X, opts=TIGHT) == pytest.approx(1.5, abs=1e-3)


def test_three_atom_value_is_amplitude_sum():
    b = [0.71, 1.19, 0.84]
    X = ca_data([-0.3, 0.0, 0.3], b, 11, 6, seed=1)
    res = solve_noiseless(Observation(np.arange(1, 12), X, 11), TIGHT)
    assert res.converged
    assert estimate_rank(res.t) == 3
    assert res.objective == pytest.approx(sum(b), rel=1e-2)


def test_iterates_keep_structure():
    X = ca_data([-0.2, 0.25], [1.0, 0.8], 9, 3)
    res = solve_noiseless(Observation(np.arange(1, 10), X, 9), TIGHT)
    assert is_conj_symmetric(res.t, tol=1e-12)
    np.testing.assert_allclose(res.Z[:9], X, atol=1e-12)  # observed rows stay pinned
    w = np.linalg.eigvalsh(assemble_block(res.t, res.Z))
    assert w.min() >= -1e-6 * np.abs(w).max()


def test_two_uniform_frequencies_recover():
    X = ca_data(uniform_frequencies(2), [1.0, 1.0], 5, 10, seed=3)
    res = solve_noiseless(Observation(np.arange(1, 6), X, 5))
    assert res.converged
    est = vandermonde_decompose(res.t, estimate_rank(res.t))
    assert matched_rmse(est.frequencies, [-0.45, 0.05]) <= 1e-4


@pytest.mark.parametrize("N", [7, 9, 11])
def test_monotone_in_n_and_bounded_by_amplitudes(N):
    rng = np.random.default_rng(N)
    for _ in range(7 if N < 11 else 6):
        m = random_model(rng, N=N, L=3, K=2, separation=1.0 / N)
        X = synthesize(m)
        vals = [slra_value(X, n) for n in range(default_n(N), default_n(N) + 3)]
        for a, b in zip(vals, vals[1:]):
            assert a <= b + 1e-3 * (1 + a)
        assert vals[0] <= m.amplitudes.sum() + 1e-3


def test_completion_matches_interior_point():
    from oracles import saca_completion

    rng = np.random.default_rng(5)
    m = random_model(rng, N=7, L=2, K=2, separation=0.2)
    X = synthesize(m)
    omega = np.array([1, 2, 4, 6, 7])
    obs = observe(X, omega)
    ref = saca_completion(obs.values, omega - 1, 7, 4)
    assert solve_noiseless(obs, TIGHT).objective == pytest.approx(ref, rel=1e-4)


def test_denoising_matches_interior_point():
    from oracles import saca_denoising

    rng = np.random.default_rng(6)
    X = synthesize(random_model(rng, N=7, L=3, K=2, separation=0.2))
    obs = observe(X, np.arange(1, 8), NoiseSpec(0.05, 1))
    tau = 0.8
    ref = saca_denoising(obs.values, np.arange(7), 7, 4, tau)
    res = solve_denoising(obs, tau, TIGHT)
    val = 0.5 * np.linalg.norm(obs.values - res.Z[:7]) ** 2 + tau * res.objective
    assert val == pytest.approx(ref, rel=1e-4)


def test_denoising_twenty_db_example():
    from caspectral.dual import tau_for
    from caspectral.signals import snr_to_sigma

    rng = np.random.default_rng(11)
    f = np.array([-0.01, 0.0, 0.35])
    errs = []
    for trial in range(5):
        m = random_model(rng, N=11, L=20, K=3, frequencies=f)
        X = synthesize(m)
        sigma = snr_to_sigma(X, 20)
        obs = observe(X, np.arange(1, 12), NoiseSpec(sigma, trial))
        res = solve_denoising(obs, tau_for(obs, sigma, "explicit"))
        errs.append(matched_rmse(vandermonde_decompose(res.t, 3).frequencies, f))
    assert np.mean(errs) < 1e-2
