import numpy as np
import pytest

from caspectral.admm import (
    BOYD_SCHEDULE,
    COMPLETION_SCHEDULE,
    AdmmOptions,
    adapt_rho,
    consensus_admm,
)
from caspectral.structured import NumericalError, psd_project


def test_options_defaults_and_validation():
    o = AdmmOptions()
    assert (o.abs_tol, o.rel_tol, o.max_iter) == (1e-4, 1e-5, 1000)
    for bad in (dict(abs_tol=0), dict(rel_tol=-1), dict(max_iter=0), dict(rho0=0),
                dict(relaxation=2.0), dict(mu=1.0), dict(adapt_every=0), dict(balance="x")):
        with pytest.raises(ValueError):
            AdmmOptions(**bad)


def test_with_defaults_fills_only_unset_fields():
    o = AdmmOptions(mu=3.0).with_defaults(**BOYD_SCHEDULE)
    assert o.mu == 3.0 and o.balance == "raw" and o.adapt_every == 1
    o = AdmmOptions(adapt_rho=False).with_defaults(**COMPLETION_SCHEDULE)
    assert o.adapt_rho is False and o.relaxation == 1.5


def test_adapt_rho_examples():
    assert adapt_rho(1.0, 1.0, 1.0) == (1.0, 1.0)
    assert adapt_rho(1.0, 20.0, 1.0) == (2.0, 0.5)
    assert adapt_rho(1.0, 1.0, 20.0) == (0.5, 2.0)


def _nearest_psd_problem(A):
    # min 1/2 ||x - A||^2  s.t.  x PSD, written as x = Q, Q PSD
    def assemble(x):
        return x[0][None]

    def update(P, rho):
        return ((A + rho * P[0]) / (1 + rho),)

    return assemble, update


@pytest.mark.parametrize("schedule", [BOYD_SCHEDULE, COMPLETION_SCHEDULE])
def test_nearest_psd_toy_problem(schedule):
    rng = np.random.default_rng(0)
    G = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    A = 0.5 * (G + G.conj().T)
    assemble, update = _nearest_psd_problem(A)
    opts = AdmmOptions(rho0=1.0, abs_tol=1e-9, rel_tol=1e-9, max_iter=5000).with_defaults(**schedule)
    (x,), Q, Lam, trace = consensus_admm(assemble, update, (np.zeros((5, 5)),), 1.0, opts)
    assert trace.converged
    np.testing.assert_allclose(x, psd_project(A), atol=1e-6)
    # multiplier equals the negative part of A at the optimum
    np.testing.assert_allclose(Lam[0], psd_project(-A), atol=1e-5)


def test_divergence_reports_iterations():
    def assemble(x):
        return x[0][None]

    def update(P, rho):
        return (P[0] * np.nan,)

    with pytest.raises(NumericalError, match="diverged at iteration 1"):
        consensus_admm(assemble, update, (np.eye(2),), 1.0, AdmmOptions())


def test_history_and_callback():
    A = np.diag([1.0, -1.0]).astype(complex)
    assemble, update = _nearest_psd_problem(A)
    seen = []
    *_, trace = consensus_admm(assemble, update, (np.zeros((2, 2)),), 1.0, AdmmOptions(),
                               callback=lambda it, x: seen.append(it))
    assert seen == list(range(1, trace.iterations + 1))
    assert len(trace.history) == trace.iterations
