"""ADMM for the Hankel-Toeplitz SLRA programs (SACA).

Both programs share the constraint that, for every channel ``l``,

    [[T conj(t), H conj(Z[:, l])], [H Z[:, l], T t]]  is PSD,

with ``t`` conjugate-symmetric of length ``2n-1`` and ``Z`` of shape
``(2n-1, L)``. The denoising program minimizes
``1/2 ||Y_omega - Z_omega||^2 + tau/n tr(T t)``; the completion program
minimizes ``tr(T t)/n`` with ``Z_omega`` pinned to the data.
"""

import math
from dataclasses import dataclass

import numpy as np

from .admm import BOYD_SCHEDULE, COMPLETION_SCHEDULE, AdmmOptions, AdmmTrace, consensus_admm
from .signals import Observation
from .structured import (
    DimensionError,
    assemble_block,
    diag_weights,
    hankel_adjoint,
    impulse,
    split_block,
    toeplitz_adjoint,
    toeplitz_lift,
)

__all__ = [
    "SolveResult",
    "default_n",
    "solve_denoising",
    "solve_noiseless",
    "slra_value",
]


def default_n(N):
    return math.ceil((N + 1) / 2)


@dataclass
class SolveResult:
    t: np.ndarray
    Z: np.ndarray
    objective: float
    trace: AdmmTrace

    @property
    def n(self):
        return (self.t.size + 1) // 2

    @property
    def converged(self):
        return self.trace.converged

    @property
    def iterations(self):
        return self.trace.iterations

    @property
    def toeplitz(self):
        return toeplitz_lift(self.t, check=False)


def _resolve(obs, opts, pinned):
    """Fill in problem-dependent defaults.

    Denoising: ``rho0 = 1/sqrt(N)`` with per-iteration residual balancing.
    Completion: ``rho0 = 1``, over-relaxed, balancing scaled residuals every
    25 iterations. The completion program is solved on unit-RMS data with
    its objective multiplied by ``n L`` (same minimizers), which puts the
    primal and dual variables on a common scale so the absolute stopping
    tolerances mean the same thing for every data set.
    """
    opts = AdmmOptions() if opts is None else opts
    n = default_n(obs.N) if opts.n is None else opts.n
    if n < default_n(obs.N):
        raise DimensionError(f"n={n} is below ceil((N+1)/2)={default_n(obs.N)}")
    if pinned:
        opts = opts.with_defaults(rho0=1.0, **COMPLETION_SCHEDULE)
    else:
        opts = opts.with_defaults(rho0=1 / math.sqrt(obs.N), **BOYD_SCHEDULE)
    return opts.replace(n=n)


def _solve(obs, weight, opts, pinned, callback=None):
    opts = _resolve(obs, opts, pinned)
    n, rho0 = opts.n, opts.rho0
    L = obs.L
    scale = 1.0
    if pinned:
        # solve the equivalent program on unit-RMS data with objective n L tr(T t)/n
        rms = math.sqrt(np.mean(np.abs(obs.values) ** 2)) if obs.values.size else 0.0
        scale = rms if rms > 0 else 1.0
        weight = n * L
        obs = Observation(obs.omega, obs.values / scale, obs.N)
    rows = obs.omega - 1
    d = diag_weights(n)
    xi = impulse(n)
    omega = np.zeros(2 * n - 1)
    omega[rows] = 1.0
    Y = np.zeros((2 * n - 1, L), dtype=complex)
    Y[rows] = obs.values

    def assemble(x):
        t, Z = x
        return assemble_block(t, Z, check=False)

    def update(P, rho):
        P1, P2, P3 = split_block(P)
        h = hankel_adjoint(P3).T
        if pinned:
            Z = h / d[:, None]
            Z[rows] = obs.values
        else:
            Z = (omega[:, None] * Y + 2 * rho * h) / (omega + 2 * rho * d)[:, None]
        S = np.sum(np.conj(P1) + P2, axis=0)
        t = (toeplitz_adjoint(S, check=False) - (weight / rho) * xi) / (2 * L * d)
        t = 0.5 * (t + np.conj(t[::-1]))
        return t, Z

    x0 = (np.zeros(2 * n - 1, dtype=complex), Y.copy())
    (t, Z), _, _, trace = consensus_admm(assemble, update, x0, rho0, opts, callback=callback)
    t, Z = scale * t, scale * Z
    return SolveResult(t, Z, float(t[n - 1].real), trace)


def solve_denoising(obs: Observation, tau, opts=None):
    """Solve the denoising SLRA with regularization ``tau > 0``."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    return _solve(obs, float(tau), opts, pinned=False)


def solve_noiseless(obs: Observation, opts=None):
    """Solve the completion SLRA with ``Z[omega] == Y_omega`` enforced exactly."""
    return _solve(obs, 1.0, opts, pinned=True)


def slra_value(X, n=None, opts=None):
    """Optimal value of the full-data SLRA for ``X`` at half-dimension ``n``."""
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    N = X.shape[0]
    obs = Observation(np.arange(1, N + 1), X, N)
    opts = AdmmOptions() if opts is None else opts
    if n is not None:
        opts = opts.replace(n=n)
    return solve_noiseless(obs, opts).objective
