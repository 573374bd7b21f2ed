"""Toeplitz-only baselines solved with the same consensus ADMM.

``anm_solve``: multichannel ANM, one PSD block ``[[W, X^H], [X, T t]]`` of
size ``L + N`` with objective ``(tr T t + tr W) / (2 sqrt(N))``.

``interform_solve``: one block ``[[w, X[:, l]^H], [X[:, l], T t]]`` of size
``N + 1`` per channel, sharing ``t`` and the scalar ``w``, with objective
``tr(T t) / (2N) + w / 2``.

Both take ``tau=None`` for the noiseless program (``X_omega`` pinned to the
data) and ``tau > 0`` for ``1/2 ||Y_omega - X_omega||^2 + tau * objective``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .admm import BOYD_SCHEDULE, COMPLETION_SCHEDULE, AdmmOptions, AdmmTrace, consensus_admm
from .signals import Observation
from .structured import diag_weights, impulse, toeplitz_adjoint, toeplitz_lift

__all__ = ["AnmResult", "InterFormResult", "anm_solve", "interform_solve", "anm_tau"]


@dataclass
class AnmResult:
    t: np.ndarray
    W: np.ndarray
    X: np.ndarray
    objective: float
    trace: AdmmTrace

    @property
    def converged(self):
        return self.trace.converged

    @property
    def iterations(self):
        return self.trace.iterations

    def block(self):
        T = toeplitz_lift(self.t, check=False)
        return np.block([[self.W, self.X.conj().T], [self.X, T]])


@dataclass
class InterFormResult:
    t: np.ndarray
    w: float
    X: np.ndarray
    objective: float
    trace: AdmmTrace

    @property
    def converged(self):
        return self.trace.converged

    @property
    def iterations(self):
        return self.trace.iterations

    def blocks(self):
        T = toeplitz_lift(self.t, check=False)
        N, L = self.X.shape
        out = np.empty((L, N + 1, N + 1), dtype=complex)
        out[:, 0, 0] = self.w
        out[:, 1:, 0] = self.X.T
        out[:, 0, 1:] = self.X.T.conj()
        out[:, 1:, 1:] = T
        return out


def anm_tau(sigma, M, L, Nbar):
    """Regularization for ANM: ``sqrt(sigma M) (sqrt(L) + sqrt(ln(4 pi Nbar)))``.

    Approximates the expected ``sup_f ||a(f)^H E||_2`` of ``CN(0, sigma)``
    noise on ``M`` rows.
    """
    return math.sqrt(sigma * M) * (math.sqrt(L) + math.sqrt(math.log(4 * math.pi * Nbar)))


def _setup(obs, tau, opts, blocks_per_channel):
    opts = AdmmOptions() if opts is None else opts
    weight = 1.0 if tau is None else float(tau)
    if tau is not None and not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if tau is None:
        # same reasoning as the SACA completion defaults
        rms = np.sqrt(np.mean(np.abs(obs.values) ** 2)) or 1.0
        opts = opts.with_defaults(rho0=1.0 / (blocks_per_channel * obs.N * rms),
                                  **COMPLETION_SCHEDULE)
    else:
        opts = opts.with_defaults(rho0=1.0 / math.sqrt(obs.N), **BOYD_SCHEDULE)
    rho0 = opts.rho0
    rows = obs.omega - 1
    omega = np.zeros(obs.N)
    omega[rows] = 1.0
    Y = obs.zero_filled()
    return opts, weight, rho0, rows, omega, Y


def _x_update(PX, rho, tau, rows, omega, Y, values):
    if tau is None:
        X = PX.copy()
        X[rows] = values
        return X
    return (omega[:, None] * Y + 2 * rho * PX) / (omega + 2 * rho)[:, None]


def anm_solve(obs: Observation, tau=None, opts=None):
    N, L = obs.N, obs.L
    opts, weight, rho0, rows, omega, Y = _setup(obs, tau, opts, L)
    d = diag_weights(N)
    xi = impulse(N)
    sqrtN = math.sqrt(N)

    def assemble(x):
        t, W, X = x
        out = np.empty((1, L + N, L + N), dtype=complex)
        out[0, :L, :L] = W
        out[0, L:, :L] = X
        out[0, :L, L:] = X.conj().T
        out[0, L:, L:] = toeplitz_lift(t, check=False)
        return out

    def update(P, rho):
        P = P[0]
        W = 0.5 * (P[:L, :L] + P[:L, :L].conj().T) - weight / (2 * sqrtN * rho) * np.eye(L)
        X = _x_update(P[L:, :L], rho, tau, rows, omega, Y, obs.values)
        t = (toeplitz_adjoint(P[L:, L:], check=False) - weight * sqrtN / (2 * rho) * xi) / d
        return 0.5 * (t + np.conj(t[::-1])), W, X

    x0 = (np.zeros(2 * N - 1, dtype=complex), np.zeros((L, L), dtype=complex), Y.copy())
    (t, W, X), _, _, trace = consensus_admm(assemble, update, x0, rho0, opts)
    obj = (N * t[N - 1].real + np.trace(W).real) / (2 * sqrtN)
    return AnmResult(t, W, X, float(obj), trace)


def interform_solve(obs: Observation, tau=None, opts=None):
    N, L = obs.N, obs.L
    opts, weight, rho0, rows, omega, Y = _setup(obs, tau, opts, L)
    d = diag_weights(N)
    xi = impulse(N)

    def assemble(x):
        t, w, X = x
        out = np.empty((L, N + 1, N + 1), dtype=complex)
        out[:, 0, 0] = w[0]
        out[:, 1:, 0] = X.T
        out[:, 0, 1:] = X.T.conj()
        out[:, 1:, 1:] = toeplitz_lift(t, check=False)
        return out

    def update(P, rho):
        w = np.array([P[:, 0, 0].real.mean() - weight / (2 * rho * L)], dtype=complex)
        X = _x_update(P[:, 1:, 0].T, rho, tau, rows, omega, Y, obs.values)
        S = P[:, 1:, 1:].sum(axis=0)
        t = (toeplitz_adjoint(S, check=False) - weight / (2 * rho) * xi) / (L * d)
        return 0.5 * (t + np.conj(t[::-1])), w, X

    x0 = (np.zeros(2 * N - 1, dtype=complex), np.zeros(1, dtype=complex), Y.copy())
    (t, w, X), _, _, trace = consensus_admm(assemble, update, x0, rho0, opts)
    obj = 0.5 * (t[N - 1].real + w[0].real)
    return InterFormResult(t, float(w[0].real), X, float(obj), trace)
