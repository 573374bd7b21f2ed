"""Frequency retrieval from a recovered Toeplitz matrix.

Root-MUSIC gives the Vandermonde frequencies of ``T t``; nonnegative least
squares on the Toeplitz entries gives the powers; a least-squares fit of
the recovered ``Z`` gives per-channel gains.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .signals import Observation, min_separation, steering_matrix, wrap
from .solver import AdmmOptions, default_n, solve_noiseless
from .structured import diag_weights, half_dim, toeplitz_lift

__all__ = [
    "FrequencyEstimate",
    "DegenerateSpectrumError",
    "ConditioningError",
    "UnidentifiableError",
    "estimate_rank",
    "vandermonde_decompose",
    "toeplitz_atoms",
    "recover_gains",
    "identifiability_sweep",
]

RANK_EPS = 1e-3
POLISH_RADIUS = 1e-2


class DegenerateSpectrumError(ValueError):
    """Root-MUSIC could not produce the requested number of frequencies."""


class ConditioningError(ValueError):
    """The Vandermonde matrix of the estimated frequencies is rank deficient."""


class UnidentifiableError(RuntimeError):
    """No half-dimension up to the limit gave a rank-deficient Toeplitz solution."""


@dataclass
class FrequencyEstimate:
    frequencies: np.ndarray
    powers: np.ndarray
    phases: np.ndarray | None = None
    n: int | None = None

    @property
    def order(self):
        return self.frequencies.size


def estimate_rank(t, eps=RANK_EPS):
    """Number of eigenvalues of ``T t`` above ``eps`` times the largest one."""
    w = np.linalg.eigvalsh(toeplitz_lift(t, check=False))
    top = w[-1] if w.size else 0.0
    if top <= 0:
        return 0
    return int(np.sum(w > eps * top))


def toeplitz_atoms(f, n):
    """Columns ``t(f_k)`` with ``T t(f_k) = a_n(f_k) a_n(f_k)^H``.

    ``t(f)[m] = exp(i 2 pi f (n - 1 - m))`` for ``m = 0 .. 2n-2``.
    """
    m = np.arange(2 * n - 1)
    return np.exp(2j * np.pi * np.outer(n - 1 - m, np.atleast_1d(f)))


def _music_poly(T, order):
    n = T.shape[0]
    _, V = np.linalg.eigh(T)
    En = V[:, : n - order]
    C = En @ En.conj().T
    # coefficient of z^(m + n - 1) in a(z)^H C a(z) is the sum of C[i, j] over j - i = m
    return np.array([np.trace(C, offset=m) for m in range(n - 1, -n, -1)])


def _polish(coeffs, f, steps=8):
    """Newton steps on the derivative of ``P(f) = a(f)^H C a(f)``.

    On exact data the true frequencies are double roots of the MUSIC
    polynomial, which ``np.roots`` only resolves to about ``sqrt(eps)``;
    the minimum of ``P`` is a simple root of ``P'`` and converges to
    machine precision.
    """
    n = (coeffs.size + 1) // 2
    w = 2j * np.pi * np.arange(n - 1, -n, -1)
    f0 = f
    for _ in range(steps):
        e = coeffs * np.exp(w * f)
        d1, d2 = np.sum(w * e).real, np.sum(w * w * e).real
        if d2 <= 0:
            return f0
        step = d1 / d2
        f = f - step
        if abs(step) < 1e-15:
            break
    return f if abs(f - f0) < 1.0 / (4 * n) else f0


def vandermonde_decompose(t, order):
    """Root-MUSIC Vandermonde decomposition ``T t ~ A_n diag(p) A_n^H``.

    Picks the ``order`` roots inside the unit circle closest to it; roots that
    coincide (numerically split double roots) count once. Roots within
    ``POLISH_RADIUS`` of the circle are refined to the nearby minimum of the
    MUSIC null spectrum.
    """
    t = np.asarray(t, dtype=complex)
    n = half_dim(t.size)
    if order >= n:
        raise DegenerateSpectrumError(f"order {order} must be below n={n}")
    if order <= 0:
        return FrequencyEstimate(np.zeros(0), np.zeros(0), n=n)
    T = 0.5 * (toeplitz_lift(t, check=False) + toeplitz_lift(t, check=False).conj().T)
    coeffs = _music_poly(T, order)
    roots = np.roots(coeffs)
    roots = roots[np.abs(roots) <= 1 + 1e-9]
    roots = roots[np.argsort(np.abs(1 - np.abs(roots)))]
    picked = []
    for z in roots:
        if all(abs(z - w) > 1e-6 for w in picked):
            picked.append(z)
            if len(picked) == order:
                break
    if len(picked) < order:
        raise DegenerateSpectrumError(
            f"only {len(picked)} admissible roots for order {order}")
    f = np.angle(picked) / (2 * np.pi)
    # roots this close to the circle are numerically split double roots
    f = [_polish(coeffs, fk) if abs(1 - abs(z)) < POLISH_RADIUS else fk for z, fk in zip(picked, f)]
    f = np.sort(wrap(np.asarray(f)))
    return FrequencyEstimate(f, _nnls_powers(t, f), n=n)


def _nnls_powers(t, f):
    n = half_dim(t.size)
    w = np.sqrt(diag_weights(n))[:, None]
    G = w * toeplitz_atoms(f, n)
    rhs = w[:, 0] * t
    p, _ = nnls(np.vstack([G.real, G.imag]), np.concatenate([rhs.real, rhs.imag]))
    return p


def recover_gains(Z, f, N=None):
    """Least-squares complex gains of ``Z[:N]`` on ``A(f)``.

    Returns ``(amplitudes, phases, spread)`` where ``amplitudes`` is the
    channel-mean modulus, ``phases`` is ``K x L`` and ``spread`` is the
    per-component ``max_l |C| - min_l |C|``.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    f = np.atleast_1d(np.asarray(f, dtype=float))
    N = Z.shape[0] if N is None else N
    if f.size > 1 and min_separation(f) < 1e-8:
        raise ConditioningError("near-duplicate frequencies")
    A = steering_matrix(f, N)
    if f.size > N or np.linalg.cond(A) > 1e12:
        raise ConditioningError(f"Vandermonde matrix is rank deficient (K={f.size}, N={N})")
    C = np.linalg.pinv(A) @ Z[:N]
    mod = np.abs(C)
    return mod.mean(axis=1), np.angle(C), mod.max(axis=1) - mod.min(axis=1)


def identifiability_sweep(X, n_max=None, eps=RANK_EPS, opts=None, full_output=False):
    """Grow ``n`` from ``ceil((N+1)/2)`` until ``T t*`` is rank deficient.

    Returns the decomposition at the first rank-deficient ``n``, with phases
    fitted on all ``2n - 1`` rows of ``Z`` (``K`` may exceed ``N``). With
    ``full_output=True`` returns ``(estimate, results)`` where ``results``
    lists the :class:`SolveResult` of every ``n`` tried; on failure the
    estimate is ``None`` instead of raising.
    """
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    N = X.shape[0]
    n_max = 2 * N - 1 if n_max is None else n_max
    obs = Observation(np.arange(1, N + 1), X, N)
    base = AdmmOptions() if opts is None else opts
    results = []
    for n in range(default_n(N), n_max + 1):
        res = solve_noiseless(obs, base.replace(n=n))
        results.append(res)
        r = estimate_rank(res.t, eps)
        if r < n:
            est = vandermonde_decompose(res.t, r)
            if r:
                est.phases = recover_gains(res.Z, est.frequencies)[1]
            return (est, results) if full_output else est
    if full_output:
        return None, results
    raise UnidentifiableError(f"T t stayed full rank for every n up to {n_max}")
