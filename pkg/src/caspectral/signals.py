"""Constant-amplitude multichannel sinusoids, sampling masks, noise and metrics."""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .structured import DimensionError, InvariantError

__all__ = [
    "SpectralModel",
    "Observation",
    "NoiseSpec",
    "steering",
    "steering_matrix",
    "synthesize",
    "observe",
    "snr_to_sigma",
    "wrapped_distance",
    "min_separation",
    "matched_rmse",
    "success",
    "random_model",
    "random_frequencies",
    "uniform_frequencies",
    "SUCCESS_RMSE",
]

SUCCESS_RMSE = 1e-4


def wrap(f):
    """Map frequencies onto [-1/2, 1/2)."""
    return (np.asarray(f, dtype=float) + 0.5) % 1.0 - 0.5


@dataclass(frozen=True)
class SpectralModel:
    """Ground-truth line spectrum ``X = A(f) diag(b) exp(i*phases)``.

    ``phases`` is ``K x L`` in radians; ``N`` is the number of samples per
    channel.
    """

    frequencies: np.ndarray
    amplitudes: np.ndarray
    phases: np.ndarray
    N: int

    def __post_init__(self):
        f = np.atleast_1d(np.asarray(self.frequencies, dtype=float))
        b = np.atleast_1d(np.asarray(self.amplitudes, dtype=float))
        phi = np.atleast_2d(np.asarray(self.phases, dtype=float))
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "amplitudes", b)
        object.__setattr__(self, "phases", phi)
        if b.shape != f.shape or phi.shape[0] != f.size:
            raise DimensionError("frequencies, amplitudes and phase rows must agree in K")
        if np.any(f < -0.5) or np.any(f >= 0.5):
            raise InvariantError("frequencies must lie in [-1/2, 1/2)")
        if np.any(b <= 0):
            raise InvariantError("amplitudes must be positive")
        if f.size > 1 and min_separation(f) == 0:
            raise InvariantError("frequencies must be pairwise distinct")
        if self.N < 1:
            raise DimensionError("N must be positive")

    @property
    def K(self):
        return self.frequencies.size

    @property
    def L(self):
        return self.phases.shape[1]

    @property
    def separation(self):
        return min_separation(self.frequencies)


@dataclass(frozen=True)
class Observation:
    """Rows ``omega`` (1-based, ascending) of a noisy ``N x L`` signal."""

    omega: np.ndarray
    values: np.ndarray
    N: int

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=int)
        values = np.atleast_2d(np.asarray(self.values, dtype=complex))
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "values", values)
        if omega.ndim != 1 or omega.size == 0:
            raise DimensionError("omega must be a non-empty 1-D index set")
        if np.any(np.diff(omega) <= 0):
            raise InvariantError("omega must be strictly increasing")
        if omega[0] < 1 or omega[-1] > self.N:
            raise InvariantError(f"omega indices must lie in 1..{self.N}")
        if values.shape[0] != omega.size:
            raise DimensionError("values must have one row per index in omega")

    @property
    def M(self):
        return self.omega.size

    @property
    def L(self):
        return self.values.shape[1]

    @property
    def span(self):
        """Range of the sampling period, ``omega[-1] - omega[0] + 1``."""
        return int(self.omega[-1] - self.omega[0] + 1)

    @property
    def mask(self):
        m = np.zeros(self.N, dtype=bool)
        m[self.omega - 1] = True
        return m

    def zero_filled(self):
        """``N x L`` matrix with observed rows in place and zeros elsewhere."""
        out = np.zeros((self.N, self.L), dtype=complex)
        out[self.omega - 1] = self.values
        return out


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise InvariantError("sigma must be nonnegative")


def steering(f, N):
    """``a(f) = [1, e^{i2pi f}, ..., e^{i2pi f (N-1)}]``."""
    return np.exp(2j * np.pi * f * np.arange(N))


def steering_matrix(f, N):
    """``N x K`` Vandermonde matrix with columns ``steering(f_k, N)``."""
    return np.exp(2j * np.pi * np.outer(np.arange(N), np.atleast_1d(f)))


def synthesize(model):
    A = steering_matrix(model.frequencies, model.N)
    return (A * model.amplitudes) @ np.exp(1j * model.phases)


def observe(X, omega, noise=NoiseSpec()):
    """Sample rows ``omega`` of ``X`` and add ``CN(0, sigma)`` noise.

    Real and imaginary parts of the noise are i.i.d. ``N(0, sigma/2)``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    omega = np.asarray(omega, dtype=int)
    N = X.shape[0]
    if omega.size and (omega.min() < 1 or omega.max() > N):
        raise InvariantError(f"omega indices must lie in 1..{N}")
    values = X[omega - 1].copy()
    if noise.sigma > 0:
        rng = np.random.default_rng(noise.seed)
        scale = np.sqrt(noise.sigma / 2)
        values += scale * (rng.standard_normal(values.shape) + 1j * rng.standard_normal(values.shape))
    return Observation(omega, values, N)


def snr_to_sigma(X_omega, snr_db):
    """Per-entry noise variance giving ``E||E||^2 = ||X||^2 / 10^(snr/10)``."""
    X_omega = np.asarray(X_omega)
    power = np.linalg.norm(X_omega) ** 2
    return float(power / (X_omega.size * 10 ** (snr_db / 10)))


def wrapped_distance(f1, f2):
    d = np.abs(np.asarray(f1, dtype=float) - np.asarray(f2, dtype=float)) % 1.0
    return np.minimum(d, 1.0 - d)


def min_separation(f):
    f = np.asarray(f, dtype=float)
    if f.size < 2:
        return 0.5
    d = wrapped_distance(f[:, None], f[None, :])
    d[np.diag_indices(f.size)] = np.inf
    return float(d.min())


def matched_rmse(f_true, f_est):
    """Wrapped RMSE under the best pairing of estimates to true frequencies.

    Exact over all permutations for ``K <= 8``; above that both vectors are
    sorted on the circle and the best cyclic shift is taken.
    """
    f_true = np.atleast_1d(np.asarray(f_true, dtype=float))
    f_est = np.atleast_1d(np.asarray(f_est, dtype=float))
    if f_true.shape != f_est.shape:
        raise DimensionError(f"length mismatch: {f_true.size} true vs {f_est.size} estimated")
    K = f_true.size
    if K == 0:
        return 0.0
    D2 = wrapped_distance(f_true[:, None], f_est[None, :]) ** 2
    if K <= 8:
        rows = np.arange(K)
        best = min(D2[rows, list(p)].sum() for p in permutations(range(K)))
    else:
        a = np.argsort(wrap(f_true))
        b = np.argsort(wrap(f_est))
        best = min(D2[a, np.roll(b, s)].sum() for s in range(K))
    return float(np.sqrt(best / K))


def success(f_true, f_est, threshold=SUCCESS_RMSE):
    """True when the estimate has the right order and matched RMSE <= 1e-4."""
    if np.size(f_true) != np.size(f_est):
        return False
    return matched_rmse(f_true, f_est) <= threshold


def uniform_frequencies(K, start=-0.45):
    """``start + (k-1)/K`` for ``k = 1..K``."""
    return wrap(start + np.arange(K) / K)


def random_frequencies(K, rng, separation=0.0, max_tries=100_000):
    """Draw ``K`` frequencies on [-1/2, 1/2) with pairwise wrapped distance > separation.

    Rejection sampling, one frequency at a time.
    """
    if K * separation >= 1:
        raise ValueError(f"cannot place {K} frequencies with separation {separation}")
    for _ in range(max_tries):
        f = []
        for _ in range(50 * K):
            c = rng.uniform(-0.5, 0.5)
            if all(wrapped_distance(c, g) > separation for g in f):
                f.append(c)
                if len(f) == K:
                    return np.array(f)
        # restart from scratch if the greedy draw gets stuck
    raise RuntimeError("rejection sampling for separated frequencies did not terminate")


def random_model(rng, N, L, K, separation=0.0, frequencies=None, amplitudes=None,
                 amp_range=(0.5, 1.5)):
    """Random CA model: uniform phases, uniform amplitudes in ``amp_range``."""
    f = random_frequencies(K, rng, separation) if frequencies is None else np.asarray(frequencies, float)
    K = f.size
    b = rng.uniform(*amp_range, size=K) if amplitudes is None else np.asarray(amplitudes, float)
    phi = rng.uniform(0, 2 * np.pi, size=(K, L))
    return SpectralModel(f, b, phi, N)
