"""Dual polynomial, dual atomic norm and the noise-level regularization parameter."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .signals import steering_matrix, wrap, wrapped_distance

__all__ = [
    "TauParams",
    "CertificateReport",
    "dual_poly",
    "dual_atomic_norm",
    "tau_bound",
    "tau_explicit",
    "tau_for",
    "certificate_check",
    "DEFAULT_GRID",
]

DEFAULT_GRID = 2**14


def dual_poly(V, f):
    """``Q(f) = a(f)^H V``; scalar ``f`` gives shape ``(L,)``, array ``f`` gives ``(len(f), L)``."""
    V = np.atleast_2d(np.asarray(V, dtype=complex))
    A = steering_matrix(f, V.shape[0])
    Q = A.conj().T @ V
    return Q[0] if np.ndim(f) == 0 else Q


def _grid_values(V, G):
    # fftshift puts f = -1/2 + g/G at index g
    F = np.fft.fftshift(np.fft.fft(V, n=G, axis=0), axes=0)
    return np.abs(F).sum(axis=1)


def dual_atomic_norm(V, grid_size=DEFAULT_GRID, return_argmax=False):
    """``sup_f ||a(f)^H V||_1`` evaluated on a uniform grid plus a local refinement.

    The grid maximum is refined by golden-section search on the two adjacent
    cells. The result is a lower bound of the supremum.
    """
    V = np.atleast_2d(np.asarray(V, dtype=complex))
    N = V.shape[0]
    if grid_size < 4 * N:
        raise ValueError(f"grid_size={grid_size} is below 4N={4 * N}")
    vals = _grid_values(V, grid_size)
    g = int(np.argmax(vals))
    best_f, best = -0.5 + g / grid_size, float(vals[g])
    if best > 0:
        h = 1.0 / grid_size
        obj = lambda f: -np.abs(dual_poly(V, f)).sum()
        try:
            res = minimize_scalar(obj, bracket=(best_f - h, best_f, best_f + h), method="golden",
                                  options={"xtol": 1e-10})
            if -res.fun > best:
                best_f, best = float(wrap(res.x)), float(-res.fun)
        except ValueError:
            pass  # flat neighbourhood: the grid value stands
    return (best, best_f) if return_argmax else best


@dataclass(frozen=True)
class TauParams:
    """Inputs of the regularization bound ``C sqrt(sigma M L (L + ln Nbar))``."""

    sigma: float
    M: int
    L: int
    Nbar: int

    @property
    def p1(self):
        return 4 * math.log(self.L * math.log(8 * math.pi) + math.log(self.Nbar))

    @property
    def p2(self):
        return 4.0

    @property
    def C(self):
        p1, p2 = self.p1, self.p2
        den = p1 * p2 - p1 - p2
        if den <= 0:
            raise ValueError(f"constant C is not positive for p1={p1:.4g}, p2={p2:.4g}")
        return p1 * p2 / den

    @property
    def tau(self):
        return self.C * math.sqrt(self.sigma * self.M * self.L * (self.L + math.log(self.Nbar)))

    @property
    def tau_explicit(self):
        # net-argument bound before collapsing the log term to its order
        p1, p2 = self.p1, self.p2
        inner = (2 * self.L * math.log(6 * math.pi * p2) + math.log(self.Nbar)
                 + math.log(math.pi * p1) + 1)
        return self.C * math.sqrt(self.sigma * self.M * self.L * inner)


def tau_bound(sigma, M, L, Nbar):
    """Upper bound on the expected dual norm of ``CN(0, sigma)`` noise on ``M`` rows."""
    if sigma < 0 or M < 1 or L < 1 or Nbar < 1:
        raise ValueError("need sigma >= 0 and M, L, Nbar >= 1")
    return TauParams(sigma, M, L, Nbar).tau


def tau_explicit(sigma, M, L, Nbar):
    """Explicit form of the same bound, keeping the full covering-number term.

    ``C sqrt(sigma M L (2L ln(6 pi p2) + ln Nbar + ln(pi p1) + 1))``. This is
    the inequality the covering argument actually establishes;
    :func:`tau_bound` keeps only its order. It is roughly ``2.9x`` larger
    for moderate ``L``.
    """
    if sigma < 0 or M < 1 or L < 1 or Nbar < 1:
        raise ValueError("need sigma >= 0 and M, L, Nbar >= 1")
    return TauParams(sigma, M, L, Nbar).tau_explicit


TAU_RULES = {"bound": tau_bound, "explicit": tau_explicit}


def tau_for(obs, sigma, rule="bound"):
    """Regularization for ``obs`` from noise variance ``sigma``.

    ``rule`` is ``"bound"`` (:func:`tau_bound`) or ``"explicit"``
    (:func:`tau_explicit`).
    """
    try:
        fn = TAU_RULES[rule]
    except KeyError:
        raise ValueError(f"unknown tau rule {rule!r}; expected one of {sorted(TAU_RULES)}") from None
    return fn(sigma, obs.M, obs.L, obs.span)


@dataclass
class CertificateReport:
    interpolation_ok: bool
    interpolation_error: float
    bound_ok: bool
    max_offsupport: float
    worst_frequency: float | None
    support_ok: bool = True

    @property
    def passed(self):
        return self.interpolation_ok and self.bound_ok and self.support_ok


def certificate_check(V, frequencies, phases, grid_size=DEFAULT_GRID, margin=None,
                      omega=None, tol=1e-6):
    """Check a candidate dual certificate ``Q(f) = a(f)^H V``.

    Conditions: ``Q(f_k) = exp(i phases[k]) / L`` within ``tol``;
    ``||Q(f)||_1 < 1`` on grid points farther than ``margin`` from every
    ``f_k``; and, when ``omega`` (1-based rows) is given, rows of ``V``
    outside ``omega`` are zero.
    """
    V = np.atleast_2d(np.asarray(V, dtype=complex))
    N, L = V.shape
    f = np.atleast_1d(np.asarray(frequencies, dtype=float))
    margin = 1.0 / (2 * N) if margin is None else margin

    if f.size:
        target = np.exp(1j * np.atleast_2d(phases)) / L
        interp_err = float(np.max(np.abs(dual_poly(V, f) - target)))
    else:
        interp_err = 0.0

    vals = _grid_values(V, grid_size)
    grid = -0.5 + np.arange(grid_size) / grid_size
    far = np.ones(grid_size, dtype=bool)
    for fk in f:
        far &= wrapped_distance(grid, fk) > margin
    if far.any():
        idx = np.flatnonzero(far)[np.argmax(vals[far])]
        worst, worst_f = float(vals[idx]), float(grid[idx])
    else:
        worst, worst_f = 0.0, None

    support_ok = True
    if omega is not None:
        outside = np.ones(N, dtype=bool)
        outside[np.asarray(omega) - 1] = False
        support_ok = bool(np.all(V[outside] == 0))

    return CertificateReport(interp_err <= tol, interp_err, worst < 1.0, worst,
                             worst_f if worst >= 1.0 else None, support_ok)
