"""Consensus ADMM over stacks of PSD blocks.

Every solver in the package has the same shape: a stack of Hermitian blocks
``B(x)`` that depends affinely on the decision variables ``x`` must equal a
stack of PSD auxiliaries ``Q``. One iteration is

    Q <- P_psd(B(x) - U)
    x <- argmin_x f(x) + rho/2 ||Q + U - B(x)||^2
    U <- U + Q - B(x)

with ``U = Lambda / rho`` the scaled multiplier. The problem-specific part is
the closed-form ``x`` update, supplied by the caller.

``relaxation`` in ``(1, 2)`` over-relaxes the ``Q`` used by the ``x`` and
``U`` steps, ``alpha Q + (1 - alpha) B(x)``; ``1`` is the plain iteration.
"""

from dataclasses import dataclass, field

import numpy as np

from .structured import NumericalError, psd_project

__all__ = [
    "AdmmOptions",
    "AdmmTrace",
    "BOYD_SCHEDULE",
    "COMPLETION_SCHEDULE",
    "adapt_rho",
    "consensus_admm",
]


@dataclass
class AdmmOptions:
    """Knobs shared by all ADMM solvers.

    Fields left at ``None`` are filled in by each solver from one of the
    schedules below (see :meth:`with_defaults`); ``n=None`` means
    ``ceil((N+1)/2)`` and is only read by the SACA solvers.

    ``balance`` picks what residual balancing compares: ``"raw"`` residual
    norms, or ``"scaled"`` residuals divided by their stopping thresholds.
    Balancing runs every ``adapt_every`` iterations with ratio ``mu``.
    """

    rho0: float | None = None
    adapt_rho: bool | None = None
    abs_tol: float = 1e-4
    rel_tol: float = 1e-5
    max_iter: int = 1000
    n: int | None = None
    mu: float | None = None
    rho_factor: float = 2.0
    adapt_every: int | None = None
    balance: str | None = None
    relaxation: float | None = None
    eig_tol: float = 1e-10

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.rho0 is not None and self.rho0 <= 0:
            raise ValueError("rho0 must be positive")
        if self.relaxation is not None and not 0 < self.relaxation < 2:
            raise ValueError("relaxation must lie in (0, 2)")
        if (self.mu is not None and self.mu <= 1) or self.rho_factor <= 1:
            raise ValueError("mu and rho_factor must exceed 1")
        if self.adapt_every is not None and self.adapt_every < 1:
            raise ValueError("adapt_every must be >= 1")
        if self.balance not in (None, "raw", "scaled"):
            raise ValueError(f"balance must be 'raw' or 'scaled', got {self.balance!r}")

    def replace(self, **changes):
        return AdmmOptions(**{**self.__dict__, **changes})

    def with_defaults(self, **defaults):
        """Copy with every ``None`` field named in ``defaults`` filled in."""
        return self.replace(**{k: v for k, v in defaults.items() if getattr(self, k) is None})


# residual balancing after every iteration, as for the denoising programs
BOYD_SCHEDULE = dict(adapt_rho=True, balance="raw", mu=10.0, adapt_every=1, relaxation=1.0)
# completion programs: no data term, so raw residuals are badly scaled
COMPLETION_SCHEDULE = dict(adapt_rho=True, balance="scaled", mu=5.0, adapt_every=25, relaxation=1.5)


@dataclass
class AdmmTrace:
    converged: bool
    iterations: int
    primal_residual: float
    dual_residual: float
    rho: float
    history: list = field(default_factory=list, repr=False)


def adapt_rho(rho, primal, dual, mu=10.0, factor=2.0):
    """Residual balancing: return ``(new_rho, scale)``.

    ``scale`` is the factor the scaled multiplier ``Lambda/rho`` must be
    multiplied by so that ``Lambda`` itself is unchanged.
    """
    if primal > mu * dual:
        return rho * factor, 1.0 / factor
    if dual > mu * primal:
        return rho / factor, factor
    return rho, 1.0


def consensus_admm(assemble, update, x0, rho0, opts, callback=None):
    """Run the iteration described in the module docstring.

    Parameters
    ----------
    assemble : callable
        ``assemble(x) -> (B, m, m)`` Hermitian stack, affine in ``x``.
    update : callable
        ``update(P, rho) -> x`` minimizing ``f(x) + rho/2 ||P - B(x)||^2``.
    x0 : tuple of arrays
        Initial decision variables.
    rho0 : float
        Initial penalty.
    opts : AdmmOptions
        Unset schedule fields fall back to ``BOYD_SCHEDULE``.
    callback : callable, optional
        Called as ``callback(it, x)`` after every iteration.

    Returns
    -------
    x, Q, Lambda, trace
    """
    x = tuple(np.asarray(a, dtype=complex) for a in x0)
    B = assemble(x)
    U = np.zeros_like(B)
    rho = rho0
    sqrt_p = np.sqrt(B.size)
    opts = opts.with_defaults(**BOYD_SCHEDULE)
    alpha = opts.relaxation
    history = []
    converged = False
    r_norm = s_norm = np.inf
    it = 0
    for it in range(1, opts.max_iter + 1):
        Q = psd_project(B - U, tol=opts.eig_tol)
        Qr = Q if alpha == 1.0 else alpha * Q + (1 - alpha) * B
        x_new = update(Qr + U, rho)
        B_new = assemble(x_new)
        U_new = U + Qr - B_new
        r_norm = float(np.linalg.norm(Q - B_new))
        s_norm = float(rho * np.linalg.norm(B_new - B))
        eps_pri = sqrt_p * opts.abs_tol + opts.rel_tol * max(np.linalg.norm(Q), np.linalg.norm(B_new))
        eps_dual = sqrt_p * opts.abs_tol + opts.rel_tol * rho * np.linalg.norm(U_new)
        history.append((r_norm, s_norm, float(eps_pri), float(eps_dual), rho))
        if not (np.isfinite(r_norm) and np.isfinite(s_norm)):
            tail = "\n".join(f"  {i}: r={h[0]:.3e} s={h[1]:.3e} rho={h[4]:.3e}"
                             for i, h in enumerate(history[-5:], start=max(1, it - 4)))
            raise NumericalError(f"ADMM diverged at iteration {it}:\n{tail}")
        if callback is not None:
            callback(it, x_new)
        x, B, U = x_new, B_new, U_new
        if r_norm <= eps_pri and s_norm <= eps_dual:
            converged = True
            break
        if opts.adapt_rho and it % opts.adapt_every == 0:
            if opts.balance == "scaled":
                rho, scale = adapt_rho(rho, r_norm / eps_pri, s_norm / eps_dual, opts.mu, opts.rho_factor)
            else:
                rho, scale = adapt_rho(rho, r_norm, s_norm, opts.mu, opts.rho_factor)
            U = U * scale
    trace = AdmmTrace(converged, it, r_norm, s_norm, rho, history)
    return x, Q, rho * U, trace
