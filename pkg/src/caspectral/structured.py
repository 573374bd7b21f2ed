"""Hankel/Toeplitz lifting operators, their adjoints and the PSD projection.

Index convention: formulas are written 1-based (``x_1 .. x_{2n-1}``), arrays
are 0-based, so formula entry ``j`` lives at array position ``j - 1``. A
conjugate-symmetric vector ``t`` of length ``2n - 1`` satisfies
``t[j] == conj(t[2n - 2 - j])`` and its centre ``t[n - 1]`` is real.

All lift/adjoint functions accept an optional leading batch axis so the
solvers can process all channels in one call.
"""

from functools import lru_cache

import numpy as np

__all__ = [
    "DimensionError",
    "InvariantError",
    "NumericalError",
    "half_dim",
    "diag_weights",
    "impulse",
    "is_conj_symmetric",
    "check_conj_symmetric",
    "hankel_lift",
    "hankel_adjoint",
    "toeplitz_lift",
    "toeplitz_adjoint",
    "hermitian_part",
    "psd_project",
    "assemble_block",
    "split_block",
]

SYM_TOL = 1e-12


class DimensionError(ValueError):
    """Input array has an incompatible shape."""


class InvariantError(ValueError):
    """Input violates a structural invariant (symmetry, Hermitian-ness)."""


class NumericalError(ArithmeticError):
    """A numerical kernel failed or produced non-finite values."""


def half_dim(length):
    """Return ``n`` for a vector of odd length ``2n - 1``."""
    if length < 1 or length % 2 == 0:
        raise DimensionError(f"expected odd length 2n-1, got {length}")
    return (length + 1) // 2


@lru_cache(maxsize=64)
def _hankel_index(n):
    j, k = np.indices((n, n))
    idx = j + k
    idx.setflags(write=False)
    return idx


@lru_cache(maxsize=64)
def _toeplitz_index(n):
    j, k = np.indices((n, n))
    idx = n - 1 + k - j
    idx.setflags(write=False)
    return idx


@lru_cache(maxsize=64)
def _selector(n, kind):
    # one-hot map from the n*n matrix entries to the 2n-1 (anti)diagonals
    idx = _hankel_index(n) if kind == "hankel" else _toeplitz_index(n)
    sel = np.zeros((n * n, 2 * n - 1))
    sel[np.arange(n * n), idx.ravel()] = 1.0
    sel.setflags(write=False)
    return sel


@lru_cache(maxsize=64)
def _weights(n):
    d = np.concatenate([np.arange(1, n + 1), np.arange(n - 1, 0, -1)]).astype(float)
    d.setflags(write=False)
    return d


def diag_weights(n):
    """Return ``d = [1, 2, ..., n, ..., 2, 1]``.

    ``d[m]`` counts the entries of an ``n x n`` matrix on (anti)diagonal ``m``,
    so ``hankel_adjoint(hankel_lift(x)) == d * x`` and likewise for Toeplitz.
    """
    return _weights(n).copy()


def impulse(n):
    """Conjugate-symmetric vector with a single 1 at the centre (``xi``)."""
    xi = np.zeros(2 * n - 1, dtype=complex)
    xi[n - 1] = 1.0
    return xi


def is_conj_symmetric(t, tol=SYM_TOL):
    t = np.asarray(t)
    scale = max(1.0, float(np.max(np.abs(t), initial=0.0)))
    return bool(np.max(np.abs(t - np.conj(t[..., ::-1])), initial=0.0) <= tol * scale)


def check_conj_symmetric(t, tol=SYM_TOL):
    """Validate a conjugate-symmetric vector and return it as a complex array."""
    t = np.asarray(t, dtype=complex)
    half_dim(t.shape[-1])
    if not is_conj_symmetric(t, tol):
        raise InvariantError("vector is not conjugate-symmetric: t[j] != conj(t[2n-2-j])")
    return t


def hankel_lift(x):
    """Build the ``n x n`` Hankel matrix ``M[j, k] = x[j + k]`` from ``x``.

    ``x`` has length ``2n - 1`` along its last axis; leading axes are batch
    axes and are kept in front of the output matrix axes.
    """
    x = np.asarray(x)
    n = half_dim(x.shape[-1])
    return x[..., _hankel_index(n)]


def hankel_adjoint(M):
    """Anti-diagonal sums of ``M`` (adjoint of :func:`hankel_lift`)."""
    M = np.asarray(M)
    n = M.shape[-1]
    if M.ndim < 2 or M.shape[-2] != n:
        raise DimensionError(f"expected square matrices, got shape {M.shape}")
    return M.reshape(M.shape[:-2] + (n * n,)) @ _selector(n, "hankel")


def toeplitz_lift(t, check=True):
    """Hermitian-Toeplitz matrix ``M[j, k] = t[n - 1 + k - j]``.

    The main diagonal is ``t[n - 1]``; the first row is ``t[n-1:]`` and the
    first column is ``t[n-1::-1]``.
    """
    t = check_conj_symmetric(t) if check else np.asarray(t)
    n = half_dim(t.shape[-1])
    return t[..., _toeplitz_index(n)]


def toeplitz_adjoint(M, check=True):
    """Diagonal sums of a Hermitian ``M`` (adjoint of :func:`toeplitz_lift`).

    The result is conjugate-symmetric whenever ``M`` is Hermitian.
    """
    M = np.asarray(M)
    n = M.shape[-1]
    if M.ndim < 2 or M.shape[-2] != n:
        raise DimensionError(f"expected square matrices, got shape {M.shape}")
    if check:
        _check_hermitian(M)
    return M.reshape(M.shape[:-2] + (n * n,)) @ _selector(n, "toeplitz")


def _check_hermitian(M, tol=SYM_TOL):
    scale = max(1.0, float(np.linalg.norm(M)))
    if np.linalg.norm(M - np.conj(np.swapaxes(M, -1, -2))) > tol * scale:
        raise InvariantError("matrix is not Hermitian")


def hermitian_part(M):
    return 0.5 * (M + np.conj(np.swapaxes(M, -1, -2)))


def psd_project(M, tol=1e-10):
    """Nearest PSD matrix in Frobenius norm.

    ``M`` is symmetrized first, then eigenvalues below ``tol * ||M||_2`` are
    set to zero. Works on stacks of matrices along leading axes.
    """
    H = hermitian_part(np.asarray(M, dtype=complex))
    finite = bool(np.isfinite(H).all())
    try:
        if not finite:
            raise np.linalg.LinAlgError("non-finite input")
        w, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigendecomposition failed (shape={H.shape}, "
            f"finite={finite}, fro={np.linalg.norm(H):.3e})"
        ) from exc
    scale = np.max(np.abs(w), axis=-1, keepdims=True)
    w = np.where(w > tol * scale, w, 0.0)
    return (V * w[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))


def assemble_block(t, z, check=True):
    """Hankel-Toeplitz block ``[[T conj(t), H conj(z)], [H z, T t]]``.

    ``z`` may be a single column of length ``2n - 1`` or a ``(2n-1, L)``
    matrix, in which case an ``(L, 2n, 2n)`` stack is returned.
    """
    t = check_conj_symmetric(t) if check else np.asarray(t, dtype=complex)
    z = np.asarray(z, dtype=complex)
    n = half_dim(t.shape[-1])
    if z.shape[0] != 2 * n - 1:
        raise DimensionError(f"z must have {2 * n - 1} rows, got {z.shape[0]}")
    Hz = hankel_lift(z.T) if z.ndim == 2 else hankel_lift(z)
    T = toeplitz_lift(t, check=False)
    lead = Hz.shape[:-2]
    out = np.empty(lead + (2 * n, 2 * n), dtype=complex)
    out[..., :n, :n] = np.conj(T)
    out[..., n:, n:] = T
    out[..., n:, :n] = Hz
    out[..., :n, n:] = np.conj(Hz)  # Hankel matrices are symmetric
    return out


def split_block(M):
    """Return the quadrants ``(P1, P2, P3)`` = (top-left, bottom-right, bottom-left)."""
    M = np.asarray(M)
    m = M.shape[-1]
    if M.ndim < 2 or M.shape[-2] != m:
        raise DimensionError(f"expected square block, got shape {M.shape}")
    if m % 2:
        raise DimensionError(f"block dimension must be even, got {m}")
    n = m // 2
    return M[..., :n, :n], M[..., n:, n:], M[..., n:, :n]
