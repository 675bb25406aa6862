"""Complex symmetric matrices with positive definite real part.

The set of such matrices is a convex cone; every element has a unique
square root inside the cone, which is what makes determinants like
``det(Theta_x + Theta_y) ** 0.5`` well defined. This module also tracks
square roots of scalar paths ``w(t)`` by continuity.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceFailure,
    InconsistentSeed,
    NotSymmetric,
    RealPartNotPD,
    UnresolvedWinding,
    ZeroCrossing,
)

SYMMETRY_TOL = 1e-12
ROOT_RTOL = 1e-10
ZERO_TOL = 1e-14


@dataclass(frozen=True)
class ConeMatrix:
    """Validated complex symmetric matrix with positive definite real part.

    Build instances through :func:`cone_check`.
    """

    entries: np.ndarray

    @property
    def dim(self):
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def _as_square(M):
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {M.shape}")
    return M


def cone_check(M, sym_tol=SYMMETRY_TOL):
    """Validate ``M`` as an element of the cone and wrap it.

    Scalars are promoted to 1x1 matrices. The symmetry tolerance is
    relative to ``max(1, max|M_ij|)``.
    """
    if isinstance(M, ConeMatrix):
        return M
    M = _as_square(M)
    scale = max(1.0, float(np.max(np.abs(M))))
    if np.max(np.abs(M - M.T)) > sym_tol * scale:
        raise NotSymmetric("matrix is not complex symmetric")
    try:
        np.linalg.cholesky(M.real)
    except np.linalg.LinAlgError:
        raise RealPartNotPD("real part is not positive definite") from None
    entries = M.copy()
    entries.flags.writeable = False
    return ConeMatrix(entries)


def _sqrt_upper_triangular(T):
    # Bjorck-Hammarling recurrence; diagonal roots are principal, hence in Re z > 0
    n = T.shape[0]
    R = np.zeros_like(T)
    for j in range(n):
        R[j, j] = np.sqrt(T[j, j])
        for i in range(j - 1, -1, -1):
            s = R[i, i + 1:j] @ R[i + 1:j, j]
            R[i, j] = (T[i, j] - s) / (R[i, i] + R[j, j])
    return R


def cone_sqrt(M):
    """Square root of a cone matrix that lies again in the cone.

    The spectrum of a cone matrix sits in the open right half plane, so the
    principal square root (computed from a complex Schur form) is the unique
    root with positive definite real part.
    """
    M = cone_check(M)
    A = M.entries
    try:
        T, Q = scipy.linalg.schur(A, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceFailure(f"Schur decomposition failed: {exc}") from exc
    R = Q @ _sqrt_upper_triangular(T) @ Q.conj().T
    if not np.all(np.isfinite(R)):
        raise ConvergenceFailure("non-finite square root")
    # the exact root is symmetric; remove rounding asymmetry
    R = 0.5 * (R + R.T)
    return cone_check(R, sym_tol=1e-8)


def sqrt_det(M):
    """``det(M) ** 0.5`` on the branch fixed by the cone square root."""
    return complex(np.linalg.det(cone_sqrt(M).entries))


@dataclass(frozen=True)
class BranchState:
    current_value: complex
    previous_argument: complex


def branch_sqrt_init(w0, root0, rtol=ROOT_RTOL):
    """Seed a continuously tracked square root at a caller-chosen branch."""
    w0, root0 = complex(w0), complex(root0)
    if abs(root0 * root0 - w0) > rtol * max(abs(w0), ZERO_TOL):
        raise InconsistentSeed(f"{root0}**2 != {w0}")
    if abs(w0) < ZERO_TOL:
        raise ZeroCrossing("cannot seed a square root at zero")
    return BranchState(root0, w0)


def branch_sqrt_step(state, w_new):
    """Advance the tracked root to ``w_new``.

    Returns the new state and the selected root, i.e. the root of ``w_new``
    nearest to the previous one. The caller must sample the path finely
    enough that ``w`` turns by much less than ``pi`` between samples.
    """
    w_new = complex(w_new)
    if abs(w_new) < ZERO_TOL:
        raise ZeroCrossing(f"|w| = {abs(w_new):.3e} below {ZERO_TOL}")
    r = np.sqrt(w_new)
    c = state.current_value
    if abs(r - c) > abs(r + c):
        r = -r
    return BranchState(complex(r), w_new), complex(r)


def track_sqrt(w, root0, axis=0):
    """Vectorised branch tracking of many paths at once.

    Parameters
    ----------
    w : array_like, complex
        Path samples; ``axis`` is the time axis.
    root0 : array_like
        Seed roots, broadcastable against one time slice of ``w``.

    Returns
    -------
    roots : ndarray
        Square roots of ``w``, continuous along ``axis``.
    """
    w = np.moveaxis(np.asarray(w, dtype=complex), axis, 0)
    root0 = np.broadcast_to(np.asarray(root0, dtype=complex), w.shape[1:])
    scale = np.maximum(np.abs(w[0]), ZERO_TOL)
    if np.any(np.abs(root0 * root0 - w[0]) > ROOT_RTOL * scale):
        raise InconsistentSeed("seed roots do not square to the first samples")
    if np.any(np.abs(w) < ZERO_TOL):
        raise ZeroCrossing("path passes through zero")
    roots = np.sqrt(w)
    current = root0.copy()
    roots[0] = root0
    for k in range(1, w.shape[0]):
        r = roots[k]
        flip = np.abs(r - current) > np.abs(r + current)
        r = np.where(flip, -r, r)
        # near-equidistant roots mean the path turned by ~pi in one sample
        if np.any(np.abs(r - current) > 0.9 * np.abs(r + current)):
            raise UnresolvedWinding(f"time sample {k} does not resolve the winding of w")
        roots[k] = r
        current = r
    return np.moveaxis(roots, 0, axis)
