"""Herman-Kluk prefactor and related symbols computed from trajectories.

Jacobians follow ``F = d(X, Xi)/d(q, p)`` in block form ``[[A, B], [C, D]]``
(``A = dX/dq`` and so on). With the transposed-Jacobian convention
``X_q = A^T`` the HK matrix is

    Z = (i Ty^{-1}  id) F^T (-i Tx  id)^T
      = Ty^{-1} A^T Tx - i B^T Tx + i Ty^{-1} C^T + D^T,

and the prefactor is the branch-continuous root ``u0 = det(Ty Z)^{1/2}``
started from ``det(Tx + Ty)^{1/2}``.
"""

from dataclasses import dataclass

import numpy as np

from .complex_matrix import ConeMatrix, cone_check, sqrt_det, track_sqrt
from .errors import BadShape, InconsistentSeed, NonFiniteState, SingularFrame
from .flow import _flow_rhs, rk4_step, symplectic_form


@dataclass(frozen=True)
class WidthPair:
    theta_x: ConeMatrix
    theta_y: ConeMatrix

    def __post_init__(self):
        object.__setattr__(self, "theta_x", cone_check(self.theta_x))
        object.__setattr__(self, "theta_y", cone_check(self.theta_y))
        if self.theta_x.dim != self.theta_y.dim:
            raise BadShape("width matrices differ in dimension")

    @classmethod
    def identity(cls, d=1):
        return cls(np.eye(d), np.eye(d))

    @classmethod
    def from_values(cls, theta_x, theta_y, d=1):
        """Scalars are read as multiples of the identity."""

        def mat(v):
            v = np.asarray(v, dtype=complex)
            return v * np.eye(d) if v.ndim == 0 else v

        return cls(mat(theta_x), mat(theta_y))

    @property
    def dim(self):
        return self.theta_x.dim

    def seed_root(self):
        """``det(Tx + Ty)^{1/2}`` as ``det(sqrt(Tx + Ty))`` with the cone root."""
        return sqrt_det(self.theta_x.entries + self.theta_y.entries)


@dataclass
class PrefactorPath:
    times: np.ndarray
    u0: np.ndarray
    method: str


def _check_F(F, d):
    F = np.asarray(F)
    if F.shape[-2:] != (2 * d, 2 * d):
        raise BadShape(f"expected Jacobians of shape (..., {2 * d}, {2 * d}), got {F.shape}")
    return F


def zmatrix(F, widths):
    """HK matrix ``Z`` for a single Jacobian or a stack of them."""
    d = widths.dim
    F = _check_F(F, d)
    Tx = widths.theta_x.entries
    Tyi = np.linalg.inv(widths.theta_y.entries)
    left = np.hstack([1j * Tyi, np.eye(d)])
    right = np.vstack([-1j * Tx, np.eye(d)])
    return left @ np.swapaxes(F, -1, -2) @ right


def zmatrix_dot(F, F_dot, widths):
    """Time derivative of ``Z`` given ``dF/dt``; ``Z`` is linear in ``F``."""
    F = _check_F(F, widths.dim)
    F_dot = _check_F(F_dot, widths.dim)
    if F.shape != F_dot.shape:
        raise BadShape("F and F_dot differ in shape")
    return zmatrix(F_dot, widths)


def zmatrix_floor(widths):
    """Lower bound ``2^d det(Re Tx) / det(Re Ty)`` for ``|det Z|^2``."""
    d = widths.dim
    return 2.0**d * np.linalg.det(widths.theta_x.entries.real) / np.linalg.det(widths.theta_y.entries.real)


def hk_prefactor_closed(record, widths):
    """Closed-form prefactor along a record or a whole bundle.

    Works on anything with ``times``, ``F`` and ``h1_phase`` arrays whose
    leading axis is time; the result has shape ``F.shape[:-2]``.
    """
    Z = zmatrix(record.F, widths)
    w = np.linalg.det(widths.theta_y.entries @ Z)
    seed = widths.seed_root()
    target = np.linalg.det(widths.theta_x.entries + widths.theta_y.entries)
    if np.any(np.abs(w[0] - target) > 1e-10 * max(1.0, abs(target))):
        raise InconsistentSeed("det(Ty Z(0)) differs from det(Tx + Ty); F(0) is not the identity")
    u0 = track_sqrt(w, seed) * np.exp(-1j * record.h1_phase)
    return PrefactorPath(record.times, u0, "closed_form")


def hk_prefactor_ode(record, widths, model):
    """Prefactor from ``du/dt = u (tr(Z^{-1} dZ/dt)/2 - i h1)``.

    The flow and its Jacobian are re-integrated alongside ``u`` on the
    record's own time grid, starting from the record's initial point, so
    this route shares nothing with :func:`hk_prefactor_closed` except the
    model and the grid.
    """
    d = model.dim
    J = symplectic_form(d)
    flow = _flow_rhs(model, J)

    def rhs(t, y):
        X, Xi, F, S, P, u = y
        dX, dXi, dF, dS, dP = flow(t, (X, Xi, F, S, P))
        Z = zmatrix(F, widths)
        Zdot = zmatrix(dF, widths)
        tr = np.trace(np.linalg.solve(Z, Zdot), axis1=-2, axis2=-1)
        du = u * (0.5 * tr - 1j * model.h1(t, X, Xi))
        return dX, dXi, dF, dS, dP, du

    q0 = np.asarray(record.q0, dtype=float).reshape(-1, d)
    p0 = np.asarray(record.p0, dtype=float).reshape(-1, d)
    N = q0.shape[0]
    y = (
        q0.copy(), p0.copy(),
        np.broadcast_to(np.eye(2 * d), (N, 2 * d, 2 * d)).copy(),
        np.zeros(N), np.zeros(N),
        np.full(N, widths.seed_root(), dtype=complex),
    )
    ts = np.asarray(record.times)
    out = [y[-1]]
    for k in range(1, ts.size):
        y = rk4_step(rhs, ts[k - 1], y, ts[k] - ts[k - 1])
        if not np.all(np.isfinite(y[-1])):
            raise NonFiniteState(f"prefactor ODE blew up at t={ts[k]:g}")
        out.append(y[-1])
    u = np.stack(out)
    if np.ndim(record.q0) == 1:
        u = u[:, 0]
    return PrefactorPath(ts, u, "ode")


def fga_symbol(widths, d=None):
    """Constant frozen-Gaussian symbol ``det(Tx + Ty)^{1/2}``."""
    if d is not None and d != widths.dim:
        raise BadShape("dimension does not match the widths")
    return widths.seed_root()


def tga_frame(F):
    """``Q = A + iB`` and ``P = C + iD`` for a unit-width initial packet."""
    F = np.asarray(F)
    d = F.shape[-1] // 2
    A, B = F[..., :d, :d], F[..., :d, d:]
    C, D = F[..., d:, :d], F[..., d:, d:]
    return A + 1j * B, C + 1j * D


def tga_width(F):
    """Width ``-i P Q^{-1}`` of a thawed Gaussian transported by ``F``."""
    F = np.asarray(F, dtype=float)
    if F.ndim < 2 or F.shape[-1] != F.shape[-2] or F.shape[-1] % 2:
        raise BadShape(f"expected (..., 2d, 2d), got {F.shape}")
    Q, P = tga_frame(F)
    try:
        Qi = np.linalg.inv(Q)
    except np.linalg.LinAlgError as exc:
        raise SingularFrame("X_q + i X_p is singular") from exc
    theta = -1j * P @ Qi
    if theta.ndim == 2:
        cone_check(theta, sym_tol=1e-8)
    return theta
