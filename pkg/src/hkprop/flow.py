"""Hamiltonian trajectories with their Jacobians and classical action.

Every trajectory carries the state ``(X, Xi, F, S, h1_phase)``:

* ``X``, ``Xi`` -- position and momentum, ``dX/dt = Xi``, ``dXi/dt = -grad V(X)``;
* ``F`` -- the 2d x 2d Jacobian ``d(X, Xi) / d(q, p)`` obeying
  ``dF/dt = J Hess h(X, Xi) F`` with ``J = [[0, id], [-id, 0]]``;
* ``S`` -- the action, ``dS/dt = dX/dt . Xi - h0``;
* ``h1_phase`` -- the accumulated integral of the subprincipal symbol.

All of it is advanced with one classical RK4 scheme, vectorised over the
nodes of a phase-space grid.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BadShape, NonFiniteState
from .hamiltonian import eval_h0


def symplectic_form(d):
    J = np.zeros((2 * d, 2 * d))
    J[:d, d:] = np.eye(d)
    J[d:, :d] = -np.eye(d)
    return J


def symplectic_defect(F):
    """Frobenius norm of ``F^T J F - J``; works on stacks of matrices."""
    F = np.asarray(F, dtype=float)
    if F.ndim < 2 or F.shape[-1] != F.shape[-2] or F.shape[-1] % 2:
        raise BadShape(f"expected (..., 2d, 2d), got {F.shape}")
    J = symplectic_form(F.shape[-1] // 2)
    D = np.swapaxes(F, -1, -2) @ J @ F - J
    out = np.linalg.norm(D, axis=(-2, -1))
    return float(out) if out.ndim == 0 else out


@dataclass
class BundleGrid:
    """Tensor-product grid of initial phase-space points.

    ``q_points`` and ``p_points`` hold one uniform 1-d grid per coordinate.
    Nodes are ordered like ``np.meshgrid(*q_points, *p_points, indexing="ij")``
    flattened in C order.
    """

    q_points: tuple
    p_points: tuple

    def __post_init__(self):
        self.q_points = tuple(np.asarray(g, dtype=float) for g in self.q_points)
        self.p_points = tuple(np.asarray(g, dtype=float) for g in self.p_points)
        if len(self.q_points) != len(self.p_points) or not self.q_points:
            raise BadShape("need one q and one p grid per dimension")
        for g in self.q_points + self.p_points:
            if g.ndim != 1 or g.size == 0:
                raise BadShape("grids must be nonempty 1-d arrays")
            if g.size > 1:
                h = np.diff(g)
                if np.any(h <= 0) or np.ptp(h) > 1e-9 * abs(h[0]):
                    raise BadShape("grids must be uniform and increasing")

    @classmethod
    def uniform(cls, q_min, q_max, n_q, p_min, p_max, n_p):
        """Grid from per-coordinate bounds and counts (scalars mean d = 1)."""
        q_min, q_max, n_q, p_min, p_max, n_p = (
            np.atleast_1d(v) for v in (q_min, q_max, n_q, p_min, p_max, n_p)
        )
        qs = tuple(np.linspace(a, b, int(n)) for a, b, n in zip(q_min, q_max, n_q))
        ps = tuple(np.linspace(a, b, int(n)) for a, b, n in zip(p_min, p_max, n_p))
        return cls(qs, ps)

    @classmethod
    def centered(cls, q_center, p_center, half_width, spacing):
        """Square grid around ``(q_center, p_center)`` with the given spacing."""
        q_center = np.atleast_1d(np.asarray(q_center, dtype=float))
        p_center = np.atleast_1d(np.asarray(p_center, dtype=float))
        half_width = np.broadcast_to(half_width, q_center.shape)
        n = np.ceil(half_width / spacing).astype(int)
        qs = tuple(c + spacing * np.arange(-k, k + 1) for c, k in zip(q_center, n))
        ps = tuple(c + spacing * np.arange(-k, k + 1) for c, k in zip(p_center, n))
        return cls(qs, ps)

    @property
    def dim(self):
        return len(self.q_points)

    @property
    def shape(self):
        return tuple(g.size for g in self.q_points + self.p_points)

    def __len__(self):
        return int(np.prod(self.shape))

    @property
    def spacings(self):
        return np.array([g[1] - g[0] if g.size > 1 else 1.0 for g in self.q_points + self.p_points])

    @property
    def weights(self):
        return np.full(len(self), float(np.prod(self.spacings)))

    def nodes(self):
        """Initial points as arrays ``q (N, d)`` and ``p (N, d)``."""
        mesh = np.meshgrid(*self.q_points, *self.p_points, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        d = self.dim
        return pts[:, :d], pts[:, d:]

    def boundary_mask(self):
        """True for nodes on the outer face of the grid."""
        idx = np.meshgrid(*[np.arange(n) for n in self.shape], indexing="ij")
        mask = np.zeros(self.shape, dtype=bool)
        for i, n in zip(idx, self.shape):
            mask |= (i == 0) | (i == n - 1)
        return mask.ravel()


@dataclass
class TrajectoryRecord:
    """One trajectory sampled on a time grid.

    Arrays: ``times (n_t,)``, ``X, Xi (n_t, d)``, ``S (n_t,)``,
    ``F (n_t, 2d, 2d)``, ``h1_phase (n_t,)``.
    """

    q0: np.ndarray
    p0: np.ndarray
    times: np.ndarray
    X: np.ndarray
    Xi: np.ndarray
    S: np.ndarray
    F: np.ndarray
    h1_phase: np.ndarray

    @property
    def dim(self):
        return self.X.shape[-1]


@dataclass
class TrajectoryBundle:
    """Trajectories of all grid nodes, stacked with the node axis second.

    Behaves as a sequence of :class:`TrajectoryRecord` in node order.
    """

    q0: np.ndarray
    p0: np.ndarray
    times: np.ndarray
    X: np.ndarray
    Xi: np.ndarray
    S: np.ndarray
    F: np.ndarray
    h1_phase: np.ndarray

    def __len__(self):
        return self.q0.shape[0]

    def __getitem__(self, i):
        if not -len(self) <= i < len(self):
            raise IndexError(i)
        return TrajectoryRecord(
            self.q0[i], self.p0[i], self.times,
            self.X[:, i], self.Xi[:, i], self.S[:, i], self.F[:, i], self.h1_phase[:, i],
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def dim(self):
        return self.X.shape[-1]

    def time_index(self, t):
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[k] - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"time {t} is not on the stored grid")
        return k


def time_grid(t_final, dt):
    """Uniform grid from 0 to ``t_final`` with a shortened last step if needed."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    T = abs(float(t_final))
    n = int(np.floor(T / dt + 1e-9))
    ts = dt * np.arange(n + 1)
    if T - ts[-1] > 1e-9 * dt:
        ts = np.append(ts, T)
    ts[-1] = T if ts.size > 1 else 0.0
    return np.copysign(ts, t_final) if t_final < 0 else ts


def _flow_rhs(model, J):
    def rhs(t, y):
        X, Xi, F, S, P = y
        h, grad, hess = eval_h0(model, X, Xi)
        d = model.dim
        dX = Xi
        dXi = -grad[..., :d]
        dF = J @ hess @ F
        dS = np.sum(Xi * Xi, axis=-1) - h
        dP = model.h1(t, X, Xi)
        return dX, dXi, dF, dS, dP

    return rhs


def rk4_step(rhs, t, y, h):
    """One classical RK4 step for a state given as a tuple of arrays."""
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, tuple(a + 0.5 * h * k for a, k in zip(y, k1)))
    k3 = rhs(t + 0.5 * h, tuple(a + 0.5 * h * k for a, k in zip(y, k2)))
    k4 = rhs(t + h, tuple(a + h * k for a, k in zip(y, k3)))
    return tuple(
        a + (h / 6.0) * (b1 + 2 * b2 + 2 * b3 + b4)
        for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)
    )


def _check_finite(y, t):
    bad = np.zeros(y[0].shape[0], dtype=bool)
    for a in y:
        bad |= ~np.isfinite(a.reshape(a.shape[0], -1)).all(axis=1)
    if bad.any():
        node = int(np.flatnonzero(bad)[0])
        raise NonFiniteState(f"non-finite state at t={t:g} for node {node}", node=node)


def integrate_nodes(model, q, p, t_final, dt, store_stride=1):
    """Integrate all initial points ``q, p`` of shape ``(N, d)`` together.

    Every ``store_stride``-th step is stored, plus the final time.
    """
    q = np.asarray(q, dtype=float).reshape(-1, model.dim)
    p = np.asarray(p, dtype=float).reshape(-1, model.dim)
    N, d = q.shape
    J = symplectic_form(d)
    rhs = _flow_rhs(model, J)
    ts = time_grid(t_final, dt)
    y = (
        q.copy(), p.copy(),
        np.broadcast_to(np.eye(2 * d), (N, 2 * d, 2 * d)).copy(),
        np.zeros(N), np.zeros(N),
    )
    keep = [0]
    stored = [y]
    for k in range(1, ts.size):
        y = rk4_step(rhs, ts[k - 1], y, ts[k] - ts[k - 1])
        _check_finite(y, ts[k])
        if k % store_stride == 0 or k == ts.size - 1:
            keep.append(k)
            stored.append(y)
    X, Xi, F, S, P = (np.stack(parts) for parts in zip(*stored))
    return TrajectoryBundle(q, p, ts[keep], X, Xi, S, F, P)


def integrate_trajectory(model, q0, p0, t_final, dt):
    """Single-trajectory convenience wrapper around :func:`integrate_nodes`."""
    return integrate_nodes(model, q0, p0, t_final, dt)[0]


def evolve_bundle(model, grid, t_final, dt, store_stride=1):
    """Evolve every node of ``grid``; node order is preserved."""
    q, p = grid.nodes()
    return integrate_nodes(model, q, p, t_final, dt, store_stride)
