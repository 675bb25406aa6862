"""Sampled wavefunctions and Gaussian wavepackets.

A :class:`WaveFunction` lives on a tensor-product grid whose axis ``j``
runs uniformly from ``x_min[j]`` to ``x_max[j]`` (both ends included) with
``n_x[j]`` nodes. Integrals use trapezoid weights.
"""

from dataclasses import dataclass

import numpy as np

from .complex_matrix import cone_check
from .errors import BoxTooSmall, GridMismatch


def _tuple(v, dtype):
    return tuple(dtype(a) for a in np.atleast_1d(v))


@dataclass
class WaveFunction:
    x_min: tuple
    x_max: tuple
    n_x: tuple
    eps: float
    values: np.ndarray

    def __post_init__(self):
        self.x_min = _tuple(self.x_min, float)
        self.x_max = _tuple(self.x_max, float)
        self.n_x = _tuple(self.n_x, int)
        self.eps = float(self.eps)
        if not len(self.x_min) == len(self.x_max) == len(self.n_x):
            raise GridMismatch("box bounds and sizes disagree in dimension")
        if min(self.n_x) < 2:
            raise GridMismatch("need at least two nodes per axis")
        if any(b <= a for a, b in zip(self.x_min, self.x_max)):
            raise GridMismatch("empty box")
        self.values = np.asarray(self.values, dtype=complex).reshape(self.n_x)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("wavefunction has non-finite samples")

    @classmethod
    def zeros_like(cls, other):
        return cls(other.x_min, other.x_max, other.n_x, other.eps, np.zeros(other.n_x, complex))

    def with_values(self, values):
        return WaveFunction(self.x_min, self.x_max, self.n_x, self.eps, values)

    @property
    def dim(self):
        return len(self.n_x)

    @property
    def axes(self):
        return [np.linspace(a, b, n) for a, b, n in zip(self.x_min, self.x_max, self.n_x)]

    @property
    def x(self):
        """Nodes of a 1-d grid."""
        if self.dim != 1:
            raise GridMismatch("x is only defined for d = 1; use points()")
        return self.axes[0]

    @property
    def spacings(self):
        return np.array([(b - a) / (n - 1) for a, b, n in zip(self.x_min, self.x_max, self.n_x)])

    def points(self):
        """Flattened nodes, shape ``(M, d)``, in C order."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def weights(self):
        """Trapezoid weights with the shape of ``values``."""
        w = np.ones(self.n_x)
        for j, (n, h) in enumerate(zip(self.n_x, self.spacings)):
            wj = np.full(n, h)
            wj[[0, -1]] = 0.5 * h
            shape = [1] * self.dim
            shape[j] = n
            w = w * wj.reshape(shape)
        return w

    def norm(self):
        return float(np.sqrt(np.sum(self.weights() * np.abs(self.values) ** 2)))

    def same_grid(self, other, tol=1e-12):
        return (
            self.n_x == other.n_x
            and np.allclose(self.x_min, other.x_min, rtol=0, atol=tol)
            and np.allclose(self.x_max, other.x_max, rtol=0, atol=tol)
        )


def gaussian_frame(points, q, p, eps, theta):
    """Gaussian wavepackets ``g^{eps,theta}_{(q,p)}`` evaluated at ``points``.

    ``points`` has shape ``(M, d)``; ``q`` and ``p`` have shape ``(N, d)``.
    Returns an ``(N, M)`` array with rows
    ``(pi eps)^(-d/4) det(Re theta)^(1/4) exp(-(x-q).theta(x-q)/2eps + i p.(x-q)/eps)``.
    """
    theta = cone_check(theta).entries
    points = np.atleast_2d(points)
    q = np.atleast_2d(q)
    p = np.atleast_2d(p)
    d = points.shape[1]
    norm = (np.pi * eps) ** (-d / 4) * np.linalg.det(theta.real) ** 0.25
    # expand the exponent into node, point and cross terms so that the
    # (N, M) work is a single matrix product; centring limits cancellation
    x0 = points.mean(axis=0)
    xs = points - x0
    qs = q - x0
    qT = qs @ theta
    point_term = -0.5 * np.einsum("mi,ij,mj->m", xs, theta, xs) / eps
    node_term = (-0.5 * np.sum(qT * qs, axis=-1) - 1j * np.sum(p * qs, axis=-1)) / eps
    out = ((qT + 1j * p) / eps) @ xs.T
    out += node_term[:, None] + np.log(norm)
    out += point_term[None, :]
    return np.exp(out, out=out)


def coherent_state(center, eps, theta=None, box=None, *, like=None):
    """Normalised Gaussian wavepacket centred at phase-space point ``(q, p)``.

    Parameters
    ----------
    center : pair
        ``(q, p)``, each a scalar (d = 1) or a length-d sequence.
    theta : array_like, optional
        Width matrix in the cone; identity by default.
    box : tuple, optional
        ``(x_min, x_max, n_x)`` of the sampling grid.
    like : WaveFunction, optional
        Reuse the grid of an existing wavefunction instead of ``box``.
    """
    q, p = (np.atleast_1d(np.asarray(c, dtype=float)) for c in center)
    d = q.size
    theta = np.eye(d) if theta is None else theta
    if like is not None:
        x_min, x_max, n_x = like.x_min, like.x_max, like.n_x
    else:
        x_min, x_max, n_x = box
    x_min = np.broadcast_to(np.asarray(x_min, dtype=float), (d,))
    x_max = np.broadcast_to(np.asarray(x_max, dtype=float), (d,))
    margin = 6 * np.sqrt(eps)
    if np.any(q - x_min < margin) or np.any(x_max - q < margin):
        raise BoxTooSmall(f"center {q} closer than 6 sqrt(eps) to the box edge")
    psi = WaveFunction(x_min, x_max, np.broadcast_to(n_x, (d,)), eps, np.zeros(np.broadcast_to(n_x, (d,))))
    vals = gaussian_frame(psi.points(), q[None], p[None], eps, theta)[0]
    return psi.with_values(vals)
