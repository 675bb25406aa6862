"""Hamiltonians of the form ``h = |xi|^2/2 + V(x) + eps * h1(t, x, xi)``.

Positions are arrays of shape ``(..., d)``. Potentials return the value,
gradient and Hessian in one call so the flow integrator evaluates them once
per Runge-Kutta stage.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import UnknownModel


@dataclass(frozen=True)
class HamiltonianModel:
    """Evaluator bundle for ``h0 = |xi|^2/2 + V(x)`` and an optional ``h1``.

    ``potential(x)`` maps positions of shape ``(..., d)`` to
    ``(V (...), grad V (..., d), Hess V (..., d, d))``. ``subprincipal(t, x, xi)``
    returns a real array of shape ``(...)``.
    """

    name: str
    dim: int
    potential: Callable
    subprincipal: Optional[Callable] = None
    params: dict = field(default_factory=dict)

    def h1(self, t, x, xi):
        x = np.asarray(x, dtype=float)
        if self.subprincipal is None:
            return np.zeros(x.shape[:-1])
        return np.broadcast_to(self.subprincipal(t, x, xi), x.shape[:-1])


def eval_h0(model, x, xi):
    """Value, phase-space gradient and phase-space Hessian of ``h0``.

    The gradient is ``(grad V(x), xi)`` with shape ``(..., 2d)``; the Hessian
    is ``blockdiag(Hess V(x), id)`` with shape ``(..., 2d, 2d)``.
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    d = model.dim
    V, dV, HV = model.potential(x)
    value = 0.5 * np.sum(xi * xi, axis=-1) + V
    grad = np.concatenate([dV, xi], axis=-1)
    hess = np.zeros(x.shape[:-1] + (2 * d, 2 * d))
    hess[..., :d, :d] = HV
    hess[..., d:, d:] = np.eye(d)
    return value, grad, hess


def _free(x):
    shape = x.shape[:-1]
    d = x.shape[-1]
    return np.zeros(shape), np.zeros(x.shape), np.zeros(shape + (d, d))


def _harmonic(omega):
    w2 = omega * omega

    def potential(x):
        d = x.shape[-1]
        V = 0.5 * w2 * np.sum(x * x, axis=-1)
        return V, w2 * x, np.broadcast_to(w2 * np.eye(d), x.shape[:-1] + (d, d)).copy()

    return potential


def _torsional(a):
    def potential(x):
        d = x.shape[-1]
        V = a * np.sum(1.0 - np.cos(x), axis=-1)
        H = np.zeros(x.shape[:-1] + (d, d))
        idx = np.arange(d)
        H[..., idx, idx] = a * np.cos(x)
        return V, a * np.sin(x), H

    return potential


def _gaussian_well(A, sigma):
    s2 = sigma * sigma

    def potential(x):
        d = x.shape[-1]
        e = np.exp(-0.5 * np.sum(x * x, axis=-1) / s2)
        V = -A * e
        grad = (A / s2) * e[..., None] * x
        H = (A * e)[..., None, None] * (np.eye(d) / s2 - x[..., :, None] * x[..., None, :] / (s2 * s2))
        return V, grad, H

    return potential


def builtin(model_name, d=1, omega=1.0, a=1.0, A=1.0, sigma=1.0, h1_const=None):
    """Construct one of the built-in subquadratic models.

    ``free``: V = 0; ``harmonic``: V = omega^2 |x|^2 / 2;
    ``torsional``: V = a * sum(1 - cos x_j);
    ``gaussian_well``: V = -A exp(-|x|^2 / (2 sigma^2)).
    A nonzero ``h1_const`` adds the constant subprincipal symbol ``h1 = h1_const``.
    """
    if model_name == "free":
        potential, params = _free, {}
    elif model_name == "harmonic":
        if omega <= 0:
            raise ValueError("omega must be positive")
        potential, params = _harmonic(omega), {"omega": omega}
    elif model_name == "torsional":
        if a <= 0:
            raise ValueError("a must be positive")
        potential, params = _torsional(a), {"a": a}
    elif model_name == "gaussian_well":
        if A <= 0 or sigma <= 0:
            raise ValueError("A and sigma must be positive")
        potential, params = _gaussian_well(A, sigma), {"A": A, "sigma": sigma}
    else:
        raise UnknownModel(f"unknown model {model_name!r}")
    subprincipal = None
    if h1_const:
        c = float(h1_const)
        params["h1_const"] = c

        def subprincipal(t, x, xi):
            return np.full(np.shape(x)[:-1], c)

    return HamiltonianModel(model_name, int(d), potential, subprincipal, params)


@dataclass(frozen=True)
class SubquadraticReport:
    max_hessian_norm: float
    max_third_deriv_norm: float
    sample_box: tuple


def subquadratic_probe(model, box, n_samples=1000, seed=0, step=1e-4):
    """Sample the sizes of Hess V and its first derivatives over a box.

    ``box`` is ``(lo, hi)`` for all coordinates or one pair per coordinate.
    Third derivatives are central differences of the Hessian. This is a
    diagnostic: sampling can never prove the supremum is finite.
    """
    d = model.dim
    box = np.asarray(box, dtype=float)
    if box.ndim == 1:
        box = np.tile(box, (d, 1))
    lo, hi = box[:, 0], box[:, 1]
    rng = np.random.default_rng(seed)
    x = lo + (hi - lo) * rng.random((n_samples, d))
    _, _, H = model.potential(x)
    max_hess = float(np.max(np.linalg.norm(H, ord=2, axis=(-2, -1))))
    max_third = 0.0
    for k in range(d):
        e = np.zeros(d)
        e[k] = step
        dH = (model.potential(x + e)[2] - model.potential(x - e)[2]) / (2 * step)
        max_third = max(max_third, float(np.max(np.linalg.norm(dH, ord=2, axis=(-2, -1)))))
    return SubquadraticReport(max_hess, max_third, tuple(map(tuple, box)))
