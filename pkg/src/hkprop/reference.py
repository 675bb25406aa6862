"""Strang-split spectral solver used as the accuracy oracle.

Solves ``i eps psi_t = -eps^2/2 Laplace psi + (V(x) + eps h1) psi`` on the
periodic box ``[-L, L)^d`` with ``n_x = 2^k`` nodes per axis.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BoundaryMass, GridMismatch
from .fft import angular_wavenumbers, fftn, ifftn, is_power_of_two, next_power_of_two, fft, ifft
from .wavefunction import WaveFunction

EDGE_FRACTION = 0.025
EDGE_TOL = 1e-10


@dataclass(frozen=True)
class SpectralDomain:
    L: float
    n_x: int
    eps: float
    dt_ref: float = 1e-3
    dim: int = 1

    def __post_init__(self):
        if not is_power_of_two(self.n_x):
            raise ValueError(f"n_x = {self.n_x} is not a power of two")
        if self.L <= 0 or self.eps <= 0 or self.dt_ref <= 0:
            raise ValueError("L, eps and dt_ref must be positive")

    @property
    def dx(self):
        return 2 * self.L / self.n_x

    def template(self):
        """Zero wavefunction on the domain's nodes ``-L + j dx``."""
        d = self.dim
        n = (self.n_x,) * d
        return WaveFunction((-self.L,) * d, (self.L - self.dx,) * d, n, self.eps, np.zeros(n))

    @classmethod
    def for_resolution(cls, L, eps, p_max, dt_ref=1e-3, dim=1, points_per_wavelength=16):
        """Smallest power-of-two grid with the requested sampling of ``2 pi eps / p_max``."""
        dx = 2 * np.pi * eps / (points_per_wavelength * max(p_max, 1e-12))
        return cls(float(L), next_power_of_two(int(np.ceil(2 * L / dx))), eps, dt_ref, dim)


def edge_mass(psi, fraction=EDGE_FRACTION):
    """Probability fraction within ``fraction`` of the box width from any edge."""
    dens = np.abs(psi.values) ** 2
    total = dens.sum()
    if total == 0:
        return 0.0
    mask = np.zeros(psi.n_x, dtype=bool)
    for j, n in enumerate(psi.n_x):
        k = max(1, int(np.ceil(fraction * n)))
        idx = [slice(None)] * psi.dim
        idx[j] = np.r_[0:k, n - k:n]
        mask[tuple(idx)] = True
    return float(dens[mask].sum() / total)


def split_step_propagate(model, psi0, t_final, domain, edge_tol=EDGE_TOL, check_every=100):
    """Strang splitting ``e^{-iV dt/2eps} F^{-1} e^{-i eps k^2 dt/2} F e^{-iV dt/2eps}``.

    Consecutive half potential steps are fused. Raises :class:`BoundaryMass`
    if the edge bands of the box carry more than ``edge_tol`` of the norm.
    """
    tmpl = domain.template()
    if not psi0.same_grid(tmpl) or psi0.eps != domain.eps:
        raise GridMismatch("initial state is not sampled on the spectral domain")
    d = domain.dim
    eps = domain.eps
    n_steps = max(1, int(np.ceil(abs(t_final) / domain.dt_ref - 1e-9)))
    dt = t_final / n_steps
    pts = tmpl.points()
    V = model.potential(pts)[0].reshape(tmpl.n_x)
    k = angular_wavenumbers(domain.n_x, domain.dx)
    k2 = sum(np.meshgrid(*([k**2] * d), indexing="ij"))
    kinetic = np.exp(-0.5j * eps * k2 * dt)

    def potential_phase(t, h):
        h1 = model.h1(t, pts, np.zeros_like(pts)).reshape(tmpl.n_x)
        return np.exp(-1j * (V + eps * h1) * h / eps)

    def check(psi):
        if edge_mass(tmpl.with_values(psi)) > edge_tol:
            raise BoundaryMass(f"edge density above {edge_tol:g}; enlarge the box")

    psi = psi0.values.copy()
    if t_final == 0:
        return tmpl.with_values(psi)
    check(psi)
    constant_h1 = model.subprincipal is None or "h1_const" in model.params
    full = potential_phase(0.0, dt) if constant_h1 else None
    psi = potential_phase(0.0, 0.5 * dt) * psi
    for s in range(n_steps):
        psi = ifftn(kinetic * fftn(psi))
        t = (s + 1) * dt
        if s == n_steps - 1:
            psi = potential_phase(t, 0.5 * dt) * psi
        else:
            psi = (full if constant_h1 else potential_phase(t, dt)) * psi
        if (s + 1) % check_every == 0:
            check(psi)
    check(psi)
    return tmpl.with_values(psi)


def l2_error(a, b):
    """Trapezoid L2 norm of ``a - b`` (same grid required)."""
    if not a.same_grid(b):
        raise GridMismatch("wavefunctions live on different grids")
    return float(np.sqrt(np.sum(a.weights() * np.abs(a.values - b.values) ** 2)))


def _spectral_derivative(values, h, axis):
    n = values.shape[axis]
    m = next_power_of_two(2 * n)
    v = np.moveaxis(values, axis, -1)
    pad = np.zeros(v.shape[:-1] + (m,), dtype=complex)
    pad[..., :n] = v
    k = angular_wavenumbers(m, h)
    der = ifft(1j * k * fft(pad))[..., :n]
    return np.moveaxis(der, -1, axis)


def observables(psi):
    """``(norm, <x>, <p>)`` with ``<p> = eps Im int conj(psi) dpsi/dx``.

    Means are normalised by the squared norm and are 0 for ``psi = 0``.
    The derivative is spectral, on a zero-padded copy of the grid.
    """
    w = psi.weights()
    dens = np.abs(psi.values) ** 2
    n2 = float(np.sum(w * dens))
    if n2 == 0:
        zero = 0.0 if psi.dim == 1 else np.zeros(psi.dim)
        return 0.0, zero, zero
    mesh = np.meshgrid(*psi.axes, indexing="ij")
    mean_x = np.array([np.sum(w * dens * m) for m in mesh]) / n2
    mean_p = np.array([
        psi.eps * np.sum(w * np.imag(np.conj(psi.values) * _spectral_derivative(psi.values, h, j)))
        for j, h in enumerate(psi.spacings)
    ]) / n2
    if psi.dim == 1:
        return float(np.sqrt(n2)), float(mean_x[0]), float(mean_p[0])
    return float(np.sqrt(n2)), mean_x, mean_p
