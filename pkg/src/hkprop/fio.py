"""Discretised Fourier integral operators with Gaussian frames.

The triple integral over ``(x, y, q, p)`` factorises into

* analysis: ``c(q, p) = int N_y exp(-(y-q).Ty(y-q)/2eps - i p.(y-q)/eps) psi(y) dy``,
  i.e. ``<g^{Ty*}_{(q,p)}, psi>`` (equal to the usual FBI transform for real Ty);
* synthesis: ``(I psi)(x) = C sum_nodes w u e^{iS/eps} c g^{Tx}_{(X, Xi)}(x)``

with ``C = (2 pi eps)^{-d} 2^{-d/2} det(Re Tx Re Ty)^{-1/4}``. For
``Tx = Ty = id`` and ``u = 2^{d/2}`` this is the resolution of identity by
coherent states.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .complex_matrix import ConeMatrix, cone_check, track_sqrt
from .errors import GridMismatch, MassLeakWarning
from .fft import fft, next_power_of_two
from .flow import BundleGrid, TrajectoryBundle, integrate_nodes, integrate_trajectory
from .hk_symbol import WidthPair, fga_symbol, hk_prefactor_closed, tga_frame, tga_width, zmatrix, zmatrix_floor
from .wavefunction import WaveFunction, gaussian_frame

CHUNK = 256
PRUNE_RTOL = 1e-15
MASS_LEAK_TOL = 1e-6


@dataclass
class FbiField:
    grid: BundleGrid
    eps: float
    theta_y: ConeMatrix
    coeffs: np.ndarray

    def boundary_mass(self):
        """Fraction of ``sum |c|^2`` carried by the outer face of the grid."""
        mass = np.abs(self.coeffs) ** 2
        total = mass.sum()
        if total == 0:
            return 0.0
        return float(mass[self.grid.boundary_mask()].sum() / total)


def _chunked(n, size=CHUNK):
    return [slice(i, min(i + size, n)) for i in range(0, n, size)]


def _map_chunks(fn, chunks, threads):
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, chunks))
    return [fn(c) for c in chunks]


def fbi_analyze(psi, grid, theta_y, threads=1):
    """Phase-space coefficients of ``psi`` on the nodes of ``grid``."""
    theta_y = cone_check(theta_y)
    if grid.dim != psi.dim or theta_y.dim != psi.dim:
        raise GridMismatch("dimension of grid, width and wavefunction differ")
    q, p = grid.nodes()
    if np.any(q < np.array(psi.x_min)) or np.any(q > np.array(psi.x_max)):
        raise GridMismatch("bundle grid q-range exceeds the wavefunction box")
    pts = psi.points()
    f = (psi.weights() * psi.values).ravel()
    conj_theta = theta_y.entries.conj()

    def part(s):
        return np.conj(gaussian_frame(pts, q[s], p[s], psi.eps, conj_theta)) @ f

    coeffs = np.concatenate(_map_chunks(part, _chunked(len(grid)), threads))
    return FbiField(grid, psi.eps, theta_y, coeffs)


def synthesis_constant(eps, widths):
    d = widths.dim
    det_re = np.linalg.det(widths.theta_x.entries.real) * np.linalg.det(widths.theta_y.entries.real)
    return (2 * np.pi * eps) ** (-d) * 2.0 ** (-d / 2) * det_re ** (-0.25)


def _synthesize(amp, X, Xi, theta_x, like, threads=1):
    """``sum_n amp_n g^{theta_x}_{(X_n, Xi_n)}`` on the grid of ``like``."""
    keep = np.abs(amp) > PRUNE_RTOL * np.max(np.abs(amp), initial=0.0)
    amp, X, Xi = amp[keep], X[keep], Xi[keep]
    out = np.zeros(int(np.prod(like.n_x)), dtype=complex)
    if amp.size:
        pts = like.points()

        def part(s):
            return amp[s] @ gaussian_frame(pts, X[s], Xi[s], like.eps, theta_x)

        # fixed chunk boundaries and in-order summation: thread count never changes the result
        for partial in _map_chunks(part, _chunked(amp.size), threads):
            out += partial
    return like.with_values(out.reshape(like.n_x))


def fio_synthesize(field, records, u, theta_x, t, like, threads=1):
    """Apply the synthesis half of the FIO at time ``t``.

    Parameters
    ----------
    field : FbiField
        Analysis coefficients; its nodes must match ``records`` one to one.
    records : TrajectoryBundle
        Flow of the grid nodes, sampled at least at ``t``.
    u : complex or array_like
        Symbol per node at time ``t``.
    like : WaveFunction
        Template for the output grid.
    """
    if len(records) != len(field.grid):
        raise GridMismatch("records and field have different node counts")
    widths = WidthPair(theta_x, field.theta_y)
    k = records.time_index(t)
    u = np.broadcast_to(np.asarray(u, dtype=complex), (len(records),))
    amp = (
        synthesis_constant(field.eps, widths)
        * field.grid.weights
        * u
        * np.exp(1j * records.S[k] / field.eps)
        * field.coeffs
    )
    return _synthesize(amp, records.X[k], records.Xi[k], widths.theta_x, like, threads)


def identity_bundle(grid):
    """The trivial flow ``kappa = id`` sampled at ``t = 0``."""
    q, p = grid.nodes()
    N, d = q.shape
    F = np.broadcast_to(np.eye(2 * d), (1, N, 2 * d, 2 * d)).copy()
    return TrajectoryBundle(q, p, np.zeros(1), q[None], p[None], np.zeros((1, N)), F, np.zeros((1, N)))


def identity_apply(psi, widths, grid, threads=1):
    """FIO with ``kappa = id`` and symbol ``det(Tx + Ty)^{1/2}``; reproduces ``psi``."""
    field = fbi_analyze(psi, grid, widths.theta_y, threads)
    return fio_synthesize(field, identity_bundle(grid), widths.seed_root(), widths.theta_x, 0.0, psi, threads)


def auto_grid(psi, spacing=0.5, margin=6.0, tol=1e-8):
    """Bundle grid covering the phase-space support of ``psi``.

    The support is where ``|psi|`` (per axis marginal) or its Fourier
    transform exceeds ``tol`` times the maximum; it is padded by
    ``margin * sqrt(eps)`` and sampled with ``spacing * sqrt(eps)``.
    """
    eps = psi.eps
    r = np.sqrt(eps)
    amp = np.abs(psi.values)
    qs, ps = [], []
    for j, ax in enumerate(psi.axes):
        other = tuple(i for i in range(psi.dim) if i != j)
        marg = np.sqrt(np.sum(amp**2, axis=other)) if other else amp
        on = np.flatnonzero(marg >= tol * marg.max())
        x_lo, x_hi = ax[on[0]], ax[on[-1]]
        # zero padding keeps dx, so wavenumbers stay those of psi's grid
        n = next_power_of_two(2 * psi.n_x[j])
        vals = np.moveaxis(psi.values, j, -1)
        pad = np.zeros(vals.shape[:-1] + (n,), dtype=complex)
        pad[..., : psi.n_x[j]] = vals
        spec = np.abs(fft(pad))
        spec = np.sqrt(np.sum(spec.reshape(-1, n) ** 2, axis=0))
        h = psi.spacings[j]
        k = 2 * np.pi * np.fft.fftfreq(n, d=h)
        on = spec >= tol * spec.max()
        p_lo, p_hi = eps * k[on].min(), eps * k[on].max()
        for lo, hi, store in ((x_lo, x_hi, qs), (p_lo, p_hi, ps)):
            lo, hi = lo - margin * r, hi + margin * r
            m = int(np.ceil((hi - lo) / (spacing * r))) + 1
            store.append(np.linspace(lo, hi, m))
    return BundleGrid(tuple(qs), tuple(ps))


def _active_nodes(field, rtol):
    mag = np.abs(field.coeffs)
    return np.flatnonzero(mag > rtol * mag.max()) if mag.max() > 0 else np.zeros(0, dtype=int)


def propagate_hk(model, psi0, t_final, widths=None, symbol="hk", grid=None, dt=1e-3,
                 store_dt=0.01, node_rtol=1e-14, threads=1, diagnostics=None):
    """Herman-Kluk (``symbol="hk"``) or frozen Gaussian (``"fga"``) propagation.

    Runs analysis, bundle evolution, prefactor and synthesis. Nodes whose
    analysis coefficient is below ``node_rtol`` times the largest one are not
    evolved. Pass a dict as ``diagnostics`` to receive the boundary mass of
    the analysis field, the number of evolved nodes and the smallest ratio
    ``|det Z|^2 / floor`` seen at any stored time.
    """
    d = psi0.dim
    widths = WidthPair.identity(d) if widths is None else widths
    grid = auto_grid(psi0) if grid is None else grid
    if symbol not in ("hk", "fga"):
        raise ValueError(f"unknown symbol {symbol!r}")
    field = fbi_analyze(psi0, grid, widths.theta_y, threads)
    leak = field.boundary_mass()
    if leak > MASS_LEAK_TOL:
        warnings.warn(f"boundary FBI mass fraction {leak:.2e} exceeds {MASS_LEAK_TOL:g}", MassLeakWarning)
    active = _active_nodes(field, node_rtol)
    q, p = grid.nodes()
    stride = max(1, int(round(store_dt / dt)))
    bundle = integrate_nodes(model, q[active], p[active], t_final, dt, stride)
    Z = zmatrix(bundle.F, widths)
    floor_ratio = float(np.min(np.abs(np.linalg.det(Z)) ** 2)) / zmatrix_floor(widths) if active.size else np.inf
    if symbol == "hk":
        u = hk_prefactor_closed(bundle, widths).u0[-1]
    else:
        u = fga_symbol(widths)
    amp = (
        synthesis_constant(psi0.eps, widths)
        * grid.weights[active]
        * u
        * np.exp(1j * bundle.S[-1] / psi0.eps)
        * field.coeffs[active]
    )
    out = _synthesize(amp, bundle.X[-1], bundle.Xi[-1], widths.theta_x, psi0, threads)
    if diagnostics is not None:
        diagnostics.update(boundary_mass=leak, n_active=int(active.size), n_nodes=len(grid),
                           zfloor_ratio=floor_ratio, field=field)
    return out


def propagate_tga(model, center, eps, t_final, dt=1e-3, box=None, *, like=None):
    """Thawed Gaussian evolution of the unit-width coherent state at ``center``.

    ``det(X_q + i X_p)^{-1/2}`` is tracked by continuity from 1.
    """
    q0, p0 = (np.atleast_1d(np.asarray(c, dtype=float)) for c in center)
    d = q0.size
    if like is None:
        like = WaveFunction(*box[:2], np.broadcast_to(box[2], (d,)), eps, np.zeros(np.broadcast_to(box[2], (d,))))
    rec = integrate_trajectory(model, q0, p0, t_final, dt)
    Q, _ = tga_frame(rec.F)
    root = track_sqrt(np.linalg.det(Q), 1.0)
    theta = tga_width(rec.F[-1])
    X, Xi, S = rec.X[-1], rec.Xi[-1], rec.S[-1]
    diff = like.points() - X
    quad = np.einsum("mi,ij,mj->m", diff, theta, diff)
    phase = np.exp(1j * S / eps - 1j * rec.h1_phase[-1])
    vals = (np.pi * eps) ** (-d / 4) / root[-1] * phase * np.exp((-0.5 * quad + 1j * diff @ Xi) / eps)
    return like.with_values(vals.reshape(like.n_x))
