"""Experiment pipelines behind the ``hk`` command line tool.

Every pipeline takes a :class:`~hkprop.config.RunConfig`, compares one or
more propagators against the spectral reference and returns an
:class:`ErrorTable`. Writing files is left to the caller.
"""

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import load_config, parse_width
from .errors import ConfigError
from .fio import auto_grid, identity_apply, propagate_hk, propagate_tga
from .flow import BundleGrid, integrate_nodes
from .hamiltonian import builtin
from .hk_symbol import WidthPair
from .reference import SpectralDomain, l2_error, split_step_propagate
from .wavefunction import coherent_state

CSV_HEADER = ["eps", "t", "method", "l2_error", "norm_defect", "wall_time_s", "config_hash"]
EXACT_TOL = 1e-4
STALL_RATIO = 1.3


@dataclass
class ErrorRow:
    eps: object
    t: float
    method: str
    l2_error: float
    norm_defect: float
    wall_time_s: float
    config_hash: str

    def as_list(self):
        return [self.eps if isinstance(self.eps, str) else repr(float(self.eps)), repr(float(self.t)),
                self.method, repr(float(self.l2_error)), repr(float(self.norm_defect)),
                repr(float(self.wall_time_s)), self.config_hash]


@dataclass
class ErrorTable:
    rows: list = field(default_factory=list)
    fits: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def sorted_rows(self):
        return sorted(self.rows, key=lambda r: (r.method, r.eps, r.t)) + list(self.fits)

    def errors(self, method):
        """``(eps, l2_error)`` arrays of one method in increasing eps."""
        rows = sorted((r for r in self.rows if r.method == method), key=lambda r: r.eps)
        return np.array([r.eps for r in rows]), np.array([r.l2_error for r in rows])

    def write_csv(self, path):
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for r in self.sorted_rows():
                w.writerow(r.as_list())
        return Path(path)


@dataclass
class Setup:
    """Everything one eps value needs: model, widths, domain, state and grid."""

    eps: float
    t_final: float
    model: object
    widths: WidthPair
    centers: list
    domain: SpectralDomain
    psi0: object
    grid: BundleGrid


def loglog_slope(eps, err):
    eps, err = np.asarray(eps, float), np.asarray(err, float)
    return float(np.polyfit(np.log(eps), np.log(err), 1)[0])


def halving_ratios(eps, err):
    """``err(eps) / err(eps / 2)`` for consecutive pairs, eps increasing."""
    order = np.argsort(eps)
    err = np.asarray(err, float)[order]
    return [float(err[i + 1] / err[i]) for i in range(len(err) - 1)]


def _model(cfg):
    return builtin(cfg.potential, cfg.dim, omega=cfg.omega, a=cfg.a, A=cfg.A,
                   sigma=cfg.sigma, h1_const=cfg.h1_const)


def _centers(cfg):
    def vec(v):
        return np.broadcast_to(np.asarray(v, dtype=float), (cfg.dim,)).copy()

    centers = [(vec(cfg.q0), vec(cfg.p0))]
    if cfg.psi0 == "two_bump":
        centers.append((vec(cfg.q1), vec(cfg.p1)))
    return centers


def _t_final(cfg, eps):
    if cfg.ehrenfest_c is not None:
        return cfg.ehrenfest_c * math.log(1.0 / eps)
    return cfg.t_final


def _domain(cfg, model, centers, eps, t_final):
    if cfg.L is not None and cfg.n_x is not None:
        return SpectralDomain(cfg.L, cfg.n_x, eps, cfg.dt_ref, cfg.dim)
    r = math.sqrt(eps)
    # the coherent-state support (|psi| > 1e-8) is ~6 sqrt(eps); pad like the bundle grid
    half = (6.1 + cfg.grid_margin) * r
    qs, ps = [], []
    for q, p in centers:
        g = BundleGrid.centered(q, p, half, cfg.grid_spacing * r * 2)
        qn, pn = g.nodes()
        qs.append(qn)
        ps.append(pn)
    q, p = np.concatenate(qs), np.concatenate(ps)
    b = integrate_nodes(model, q, p, t_final, 0.01)
    x_ext = float(np.max(np.abs(b.X)))
    p_ext = float(np.max(np.abs(b.Xi)))
    L = cfg.L if cfg.L is not None else math.ceil(2 * (x_ext + 10 * r)) / 2
    if cfg.n_x is not None:
        return SpectralDomain(L, cfg.n_x, eps, cfg.dt_ref, cfg.dim)
    return SpectralDomain.for_resolution(L, eps, max(p_ext, 1.0), cfg.dt_ref, cfg.dim, cfg.points_per_wavelength)


def prepare(cfg, eps):
    """Model, domain, initial state and bundle grid for one eps."""
    model = _model(cfg)
    widths = WidthPair(parse_width(cfg.theta_x, cfg.dim), parse_width(cfg.theta_y, cfg.dim))
    centers = _centers(cfg)
    t_final = _t_final(cfg, eps)
    domain = _domain(cfg, model, centers, eps, t_final)
    tmpl = domain.template()
    vals = sum(coherent_state(c, eps, like=tmpl).values for c in centers)
    psi0 = tmpl.with_values(vals)
    psi0 = psi0.with_values(psi0.values / psi0.norm())
    if cfg.n_q is not None:
        grid = BundleGrid.uniform(cfg.q_min, cfg.q_max, cfg.n_q, cfg.p_min, cfg.p_max, cfg.n_p)
    else:
        grid = auto_grid(psi0, cfg.grid_spacing, cfg.grid_margin)
    return Setup(eps, t_final, model, widths, centers, domain, psi0, grid)


def run_method(cfg, setup, method, psi=None, t=None, diagnostics=None):
    """Propagate ``psi`` (default: the setup's initial state) with one method."""
    psi = setup.psi0 if psi is None else psi
    t = setup.t_final if t is None else t
    if method in ("hk", "fga"):
        grid = setup.grid if psi is setup.psi0 else auto_grid(psi, cfg.grid_spacing, cfg.grid_margin)
        return propagate_hk(setup.model, psi, t, setup.widths, method, grid, cfg.dt,
                            threads=cfg.threads, diagnostics=diagnostics)
    if method == "tga":
        if len(setup.centers) != 1 or psi is not setup.psi0:
            raise ConfigError("tga propagates a single coherent initial state only")
        return propagate_tga(setup.model, setup.centers[0], setup.eps, t, cfg.dt, like=psi)
    if method == "reference":
        return split_step_propagate(setup.model, psi, t, setup.domain)
    if method == "identity":
        return identity_apply(psi, setup.widths, setup.grid, threads=cfg.threads)
    raise ConfigError(f"unknown method {method!r}")


def _timed(cfg, fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, (time.perf_counter() - t0) if cfg.timing else 0.0


def _norm_defect(psi, psi0):
    return abs(psi.norm() - psi0.norm()) / psi0.norm()


def run_identity(config):
    """Apply the identity FIO to the initial state for every eps."""
    cfg = load_config(config)
    table = ErrorTable()
    for eps in cfg.eps_list:
        s = prepare(cfg, eps)
        out, wall = _timed(cfg, run_method, cfg, s, "identity")
        err = l2_error(out, s.psi0) / s.psi0.norm()
        table.rows.append(ErrorRow(eps, 0.0, "identity", err, _norm_defect(out, s.psi0), wall, cfg.hash()))
    return table


def run_propagate(config, outputs=None):
    """Run ``cfg.method`` for every eps and score it against the reference.

    When ``outputs`` is a dict it receives ``{eps: (setup, psi_t, psi_ref)}``.
    """
    cfg = load_config(config)
    table = ErrorTable()
    for eps in cfg.eps_list:
        s = prepare(cfg, eps)
        ref = run_method(cfg, s, "reference")
        psi, wall = _timed(cfg, run_method, cfg, s, cfg.method)
        if cfg.method == "identity":
            err = l2_error(psi, s.psi0)
        else:
            err = l2_error(psi, ref)
        table.rows.append(ErrorRow(eps, s.t_final if cfg.method != "identity" else 0.0, cfg.method,
                                   err, _norm_defect(psi, s.psi0), wall, cfg.hash()))
        if outputs is not None:
            outputs[eps] = (s, psi, ref)
    return table


def classify(errors, ratios, slope):
    if np.all(np.asarray(errors) <= EXACT_TOL):
        return "exact regime"
    if ratios and ratios[0] <= STALL_RATIO:
        return "non-convergent"
    if 0.7 <= slope <= 1.3:
        return "first order"
    return f"order {slope:.2f}"


def run_converge(config):
    """Error of ``cfg.method`` against the reference over a halving eps sweep."""
    cfg = load_config(config)
    eps_list = sorted(cfg.eps_list, reverse=True)
    if len(eps_list) < 3:
        raise ConfigError("converge needs at least three eps values")
    for a, b in zip(eps_list, eps_list[1:]):
        if abs(a / b - 2.0) > 1e-9:
            raise ConfigError("eps values must halve from one to the next")
    method = cfg.method
    if method in ("reference", "identity"):
        raise ConfigError(f"converge is meaningless for method {method!r}")
    table = ErrorTable()
    group, zfloor = [], []
    total_wall = 0.0
    for eps in eps_list:
        s = prepare(cfg, eps)
        ref = run_method(cfg, s, "reference")
        diag = {}
        psi, wall = _timed(cfg, run_method, cfg, s, method, diagnostics=diag)
        total_wall += wall
        if "zfloor_ratio" in diag:
            zfloor.append(diag["zfloor_ratio"])
        table.rows.append(ErrorRow(eps, s.t_final, method, l2_error(psi, ref),
                                   _norm_defect(psi, s.psi0), wall, cfg.hash()))
        if cfg.check_group and method in ("hk", "fga"):
            t_split = cfg.t_split if cfg.t_split is not None else 0.5 * s.t_final
            mid = run_method(cfg, s, method, t=t_split)
            two = run_method(cfg, s, method, psi=mid, t=s.t_final - t_split)
            group.append(l2_error(two, psi))
    eps_arr, err = table.errors(method)
    slope = loglog_slope(eps_arr, err)
    ratios = halving_ratios(eps_arr, err)
    norm_def = [r.norm_defect for r in sorted(table.rows, key=lambda r: r.eps)]
    norm_slope = loglog_slope(eps_arr, np.maximum(norm_def, 1e-300))
    # t of the smallest eps; equal for all rows unless in Ehrenfest mode
    t_last = min(table.rows, key=lambda r: r.eps).t
    table.fits.append(ErrorRow("slope", t_last, method, slope, norm_slope, total_wall, cfg.hash()))
    table.summary = {
        "method": method,
        "eps": eps_arr.tolist(),
        "l2_error": err.tolist(),
        "slope": slope,
        "halving_ratios": ratios,
        "regime": classify(err, ratios, slope),
        "norm_defect": norm_def,
        "norm_defect_slope": norm_slope,
        "zfloor_min_ratio": min(zfloor) if zfloor else None,
    }
    if group:
        g = np.array(group[::-1])  # eps increasing
        table.summary["group_defect"] = g.tolist()
        table.summary["group_defect_slope"] = loglog_slope(eps_arr, g)
    if cfg.ehrenfest_c is not None:
        table.summary["ehrenfest_c"] = cfg.ehrenfest_c
        table.summary["fitted_exponent"] = slope
    return table


def run_compare(config):
    """HK, FGA and TGA (or ``cfg.methods``) against the reference at shared (eps, t)."""
    cfg = load_config(config)
    table = ErrorTable()
    for eps in cfg.eps_list:
        s = prepare(cfg, eps)
        ref = run_method(cfg, s, "reference")
        for method in cfg.methods:
            psi, wall = _timed(cfg, run_method, cfg, s, method)
            target = s.psi0 if method == "identity" else ref
            table.rows.append(ErrorRow(eps, s.t_final, method, l2_error(psi, target),
                                       _norm_defect(psi, s.psi0), wall, cfg.hash()))
    return table


def run_reference(config, outputs=None):
    """Reference solutions with a self-convergence estimate as ``l2_error``.

    The estimate is the change at the common nodes when ``n_x`` is doubled
    and ``dt_ref`` halved.
    """
    cfg = load_config(config)
    table = ErrorTable()
    for eps in cfg.eps_list:
        s = prepare(cfg, eps)
        ref, wall = _timed(cfg, run_method, cfg, s, "reference")
        d = s.domain
        fine = SpectralDomain(d.L, 2 * d.n_x, eps, d.dt_ref / 2, d.dim)
        tmpl = fine.template()
        vals = sum(coherent_state(c, eps, like=tmpl).values for c in s.centers)
        psi_f = tmpl.with_values(vals)
        psi_f = psi_f.with_values(psi_f.values / psi_f.norm())
        ref_f = split_step_propagate(s.model, psi_f, s.t_final, fine)
        coarse = ref.with_values(ref_f.values[(slice(None, None, 2),) * d.dim])
        table.rows.append(ErrorRow(eps, s.t_final, "reference", l2_error(coarse, ref),
                                   _norm_defect(ref, s.psi0), wall, cfg.hash()))
        if outputs is not None:
            outputs[eps] = (s, ref, ref)
    return table


def write_summary(table, path):
    Path(path).write_text(json.dumps(table.summary, indent=2, default=float) + "\n")
    return Path(path)
