"""Flat JSON run configuration for the experiment driver.

Unknown keys are rejected so that a typo in a tolerance-sensitive setting
fails loudly instead of silently falling back to a default.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError

METHODS = ("hk", "fga", "tga", "reference", "identity")
POTENTIALS = ("free", "harmonic", "torsional", "gaussian_well")


@dataclass
class RunConfig:
    # model
    potential: str = "harmonic"
    dim: int = 1
    omega: float = 1.0
    a: float = 1.0
    A: float = 1.0
    sigma: float = 1.0
    h1_const: float = 0.0
    # semiclassical parameter(s) and time
    eps: list = field(default_factory=lambda: [0.1])
    t_final: float = 1.0
    dt: float = 1e-3
    ehrenfest_c: Optional[float] = None
    t_split: Optional[float] = None
    # initial state: one or two unit-width coherent states
    psi0: str = "coherent"
    q0: object = 1.0
    p0: object = 0.0
    q1: object = -1.0
    p1: object = 0.0
    # bundle grid: explicit bounds, or spacing/margin in units of sqrt(eps)
    q_min: Optional[float] = None
    q_max: Optional[float] = None
    n_q: Optional[int] = None
    p_min: Optional[float] = None
    p_max: Optional[float] = None
    n_p: Optional[int] = None
    grid_spacing: float = 0.5
    grid_margin: float = 6.0
    # widths and symbol
    theta_x: object = 1.0
    theta_y: object = 1.0
    symbol: str = "hk"
    method: str = "hk"
    methods: list = field(default_factory=lambda: ["hk", "fga", "tga"])
    # spectral reference domain
    L: Optional[float] = None
    n_x: Optional[int] = None
    dt_ref: float = 2.5e-4
    points_per_wavelength: float = 16.0
    # output and bookkeeping
    threads: int = 1
    timing: bool = True
    check_group: bool = False
    dump_trajectories: bool = False

    @property
    def eps_list(self):
        return list(self.eps)

    def hash(self):
        return config_hash(self)


# settings that cannot change any computed number stay out of the hash
UNHASHED = ("threads",)


def config_hash(cfg):
    data = {k: v for k, v in asdict(cfg).items() if k not in UNHASHED}
    payload = json.dumps(data, sort_keys=True, default=str)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _complex_entry(v):
    if isinstance(v, dict):
        if set(v) - {"re", "im"}:
            raise ConfigError(f"complex entries take keys 're' and 'im', got {sorted(v)}")
        return complex(v.get("re", 0.0), v.get("im", 0.0))
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    raise ConfigError(f"cannot read {v!r} as a number")


def parse_width(value, d):
    """Width from a number, a ``{"re", "im"}`` dict or a nested list matrix."""
    if isinstance(value, list):
        try:
            M = np.array([[_complex_entry(e) for e in row] for row in value])
        except TypeError:
            raise ConfigError("width matrices must be lists of rows") from None
        if M.shape != (d, d):
            raise ConfigError(f"width matrix must be {d}x{d}")
        return M
    return _complex_entry(value) * np.eye(d)


def validate(cfg):
    if cfg.potential not in POTENTIALS:
        raise ConfigError(f"unknown potential {cfg.potential!r}")
    if cfg.method not in METHODS:
        raise ConfigError(f"unknown method {cfg.method!r}")
    if cfg.symbol not in ("hk", "fga"):
        raise ConfigError(f"unknown symbol {cfg.symbol!r}")
    if any(m not in METHODS for m in cfg.methods):
        raise ConfigError(f"unknown entry in methods: {cfg.methods}")
    if cfg.psi0 not in ("coherent", "two_bump"):
        raise ConfigError(f"unknown initial state {cfg.psi0!r}")
    if cfg.dim not in (1, 2):
        raise ConfigError("dim must be 1 or 2")
    eps = cfg.eps if isinstance(cfg.eps, list) else [cfg.eps]
    if not eps:
        raise ConfigError("eps list is empty")
    if any(not isinstance(e, (int, float)) or not 0 < e <= 1 for e in eps):
        raise ConfigError("every eps must lie in (0, 1]")
    cfg.eps = [float(e) for e in eps]
    if cfg.dt <= 0 or cfg.dt_ref <= 0:
        raise ConfigError("time steps must be positive")
    explicit = [cfg.q_min, cfg.q_max, cfg.n_q, cfg.p_min, cfg.p_max, cfg.n_p]
    if any(v is not None for v in explicit) and any(v is None for v in explicit):
        raise ConfigError("explicit bundle grids need all of q_min, q_max, n_q, p_min, p_max, n_p")
    if cfg.grid_spacing <= 0 or cfg.grid_margin < 0:
        raise ConfigError("grid_spacing must be positive and grid_margin non-negative")
    if cfg.threads < 1:
        raise ConfigError("threads must be >= 1")
    for name in ("theta_x", "theta_y"):
        parse_width(getattr(cfg, name), cfg.dim)
    return cfg


def load_config(source):
    """Build a validated :class:`RunConfig` from a dict or a JSON file path."""
    if isinstance(source, RunConfig):
        return validate(source)
    if not isinstance(source, dict):
        try:
            source = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    if not isinstance(source, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(source) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    return validate(RunConfig(**source))
