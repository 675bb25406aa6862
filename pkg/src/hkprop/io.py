"""CSV/JSON readers and writers for wavefunctions, FBI fields and trajectories.

Wavefunctions are stored as ``x,re,im`` rows (``x1,...,xd,re,im`` for d > 1)
plus a JSON sidecar ``{x_min, x_max, n_x, eps}`` next to the CSV.
"""

import csv
import json
from pathlib import Path

import numpy as np

from .wavefunction import WaveFunction


def _scalar_or_list(t):
    return t[0] if len(t) == 1 else list(t)


def sidecar_path(path):
    return Path(path).with_suffix(".json")


def _coord_names(prefix, d):
    return [prefix] if d == 1 else [f"{prefix}{j + 1}" for j in range(d)]


def write_wavefunction(psi, path):
    path = Path(path)
    pts = psi.points()
    vals = psi.values.ravel()
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_coord_names("x", psi.dim) + ["re", "im"])
        for x, v in zip(pts, vals):
            w.writerow([repr(float(c)) for c in x] + [repr(float(v.real)), repr(float(v.imag))])
    meta = {
        "x_min": _scalar_or_list(psi.x_min),
        "x_max": _scalar_or_list(psi.x_max),
        "n_x": _scalar_or_list(psi.n_x),
        "eps": psi.eps,
    }
    sidecar_path(path).write_text(json.dumps(meta, indent=2) + "\n")
    return path


def read_wavefunction(path):
    path = Path(path)
    meta = json.loads(sidecar_path(path).read_text())
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    values = data[:, -2] + 1j * data[:, -1]
    n_x = np.atleast_1d(meta["n_x"])
    return WaveFunction(meta["x_min"], meta["x_max"], n_x, meta["eps"], values.reshape(tuple(n_x)))


def write_fbi_field(field, path):
    q, p = field.grid.nodes()
    d = field.grid.dim
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_coord_names("q", d) + _coord_names("p", d) + ["re", "im"])
        for qi, pi, c in zip(q, p, field.coeffs):
            w.writerow([repr(float(a)) for a in (*qi, *pi)] + [repr(float(c.real)), repr(float(c.imag))])
    return Path(path)


def write_trajectories(bundle, path):
    """Dump a d = 1 bundle as ``q0,p0,t,X,Xi,S,F11,F12,F21,F22`` rows."""
    if bundle.dim != 1:
        raise ValueError("trajectory CSV is defined for d = 1 only")
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["q0", "p0", "t", "X", "Xi", "S", "F11", "F12", "F21", "F22"])
        for n in range(len(bundle)):
            for k, t in enumerate(bundle.times):
                F = bundle.F[k, n]
                row = (bundle.q0[n, 0], bundle.p0[n, 0], t, bundle.X[k, n, 0], bundle.Xi[k, n, 0],
                       bundle.S[k, n], F[0, 0], F[0, 1], F[1, 0], F[1, 1])
                w.writerow([repr(float(v)) for v in row])
    return Path(path)
