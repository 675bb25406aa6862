import csv

import numpy as np

from hkprop import BundleGrid, WaveFunction, builtin, coherent_state, evolve_bundle
from hkprop.fio import fbi_analyze
from hkprop.io import read_wavefunction, write_fbi_field, write_trajectories, write_wavefunction


def test_wavefunction_round_trip_1d(tmp_path):
    psi = coherent_state((0.2, 1.1), 0.05, box=(-3.0, 3.0, 257))
    path = write_wavefunction(psi, tmp_path / "psi.csv")
    back = read_wavefunction(path)
    assert back.same_grid(psi) and back.eps == psi.eps
    assert np.array_equal(back.values, psi.values)
    with path.open() as fh:
        assert fh.readline().strip() == "x,re,im"


def test_wavefunction_round_trip_2d(tmp_path):
    rng = np.random.default_rng(1)
    vals = rng.standard_normal((9, 5)) + 1j * rng.standard_normal((9, 5))
    psi = WaveFunction((-1, -2), (1, 2), (9, 5), 0.1, vals)
    back = read_wavefunction(write_wavefunction(psi, tmp_path / "psi2.csv"))
    assert back.same_grid(psi)
    assert np.array_equal(back.values, psi.values)


def test_fbi_field_csv(tmp_path):
    psi = coherent_state((0.0, 0.0), 0.1, box=(-3.0, 3.0, 129))
    grid = BundleGrid.uniform(-0.5, 0.5, 3, -0.5, 0.5, 4)
    field = fbi_analyze(psi, grid, np.eye(1))
    rows = list(csv.reader(write_fbi_field(field, tmp_path / "c.csv").open()))
    assert rows[0] == ["q", "p", "re", "im"]
    assert len(rows) == 13
    assert complex(float(rows[1][2]), float(rows[1][3])) == field.coeffs[0]


def test_trajectory_csv(tmp_path):
    grid = BundleGrid.uniform(-1, 1, 2, 0, 0, 1)
    b = evolve_bundle(builtin("free"), grid, 0.01, 1e-3)
    rows = list(csv.reader(write_trajectories(b, tmp_path / "t.csv").open()))
    assert rows[0] == ["q0", "p0", "t", "X", "Xi", "S", "F11", "F12", "F21", "F22"]
    assert len(rows) == 1 + 2 * 11
