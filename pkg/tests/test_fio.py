import numpy as np
import pytest

from hkprop import BundleGrid, WaveFunction, WidthPair, builtin, coherent_state, l2_error
from hkprop.errors import BoxTooSmall, GridMismatch, MassLeakWarning
from hkprop.fio import (
    auto_grid,
    fbi_analyze,
    fio_synthesize,
    identity_apply,
    identity_bundle,
    propagate_hk,
    propagate_tga,
    synthesis_constant,
)
from hkprop.flow import evolve_bundle
from hkprop.reference import SpectralDomain, split_step_propagate

EPS = 0.01
BOX = (-2.0, 2.0, 1025)


def centered_grid(eps, half=0.9, spacing=0.5, q=0.0, p=0.0):
    return BundleGrid.centered(q, p, half, spacing * np.sqrt(eps))


WIDE_BOX = (-4.0, 4.0, 1025)


def two_bump(eps, box=WIDE_BOX):
    a = coherent_state((-0.4, 0.3), eps, box=box)
    b = coherent_state((0.5, -0.2), eps, box=box)
    psi = a.with_values(a.values + b.values)
    return psi.with_values(psi.values / psi.norm())


def test_coherent_state_normalised():
    psi = coherent_state((0.2, 0.5), EPS, box=BOX)
    assert psi.norm() == pytest.approx(1.0, abs=1e-12)


def test_coherent_state_box_too_small():
    with pytest.raises(BoxTooSmall):
        coherent_state((1.9, 0.0), EPS, box=BOX)


def test_fbi_self_overlap_is_one():
    psi = coherent_state((0.3, -0.4), EPS, box=BOX)
    grid = BundleGrid.uniform(0.3, 0.3, 1, -0.4, -0.4, 1)
    c = fbi_analyze(psi, grid, np.eye(1)).coeffs
    assert abs(c[0] - 1) <= 1e-6


def test_fbi_overlap_magnitude():
    psi = coherent_state((0.0, 0.0), EPS, box=BOX)
    grid = BundleGrid.uniform(-0.3, 0.3, 4, -0.2, 0.2, 3)
    c = fbi_analyze(psi, grid, np.eye(1)).coeffs
    q, p = grid.nodes()
    expected = np.exp(-(q[:, 0] ** 2 + p[:, 0] ** 2) / (4 * EPS))
    assert np.allclose(np.abs(c), expected, atol=1e-10)


def test_fbi_of_zero():
    psi = WaveFunction(*BOX, EPS, np.zeros(BOX[2]))
    assert not np.any(fbi_analyze(psi, centered_grid(EPS), np.eye(1)).coeffs)


def test_fbi_grid_outside_box():
    psi = coherent_state((0.0, 0.0), EPS, box=BOX)
    with pytest.raises(GridMismatch):
        fbi_analyze(psi, BundleGrid.uniform(-3, 3, 5, 0, 0, 1), np.eye(1))


@pytest.mark.parametrize(
    "widths",
    [WidthPair.identity(1), WidthPair.from_values(2.0, 0.5), WidthPair.from_values(1 + 0.5j, 0.7 - 0.2j)],
)
def test_identity_reproduces_gaussian(widths):
    psi = coherent_state((0.2, 0.3), EPS, box=BOX)
    grid = auto_grid(psi)
    out = identity_apply(psi, widths, grid)
    assert l2_error(out, psi) / psi.norm() <= 1e-6


def test_identity_reproduces_two_bump():
    psi = two_bump(EPS)
    out = identity_apply(psi, WidthPair.identity(1), auto_grid(psi, margin=8.0))
    assert l2_error(out, psi) <= 1e-6


def test_identity_of_zero():
    psi = WaveFunction(*BOX, EPS, np.zeros(BOX[2]))
    out = identity_apply(psi, WidthPair.identity(1), centered_grid(EPS))
    assert not np.any(out.values)


def test_identity_coarse_grid_fails_loudly():
    psi = coherent_state((0.0, 0.0), EPS, box=BOX)
    out = identity_apply(psi, WidthPair.identity(1), auto_grid(psi, spacing=4.0))
    assert l2_error(out, psi) >= 1e-2


def test_zero_symbol_gives_zero():
    psi = coherent_state((0.0, 0.0), EPS, box=BOX)
    grid = centered_grid(EPS)
    field = fbi_analyze(psi, grid, np.eye(1))
    out = fio_synthesize(field, identity_bundle(grid), 0.0, np.eye(1), 0.0, psi)
    assert not np.any(out.values)


def test_single_node_free_flow_by_hand():
    q, p, t = 0.1, 0.4, 0.5
    psi = coherent_state((q, p), EPS, box=BOX)
    grid = BundleGrid.uniform(q, q, 1, p, p, 1)
    field = fbi_analyze(psi, grid, np.eye(1))
    recs = evolve_bundle(builtin("free"), grid, t, 1e-3)
    out = fio_synthesize(field, recs, np.sqrt(2), np.eye(1), t, psi)
    # one-term sum: C * weight * u * e^{iS/eps} * c * g_{(q+pt, p)}
    S = 0.5 * p * p * t
    g = coherent_state((q + p * t, p), EPS, box=BOX).values
    C = (2 * np.pi * EPS) ** -1 * 2**-0.5
    expected = C * 1.0 * np.sqrt(2) * np.exp(1j * S / EPS) * field.coeffs[0] * g
    assert np.allclose(out.values, expected, atol=1e-13)


def test_norm_bound_on_random_states():
    # |u| = sqrt(2) makes the operator a contraction up to quadrature error
    rng = np.random.default_rng(7)
    eps = 0.05
    box = (-3.0, 3.0, 513)
    like = WaveFunction(*box, eps, np.zeros(box[2]))
    grid = BundleGrid.uniform(-2.2, 2.2, 45, -2.2, 2.2, 45)
    for _ in range(20):
        vals = np.zeros(box[2], complex)
        for _ in range(3):
            q, p = rng.uniform(-1, 1, 2)
            vals += rng.standard_normal() * coherent_state((q, p), eps, like=like).values
        psi = like.with_values(vals / like.with_values(vals).norm())
        field = fbi_analyze(psi, grid, np.eye(1))
        recs = evolve_bundle(builtin("torsional"), grid, 0.5, 1e-2)
        out = fio_synthesize(field, recs, np.sqrt(2), np.eye(1), 0.5, like)
        assert out.norm() <= 1 + 1e-6


def test_synthesis_constant_identity_widths():
    assert synthesis_constant(0.1, WidthPair.identity(2)) == pytest.approx((2 * np.pi * 0.1) ** -2 / 2)


def test_propagate_zero_time_is_identity():
    psi = coherent_state((0.2, 0.3), EPS, box=BOX)
    out = propagate_hk(builtin("torsional"), psi, 0.0)
    assert l2_error(out, psi) <= 1e-6


def test_mass_leak_warning():
    psi = coherent_state((0.0, 0.0), EPS, box=BOX)
    with pytest.warns(MassLeakWarning):
        propagate_hk(builtin("free"), psi, 0.0, grid=centered_grid(EPS, half=1.5 * np.sqrt(EPS)))


def test_diagnostics_and_threads_are_deterministic():
    psi = two_bump(0.05)
    a, b = {}, {}
    out1 = propagate_hk(builtin("torsional"), psi, 0.3, diagnostics=a, dt=1e-2)
    out2 = propagate_hk(builtin("torsional"), psi, 0.3, diagnostics=b, dt=1e-2, threads=3)
    assert np.array_equal(out1.values, out2.values)
    assert a["zfloor_ratio"] >= 1.0
    assert 0 < a["n_active"] <= a["n_nodes"]


@pytest.mark.parametrize("widths", [WidthPair.identity(1), WidthPair.from_values(2.0, 0.5)])
def test_harmonic_full_period_is_minus_identity(widths):
    psi = two_bump(0.05)
    out = propagate_hk(builtin("harmonic"), psi, 2 * np.pi, widths=widths)
    assert l2_error(out, psi.with_values(-psi.values)) <= 1e-6


def test_negative_time_round_trip():
    eps = 0.05
    psi = coherent_state((0.3, 0.2), eps, box=WIDE_BOX)
    model = builtin("harmonic")
    fwd = propagate_hk(model, psi, 0.7)
    back = propagate_hk(model, fwd, -0.7)
    assert l2_error(back, psi) <= 1e-6


def test_two_dimensional_identity():
    # coarse phase-space spacing (1.0 sqrt(eps)) keeps the 4-d grid small
    eps = 0.2
    box = ((-3.5, -3.5), (3.5, 3.5), (33, 33))
    psi = coherent_state(((0.0, 0.0), (0.3, -0.2)), eps, box=box)
    grid = BundleGrid.centered((0.0, 0.0), (0.3, -0.2), 6 * np.sqrt(eps), np.sqrt(eps))
    out = identity_apply(psi, WidthPair.identity(2), grid)
    assert l2_error(out, psi) <= 1e-3


def test_tga_zero_time_is_coherent_state():
    psi = coherent_state((0.2, 0.7), EPS, box=BOX)
    out = propagate_tga(builtin("torsional"), (0.2, 0.7), EPS, 0.0, like=psi)
    assert np.allclose(out.values, psi.values, atol=1e-13)


@pytest.mark.parametrize("t", [0.5, 2.0])
def test_tga_free_matches_spreading_gaussian(t):
    eps, q, p = 0.05, -0.5, 0.8
    box = (-4.0, 4.0, 801)
    out = propagate_tga(builtin("free"), (q, p), eps, t, box=box)
    x = out.x
    # exact free evolution of the unit-width coherent state
    z = 1 + 1j * t
    X = q + p * t
    exact = (np.pi * eps) ** -0.25 / np.sqrt(z) * np.exp(
        -((x - X) ** 2) / (2 * eps * z) + 1j * p * (x - X) / eps + 1j * p * p * t / (2 * eps)
    )
    assert np.max(np.abs(out.values - exact)) <= 1e-8


def test_tga_harmonic_matches_reference():
    eps = 0.05
    dom = SpectralDomain(4.0, 512, eps, 1e-3)
    psi = coherent_state((1.0, 0.5), eps, like=dom.template())
    ref = split_step_propagate(builtin("harmonic"), psi, 3.0, dom)
    tga = propagate_tga(builtin("harmonic"), (1.0, 0.5), eps, 3.0, like=psi)
    assert l2_error(tga, ref) <= 1e-5
