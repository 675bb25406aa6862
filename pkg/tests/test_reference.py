import numpy as np
import pytest

from hkprop import WaveFunction, builtin, coherent_state, l2_error, observables
from hkprop.errors import BoundaryMass, GridMismatch
from hkprop.reference import SpectralDomain, edge_mass, split_step_propagate

EPS = 0.05


def domain(n_x=512, dt=1e-3, L=4.0, eps=EPS):
    return SpectralDomain(L, n_x, eps, dt)


def test_l2_error_examples():
    like = domain().template()
    g0 = coherent_state((0.0, 0.0), EPS, like=like)
    assert l2_error(g0, g0) == 0.0
    assert l2_error(g0, like) == pytest.approx(g0.norm(), abs=1e-15)
    q = 0.3
    gq = coherent_state((q, 0.0), EPS, like=like)
    # |<g_0, g_q>| = exp(-q^2 / 4 eps) for unit widths
    expected = np.sqrt(2 - 2 * np.exp(-(q**2) / (4 * EPS)))
    assert l2_error(g0, gq) == pytest.approx(expected, abs=1e-12)


def test_l2_error_grid_mismatch():
    a = domain(256).template()
    b = domain(512).template()
    with pytest.raises(GridMismatch):
        l2_error(a, b)


def test_observables_of_coherent_state():
    psi = coherent_state((0.7, -1.2), EPS, like=domain(1024).template())
    n, x, p = observables(psi)
    assert (n, x, p) == pytest.approx((1.0, 0.7, -1.2), abs=1e-8)


def test_observables_of_zero():
    assert observables(domain().template()) == (0.0, 0.0, 0.0)


def test_power_of_two_required():
    with pytest.raises(ValueError):
        SpectralDomain(4.0, 500, EPS)


def test_harmonic_full_period_sign_flip():
    dom = domain(512, 1e-3)
    psi = coherent_state((1.0, 0.3), EPS, like=dom.template())
    out = split_step_propagate(builtin("harmonic"), psi, 2 * np.pi, dom)
    assert l2_error(out, psi.with_values(-psi.values)) <= 1e-5


def test_free_packet_moves_with_classical_flow():
    dom = domain(1024, 1e-3, L=6.0)
    psi = coherent_state((-1.0, 1.0), EPS, like=dom.template())
    out = split_step_propagate(builtin("free"), psi, 2.0, dom)
    n, x, p = observables(out)
    assert (n, x, p) == pytest.approx((1.0, 1.0, 1.0), abs=1e-9)


def test_strang_second_order():
    model = builtin("torsional")
    like = domain(512, 1e-3).template()
    psi = coherent_state((1.0, 0.0), EPS, like=like)
    sols = [split_step_propagate(model, psi, 1.0, domain(512, dt)) for dt in (0.02, 0.01, 0.005)]
    ratio = l2_error(sols[0], sols[1]) / l2_error(sols[1], sols[2])
    assert 3.0 <= ratio <= 5.0


def test_norm_preserved_over_many_steps():
    dom = domain(256, 1e-3)
    psi = coherent_state((0.5, 0.2), EPS, like=dom.template())
    out = split_step_propagate(builtin("torsional"), psi, 10.0, dom)
    assert abs(out.norm() - psi.norm()) <= 1e-12


def test_self_convergence_at_default_step():
    eps, model = 0.1, builtin("torsional")
    coarse = SpectralDomain(6.0, 1024, eps, 2.5e-4)
    fine = SpectralDomain(6.0, 2048, eps, 1.25e-4)
    a = split_step_propagate(model, coherent_state((1.0, 0.0), eps, like=coarse.template()), 1.0, coarse)
    b = split_step_propagate(model, coherent_state((1.0, 0.0), eps, like=fine.template()), 1.0, fine)
    assert l2_error(a, a.with_values(b.values[::2])) <= 1e-7


def test_boundary_mass_raised():
    dom = SpectralDomain(3.0, 512, 0.1, 1e-3)
    psi = coherent_state((0.0, 2.0), 0.1, like=dom.template())
    with pytest.raises(BoundaryMass):
        split_step_propagate(builtin("free"), psi, 2.0, dom)


def test_edge_mass_of_centred_packet():
    psi = coherent_state((0.0, 0.0), EPS, like=domain().template())
    assert edge_mass(psi) < 1e-30


def test_wrong_grid_rejected():
    psi = coherent_state((0.0, 0.0), EPS, box=(-4.0, 4.0, 512))
    with pytest.raises(GridMismatch):
        split_step_propagate(builtin("free"), psi, 1.0, domain())


def test_constant_h1_is_a_global_phase():
    dom = domain(512, 1e-3)
    psi = coherent_state((0.5, 0.0), EPS, like=dom.template())
    a = split_step_propagate(builtin("torsional"), psi, 1.0, dom)
    b = split_step_propagate(builtin("torsional", h1_const=0.4), psi, 1.0, dom)
    assert np.allclose(b.values, a.values * np.exp(-0.4j), atol=1e-12)
