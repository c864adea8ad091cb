"""Free evolution in both pictures, the kernel oracle, and the clock rule."""

import numpy as np
import pytest

from fringebench.lattice import (
    PhysParams,
    StateVector,
    expectation,
    gaussian_packet,
    make_grid,
    momentum_expectation,
    momentum_operator,
    position_operator,
    position_spread,
)
from fringebench.dynamics import (
    analytic_kernel,
    evolve_state,
    free_unitary,
    heisenberg_conjugate,
    heisenberg_position,
    kernel_propagate,
    time_of_flight,
)

PARAMS = PhysParams()


def test_free_unitary_at_zero_time_is_identity():
    g = make_grid(64, -8.0, 8.0)
    u = free_unitary(g, PARAMS, 0.0)
    np.testing.assert_allclose(u.mat, np.eye(64), atol=1e-12)


def test_free_unitary_inverse():
    g = make_grid(128, -16.0, 16.0)
    prod = free_unitary(g, PARAMS, 1.0) @ free_unitary(g, PARAMS, -1.0)
    np.testing.assert_allclose(prod.mat, np.eye(128), atol=1e-10)


def test_free_unitary_is_unitary_and_composes():
    g = make_grid(128, -16.0, 16.0)
    rng = np.random.default_rng(3)
    for _ in range(5):
        a, b = rng.uniform(-4, 4, size=2)
        ua, ub = free_unitary(g, PARAMS, a), free_unitary(g, PARAMS, b)
        assert ua.is_unitary(1e-10)
        np.testing.assert_allclose((ua @ ub).mat,
                                   free_unitary(g, PARAMS, a + b).mat, atol=1e-9)


def test_momentum_conserved_by_evolution():
    g = make_grid(256, -40.0, 40.0)
    pop = momentum_operator(g, PARAMS)
    u = free_unitary(g, PARAMS, 2.3)
    np.testing.assert_allclose(heisenberg_conjugate(pop, u).mat, pop.mat, atol=1e-9)
    psi = gaussian_packet(g, 0.0, 1.5, 1.0, PARAMS)
    before = momentum_expectation(psi, PARAMS)
    after = momentum_expectation(evolve_state(psi, 2.3, PARAMS), PARAMS)
    assert after == pytest.approx(before, abs=1e-9)


def test_evolve_state_matches_dense_unitary():
    g = make_grid(256, -40.0, 40.0)
    psi = gaussian_packet(g, 0.0, 0.7, 1.2, PARAMS)
    fast = evolve_state(psi, 1.7, PARAMS)
    dense = free_unitary(g, PARAMS, 1.7).apply(psi)
    np.testing.assert_allclose(fast.amps, dense.amps, atol=1e-10)
    assert fast.norm() == pytest.approx(1.0, abs=1e-12)


def test_evolve_state_zero_time_is_identity():
    g = make_grid(128, -16.0, 16.0)
    psi = gaussian_packet(g, 0.0, 0.0, 1.0, PARAMS)
    np.testing.assert_allclose(evolve_state(psi, 0.0, PARAMS).amps, psi.amps,
                               atol=1e-12)


def test_gaussian_spread_law_sqrt2():
    # sigma(t) = sigma0 sqrt(1 + (hbar t / 2 m sigma0^2)^2) -> sqrt(2) at t = 2
    g = make_grid(2048, -200.0, 200.0)
    psi = gaussian_packet(g, 0.0, 0.0, 1.0, PARAMS)
    spread = position_spread(evolve_state(psi, 2.0, PARAMS))
    assert spread == pytest.approx(np.sqrt(2.0), abs=1e-3)


def test_ehrenfest_drift():
    g = make_grid(2048, -200.0, 200.0)
    psi = gaussian_packet(g, 0.0, 5.0, 1.0, PARAMS)
    moved = evolve_state(psi, 4.0, PARAMS)
    mean = float(np.sum(g.x * np.abs(moved.amps) ** 2) * g.dx)
    assert mean == pytest.approx(20.0, abs=1e-3)


def test_guard_band_violation_raises():
    g = make_grid(2048, -200.0, 200.0)
    psi = gaussian_packet(g, 0.0, 0.0, 1.0, PARAMS)
    with pytest.raises(ValueError, match="boundary-mass"):
        evolve_state(psi, 50.0, PARAMS)  # sigma(50) = 25, margin reaches the edge
    edge = StateVector(g, np.exp(-((g.x + 198.0) ** 2) / 4.0)).normalize()
    with pytest.raises(ValueError, match="before evolution"):
        evolve_state(edge, 0.5, PARAMS)


# --- analytic kernel ----------------------------------------------------------


def test_kernel_modulus_is_position_independent():
    expected = 1.0 / np.sqrt(2.0 * np.pi)  # 0.39894...
    for x, x_src in [(0.0, 0.0), (3.0, -1.0), (10.0, 2.5)]:
        assert abs(analytic_kernel(x, x_src, 1.0)) == pytest.approx(expected,
                                                                    abs=1e-12)


def test_kernel_at_coincident_points_is_bare_prefactor():
    k = analytic_kernel(1.5, 1.5, 2.0)
    pref = np.sqrt(1.0 / (4.0 * np.pi)) * np.exp(-1j * np.pi / 4)
    assert k == pytest.approx(pref, abs=1e-15)


def test_kernel_rejects_zero_time():
    with pytest.raises(ValueError, match="singular"):
        analytic_kernel(0.0, 0.0, 0.0)


def test_kernel_convolution_matches_spectral_step():
    # sampled-kernel convolution agrees with the spectral propagator on
    # band-limited interior packets (alias copies land outside the box)
    g = make_grid(2048, -40.0, 40.0)
    psi = gaussian_packet(g, 0.0, 0.0, 1.0, PARAMS)
    for t in (0.5, 1.0, 2.0):
        a = evolve_state(psi, t, PARAMS)
        b = kernel_propagate(psi, t, PARAMS)
        l2 = np.sqrt(np.sum(np.abs(a.amps - b.amps) ** 2) * g.dx)
        assert l2 <= 1e-3


# --- Heisenberg conjugation -----------------------------------------------------


def test_conjugate_by_identity_is_identity_map():
    g = make_grid(64, -8.0, 8.0)
    xop = position_operator(g)
    eye = free_unitary(g, PARAMS, 0.0)
    np.testing.assert_allclose(heisenberg_conjugate(xop, eye).mat, xop.mat,
                               atol=1e-14)


def test_conjugation_preserves_projectors():
    g = make_grid(64, -8.0, 8.0)
    diag = np.zeros(64)
    diag[10:20] = 1.0
    proj = np.diag(diag.astype(complex))
    from fringebench.lattice import LinearOperator

    conj = heisenberg_conjugate(LinearOperator(g, proj), free_unitary(g, PARAMS, 1.3))
    assert conj.is_projector(1e-10)


def test_conjugate_rejects_non_unitary():
    g = make_grid(64, -8.0, 8.0)
    xop = position_operator(g)
    with pytest.raises(ValueError, match="unitary"):
        heisenberg_conjugate(xop, xop)


def test_equation_of_motion_residual_small_on_packets():
    g = make_grid(512, -200.0, 200.0)
    psi = gaussian_packet(g, 0.0, 0.0, 2.0, PARAMS)
    xop = position_operator(g)
    for t in (1.0, 10.0, 50.0):
        conj = heisenberg_conjugate(xop, free_unitary(g, PARAMS, t))
        closed = heisenberg_position(g, PARAMS, t)
        assert (conj - closed).apply(psi).norm() <= 1e-6


def test_heisenberg_position_closed_form():
    g = make_grid(256, -40.0, 40.0)
    assert heisenberg_position(g, PARAMS, 0.0).mat == pytest.approx(
        position_operator(g).mat)
    op = heisenberg_position(g, PARAMS, 2.0)
    assert op.is_hermitian(1e-12)
    psi = gaussian_packet(g, 0.0, 5.0, 1.0, PARAMS)
    # Ehrenfest: <x + p t / m> = x0 + p0 t / m = 10, cross-checked by evolving
    assert expectation(op, psi).real == pytest.approx(10.0, abs=1e-3)
    evolved = evolve_state(psi, 2.0, PARAMS)
    direct = expectation(position_operator(g), evolved).real
    assert expectation(op, psi).real == pytest.approx(direct, abs=1e-9)


def test_time_of_flight():
    assert time_of_flight(100.0, 5.0, PARAMS) == 20.0
    assert time_of_flight(0.0, 3.0, PARAMS) == 0.0
    assert time_of_flight(100.0, 5.0, PhysParams(mass=2.0)) == 40.0
    with pytest.raises(ValueError, match="p_y"):
        time_of_flight(50.0, 0.0, PARAMS)
