"""Grid construction, packets, elementary operators, and inner-product
conventions."""

import numpy as np
import pytest

from fringebench.lattice import (
    DensityOperator,
    LinearOperator,
    PhysParams,
    StateVector,
    dispersion,
    expectation,
    gaussian_packet,
    make_grid,
    momentum_expectation,
    momentum_operator,
    position_operator,
    position_spread,
)


def test_make_grid_basic():
    g = make_grid(8, -4.0, 4.0)
    assert g.dx == 1.0
    assert g.x[0] == -4.0
    assert g.n == 8
    np.testing.assert_allclose(np.diff(g.x), 1.0)


def test_make_grid_fine():
    g = make_grid(1024, -200.0, 200.0)
    assert g.dx == pytest.approx(0.390625)


def test_make_grid_rejects_bad_n():
    with pytest.raises(ValueError, match="power of two"):
        make_grid(10, -1.0, 1.0)
    with pytest.raises(ValueError, match="power of two"):
        make_grid(4, -1.0, 1.0)


def test_make_grid_rejects_degenerate_interval():
    with pytest.raises(ValueError, match="degenerate"):
        make_grid(16, 1.0, 1.0)


def test_momentum_lattice_matches_dft_ordering():
    g = make_grid(16, -4.0, 4.0)
    np.testing.assert_allclose(g.k, 2 * np.pi * np.fft.fftfreq(16, g.dx))
    assert g.dk == pytest.approx(2 * np.pi / (16 * g.dx))


def test_index_of_snaps_within_half_spacing():
    g = make_grid(16, -4.0, 4.0)  # dx = 0.5
    assert g.x[g.index_of(2.5)] == 2.5
    assert g.x[g.index_of(2.6)] == 2.5
    with pytest.raises(ValueError, match="off-grid"):
        g.index_of(9.0)


def test_phys_params_validation():
    with pytest.raises(ValueError, match="hbar"):
        PhysParams(hbar=0.0)
    with pytest.raises(ValueError, match="mass"):
        PhysParams(mass=-1.0)


# --- states -----------------------------------------------------------------


def test_normalize_is_exact():
    g = make_grid(64, -8.0, 8.0)
    rng = np.random.default_rng(0)
    psi = StateVector(g, rng.normal(size=64) + 1j * rng.normal(size=64)).normalize()
    assert abs(np.sum(np.abs(psi.amps) ** 2) * g.dx - 1.0) <= 1e-12


def test_inner_product_conjugate_symmetric_and_positive():
    g = make_grid(64, -8.0, 8.0)
    rng = np.random.default_rng(1)
    a = StateVector(g, rng.normal(size=64) + 1j * rng.normal(size=64)).normalize()
    b = StateVector(g, rng.normal(size=64) + 1j * rng.normal(size=64)).normalize()
    assert a.inner(b) == pytest.approx(np.conj(b.inner(a)))
    assert a.inner(a).real > 0
    assert abs(a.inner(a).imag) < 1e-15


def test_gaussian_packet_dispersion_is_sigma0():
    g = make_grid(2048, -200.0, 200.0)
    psi = gaussian_packet(g, 0.0, 0.0, 1.0)
    assert position_spread(psi) == pytest.approx(1.0, abs=1e-4)


def test_gaussian_packet_momentum_mean():
    g = make_grid(2048, -200.0, 200.0)
    psi = gaussian_packet(g, 0.0, 5.0, 1.0)
    assert momentum_expectation(psi) == pytest.approx(5.0, abs=1e-6)


def test_gaussian_packet_position_mean():
    g = make_grid(512, -40.0, 40.0)
    psi = gaussian_packet(g, 3.0, 0.0, 1.0)
    assert expectation(position_operator(g), psi).real == pytest.approx(3.0, abs=1e-6)


def test_gaussian_packet_boundary_overlap_rejected():
    g = make_grid(16, -4.0, 4.0)
    with pytest.raises(ValueError, match="boundary"):
        gaussian_packet(g, 0.0, 0.0, 3.0)


def test_gaussian_packet_too_narrow_rejected():
    g = make_grid(64, -32.0, 32.0)  # dx = 1
    with pytest.raises(ValueError, match="narrow"):
        gaussian_packet(g, 0.0, 0.0, 1.5)


# --- operators ----------------------------------------------------------------


def test_position_operator_is_diagonal_eigenbasis():
    g = make_grid(16, -4.0, 4.0)
    xop = position_operator(g)
    assert xop.is_hermitian(1e-12)
    j = g.index_of(2.5)
    spike = np.zeros(16, dtype=complex)
    spike[j] = 1.0
    psi = StateVector(g, spike).normalize()
    np.testing.assert_allclose(xop.apply(psi).amps, 2.5 * psi.amps, atol=1e-14)


def test_momentum_operator_plane_wave_eigenvalue():
    g = make_grid(256, -40.0, 40.0)
    pop = momentum_operator(g)
    assert pop.is_hermitian(1e-12)
    k5 = g.k[5]
    psi = StateVector(g, np.exp(1j * k5 * g.x)).normalize()
    out = pop.apply(psi)
    np.testing.assert_allclose(out.amps, k5 * psi.amps, atol=1e-10)


def test_canonical_commutator_on_interior_gaussian():
    g = make_grid(512, -40.0, 40.0)
    params = PhysParams()
    xop, pop = position_operator(g), momentum_operator(g, params)
    psi = gaussian_packet(g, 0.0, 0.0, 1.0, params)
    comm = xop.mat @ pop.mat - pop.mat @ xop.mat
    val = np.vdot(psi.amps, comm @ psi.amps) * g.dx
    assert abs(val - 1j * params.hbar) <= 1e-6 * params.hbar


def test_expectation_of_identity_is_one():
    g = make_grid(64, -16.0, 16.0)
    psi = gaussian_packet(g, 0.0, 0.5, 1.0)
    eye = LinearOperator(g, np.eye(64))
    assert expectation(eye, psi).real == pytest.approx(1.0, abs=1e-12)


def test_dispersion_matches_state_level_helper():
    g = make_grid(256, -40.0, 40.0)
    psi = gaussian_packet(g, 1.0, 0.3, 1.5)
    assert dispersion(position_operator(g), psi) == pytest.approx(
        position_spread(psi), abs=1e-12)


def test_dispersion_of_gaussian():
    g = make_grid(512, -40.0, 40.0)
    psi = gaussian_packet(g, 0.0, 0.0, 1.0)
    assert dispersion(position_operator(g), psi) == pytest.approx(1.0, abs=1e-4)


def test_grid_mismatch_rejected():
    ga = make_grid(64, -8.0, 8.0)
    gb = make_grid(64, -16.0, 16.0)
    with pytest.raises(ValueError, match="grid mismatch"):
        expectation(position_operator(ga), gaussian_packet(gb, 0.0, 0.0, 1.0))


def test_operator_predicates():
    g = make_grid(16, -4.0, 4.0)
    eye = LinearOperator(g, np.eye(16))
    assert eye.is_hermitian() and eye.is_unitary() and eye.is_projector()
    shift = LinearOperator(g, np.roll(np.eye(16), 1, axis=0))
    assert shift.is_unitary() and not shift.is_hermitian()


def test_density_operator_from_state_validates():
    g = make_grid(64, -16.0, 16.0)
    rho = DensityOperator.from_state(gaussian_packet(g, 0.0, 0.0, 1.0))
    rho.validate()
    assert rho.trace().real == pytest.approx(1.0, abs=1e-12)


def test_density_operator_rejects_non_hermitian():
    g = make_grid(8, -4.0, 4.0)
    mat = np.zeros((8, 8), dtype=complex)
    mat[0, 1] = 1.0
    with pytest.raises(ValueError, match="Hermitian"):
        DensityOperator(g, mat).validate()
