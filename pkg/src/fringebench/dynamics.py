"""Free-particle time evolution: spectral unitaries, the closed-form
propagator kernel, Heisenberg conjugation, and the time-of-flight clock.

Sign convention: ``U(t) = exp(-i H t / hbar)`` with ``H = p^2 / 2m``, i.e.
forward evolution multiplies momentum amplitudes by
``exp(-i hbar k^2 t / 2m)``.
"""

from __future__ import annotations

import numpy as np

from .lattice import (
    GUARD_BAND_MASS,
    Grid,
    LinearOperator,
    PhysParams,
    StateVector,
    _spectral_matrix,
    position_operator,
    momentum_operator,
    position_spread,
)

__all__ = [
    "free_unitary",
    "evolve_state",
    "analytic_kernel",
    "kernel_propagate",
    "heisenberg_conjugate",
    "heisenberg_position",
    "time_of_flight",
]


def _free_phases(grid: Grid, params: PhysParams, t: float) -> np.ndarray:
    return np.exp(-1j * params.hbar * grid.k ** 2 * t / (2.0 * params.mass))


def free_unitary(grid: Grid, params: PhysParams, t: float) -> LinearOperator:
    """Dense free-evolution unitary ``F^dagger diag(e^{-i hbar k^2 t/2m}) F``.

    Built by conjugating the diagonal phase with the explicit transform, which
    keeps it unitary to round-off for every ``t``.
    """
    return LinearOperator(grid, _spectral_matrix(grid, _free_phases(grid, params, t)),
                          "spectral")


def _check_guard_band(state: StateVector, label: str) -> None:
    margin = 4.0 * position_spread(state)
    mass = state.boundary_mass(margin)
    if mass >= GUARD_BAND_MASS:
        raise ValueError(
            f"boundary-mass violation {label}: {mass:.3e} probability mass "
            f"within 4*sigma={margin:.3g} of a lattice edge"
        )


def evolve_state(state: StateVector, t: float, params: PhysParams | None = None,
                 check_guard: bool = True) -> StateVector:
    """Evolve a state freely for time ``t`` via the FFT (no matrix is built).

    Identical to applying :func:`free_unitary` but O(n log n).  With
    ``check_guard`` the guard-band precondition (< 1e-8 probability mass
    within four position dispersions of a lattice edge) is enforced before
    and after the evolution; pipelines that deliberately work with
    full-bandwidth states (e.g. slit-projected spikes) disable it and account
    for wrap-around themselves.
    """
    params = params or PhysParams()
    if check_guard:
        _check_guard_band(state, "before evolution")
    out = StateVector(state.grid,
                      np.fft.ifft(_free_phases(state.grid, params, t)
                                  * np.fft.fft(state.amps)))
    if check_guard:
        _check_guard_band(out, "after evolution")
    return out


def analytic_kernel(x, x_src, t: float, params: PhysParams | None = None):
    """Closed-form free propagator ``sqrt(m/(2 pi i hbar t)) e^{i m (x-x_src)^2 / 2 hbar t}``.

    The square-root branch is fixed as ``1/sqrt(i) = e^{-i pi/4}`` for ``t > 0``
    (Fresnel convention), conjugated for ``t < 0``.  The modulus is
    ``sqrt(m/(2 pi hbar |t|))`` independent of position.
    """
    params = params or PhysParams()
    if t == 0:
        raise ValueError("analytic kernel is singular at t = 0")
    pref = np.sqrt(params.mass / (2.0 * np.pi * params.hbar * abs(t)))
    branch = np.exp(-1j * np.pi / 4.0 * np.sign(t))
    phase = np.exp(1j * params.mass * (np.asarray(x) - np.asarray(x_src)) ** 2
                   / (2.0 * params.hbar * t))
    return pref * branch * phase


def kernel_propagate(state: StateVector, t: float,
                     params: PhysParams | None = None) -> StateVector:
    """Propagate by direct Riemann-sum convolution with :func:`analytic_kernel`.

    Cross-check oracle for :func:`evolve_state`; not exactly unitary, so it is
    never used as the production propagator.  Builds an n x n kernel matrix.
    """
    params = params or PhysParams()
    g = state.grid
    kern = analytic_kernel(g.x[:, None], g.x[None, :], t, params)
    return StateVector(g, (kern @ state.amps) * g.dx)


def heisenberg_conjugate(op: LinearOperator, u: LinearOperator) -> LinearOperator:
    """Heisenberg-evolved operator ``u^dagger op u``.

    ``u`` must be unitary to 1e-10 (checked); similarity by a unitary then
    preserves Hermiticity and idempotence to round-off.
    """
    if op.grid != u.grid:
        raise ValueError("grid mismatch between operator and unitary")
    if not u.is_unitary(1e-10):
        raise ValueError("conjugation requires a unitary (deviation above 1e-10)")
    return LinearOperator(op.grid, u.mat.conj().T @ op.mat @ u.mat)


def heisenberg_position(grid: Grid, params: PhysParams, t: float) -> LinearOperator:
    """Closed-form evolved position ``x + (t/m) p``, Hermitian by construction."""
    xop = position_operator(grid)
    pop = momentum_operator(grid, params)
    return LinearOperator(grid, xop.mat + (t / params.mass) * pop.mat)


def time_of_flight(distance: float, p_y: float, params: PhysParams | None = None) -> float:
    """Transit time ``m * distance / p_y`` of the transverse clock motion."""
    params = params or PhysParams()
    if p_y <= 0:
        raise ValueError(f"p_y must be positive (got {p_y})")
    if distance < 0:
        raise ValueError(f"distance must be non-negative (got {distance})")
    return params.mass * distance / p_y
