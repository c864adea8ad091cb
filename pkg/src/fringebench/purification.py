"""Slit screen as an ancilla register: pointwise particle-screen coupling,
post-selection on the unflipped screen, and the purified fringe pipeline.

The screen is coarse-grained into K cells, each carrying one two-level
pointer.  A particle amplitude at site j rotates the pointer of cell(j) by
the cell's pulse area theta_c, with the rotation convention

    |0> -> cos(theta)|0> - i sin(theta)|1>.

Cells containing slit-aperture sites have theta = 0, so amplitudes passing
the slits leave the screen untouched; with theta = pi/2 elsewhere,
post-selecting the all-zero screen reproduces the diagonal slit projector
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import Grid, PhysParams, StateVector
from .dynamics import evolve_state
from .measurement import (
    FringeReport,
    SlitScreen,
    analyze_pattern,
    aperture_indices,
    _bin_probabilities,
    _warn_on_wraparound,
    MIN_PASSAGE_PROBABILITY,
)
from .scenario import Scenario

__all__ = [
    "ScreenRegister",
    "JointState",
    "make_screen_register",
    "interaction_unitary",
    "ScreenInteraction",
    "embed",
    "postselect_screen_zero",
    "purified_double_slit",
    "trace_distance_pure",
]

MAX_CELLS = 10


@dataclass(frozen=True, eq=False)
class ScreenRegister:
    """K pointer cells partitioning the lattice, with per-cell pulse areas.

    ``cell_of`` maps each site index to its cell; ``thetas[c]`` is the pulse
    area of cell c in radians.
    """

    n_sites: int
    cell_of: np.ndarray
    thetas: tuple[float, ...]

    def __post_init__(self):
        cell_of = np.asarray(self.cell_of, dtype=int).copy()
        cell_of.flags.writeable = False
        object.__setattr__(self, "cell_of", cell_of)
        k = len(self.thetas)
        if not 1 <= k <= MAX_CELLS:
            raise ValueError(f"cell count must be in [1, {MAX_CELLS}] (got {k})")
        if cell_of.shape != (self.n_sites,):
            raise ValueError("cell map must assign every lattice site")
        present = np.unique(cell_of)
        if present.min() < 0 or present.max() >= k or present.size != k:
            raise ValueError("cells must partition the sites with every cell non-empty")
        for c, th in enumerate(self.thetas):
            if not (th == 0.0 or 0.0 < th <= np.pi):
                raise ValueError(f"theta[{c}] = {th} outside {{0}} U (0, pi]")

    @property
    def n_cells(self) -> int:
        return len(self.thetas)

    def validate_against(self, aperture: np.ndarray) -> None:
        """Check that aperture sites sit in theta = 0 cells and others do not."""
        ap_cells = np.unique(self.cell_of[aperture])
        for c in ap_cells:
            if self.thetas[c] != 0.0:
                raise ValueError(f"cell {c} contains an aperture site but theta != 0")
        mask = np.ones(self.n_sites, dtype=bool)
        mask[aperture] = False
        for c in np.unique(self.cell_of[mask]):
            if self.thetas[c] == 0.0:
                raise ValueError(f"cell {c} has theta = 0 but contains non-aperture sites")


def make_screen_register(grid: Grid, screen: SlitScreen, n_cells: int = 4,
                         theta: float = np.pi / 2) -> ScreenRegister:
    """Canonical register: one theta = 0 cell per slit, the rest of the grid
    split into ``n_cells - 2`` contiguous chunks with pulse area ``theta``."""
    if not 3 <= n_cells <= MAX_CELLS:
        raise ValueError(f"n_cells must be in [3, {MAX_CELLS}] (got {n_cells})")
    if not 0 < theta <= np.pi:
        raise ValueError(f"theta must lie in (0, pi] (got {theta})")
    left, right = aperture_indices(grid, screen)
    cell_of = np.empty(grid.n, dtype=int)
    rest = np.setdiff1d(np.arange(grid.n), np.concatenate([left, right]))
    chunks = np.array_split(rest, n_cells - 2)
    if any(ch.size == 0 for ch in chunks):
        raise ValueError("too many cells for the non-aperture sites")
    for c, ch in enumerate(chunks, start=2):
        cell_of[ch] = c
    cell_of[left] = 0
    cell_of[right] = 1
    thetas = (0.0, 0.0) + (float(theta),) * (n_cells - 2)
    reg = ScreenRegister(n_sites=grid.n, cell_of=cell_of, thetas=thetas)
    reg.validate_against(np.concatenate([left, right]))
    return reg


class JointState:
    """Particle (x) screen-register state: amplitudes of shape (n, 2^K).

    The screen basis index encodes pointer bits most-significant-first, so
    index 0 is the all-|0> screen.  Normalization is dx-weighted on the
    particle factor: ``sum_{j,b} |A[j,b]|^2 dx = 1``.
    """

    __slots__ = ("grid", "n_cells", "amps")

    def __init__(self, grid: Grid, n_cells: int, amps):
        amps = np.asarray(amps, dtype=np.complex128).copy()
        if amps.shape != (grid.n, 2 ** n_cells):
            raise ValueError(f"joint amplitudes must have shape "
                             f"({grid.n}, {2 ** n_cells}), got {amps.shape}")
        amps.flags.writeable = False
        self.grid = grid
        self.n_cells = n_cells
        self.amps = amps

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2) * self.grid.dx))


def embed(psi: StateVector, reg: ScreenRegister) -> JointState:
    """Tensor the particle state with the all-|0> screen."""
    if psi.grid.n != reg.n_sites:
        raise ValueError("state and register describe different lattices")
    amps = np.zeros((psi.grid.n, 2 ** reg.n_cells), dtype=np.complex128)
    amps[:, 0] = psi.amps
    return JointState(psi.grid, reg.n_cells, amps)


class ScreenInteraction:
    """Entangling unitary of the particle-screen coupling, block-diagonal in
    the particle position: site j drives only the pointer of its own cell.

    Kept structured (never a dense (n 2^K)^2 matrix) except on demand via
    :meth:`to_matrix` for small systems.
    """

    def __init__(self, grid: Grid, reg: ScreenRegister):
        if grid.n != reg.n_sites:
            raise ValueError("register does not match the grid")
        self.grid = grid
        self.reg = reg

    def apply(self, joint: JointState) -> JointState:
        if joint.grid != self.grid or joint.n_cells != self.reg.n_cells:
            raise ValueError("joint state does not match the interaction")
        k = self.reg.n_cells
        out = joint.amps.copy()
        for c, theta in enumerate(self.reg.thetas):
            rows = self.reg.cell_of == c
            if theta == 0.0 or not rows.any():
                continue
            cos_t, sin_t = np.cos(theta), np.sin(theta)
            sub = out[rows].reshape((-1,) + (2,) * k)
            a0 = np.take(sub, 0, axis=1 + c)
            a1 = np.take(sub, 1, axis=1 + c)
            new = np.stack([cos_t * a0 - 1j * sin_t * a1,
                            -1j * sin_t * a0 + cos_t * a1], axis=1 + c)
            out[rows] = new.reshape(rows.sum(), 2 ** k)
        return JointState(self.grid, k, out)

    def to_matrix(self) -> np.ndarray:
        """Dense joint matrix, for small-system checks only."""
        k = self.reg.n_cells
        dim = self.grid.n * 2 ** k
        if dim > 8192:
            raise ValueError(f"joint dimension {dim} too large for a dense matrix")
        mat = np.zeros((dim, dim), dtype=np.complex128)
        for j in range(self.grid.n):
            c = int(self.reg.cell_of[j])
            theta = self.reg.thetas[c]
            rot2 = np.array([[np.cos(theta), -1j * np.sin(theta)],
                             [-1j * np.sin(theta), np.cos(theta)]])
            block = np.kron(np.kron(np.eye(2 ** c), rot2),
                            np.eye(2 ** (k - c - 1)))
            lo = j * 2 ** k
            mat[lo:lo + 2 ** k, lo:lo + 2 ** k] = block
        return mat


def interaction_unitary(grid: Grid, reg: ScreenRegister) -> ScreenInteraction:
    """The joint coupling unitary as a structured, position-diagonal object."""
    return ScreenInteraction(grid, reg)


def postselect_screen_zero(joint: JointState) -> tuple[StateVector, float]:
    """Condition on finding the whole screen in |0...0>.

    Returns the renormalized particle state and the post-selection
    probability; errors out below the conditioning cutoff.
    """
    block = joint.amps[:, 0]
    prob = float(np.sum(np.abs(block) ** 2) * joint.grid.dx)
    if prob <= MIN_PASSAGE_PROBABILITY:
        raise ValueError(f"screen-zero probability {prob:.3e} vanishes; "
                         f"no post-selection possible")
    return StateVector(joint.grid, block / np.sqrt(prob)), prob


def trace_distance_pure(a: StateVector, b: StateVector) -> float:
    """Trace distance of the pure-state density operators of ``a`` and ``b``.

    Computed as the norm of the component of ``b`` orthogonal to ``a``
    (equal to ``sqrt(1 - |<a|b>|^2)`` but without the cancellation that
    formula suffers for nearly identical states).
    """
    ov = a.inner(b)
    resid = b.amps - ov * a.amps
    return float(np.sqrt(np.sum(np.abs(resid) ** 2) * a.grid.dx))


def purified_double_slit(scenario: Scenario,
                         reg: ScreenRegister | None = None) -> FringeReport:
    """Double-slit pipeline with the slit screen realized as an ancilla
    register instead of a projector.

    The packet flies to the screen, entangles with the pointer cells, and the
    runs with an unflipped screen are kept; the conditioned state then flies
    to the detector.  With pulse area pi/2 off the slits this reproduces the
    projective pipeline bin by bin; smaller pulse areas mark which-path
    information only partially and leave partial fringes.
    """
    grid = scenario.build_grid()
    params = scenario.params()
    screen = scenario.slit_screen()
    if reg is None:
        reg = make_screen_register(grid, screen, scenario.screen_cells,
                                   scenario.screen_theta)
    elif reg.n_sites != grid.n:
        raise ValueError("register does not match the scenario grid")

    d_eff = float(grid.x[grid.index_of(screen.d / 2)]
                  - grid.x[grid.index_of(-screen.d / 2)])

    psi0 = scenario.build_packet(grid)
    at_screen = evolve_state(psi0, screen.t1, params)
    joint = interaction_unitary(grid, reg).apply(embed(at_screen, reg))
    passed, p_zero = postselect_screen_zero(joint)

    t_flight = scenario.flight_time
    spacing = 2.0 * np.pi * params.hbar * t_flight / (params.mass * d_eff)
    _warn_on_wraparound(grid, params, t_flight, 5.0 * spacing, d_eff)

    final = evolve_state(passed, t_flight, params, check_guard=False)
    density = np.abs(final.amps) ** 2 * grid.dx
    centers, probs = _bin_probabilities(grid, density, scenario.pixel_width)
    return analyze_pattern(centers, probs, p_zero, d_eff, t_flight, params)
