"""Spatial lattice, physical constants, states, and elementary operators.

Conventions used throughout the package
---------------------------------------
Positions ``x_j = x_min + j*dx`` for ``j in [0, n)`` on a periodic lattice
(``x_max`` is identified with ``x_min``).  Momenta ``k_l = 2*pi*fftfreq(n, dx)``
in standard DFT ordering, spacing ``dk = 2*pi/(n*dx)``.

Inner products are dx-weighted Riemann sums, ``<a|b> = sum_j conj(a_j) b_j dx``,
so continuum formulas carry over with the position eigenvector at ``x_j``
represented by ``e_j/sqrt(dx)`` and the discretized ``delta(x - x')`` equal to
``delta_jk/dx``.

Operator matrices act by plain matrix multiplication on amplitude arrays and
compose by plain matrix products; with the convention above, diagonal 0/1
matrices are projectors and a rank-1 projector onto a normalized state ``phi``
is ``dx * outer(phi, conj(phi))``.

All spectral operators derive from one fixed unitary transform,

    F[l, j] = exp(-i k_l x_j) / sqrt(n),

so that any function of momentum is ``F^dagger diag(f(hbar*k)) F``.  The
``x_min``-dependent phases cancel inside such conjugations, which is why
``np.fft.fft``/``ifft`` implement them directly.  This sign convention is
load-bearing: flipping it flips fringe phases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhysParams",
    "Grid",
    "StateVector",
    "DensityOperator",
    "LinearOperator",
    "make_grid",
    "gaussian_packet",
    "position_operator",
    "momentum_operator",
    "expectation",
    "dispersion",
    "position_spread",
    "momentum_expectation",
]

GUARD_BAND_MASS = 1e-8


@dataclass(frozen=True)
class PhysParams:
    """Physical constants: action quantum ``hbar`` and particle ``mass``."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive (got {self.hbar})")
        if not self.mass > 0:
            raise ValueError(f"mass must be positive (got {self.mass})")


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


class Grid:
    """Uniform periodic spatial lattice with its conjugate momentum lattice.

    Parameters
    ----------
    n : int
        Number of lattice points; must be a power of two, at least 8.
    x_min : float
        Position of the first lattice point.
    dx : float
        Lattice spacing, strictly positive.
    """

    __slots__ = ("n", "x_min", "dx", "x", "k")

    def __init__(self, n: int, x_min: float, dx: float):
        n = int(n)
        if not _is_power_of_two(n) or n < 8:
            raise ValueError(f"n must be a power of two >= 8 (got {n})")
        if not dx > 0:
            raise ValueError(f"dx must be positive (got {dx})")
        self.n = n
        self.x_min = float(x_min)
        self.dx = float(dx)
        x = self.x_min + self.dx * np.arange(n)
        k = 2.0 * np.pi * np.fft.fftfreq(n, self.dx)
        x.flags.writeable = False
        k.flags.writeable = False
        self.x = x
        self.k = k

    @property
    def x_max(self) -> float:
        return self.x_min + self.n * self.dx

    @property
    def dk(self) -> float:
        return 2.0 * np.pi / (self.n * self.dx)

    def index_of(self, pos: float) -> int:
        """Nearest lattice index to ``pos``; error if off-grid by more than dx/2."""
        j = int(round((pos - self.x_min) / self.dx))
        if j < 0 or j >= self.n or abs(self.x[j] - pos) > 0.5 * self.dx * (1 + 1e-9):
            raise ValueError(f"position {pos} is off-grid (nearest spacing {self.dx})")
        return j

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Grid)
            and self.n == other.n
            and self.x_min == other.x_min
            and self.dx == other.dx
        )

    def __hash__(self):
        return hash((self.n, self.x_min, self.dx))

    def __repr__(self):
        return f"Grid(n={self.n}, x_min={self.x_min}, dx={self.dx})"


def make_grid(n: int, x_min: float, x_max: float) -> Grid:
    """Build the lattice covering ``[x_min, x_max)`` with ``n`` points.

    ``dx = (x_max - x_min)/n``; the momentum lattice follows DFT ordering.
    """
    if x_max <= x_min:
        raise ValueError(f"degenerate interval: x_max={x_max} <= x_min={x_min}")
    n = int(n)
    if not _is_power_of_two(n) or n < 8:
        raise ValueError(f"n must be a power of two >= 8 (got {n})")
    return Grid(n, x_min, (x_max - x_min) / n)


def _require_same_grid(a, b):
    if a.grid != b.grid:
        raise ValueError(f"grid mismatch: {a.grid!r} vs {b.grid!r}")


class StateVector:
    """Pure state: complex amplitudes ``psi_j`` on a :class:`Grid`.

    Normalization convention: ``sum_j |psi_j|^2 dx = 1``.
    """

    __slots__ = ("grid", "amps")

    def __init__(self, grid: Grid, amps):
        amps = np.asarray(amps, dtype=np.complex128).copy()
        if amps.shape != (grid.n,):
            raise ValueError(f"amplitude shape {amps.shape} does not match grid n={grid.n}")
        amps.flags.writeable = False
        self.grid = grid
        self.amps = amps

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2) * self.grid.dx))

    def normalize(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero state")
        return StateVector(self.grid, self.amps / nrm)

    def inner(self, other: "StateVector") -> complex:
        """dx-weighted inner product ``<self|other>``."""
        _require_same_grid(self, other)
        return complex(np.vdot(self.amps, other.amps) * self.grid.dx)

    def boundary_mass(self, margin: float) -> float:
        """Probability mass within ``margin`` of either lattice edge."""
        g = self.grid
        sel = (g.x < g.x_min + margin) | (g.x >= g.x_max - margin)
        return float(np.sum(np.abs(self.amps[sel]) ** 2) * g.dx)

    def __repr__(self):
        return f"StateVector(n={self.grid.n}, norm={self.norm():.6g})"


class LinearOperator:
    """Dense operator on lattice amplitudes with testable structure predicates.

    ``structure`` is an informational tag: "diagonal", "spectral" (diagonal in
    the momentum basis) or "general".
    """

    __slots__ = ("grid", "mat", "structure")

    def __init__(self, grid: Grid, mat, structure: str = "general"):
        mat = np.asarray(mat, dtype=np.complex128).copy()
        if mat.shape != (grid.n, grid.n):
            raise ValueError(f"matrix shape {mat.shape} does not match grid n={grid.n}")
        mat.flags.writeable = False
        self.grid = grid
        self.mat = mat
        self.structure = structure

    def apply(self, state: StateVector) -> StateVector:
        _require_same_grid(self, state)
        return StateVector(self.grid, self.mat @ state.amps)

    def dagger(self) -> "LinearOperator":
        return LinearOperator(self.grid, self.mat.conj().T, self.structure)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.mat - self.mat.conj().T)) <= tol)

    def is_unitary(self, tol: float = 1e-10) -> bool:
        dev = self.mat.conj().T @ self.mat - np.eye(self.grid.n)
        return bool(np.max(np.abs(dev)) <= tol)

    def is_projector(self, tol: float = 1e-10) -> bool:
        if not self.is_hermitian(tol):
            return False
        return bool(np.max(np.abs(self.mat @ self.mat - self.mat)) <= tol)

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        _require_same_grid(self, other)
        return LinearOperator(self.grid, self.mat @ other.mat)

    def __add__(self, other: "LinearOperator") -> "LinearOperator":
        _require_same_grid(self, other)
        return LinearOperator(self.grid, self.mat + other.mat)

    def __sub__(self, other: "LinearOperator") -> "LinearOperator":
        _require_same_grid(self, other)
        return LinearOperator(self.grid, self.mat - other.mat)

    def __mul__(self, scalar) -> "LinearOperator":
        return LinearOperator(self.grid, self.mat * scalar)

    __rmul__ = __mul__

    def __repr__(self):
        return f"LinearOperator(n={self.grid.n}, structure={self.structure!r})"


class DensityOperator:
    """Mixed state ``rho``; trace convention ``trace(rho)*dx = 1``.

    With the dx-weighted inner product a pure state contributes
    ``rho = outer(psi, conj(psi))``, whose diagonal is the probability density.
    """

    __slots__ = ("grid", "mat")

    def __init__(self, grid: Grid, mat):
        mat = np.asarray(mat, dtype=np.complex128).copy()
        if mat.shape != (grid.n, grid.n):
            raise ValueError(f"matrix shape {mat.shape} does not match grid n={grid.n}")
        mat.flags.writeable = False
        self.grid = grid
        self.mat = mat

    @classmethod
    def from_state(cls, state: StateVector) -> "DensityOperator":
        return cls(state.grid, np.outer(state.amps, state.amps.conj()))

    def trace(self) -> complex:
        return complex(np.trace(self.mat) * self.grid.dx)

    def validate(self, herm_tol: float = 1e-12, trace_tol: float = 1e-12,
                 eig_floor: float = -1e-10) -> None:
        """Raise if Hermiticity, unit trace, or positivity fails."""
        dev = np.max(np.abs(self.mat - self.mat.conj().T))
        if dev > herm_tol:
            raise ValueError(f"density operator not Hermitian (max dev {dev:.3e})")
        tr = self.trace()
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"density operator trace*dx = {tr} != 1")
        lo = float(np.linalg.eigvalsh(self.mat).min()) * self.grid.dx
        if lo < eig_floor:
            raise ValueError(f"density operator has negative eigenvalue {lo:.3e}")

    def __repr__(self):
        return f"DensityOperator(n={self.grid.n})"


def gaussian_packet(grid: Grid, x0: float, p0: float, sigma0: float,
                    params: PhysParams | None = None) -> StateVector:
    """Normalized Gaussian wave packet with mean position/momentum ``x0``/``p0``.

    ``psi(x) ~ exp(-(x-x0)^2/(4 sigma0^2)) * exp(i p0 x / hbar)``, so the
    position dispersion is ``sigma0``.

    Raises
    ------
    ValueError
        If ``sigma0 < 2*dx`` (unresolvable on the lattice) or more than 1e-8
        of the probability mass lies within ``4*sigma0`` of a lattice edge.
    """
    params = params or PhysParams()
    if sigma0 < 2.0 * grid.dx:
        raise ValueError(
            f"packet too narrow for grid: sigma0={sigma0} < 2*dx={2 * grid.dx}"
        )
    psi = np.exp(-((grid.x - x0) ** 2) / (4.0 * sigma0 ** 2)
                 + 1j * p0 * grid.x / params.hbar)
    state = StateVector(grid, psi).normalize()
    edge = state.boundary_mass(4.0 * sigma0)
    if edge >= GUARD_BAND_MASS:
        raise ValueError(
            f"packet overlaps boundary: {edge:.3e} probability mass within "
            f"4*sigma0 of a lattice edge"
        )
    return state


def _spectral_matrix(grid: Grid, fk: np.ndarray) -> np.ndarray:
    """Dense ``F^dagger diag(fk) F`` built column-wise with the FFT."""
    cols = np.fft.fft(np.eye(grid.n), axis=0)
    return np.fft.ifft(fk[:, None] * cols, axis=0)


def position_operator(grid: Grid) -> LinearOperator:
    """Multiplication by the lattice coordinate; diagonal and Hermitian."""
    return LinearOperator(grid, np.diag(grid.x.astype(np.complex128)), "diagonal")


def momentum_operator(grid: Grid, params: PhysParams | None = None) -> LinearOperator:
    """Spectral momentum ``F^dagger diag(hbar k) F``.

    The matrix is re-symmetrized to remove FFT round-off, keeping the
    Hermiticity deviation at the 1e-15 level.
    """
    params = params or PhysParams()
    mat = _spectral_matrix(grid, params.hbar * grid.k.astype(np.complex128))
    mat = 0.5 * (mat + mat.conj().T)
    return LinearOperator(grid, mat, "spectral")


def expectation(op: LinearOperator, state: StateVector) -> complex:
    """``<psi|A|psi>`` with the dx-weighted inner product."""
    _require_same_grid(op, state)
    return complex(np.vdot(state.amps, op.mat @ state.amps) * state.grid.dx)


def dispersion(op: LinearOperator, state: StateVector) -> float:
    """``sqrt(<A^2> - <A>^2)``, clamped at zero against round-off."""
    _require_same_grid(op, state)
    v = op.mat @ state.amps
    m1 = np.vdot(state.amps, v) * state.grid.dx
    m2 = np.vdot(state.amps, op.mat @ v) * state.grid.dx
    var = m2.real - m1.real ** 2
    return float(np.sqrt(max(var, 0.0)))


def position_spread(state: StateVector) -> float:
    """Position dispersion computed from the probability density.

    Equal to ``dispersion(position_operator(grid), state)`` but O(n), so it is
    usable on grids too large for dense operators.
    """
    prob = np.abs(state.amps) ** 2 * state.grid.dx
    m1 = float(np.sum(state.grid.x * prob))
    m2 = float(np.sum(state.grid.x ** 2 * prob))
    return float(np.sqrt(max(m2 - m1 * m1, 0.0)))


def momentum_expectation(state: StateVector, params: PhysParams | None = None) -> float:
    """``<p>`` evaluated in the momentum basis, O(n log n)."""
    params = params or PhysParams()
    spec = np.fft.fft(state.amps)
    w = np.abs(spec) ** 2
    return float(params.hbar * np.sum(state.grid.k * w) / np.sum(w))
