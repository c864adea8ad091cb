"""Slit and detector projectors, the three equivalent sequential-detection
probability forms, the rank-1 product formula, and fringe analysis.

The three probability forms compute the same number

    p(1,2) = Tr{ P2 U2 P1 U1 rho (U2 P1 U1)^dagger } * dx

by moving the evolution onto the state, onto the final projector, or onto
both projectors; their agreement to round-off is the central algebraic
invariant of this module.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .lattice import (
    DensityOperator,
    Grid,
    LinearOperator,
    PhysParams,
    StateVector,
)
from .dynamics import evolve_state, heisenberg_conjugate
from .scenario import Scenario

__all__ = [
    "SlitScreen",
    "DetectorPixel",
    "FringeReport",
    "aperture_indices",
    "slit_projector",
    "pixel_projector",
    "pixel_tiling",
    "p_seq_schrodinger",
    "p_seq_heisenberg",
    "p_seq_double_heisenberg",
    "p_rank_one",
    "analytic_fringe",
    "conditional_fringe",
    "analyze_pattern",
]

MIN_PASSAGE_PROBABILITY = 1e-12


@dataclass(frozen=True)
class SlitScreen:
    """Two-slit aperture: centers at ``+-d/2``, common width, arrival time t1.

    ``width = 0`` realizes an idealized narrow slit as a single lattice site.
    """

    d: float
    width: float = 0.0
    t1: float = 0.0

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError(f"slit separation d must be positive (got {self.d})")
        if self.width < 0:
            raise ValueError(f"slit width must be non-negative (got {self.width})")


@dataclass(frozen=True)
class DetectorPixel:
    """One detection bin, centered at ``s`` with the given width."""

    s: float
    width: float


def _site_window(grid: Grid, center: float, width: float) -> np.ndarray:
    """Closed-interval site selection ``|x_j - center| <= width/2``."""
    return np.nonzero(np.abs(grid.x - center) <= width / 2 + 1e-12 * grid.dx)[0]


def aperture_indices(grid: Grid, screen: SlitScreen) -> tuple[np.ndarray, np.ndarray]:
    """Site index sets of the two slits (left, right).

    Slit centers snap to the nearest lattice site; positions further than dx/2
    from any site raise instead of snapping silently.  The sets must be
    disjoint, non-empty, and interior.
    """
    sets = []
    for center in (-screen.d / 2, screen.d / 2):
        j = grid.index_of(center)
        if j <= 0 or j >= grid.n - 1:
            raise ValueError(f"slit center {center} is not in the grid interior")
        idx = _site_window(grid, grid.x[j], screen.width)
        if idx.size == 0:
            raise ValueError(f"slit at {center} selects no lattice sites")
        sets.append(idx)
    left, right = sets
    if np.intersect1d(left, right).size:
        raise ValueError("slit apertures overlap; reduce width or increase d")
    return left, right


def _diagonal_projector(grid: Grid, indices: np.ndarray) -> LinearOperator:
    diag = np.zeros(grid.n, dtype=np.complex128)
    diag[indices] = 1.0
    return LinearOperator(grid, np.diag(diag), "diagonal")


def slit_projector(grid: Grid, screen: SlitScreen) -> LinearOperator:
    """Diagonal 0/1 projector onto the two slit apertures."""
    left, right = aperture_indices(grid, screen)
    return _diagonal_projector(grid, np.concatenate([left, right]))


def pixel_projector(grid: Grid, pixel: DetectorPixel) -> LinearOperator:
    """Diagonal 0/1 projector onto one detection bin.

    Bin membership is half-open, ``s - w/2 <= x_j < s + w/2``, so that bins of
    a tiling stay disjoint and sum to the identity exactly.
    """
    if pixel.width <= 0:
        raise ValueError(f"pixel width must be positive (got {pixel.width})")
    lo = int(np.ceil((pixel.s - pixel.width / 2 - grid.x_min) / grid.dx - 1e-9))
    hi = int(np.ceil((pixel.s + pixel.width / 2 - grid.x_min) / grid.dx - 1e-9))
    lo, hi = max(lo, 0), min(hi, grid.n)
    if hi <= lo:
        raise ValueError(f"pixel at s={pixel.s} selects no lattice sites")
    return _diagonal_projector(grid, np.arange(lo, hi))


def pixel_tiling(grid: Grid, width: float | None = None) -> list[DetectorPixel]:
    """Detection bins tiling the whole grid.

    With ``width=None`` every lattice site is its own bin (the default bin
    width dx); otherwise consecutive runs of ``round(width/dx)`` sites form
    each bin, the last one possibly ragged.
    """
    if width is None:
        return [DetectorPixel(s=float(x), width=grid.dx) for x in grid.x]
    q = max(1, int(round(width / grid.dx)))
    pixels = []
    for start in range(0, grid.n, q):
        stop = min(start + q, grid.n)
        center = grid.x_min + (start + stop - 1) / 2 * grid.dx
        pixels.append(DetectorPixel(s=float(center), width=(stop - start) * grid.dx))
    return pixels


def _check_sequential_inputs(rho: DensityOperator, u1, p1, u2, p2) -> None:
    for op in (u1, p1, u2, p2):
        if op.grid != rho.grid:
            raise ValueError("grid mismatch among sequential-probability inputs")
    for name, u in (("u1", u1), ("u2", u2)):
        if not u.is_unitary(1e-10):
            raise ValueError(f"{name} failed the unitarity check (tol 1e-10)")
    for name, p in (("p1", p1), ("p2", p2)):
        if not p.is_projector(1e-10):
            raise ValueError(f"{name} failed the projector check (tol 1e-10)")


def _as_probability(value: complex) -> float:
    if abs(value.imag) > 1e-12:
        raise ValueError(f"probability has imaginary residue {value.imag:.3e}")
    p = value.real
    if p < -1e-10 or p > 1 + 1e-10:
        raise ValueError(f"probability {p} outside [0, 1]")
    return float(min(max(p, 0.0), 1.0))


def p_seq_schrodinger(rho: DensityOperator, u1: LinearOperator, p1: LinearOperator,
                      u2: LinearOperator, p2: LinearOperator) -> float:
    """Sequential probability with the state carried forward:
    ``Tr{P2 (U2 P1 U1) rho (U2 P1 U1)^dagger} dx``."""
    _check_sequential_inputs(rho, u1, p1, u2, p2)
    m = u2.mat @ p1.mat @ u1.mat
    rho_f = m @ rho.mat @ m.conj().T
    return _as_probability(np.trace(p2.mat @ rho_f) * rho.grid.dx)


def p_seq_heisenberg(rho: DensityOperator, u1: LinearOperator, p1: LinearOperator,
                     u2: LinearOperator, p2: LinearOperator) -> float:
    """Sequential probability with the final projector evolved backwards:
    ``Tr{(U2 P1 U1)^dagger P2 (U2 P1 U1) rho} dx``.

    The combined map ``U2 P1 U1`` is not unitary, so the evolved projector is
    assembled from unitary conjugations of its two evolution legs:
    ``U1^dag P1 (U2^dag P2 U2) P1 U1``, which is the same product.
    """
    _check_sequential_inputs(rho, u1, p1, u2, p2)
    inner = heisenberg_conjugate(p2, u2)
    evolved = heisenberg_conjugate(
        LinearOperator(rho.grid, p1.mat @ inner.mat @ p1.mat), u1
    )
    return _as_probability(np.trace(evolved.mat @ rho.mat) * rho.grid.dx)


def p_seq_double_heisenberg(rho: DensityOperator, u1: LinearOperator, p1: LinearOperator,
                            u2: LinearOperator, p2: LinearOperator) -> float:
    """Sequential probability with both projectors evolved:
    ``Tr{(U1^dag P1 U1) (U2 U1)^dag P2 (U2 U1) (U1^dag P1 U1) rho} dx``.

    The first projector evolves through the first leg only, the second through
    both; the state never moves.
    """
    _check_sequential_inputs(rho, u1, p1, u2, p2)
    p1_h = heisenberg_conjugate(p1, u1)
    p2_h = heisenberg_conjugate(p2, u2 @ u1)
    prod = p1_h.mat @ p2_h.mat @ p1_h.mat @ rho.mat
    return _as_probability(np.trace(prod) * rho.grid.dx)


def p_rank_one(psi0: StateVector, psi1: StateVector, psi2: StateVector) -> float:
    """Product form for rank-1 measurements: ``|<psi0|psi1>|^2 |<psi1|psi2>|^2``.

    All three states must be normalized (the overlap product only equals the
    sequential probability once the intermediate state is normalized).
    """
    for name, s in (("psi0", psi0), ("psi1", psi1), ("psi2", psi2)):
        if abs(s.norm() - 1.0) > 1e-9:
            raise ValueError(f"{name} is not normalized (norm {s.norm()})")
    a = abs(psi0.inner(psi1)) ** 2
    b = abs(psi1.inner(psi2)) ** 2
    return float(a * b)


def analytic_fringe(s, d: float, t_flight: float,
                    params: PhysParams | None = None):
    """Idealized two-slit intensity ``cos^2(m s d / (2 hbar T))``.

    Normalized to 1 at ``s = 0``.  This is the squared modulus of the sum of
    the two slit-to-screen propagator phases, ``|e^{i phi+} + e^{i phi-}|^2 =
    4 cos^2((phi+ - phi-)/2)`` rescaled; written as a bare cosine it would go
    negative, so the intensity form is used.
    """
    params = params or PhysParams()
    if t_flight == 0:
        raise ValueError("fringe law is singular at zero flight time")
    arg = params.mass * np.asarray(s) * d / (2.0 * params.hbar * t_flight)
    return np.cos(arg) ** 2


@dataclass
class FringeReport:
    """Conditional detection pattern plus its fringe diagnostics.

    ``p_cond[i]`` is the probability of landing in the bin at ``positions[i]``
    given passage through the slits; over a tiling it sums to one.  The
    analytic overlay and the comparison window are built from the slit
    separation actually realized on the lattice (``d_effective``).
    ``visibility`` is the peak/trough contrast of detected extrema;
    ``fringe_contrast`` is the modulus of the normalized Fourier component of
    the pattern at the fringe frequency (robust when fringes are faint).
    """

    positions: np.ndarray
    p_cond: np.ndarray
    p_analytic: np.ndarray
    p1: float
    maxima: list[float] = field(default_factory=list)
    spacing: float = float("nan")
    spacing_expected: float = float("nan")
    visibility: float = 0.0
    correlation: float = float("nan")
    fringe_contrast: float = 0.0
    d_effective: float = float("nan")
    t_flight: float = float("nan")
    window_halfwidth: float = float("nan")


def _refine_peak(positions: np.ndarray, values: np.ndarray, j: int) -> float:
    """Sub-bin peak position by a three-point parabola."""
    if j <= 0 or j >= len(values) - 1:
        return float(positions[j])
    y0, y1, y2 = values[j - 1], values[j], values[j + 1]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return float(positions[j])
    step = positions[1] - positions[0]
    return float(positions[j] + 0.5 * (y0 - y2) / denom * step)


def analyze_pattern(positions: np.ndarray, p_cond: np.ndarray, p1: float,
                    d_effective: float, t_flight: float,
                    params: PhysParams) -> FringeReport:
    """Assemble the fringe diagnostics for a conditional detection pattern."""
    positions = np.asarray(positions, dtype=float)
    p_cond = np.asarray(p_cond, dtype=float)
    spacing_expected = 2.0 * np.pi * params.hbar * t_flight / (params.mass * d_effective)
    window = 5.0 * spacing_expected
    p_analytic = analytic_fringe(positions, d_effective, t_flight, params)

    sel = np.abs(positions) <= window
    pw = p_cond[sel]
    xw = positions[sel]

    correlation = float("nan")
    if pw.size >= 2 and np.ptp(pw) > 0 and np.ptp(p_analytic[sel]) > 0:
        correlation = float(np.corrcoef(pw, p_analytic[sel])[0, 1])

    prominence = 0.15 * np.ptp(pw) if pw.size else 0.0
    maxima: list[float] = []
    spacing = float("nan")
    visibility = 0.0
    if pw.size >= 3 and prominence > 0:
        peaks, _ = find_peaks(pw, prominence=prominence)
        troughs, _ = find_peaks(-pw, prominence=prominence)
        maxima = [_refine_peak(xw, pw, j) for j in peaks]
        if len(maxima) >= 2:
            spacing = float(np.mean(np.diff(maxima)))
        if len(peaks) >= 2 and len(troughs) >= 1:
            hi = float(np.mean(pw[peaks]))
            lo = float(np.mean(pw[troughs]))
            if hi + lo > 0:
                visibility = (hi - lo) / (hi + lo)

    contrast = 0.0
    if pw.size and pw.sum() > 0:
        kappa = params.mass * d_effective / (params.hbar * t_flight)
        contrast = float(np.abs(np.sum(pw * np.exp(-1j * kappa * xw))) / np.sum(pw))

    return FringeReport(
        positions=positions,
        p_cond=p_cond,
        p_analytic=np.asarray(p_analytic, dtype=float),
        p1=float(p1),
        maxima=maxima,
        spacing=spacing,
        spacing_expected=float(spacing_expected),
        visibility=float(visibility),
        correlation=correlation,
        fringe_contrast=contrast,
        d_effective=float(d_effective),
        t_flight=float(t_flight),
        window_halfwidth=float(window),
    )


def _warn_on_wraparound(grid: Grid, params: PhysParams, t_flight: float,
                        window: float, d_effective: float) -> None:
    """Warn when band-edge waves can wrap into the comparison window.

    A slit-projected state carries the full momentum band up to
    ``k_max = pi/dx``.  On the periodic lattice those components reach the
    image of the sources after ``(L - window - d/2)/k_max`` time units;
    beyond that the central pattern is contaminated.
    """
    k_max = np.pi / grid.dx
    reach = params.hbar * k_max * abs(t_flight) / params.mass
    clean = (grid.x_max - grid.x_min) - window - d_effective / 2
    if reach > clean:
        warnings.warn(
            f"slit waves wrap around the periodic box: band-edge reach "
            f"{reach:.3g} exceeds the clean distance {clean:.3g}; the fringe "
            f"pattern inside |s| <= {window:.3g} is aliased (enlarge the box "
            f"or reduce the flight time)",
            RuntimeWarning,
            stacklevel=3,
        )


def _bin_probabilities(grid: Grid, density: np.ndarray,
                       width: float | None) -> tuple[np.ndarray, np.ndarray]:
    """Integrate a per-site probability array over a tiling of bins."""
    if width is None:
        return grid.x.copy(), density.copy()
    q = max(1, int(round(width / grid.dx)))
    starts = np.arange(0, grid.n, q)
    sums = np.add.reduceat(density, starts)
    stops = np.minimum(starts + q, grid.n)
    centers = grid.x_min + (starts + stops - 1) / 2 * grid.dx
    return centers, sums


def conditional_fringe(scenario: Scenario, open_slits: str = "both") -> FringeReport:
    """Run the projective double-slit pipeline and report ``p(2|1)`` per bin.

    Pipeline: Gaussian packet, free flight to the slit screen, diagonal slit
    projection (with renormalization by the passage probability p1), free
    flight to the detection screen, bin-integrated intensities.  The leg after
    the projection runs without the guard-band check: a projected state is
    deliberately full-bandwidth, and wrap-around is instead flagged by a
    warning when it can touch the comparison window.

    ``open_slits`` selects "both" (default), "left", or "right"; single-slit
    runs keep the two-slit screen geometry for the analytic comparison, which
    they are expected not to match.
    """
    grid = scenario.build_grid()
    params = scenario.params()
    screen = scenario.slit_screen()
    left, right = aperture_indices(grid, screen)
    if open_slits == "both":
        idx = np.concatenate([left, right])
    elif open_slits == "left":
        idx = left
    elif open_slits == "right":
        idx = right
    else:
        raise ValueError(f"open_slits must be both/left/right (got {open_slits!r})")

    d_eff = float(grid.x[grid.index_of(screen.d / 2)]
                  - grid.x[grid.index_of(-screen.d / 2)])

    psi0 = scenario.build_packet(grid)
    at_screen = evolve_state(psi0, screen.t1, params)

    masked = np.zeros(grid.n, dtype=np.complex128)
    masked[idx] = at_screen.amps[idx]
    p1 = float(np.sum(np.abs(masked[idx]) ** 2) * grid.dx)
    if p1 <= MIN_PASSAGE_PROBABILITY:
        raise ValueError(f"slit-passage probability {p1:.3e} vanishes; "
                         f"nothing to condition on")
    passed = StateVector(grid, masked / np.sqrt(p1))

    t_flight = scenario.flight_time
    spacing = 2.0 * np.pi * params.hbar * t_flight / (params.mass * d_eff)
    _warn_on_wraparound(grid, params, t_flight, 5.0 * spacing, d_eff)

    final = evolve_state(passed, t_flight, params, check_guard=False)
    density = np.abs(final.amps) ** 2 * grid.dx
    centers, probs = _bin_probabilities(grid, density, scenario.pixel_width)
    return analyze_pattern(centers, probs, p1, d_eff, t_flight, params)
