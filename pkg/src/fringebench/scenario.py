"""Scenario configuration: flat ``key = value`` files describing one
double-slit run, with validation that names the offending field.

Format: one ``key = value`` pair per line, ``#`` starts a comment, blank
lines ignored.  Numbers are decimal with optional exponent.  The detection
time is given either directly as ``t2`` or as a flight distance/transverse
momentum pair (``distance``, ``p_y``) converted through the time-of-flight
rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .lattice import Grid, PhysParams, StateVector, gaussian_packet, make_grid
from .dynamics import time_of_flight

__all__ = [
    "Scenario",
    "ScanSpec",
    "ScenarioParseError",
    "ScenarioValidationError",
    "load_scenario",
    "load_scan_spec",
    "parse_key_values",
]


class ScenarioParseError(Exception):
    """Malformed scenario file (syntax or unreadable value)."""


class ScenarioValidationError(Exception):
    """Well-formed scenario that violates a field invariant."""


def parse_key_values(text: str) -> dict[str, str]:
    """Parse the flat key = value format into raw strings."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioParseError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ScenarioParseError(f"line {lineno}: empty key or value in {raw!r}")
        if key in out:
            raise ScenarioParseError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _as_float(pairs: dict[str, str], key: str) -> float:
    try:
        val = float(pairs[key])
    except ValueError as exc:
        raise ScenarioParseError(f"value for {key!r} is not a number: {pairs[key]!r}") from exc
    if not math.isfinite(val):
        raise ScenarioParseError(f"value for {key!r} is not finite: {pairs[key]!r}")
    return val


def _as_int(pairs: dict[str, str], key: str) -> int:
    val = _as_float(pairs, key)
    if val != int(val):
        raise ScenarioValidationError(f"{key} must be an integer (got {val})")
    return int(val)


def _as_float_list(pairs: dict[str, str], key: str) -> tuple[float, ...]:
    items = [s for s in pairs[key].split(",") if s.strip()]
    if not items:
        raise ScenarioParseError(f"value for {key!r} is an empty list")
    try:
        return tuple(float(s) for s in items)
    except ValueError as exc:
        raise ScenarioParseError(f"value for {key!r} is not a number list: {pairs[key]!r}") from exc


def _require(pairs: dict[str, str], keys: tuple[str, ...], what: str) -> None:
    missing = [k for k in keys if k not in pairs]
    if missing:
        raise ScenarioValidationError(f"{what} is missing required field(s): {', '.join(missing)}")


@dataclass(frozen=True)
class Scenario:
    """One validated double-slit run: grid, packet, slits, detection."""

    n: int
    x_min: float
    x_max: float
    hbar: float
    mass: float
    x0: float
    p0: float
    sigma0: float
    d: float
    slit_width: float
    t1: float
    t2: float
    pixel_width: float | None = None
    screen_cells: int = 4
    screen_theta: float = math.pi / 2

    def params(self) -> PhysParams:
        return PhysParams(hbar=self.hbar, mass=self.mass)

    def build_grid(self) -> Grid:
        return make_grid(self.n, self.x_min, self.x_max)

    def build_packet(self, grid: Grid | None = None) -> StateVector:
        grid = grid or self.build_grid()
        return gaussian_packet(grid, self.x0, self.p0, self.sigma0, self.params())

    def slit_screen(self):
        from .measurement import SlitScreen

        return SlitScreen(d=self.d, width=self.slit_width, t1=self.t1)

    @property
    def flight_time(self) -> float:
        return self.t2 - self.t1


def _validate_scenario(s: Scenario) -> Scenario:
    def bad(field, msg):
        raise ScenarioValidationError(f"{field}: {msg}")

    n = s.n
    if n < 8 or (n & (n - 1)) != 0:
        bad("n", f"must be a power of two >= 8 (got {n})")
    if s.x_max <= s.x_min:
        bad("x_max", f"must exceed x_min (got [{s.x_min}, {s.x_max}])")
    if s.hbar <= 0:
        bad("hbar", f"must be positive (got {s.hbar})")
    if s.mass <= 0:
        bad("mass", f"must be positive (got {s.mass})")
    dx = (s.x_max - s.x_min) / n
    if s.sigma0 <= 0:
        bad("sigma0", f"must be positive (got {s.sigma0})")
    if s.sigma0 < 2 * dx:
        bad("sigma0", f"must be at least 2*dx = {2 * dx} (got {s.sigma0})")
    if s.d <= 0:
        bad("d", f"must be positive (got {s.d})")
    if s.slit_width < 0:
        bad("slit_width", f"must be non-negative (got {s.slit_width})")
    if s.t1 < 0:
        bad("t1", f"must be non-negative (got {s.t1})")
    if not s.t2 > s.t1:
        bad("t2", f"must exceed t1 = {s.t1} (got {s.t2})")
    if s.pixel_width is not None and s.pixel_width < dx:
        bad("pixel_width", f"must be at least dx = {dx} (got {s.pixel_width})")
    if not 3 <= s.screen_cells <= 10:
        bad("screen_cells", f"must be between 3 and 10 (got {s.screen_cells})")
    if not 0 < s.screen_theta <= math.pi:
        bad("screen_theta", f"must lie in (0, pi] (got {s.screen_theta})")
    grid = s.build_grid()
    for side, pos in (("-d/2", -s.d / 2), ("+d/2", s.d / 2)):
        try:
            j = grid.index_of(pos)
        except ValueError as exc:
            bad("d", f"slit center {side} = {pos} does not snap to the grid: {exc}")
        if j <= 0 or j >= n - 1:
            bad("d", f"slit center {side} = {pos} is not in the grid interior")
    return s


_SCENARIO_KEYS = {
    "n", "x_min", "x_max", "hbar", "mass", "x0", "p0", "sigma0",
    "d", "slit_width", "t1", "t2", "distance", "p_y",
    "pixel_width", "screen_cells", "screen_theta",
}


def scenario_from_pairs(pairs: dict[str, str]) -> Scenario:
    unknown = sorted(set(pairs) - _SCENARIO_KEYS)
    if unknown:
        raise ScenarioValidationError(f"unknown scenario field(s): {', '.join(unknown)}")
    _require(pairs, ("n", "x_min", "x_max", "sigma0", "d", "t1"), "scenario")

    hbar = _as_float(pairs, "hbar") if "hbar" in pairs else 1.0
    mass = _as_float(pairs, "mass") if "mass" in pairs else 1.0
    t1 = _as_float(pairs, "t1")

    has_t2 = "t2" in pairs
    has_tof = "distance" in pairs or "p_y" in pairs
    if has_t2 and has_tof:
        raise ScenarioValidationError("t2: give either t2 or (distance, p_y), not both")
    if has_tof:
        _require(pairs, ("distance", "p_y"), "time-of-flight detection spec")
        if hbar <= 0 or mass <= 0:
            raise ScenarioValidationError("hbar/mass: must be positive")
        p_y = _as_float(pairs, "p_y")
        if p_y <= 0:
            raise ScenarioValidationError(f"p_y: must be positive (got {p_y})")
        t2 = t1 + time_of_flight(_as_float(pairs, "distance"), p_y,
                                 PhysParams(hbar=hbar, mass=mass))
    elif has_t2:
        t2 = _as_float(pairs, "t2")
    else:
        raise ScenarioValidationError("t2: scenario needs t2 or (distance, p_y)")

    scen = Scenario(
        n=_as_int(pairs, "n"),
        x_min=_as_float(pairs, "x_min"),
        x_max=_as_float(pairs, "x_max"),
        hbar=hbar,
        mass=mass,
        x0=_as_float(pairs, "x0") if "x0" in pairs else 0.0,
        p0=_as_float(pairs, "p0") if "p0" in pairs else 0.0,
        sigma0=_as_float(pairs, "sigma0"),
        d=_as_float(pairs, "d"),
        slit_width=_as_float(pairs, "slit_width") if "slit_width" in pairs else 0.0,
        t1=t1,
        t2=t2,
        pixel_width=_as_float(pairs, "pixel_width") if "pixel_width" in pairs else None,
        screen_cells=_as_int(pairs, "screen_cells") if "screen_cells" in pairs else 4,
        screen_theta=_as_float(pairs, "screen_theta") if "screen_theta" in pairs else math.pi / 2,
    )
    return _validate_scenario(scen)


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file."""
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read scenario file {path}: {exc}") from exc
    return scenario_from_pairs(parse_key_values(text))


@dataclass(frozen=True)
class ScanSpec:
    """Grid, probe packet, and window layout for a commutator scan."""

    n: int
    x_min: float
    x_max: float
    hbar: float
    mass: float
    x0: float
    p0: float
    sigma0: float
    scan_centers: tuple[float, ...]
    scan_times: tuple[float, ...]
    scan_width: float

    def params(self) -> PhysParams:
        return PhysParams(hbar=self.hbar, mass=self.mass)

    def build_grid(self) -> Grid:
        return make_grid(self.n, self.x_min, self.x_max)

    def build_packet(self, grid: Grid | None = None) -> StateVector:
        grid = grid or self.build_grid()
        return gaussian_packet(grid, self.x0, self.p0, self.sigma0, self.params())


_SCAN_KEYS = {
    "n", "x_min", "x_max", "hbar", "mass", "x0", "p0", "sigma0",
    "scan_centers", "scan_times", "scan_width",
}


def load_scan_spec(path) -> ScanSpec:
    """Read and validate a commutator-scan spec file."""
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read scan spec {path}: {exc}") from exc
    pairs = parse_key_values(text)
    unknown = sorted(set(pairs) - _SCAN_KEYS)
    if unknown:
        raise ScenarioValidationError(f"unknown scan field(s): {', '.join(unknown)}")
    _require(pairs, ("n", "x_min", "x_max", "sigma0", "scan_centers", "scan_times",
                     "scan_width"), "scan spec")
    spec = ScanSpec(
        n=_as_int(pairs, "n"),
        x_min=_as_float(pairs, "x_min"),
        x_max=_as_float(pairs, "x_max"),
        hbar=_as_float(pairs, "hbar") if "hbar" in pairs else 1.0,
        mass=_as_float(pairs, "mass") if "mass" in pairs else 1.0,
        x0=_as_float(pairs, "x0") if "x0" in pairs else 0.0,
        p0=_as_float(pairs, "p0") if "p0" in pairs else 0.0,
        sigma0=_as_float(pairs, "sigma0"),
        scan_centers=_as_float_list(pairs, "scan_centers"),
        scan_times=_as_float_list(pairs, "scan_times"),
        scan_width=_as_float(pairs, "scan_width"),
    )
    if spec.n < 8 or (spec.n & (spec.n - 1)) != 0:
        raise ScenarioValidationError(f"n: must be a power of two >= 8 (got {spec.n})")
    if spec.n > 1024:
        raise ScenarioValidationError(f"n: commutator scans build dense operators; keep n <= 1024 (got {spec.n})")
    if spec.x_max <= spec.x_min:
        raise ScenarioValidationError(f"x_max: must exceed x_min")
    if spec.sigma0 <= 0:
        raise ScenarioValidationError(f"sigma0: must be positive (got {spec.sigma0})")
    if spec.scan_width <= 0:
        raise ScenarioValidationError(f"scan_width: must be positive (got {spec.scan_width})")
    return spec
