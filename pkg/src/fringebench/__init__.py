"""Lattice simulator for sequential position measurements on a free particle.

Submodules are loaded lazily so the command-line entry point can apply the
``FRINGEBENCH_THREADS`` cap before any numerical library is imported.
"""

__version__ = "0.1.0"

_EXPORTS = {
    "lattice": [
        "PhysParams", "Grid", "StateVector", "DensityOperator", "LinearOperator",
        "make_grid", "gaussian_packet", "position_operator", "momentum_operator",
        "expectation", "dispersion", "position_spread", "momentum_expectation",
    ],
    "dynamics": [
        "free_unitary", "evolve_state", "analytic_kernel", "kernel_propagate",
        "heisenberg_conjugate", "heisenberg_position", "time_of_flight",
    ],
    "measurement": [
        "SlitScreen", "DetectorPixel", "FringeReport", "aperture_indices",
        "slit_projector", "pixel_projector", "pixel_tiling",
        "p_seq_schrodinger", "p_seq_heisenberg", "p_seq_double_heisenberg",
        "p_rank_one", "analytic_fringe", "conditional_fringe", "analyze_pattern",
    ],
    "purification": [
        "ScreenRegister", "JointState", "make_screen_register",
        "interaction_unitary", "ScreenInteraction", "embed",
        "postselect_screen_zero", "purified_double_slit", "trace_distance_pure",
    ],
    "locality": [
        "commutator", "two_time_position_commutator", "DispersionProduct",
        "dispersion_product", "local_field_operator", "ScanEntry",
        "CommutatorReport", "local_commutator_scan",
    ],
    "scenario": [
        "Scenario", "ScanSpec", "ScenarioParseError", "ScenarioValidationError",
        "load_scenario", "load_scan_spec",
    ],
}

_ORIGIN = {name: mod for mod, names in _EXPORTS.items() for name in names}

__all__ = sorted(_ORIGIN) + ["__version__"]


def __getattr__(name):
    mod = _ORIGIN.get(name)
    if mod is None:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
    import importlib

    value = getattr(importlib.import_module(f".{mod}", __name__), name)
    globals()[name] = value
    return value


def __dir__():
    return __all__
