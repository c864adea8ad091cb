"""Command-line front end.

Commands
--------
``fringebench fringe <scenario> --out <dir>``
    Run the projective double-slit pipeline; write ``fringe.csv``
    (``s,p_cond,p_analytic``) and ``fringe_summary.json``.
``fringebench verify <suite> --seed <n> --out <dir>``
    Run a verification suite (forms|purify|locality|spread|all); write
    ``verify_<suite>.json`` (plus ``spread.csv`` for the spread suite).
``fringebench commutators <spec> --out <dir>``
    Run a windowed-commutator scan; write ``commutators.csv``.

Exit codes: 0 success, 1 runtime failure, 2 parse error, 3 validation error,
4 verification failure.  Outputs are byte-identical for identical inputs and
seed.  ``FRINGEBENCH_THREADS`` caps BLAS/FFT parallelism (0 = automatic); the
package's own code is single-threaded.

Heavy imports are deferred until after the thread cap is applied, which is
why handlers import lazily.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_VERIFY = 4

_CSV_FLOAT = "%.17g"


def _apply_thread_cap() -> None:
    raw = os.environ.get("FRINGEBENCH_THREADS")
    if raw is None:
        return
    try:
        cap = int(raw)
    except ValueError:
        raise _ThreadCapError(f"FRINGEBENCH_THREADS must be an integer (got {raw!r})")
    if cap < 0:
        raise _ThreadCapError(f"FRINGEBENCH_THREADS must be >= 0 (got {cap})")
    if cap == 0:
        return  # automatic: leave library defaults alone
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, str(cap))


class _ThreadCapError(Exception):
    pass


def _fmt(value: float) -> str:
    return _CSV_FLOAT % value


def _write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _nan_to_none(value: float):
    import math

    return value if math.isfinite(value) else None


def cmd_fringe(args) -> int:
    from .measurement import conditional_fringe
    from .scenario import load_scenario

    scenario = load_scenario(args.scenario)
    report = conditional_fringe(scenario)
    os.makedirs(args.out, exist_ok=True)
    _write_csv(
        os.path.join(args.out, "fringe.csv"),
        ["s", "p_cond", "p_analytic"],
        zip(report.positions, report.p_cond, report.p_analytic),
    )
    summary = {
        "p1": report.p1,
        "spacing": _nan_to_none(report.spacing),
        "spacing_expected": report.spacing_expected,
        "visibility": report.visibility,
        "correlation": _nan_to_none(report.correlation),
        "fringe_contrast": report.fringe_contrast,
        "d_effective": report.d_effective,
        "t_flight": report.t_flight,
        "window_halfwidth": report.window_halfwidth,
        "n_maxima": len(report.maxima),
    }
    _write_json(os.path.join(args.out, "fringe_summary.json"), summary)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_suite

    result = run_suite(args.suite, args.seed)
    os.makedirs(args.out, exist_ok=True)
    _write_json(os.path.join(args.out, f"verify_{args.suite}.json"),
                result.to_json_dict())
    curve = result.extras.get("spread_curve")
    if curve is not None:
        _write_csv(
            os.path.join(args.out, "spread.csv"),
            ["t", "sigma", "sigma_analytic"],
            zip(curve["t"], curve["sigma"], curve["sigma_analytic"]),
        )
    for check in result.checks:
        status = "pass" if check.passed else "FAIL"
        print(f"[{status}] {check.name}: deviation {check.deviation:.3e} "
              f"(tol {check.tolerance:.3e})")
    if not result.all_passed:
        print("verification failed", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_commutators(args) -> int:
    from .locality import local_commutator_scan
    from .scenario import load_scan_spec

    spec = load_scan_spec(args.spec)
    grid = spec.build_grid()
    state = spec.build_packet(grid)
    report = local_commutator_scan(spec.scan_centers, spec.scan_times,
                                   spec.scan_width, state, spec.params())
    os.makedirs(args.out, exist_ok=True)
    _write_csv(
        os.path.join(args.out, "commutators.csv"),
        ["x_a", "x_b", "t_a", "t_b", "re", "im", "predicted_abs", "deviation_abs"],
        (
            (e.x_a, e.x_b, e.t_a, e.t_b, e.value.real, e.value.imag,
             abs(e.predicted), e.deviation)
            for e in report.entries
        ),
    )
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fringebench",
        description="Lattice double-slit pipelines and their verification suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fringe = sub.add_parser("fringe", help="run the projective fringe pipeline")
    p_fringe.add_argument("scenario", help="scenario file (key = value lines)")
    p_fringe.add_argument("--out", default=".", help="output directory")
    p_fringe.set_defaults(handler=cmd_fringe)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("suite",
                          choices=["forms", "purify", "locality", "spread", "all"])
    p_verify.add_argument("--seed", type=int, default=7, help="random seed")
    p_verify.add_argument("--out", default=".", help="output directory")
    p_verify.set_defaults(handler=cmd_verify)

    p_comm = sub.add_parser("commutators", help="run a windowed-commutator scan")
    p_comm.add_argument("spec", help="scan spec file (key = value lines)")
    p_comm.add_argument("--out", default=".", help="output directory")
    p_comm.set_defaults(handler=cmd_commutators)
    return parser


def main(argv=None) -> int:
    try:
        _apply_thread_cap()
    except _ThreadCapError as exc:
        print(f"fringebench: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    args = _build_parser().parse_args(argv)

    from .scenario import ScenarioParseError, ScenarioValidationError

    try:
        return args.handler(args)
    except ScenarioParseError as exc:
        print(f"fringebench: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ScenarioValidationError as exc:
        print(f"fringebench: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports, not raises
        print(f"fringebench: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
