"""Command-line interface.

Subcommands
-----------
eigen           first two Dirichlet eigenvalues and the gap at one apex
sweep           certified sweep over an apex window, CSV output, resumable
scaling         thin-triangle gap growth study over a list of heights
lame-verify     quadrature check of the equilateral integral tables
lame-spectrum   distinct equilateral eigenvalues with multiplicities
deform-minimize minimum first-order gap slope over directions and eigenspace
deform-slope    slope diagnostics for one deformation direction
plot-grid       log-gap values over a uniform (tau, nu) shape lattice

Exit codes: 0 success, 1 computation or check failure, 2 usage error,
3 budget exhausted (sweep stopped early by --max-cells / --max-rows).

Configuration can come from a plain-text key=value file via --config; flags
given on the command line override file entries.  Thread count falls back to
the TRIGAP_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Sequence

import numpy as np

from .deformation import (
    DeformationDirection,
    SecondEigenspaceCoeffs,
    alpha_bound,
    gamma_bounds,
    lambda1_slope,
    lambda1_slope_closed_form,
    minimize_I,
    preserves_diameter,
    slope_gap_I,
    slope_gap_I_quadrature,
    slope_gap_branch_extremes,
)
from .eigensolver import ConvergenceError, gap_with_error
from .geometry import GAP_THRESHOLD, Triangle
from .lame import distinct_spectrum
from .sweep import (
    CSV_COLUMNS,
    SweepFailure,
    SweepPolicy,
    SweepState,
    SweepWindow,
    cells_from_csv,
    coverage_audit,
    format_cell_row,
    gap_grid,
    run_sweep,
)
from .tables import verify_integral_tables

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

_STORE_TRUE_FLAGS = {"resume", "no-audit"}


def _g(value: float) -> str:
    return format(float(value), ".17g")


def _parse_floats(text: str, count: int, what: str) -> tuple[float, ...]:
    parts = [p for p in text.split(",") if p.strip() != ""]
    if len(parts) != count:
        raise ValueError(f"{what} needs {count} comma-separated numbers, got {text!r}")
    return tuple(float(p) for p in parts)


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("TRIGAP_THREADS", "1")))
    except ValueError:
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trigap",
        description="Certified spectral-gap computations for Euclidean triangles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", help="eigenvalues and gap at one apex")
    p.add_argument("--apex", required=True, help="apex coordinates x,y")
    p.add_argument("--accuracy", type=float, default=1e-3, help="gap error target")
    p.add_argument("--max-level", type=int, default=None)
    p.add_argument("--out", default=None, help="optional CSV path")

    p = sub.add_parser("sweep", help="certified sweep over an apex window")
    p.add_argument("--window", default="0.5,1.0,0.3,0.95", help="x0,x1,y0,y1")
    p.add_argument(
        "--accuracy", type=float, default=0.25, help="initial per-cell gap target"
    )
    p.add_argument("--exclusion-radius", type=float, default=4e-4)
    p.add_argument("--max-rounds", type=int, default=3)
    p.add_argument("--max-level", type=int, default=None)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--out", default="sweep_cells.csv")
    p.add_argument("--state", default=None, help="state file (default <out>.state)")
    p.add_argument("--resume", action="store_true")
    p.add_argument("--max-cells", type=int, default=None)
    p.add_argument("--max-rows", type=int, default=None)
    p.add_argument("--no-audit", action="store_true")
    p.add_argument("--audit-spacing", type=float, default=1e-4)

    p = sub.add_parser("scaling", help="thin-triangle gap growth study")
    p.add_argument("--heights", default="0.1,0.05,0.02", help="descending heights")
    p.add_argument("--x0", type=float, default=0.5)
    p.add_argument(
        "--accuracy",
        type=float,
        default=0.02,
        help="relative gap target per height (absolute target set from a coarse pass)",
    )
    p.add_argument(
        "--max-level",
        type=int,
        default=10,
        help="refinement cap; thin meshes above level 10 exceed practical memory",
    )
    p.add_argument("--out", default=None)

    p = sub.add_parser("lame-verify", help="verify equilateral integral tables")
    p.add_argument("--quad-degree", type=int, default=6)
    p.add_argument("--out", default=None)

    p = sub.add_parser("lame-spectrum", help="distinct equilateral eigenvalues")
    p.add_argument("--count", type=int, default=5)

    p = sub.add_parser("deform-minimize", help="minimize the first-order gap slope")
    p.add_argument("--grid", type=int, default=10000)

    p = sub.add_parser("deform-slope", help="slope diagnostics for one direction")
    p.add_argument(
        "--dir",
        default="0.8660254037844386,-0.5",
        help="deformation direction a,b (normalized)",
    )
    p.add_argument("--coeffs", default=None, help="eigenspace coefficients alpha,beta")
    p.add_argument("--t", type=float, default=4e-4, help="magnitude for metric bounds")

    p = sub.add_parser("plot-grid", help="log-gap over a (tau, nu) lattice")
    p.add_argument("--tau-steps", type=int, default=21)
    p.add_argument("--nu-steps", type=int, default=10)
    p.add_argument("--accuracy", type=float, default=0.05)
    p.add_argument("--max-level", type=int, default=8)
    p.add_argument("--out", default="gap_grid.csv")

    return parser


def _apply_config(argv: list[str]) -> list[str]:
    """Splice --config file entries in as flags right after the subcommand.

    Command-line flags appear later and therefore win (argparse keeps the
    last occurrence of a plain store option).
    """
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise ValueError("--config needs a file path")
    if idx == 0:
        raise ValueError("--config must follow a subcommand")
    path = argv[idx + 1]
    rest = argv[:idx] + argv[idx + 2 :]
    tokens: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            key = key.strip().lstrip("-")
            value = value.strip()
            if not key:
                raise ValueError(f"malformed config line: {raw!r}")
            if key in _STORE_TRUE_FLAGS:
                if value.lower() in ("1", "true", "yes", ""):
                    tokens.append(f"--{key}")
            else:
                tokens.extend([f"--{key}", value])
    return [rest[0], *tokens, *rest[1:]]


def cmd_eigen(args: argparse.Namespace) -> int:
    try:
        x, y = _parse_floats(args.apex, 2, "--apex")
        triangle = Triangle(x, y)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        spectrum = gap_with_error(triangle, args.accuracy, max_level=args.max_level)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    e1, e2 = spectrum.error_bounds
    print(f"apex = ({_g(x)}, {_g(y)})")
    print(f"lambda1 = {_g(spectrum.lambda1)} +- {_g(e1)}")
    print(f"lambda2 = {_g(spectrum.lambda2)} +- {_g(e2)}")
    print(f"diameter = {_g(spectrum.diameter)}")
    print(f"xi = {_g(spectrum.xi)} +- {_g(spectrum.xi_error)}")
    print(f"threshold = {_g(GAP_THRESHOLD)}")
    print(f"levels = {spectrum.levels[0]},{spectrum.levels[1]}")
    print(f"accuracy_met = {'true' if spectrum.accuracy_met else 'false'}")
    if not spectrum.accuracy_met:
        print("warning: requested accuracy not reached at the level cap", file=sys.stderr)
    if args.out:
        header = (
            "x,y,lambda1,lambda2,err_lambda1,err_lambda2,"
            "xi,xi_error,diameter,level_coarse,level_fine,accuracy_met"
        )
        row = ",".join(
            [
                _g(x),
                _g(y),
                _g(spectrum.lambda1),
                _g(spectrum.lambda2),
                _g(e1),
                _g(e2),
                _g(spectrum.xi),
                _g(spectrum.xi_error),
                _g(spectrum.diameter),
                str(spectrum.levels[0]),
                str(spectrum.levels[1]),
                "true" if spectrum.accuracy_met else "false",
            ]
        )
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(header + "\n" + row + "\n")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        window = SweepWindow(*_parse_floats(args.window, 4, "--window"))
        policy = SweepPolicy(
            initial_accuracy=args.accuracy,
            exclusion_radius=args.exclusion_radius,
            max_accuracy_rounds=args.max_rounds,
            max_level=args.max_level,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    state_path = args.state if args.state else args.out + ".state"

    prior_cells: tuple = ()
    resume_state = None
    if args.resume:
        try:
            with open(state_path, "r", encoding="utf-8") as fh:
                resume_state = SweepState.from_text(fh.read())
        except OSError as exc:
            print(f"error: cannot read state file: {exc}", file=sys.stderr)
            return EXIT_USAGE
        try:
            with open(args.out, "r", encoding="utf-8") as fh:
                prior_cells = cells_from_csv(fh.read())
        except OSError:
            prior_cells = ()
        if len(prior_cells) != resume_state.cells_emitted:
            print(
                f"error: state file says {resume_state.cells_emitted} cells but "
                f"{args.out} holds {len(prior_cells)}",
                file=sys.stderr,
            )
            return EXIT_USAGE

    mode = "a" if args.resume else "w"
    out_fh = open(args.out, mode, encoding="utf-8", newline="")
    if not args.resume:
        out_fh.write(",".join(CSV_COLUMNS) + "\n")

    def sink(cell) -> None:
        out_fh.write(format_cell_row(cell) + "\n")
        out_fh.flush()

    def state_sink(state: SweepState) -> None:
        with open(state_path, "w", encoding="utf-8") as fh:
            fh.write(state.to_text())

    try:
        result = run_sweep(
            window,
            policy,
            sink=sink,
            state_sink=state_sink,
            resume_from=resume_state,
            threads=args.threads,
            max_rows=args.max_rows,
            max_cells=args.max_cells,
        )
    except ValueError as exc:
        out_fh.close()
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if not out_fh.closed:
            out_fh.close()

    print(f"cells this run = {len(result.cells)}")
    print(f"cells total = {result.state.cells_emitted}")
    print(f"rows completed = {result.state.j}")
    print(f"next seed y = {_g(result.state.y)}")
    print(f"reason = {result.reason}")
    if result.reason == "failed":
        print(f"failure: {result.failure}", file=sys.stderr)
        return EXIT_FAIL
    if result.reason == "budget":
        print("stopped at the row boundary after exhausting the budget")
        return EXIT_BUDGET
    if args.no_audit:
        return EXIT_OK
    all_cells = tuple(prior_cells) + result.cells
    report = coverage_audit(
        all_cells,
        window,
        spacing=args.audit_spacing,
        exclusion_radius=args.exclusion_radius,
    )
    print(f"audit points = {report.total_points}")
    print(f"audit uncovered = {report.uncovered_count}")
    if not report.passed:
        for px, py in report.uncovered_sample:
            print(f"uncovered: ({_g(px)}, {_g(py)})", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_scaling(args: argparse.Namespace) -> int:
    try:
        heights = [
            float(p) for p in args.heights.split(",") if p.strip() != ""
        ]
        if not heights:
            raise ValueError("no heights given")
        if any(h < 0.01 for h in heights):
            raise ValueError("heights below 0.01 are outside the solver's range")
        if any(b >= a for a, b in zip(heights, heights[1:])):
            raise ValueError("heights must be strictly descending")
        if not 0.5 <= args.x0 <= 1.0:
            raise ValueError(f"x0 must lie in [0.5, 1], got {args.x0}")
        if not 0.0 < args.accuracy < 1.0:
            raise ValueError("relative accuracy must lie in (0, 1)")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    rows = []
    failures = 0
    for h in heights:
        triangle = Triangle(args.x0, h)
        try:
            coarse = gap_with_error(triangle, 1e18, max_level=7)
            target = max(args.accuracy * coarse.xi, 1e-6)
            spectrum = gap_with_error(triangle, target, max_level=args.max_level)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except ConvergenceError as exc:
            print(f"height {h}: solver failure: {exc}", file=sys.stderr)
            failures += 1
            continue
        scaled = spectrum.xi * h ** (4.0 / 3.0)
        rows.append((h, spectrum, scaled))
        flag = "" if spectrum.accuracy_met else "  [accuracy not met]"
        print(
            f"h = {_g(h)}  xi = {_g(spectrum.xi)} +- {_g(spectrum.xi_error)}"
            f"  xi*h^(4/3) = {_g(scaled)}{flag}"
        )
    if len(rows) >= 2:
        logs_h = np.log([r[0] for r in rows])
        logs_xi = np.log([r[1].xi for r in rows])
        slope = float(np.polyfit(logs_h, logs_xi, 1)[0])
        print(f"log-log slope = {_g(slope)}")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(
                "height,lambda1,lambda2,xi,xi_error,xi_times_h43,accuracy_met\n"
            )
            for h, spectrum, scaled in rows:
                fh.write(
                    ",".join(
                        [
                            _g(h),
                            _g(spectrum.lambda1),
                            _g(spectrum.lambda2),
                            _g(spectrum.xi),
                            _g(spectrum.xi_error),
                            _g(scaled),
                            "true" if spectrum.accuracy_met else "false",
                        ]
                    )
                    + "\n"
                )
    return EXIT_FAIL if failures else EXIT_OK


def cmd_lame_verify(args: argparse.Namespace) -> int:
    try:
        report = verify_integral_tables(quad_degree=args.quad_degree)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    table_ok = 0
    for row in report.rows:
        marker = "ok" if row.status == "ok" else row.status
        if row.kind == "table" and row.status == "ok":
            table_ok += 1
        if row.status != "ok":
            print(
                f"{row.name}: {marker}  stated={_g(row.stated_value)} "
                f"computed={_g(row.computed_value)}  ({row.note})"
            )
    total_table = sum(1 for row in report.rows if row.kind == "table")
    print(f"table integrals ok = {table_ok}/{total_table}")
    print(f"quadrature converged = {'true' if report.converged else 'false'}")
    flagged = [row.name for row in report.flagged]
    print(f"flagged entries = {','.join(flagged) if flagged else 'none'}")
    if args.out:
        report.write_csv(args.out)
    return EXIT_OK if report.table_rows_ok and report.converged else EXIT_FAIL


def cmd_lame_spectrum(args: argparse.Namespace) -> int:
    if args.count < 1:
        print("error: --count must be positive", file=sys.stderr)
        return EXIT_USAGE
    for k, level in enumerate(distinct_spectrum(args.count), start=1):
        pairs = " ".join(f"({p.m},{p.n})" for p in level.representative_pairs)
        print(
            f"lambda_{k} = {_g(level.value)}  multiplicity = {level.multiplicity}"
            f"  pairs: {pairs}"
        )
    return EXIT_OK


def cmd_deform_minimize(args: argparse.Namespace) -> int:
    if args.grid < 100:
        print("error: --grid must be at least 100", file=sys.stderr)
        return EXIT_USAGE
    result = minimize_I(grid=args.grid)
    print(f"minimum I = {_g(result.value)}")
    print(f"closed form = {_g(result.closed_form_minimum)}")
    print(f"difference = {_g(abs(result.value - result.closed_form_minimum))}")
    print(f"coeffs = ({_g(result.coeffs.alpha)}, {_g(result.coeffs.beta)})")
    print(f"direction = ({_g(result.direction.a)}, {_g(result.direction.b)})")
    print(f"angle_s = {_g(result.angle_s)}")
    return EXIT_OK


def cmd_deform_slope(args: argparse.Namespace) -> int:
    try:
        a, b = _parse_floats(args.dir, 2, "--dir")
        norm = math.hypot(a, b)
        if norm == 0.0:
            raise ValueError("direction must be nonzero")
        direction = DeformationDirection(a / norm, b / norm)
        coeffs = None
        if args.coeffs is not None:
            ca, cb = _parse_floats(args.coeffs, 2, "--coeffs")
            cnorm = math.hypot(ca, cb)
            if cnorm == 0.0:
                raise ValueError("coefficients must be nonzero")
            coeffs = SecondEigenspaceCoeffs(ca / cnorm, cb / cnorm)
        if args.t < 0.0:
            raise ValueError("t must be non-negative")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"direction = ({_g(direction.a)}, {_g(direction.b)})")
    print(
        "preserves_diameter = "
        + ("true" if preserves_diameter(direction) else "false")
    )
    print(f"lambda1_slope = {_g(lambda1_slope_closed_form(direction))}")
    print(f"lambda1_slope_quadrature = {_g(lambda1_slope(direction))}")
    lo, hi = slope_gap_branch_extremes(direction)
    print(f"I_min = {_g(lo)}")
    print(f"I_max = {_g(hi)}")
    if coeffs is not None:
        print(f"I = {_g(slope_gap_I(coeffs, direction))}")
        print(f"I_quadrature = {_g(slope_gap_I_quadrature(coeffs, direction))}")
    bounds = gamma_bounds(math.sqrt(3.0) / 2.0, direction, args.t)
    print(f"gamma_minus = {_g(bounds.gamma_minus)}")
    print(f"gamma_plus = {_g(bounds.gamma_plus)}")
    print(f"gamma_spread = {_g(bounds.spread)}")
    print(f"alpha_bound = {_g(alpha_bound(direction, args.t))}")
    return EXIT_OK


def cmd_plot_grid(args: argparse.Namespace) -> int:
    if args.tau_steps < 2 or args.nu_steps < 2:
        print("error: need at least 2 steps on each axis", file=sys.stderr)
        return EXIT_USAGE
    points = gap_grid(
        args.tau_steps,
        args.nu_steps,
        accuracy=args.accuracy,
        max_level=args.max_level,
    )
    computed = [p for p in points if p.log_xi is not None]
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("tau,nu,log_xi\n")
        for p in points:
            value = "" if p.log_xi is None else _g(p.log_xi)
            fh.write(f"{_g(p.tau)},{_g(p.nu)},{value}\n")
    print(f"grid points = {len(points)}")
    print(f"computed = {len(computed)}")
    print(f"missing = {len(points) - len(computed)}")
    if computed:
        best = min(computed, key=lambda p: p.log_xi)
        print(f"min log_xi = {_g(best.log_xi)} at tau={_g(best.tau)}, nu={_g(best.nu)}")
        print(f"equilateral log threshold = {_g(math.log(GAP_THRESHOLD))}")
    return EXIT_OK


_COMMANDS = {
    "eigen": cmd_eigen,
    "sweep": cmd_sweep,
    "scaling": cmd_scaling,
    "lame-verify": cmd_lame_verify,
    "lame-spectrum": cmd_lame_spectrum,
    "deform-minimize": cmd_deform_minimize,
    "deform-slope": cmd_deform_slope,
    "plot-grid": cmd_plot_grid,
}


def main(argv: Sequence[str] | None = None) -> int:
    raw = list(sys.argv[1:] if argv is None else argv)
    try:
        raw = _apply_config(raw)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    parser = _build_parser()
    try:
        args = parser.parse_args(raw)
    except SystemExit as exc:
        code = exc.code
        return int(code) if isinstance(code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except SweepFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
