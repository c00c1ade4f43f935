"""Certified sweep of the triangle moduli region.

The sweep walks the apex chart row by row from below.  At each grid apex it
computes the first two Dirichlet eigenvalues, turns the certified gap margin
into a radius within which an eigenvalue continuity estimate keeps the gap
above the equilateral threshold, truncates that radius to a single decimal
digit, and advances by exactly the truncated radius.  Row seeds (the first
cell of each row) set the height of the next row.  The sweep region excludes
a small ball around the equilateral apex, where the gap margin vanishes and
no positive radius exists; that ball is handled by the deformation module.

Certification is conservative: radii are computed from (xi - err) and
(A + err), so they remain valid under the solver's error estimate.  The
digit-accuracy rule requires the radius itself to be trustworthy at the
truncated decimal place: the spread between the optimistic and conservative
radii must not exceed half a unit of the 10^-(n+1) place, and cells re-solve
at tighter eigenvalue targets until it does not.

A separate coverage audit re-checks, on a fine lattice, that the emitted
balls together with the analytically handled sets (thin strip, exclusion
ball, complement of the region) leave no point of the window uncovered.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .eigensolver import ConvergenceError, Spectrum, gap_with_error
from .geometry import (
    EQUILATERAL_APEX,
    EXCLUSION_RADIUS,
    GAP_THRESHOLD,
    THIN_STRIP_HEIGHT,
    TauNu,
    Triangle,
    tau_nu_to_apex,
)

__all__ = [
    "CONTINUITY_FACTOR",
    "CSV_COLUMNS",
    "SweepFailure",
    "SweepWindow",
    "SweepPolicy",
    "CertifiedCell",
    "SweepState",
    "SweepResult",
    "CoverageReport",
    "GridPoint",
    "continuity_lower_bound",
    "certification_radius",
    "truncate_radius",
    "run_sweep",
    "coverage_audit",
    "gap_grid",
    "format_cell_row",
    "cells_to_csv",
]

#: Constant in the continuity estimate: moving the apex (x, y) by distance t
#: changes each of the first two eigenvalues by a factor within
#: 1 +- 2.4 t / y^2, hence xi(x*, y*) >= xi - (2.4 t / y^2)(lambda1 + lambda2).
CONTINUITY_FACTOR = 2.4

#: Column order of the certified-cell CSV.
CSV_COLUMNS = (
    "j",
    "i",
    "x",
    "y",
    "lambda1",
    "lambda2",
    "xi",
    "A_sum",
    "t_prime",
    "n",
    "d",
    "t_radius",
    "err",
    "accuracy_met",
)

Solver = Callable[[Triangle, float, "int | None"], Spectrum]


class SweepFailure(Exception):
    """Certification cannot proceed at a specific grid cell.

    reason is one of "margin" (gap not certifiably above the threshold),
    "accuracy" (the digit rule could not be met at any allowed solver
    accuracy), or "radius" (no positive truncatable radius).
    """

    def __init__(
        self,
        reason: str,
        message: str = "",
        *,
        j: int | None = None,
        i: int | None = None,
        x: float | None = None,
        y: float | None = None,
        xi: float | None = None,
        err: float | None = None,
    ) -> None:
        self.reason = reason
        self.j = j
        self.i = i
        self.x = x
        self.y = y
        self.xi = xi
        self.err = err
        detail = message or reason
        if j is not None:
            detail += f" at cell j={j}, i={i}, apex=({x!r}, {y!r})"
            if xi is not None:
                detail += f", xi={xi!r}, err={err!r}"
        super().__init__(detail)


@dataclass(frozen=True)
class SweepWindow:
    """Axis-aligned window of apex coordinates to certify."""

    x0: float = 0.5
    x1: float = 1.0
    y0: float = THIN_STRIP_HEIGHT
    y1: float = 1.0

    def __post_init__(self) -> None:
        if not 0.5 <= self.x0 < self.x1 <= 1.0:
            raise ValueError(f"need 0.5 <= x0 < x1 <= 1, got [{self.x0}, {self.x1}]")
        if not THIN_STRIP_HEIGHT <= self.y0 < self.y1 <= 1.0:
            raise ValueError(
                f"need {THIN_STRIP_HEIGHT} <= y0 < y1 <= 1, got [{self.y0}, {self.y1}]"
            )
        if self.x0 * self.x0 + self.y0 * self.y0 > 1.0:
            raise ValueError("window start lies outside the unit disc")


@dataclass(frozen=True)
class SweepPolicy:
    """Accuracy and exclusion settings for a sweep run."""

    initial_accuracy: float = 0.25
    exclusion_radius: float = EXCLUSION_RADIUS
    max_accuracy_rounds: int = 3
    max_level: int | None = None

    def __post_init__(self) -> None:
        if not self.initial_accuracy > 0.0:
            raise ValueError("initial_accuracy must be positive")
        if self.exclusion_radius < 0.0:
            raise ValueError("exclusion_radius must be non-negative")
        if self.max_accuracy_rounds < 0:
            raise ValueError("max_accuracy_rounds must be non-negative")


@dataclass(frozen=True)
class CertifiedCell:
    """One certified grid apex and its radius.

    The truncation invariant t_radius <= t_prime < t_radius + 10^-n is
    checked exactly in rational arithmetic (the clamped case t_prime >= 1
    is exempt; its radius is capped at 0.9 by fiat).
    """

    j: int
    i: int
    x: float
    y: float
    lambda1: float
    lambda2: float
    xi: float
    A_sum: float
    t_prime: float
    n_digits: int
    d_digit: int
    t_radius: float
    err: float
    accuracy_met: bool

    def __post_init__(self) -> None:
        if not self.xi > GAP_THRESHOLD:
            raise ValueError(
                f"cell gap {self.xi} does not exceed the threshold {GAP_THRESHOLD}"
            )
        if not self.t_radius > 0.0:
            raise ValueError("certified radius must be positive")
        if not (1 <= self.d_digit <= 9 and self.n_digits >= 1):
            raise ValueError(
                f"invalid truncation digits n={self.n_digits}, d={self.d_digit}"
            )
        if self.t_prime < 1.0:
            low = Fraction(self.d_digit, 10**self.n_digits)
            high = Fraction(self.d_digit + 1, 10**self.n_digits)
            if not low <= Fraction(self.t_prime) < high:
                raise ValueError(
                    f"truncation broken: t_radius={self.t_radius}, "
                    f"t_prime={self.t_prime}, n={self.n_digits}"
                )


@dataclass
class SweepState:
    """Resumable position of a sweep, snapshotted at row boundaries."""

    j: int = 0
    i: int = 0
    x: float = 0.5
    y: float = THIN_STRIP_HEIGHT
    seed_radius: float = 0.0
    cells_emitted: int = 0
    status: str = "running"
    failure: str = ""

    def to_text(self) -> str:
        lines = [
            f"j={self.j}",
            f"i={self.i}",
            f"x={format(self.x, '.17g')}",
            f"y={format(self.y, '.17g')}",
            f"seed_radius={format(self.seed_radius, '.17g')}",
            f"cells_emitted={self.cells_emitted}",
            f"status={self.status}",
        ]
        if self.failure:
            lines.append(f"failure={self.failure}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SweepState":
        state = cls()
        for line in text.splitlines():
            line = line.strip()
            if not line or "=" not in line:
                continue
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key in ("j", "i", "cells_emitted"):
                setattr(state, key, int(value))
            elif key in ("x", "y", "seed_radius"):
                setattr(state, key, float(value))
            elif key in ("status", "failure"):
                setattr(state, key, value)
        return state


@dataclass(frozen=True)
class SweepResult:
    """Cells certified by one run_sweep call plus the final state."""

    cells: tuple[CertifiedCell, ...]
    state: SweepState
    reason: str  # "complete" | "budget" | "failed"
    failure: SweepFailure | None = None


def continuity_lower_bound(xi: float, A_sum: float, y: float, t: float) -> float:
    """Guaranteed gap at any apex within distance t of (x, y)."""
    if not y > 0.0:
        raise ValueError("apex height y must be positive")
    if t < 0.0:
        raise ValueError("perturbation distance t must be non-negative")
    return xi - (CONTINUITY_FACTOR * t / (y * y)) * A_sum


def certification_radius(xi: float, A_sum: float, y: float) -> float:
    """Largest t with continuity_lower_bound(xi, A, y, t) at the threshold."""
    if not y > 0.0:
        raise ValueError("apex height y must be positive")
    if not A_sum > 0.0:
        raise ValueError("eigenvalue sum must be positive")
    margin = xi - GAP_THRESHOLD
    if margin <= 0.0:
        raise SweepFailure(
            "margin", f"gap {xi} does not exceed the threshold {GAP_THRESHOLD}"
        )
    return margin * y * y / (CONTINUITY_FACTOR * A_sum)


def truncate_radius(t_prime: float) -> tuple[int, int, float]:
    """Truncate a raw radius to its leading decimal digit.

    Returns (n, d, t_radius) with t_radius = d * 10^-n, where n is the
    smallest exponent whose digit in the decimal expansion of t_prime is
    positive.  Computed in exact rational arithmetic so that
    d/10^n <= t_prime < (d+1)/10^n holds as real numbers.  Radii of 1 or
    larger clamp to 0.9 (n=1, d=9); non-positive radii fail.
    """
    if not math.isfinite(t_prime) or t_prime <= 0.0:
        raise SweepFailure("radius", f"no positive certification radius: {t_prime}")
    if t_prime >= 1.0:
        return (1, 9, 0.9)
    scaled = Fraction(t_prime)
    n = 0
    while scaled < 1:
        scaled *= 10
        n += 1
        if n > 330:
            raise SweepFailure(
                "radius", f"radius {t_prime} below representable truncation range"
            )
    d = int(scaled)
    t_radius = d * 10.0 ** (-n)
    if t_radius <= 0.0:
        raise SweepFailure("radius", f"radius {t_prime} underflows truncation")
    return (n, d, t_radius)


def _default_solver(
    triangle: Triangle, target: float, max_level: int | None
) -> Spectrum:
    return gap_with_error(triangle, target, max_level=max_level)


def _certify_cell(
    j: int,
    i: int,
    x: float,
    y: float,
    policy: SweepPolicy,
    solver: Solver,
) -> CertifiedCell:
    """Solve, derive the radius, and tighten accuracy until the digit rule holds."""
    target = policy.initial_accuracy
    last: tuple[float, float] | None = None
    for _ in range(policy.max_accuracy_rounds + 1):
        spectrum = solver(Triangle(x, y), target, policy.max_level)
        err = spectrum.xi_error
        lam1, lam2 = spectrum.eigenvalues
        xi = spectrum.xi
        a_sum = lam1 + lam2
        last = (xi, err)
        next_target = None
        if xi - err > GAP_THRESHOLD:
            t_cons = certification_radius(xi - err, a_sum + err, y)
            t_opt = certification_radius(xi, a_sum, y)
            n, d, t_radius = truncate_radius(t_cons)
            tolerance = 0.5 * 10.0 ** (-(n + 1))
            spread = t_opt - t_cons
            if spread <= tolerance:
                return CertifiedCell(
                    j=j,
                    i=i,
                    x=x,
                    y=y,
                    lambda1=lam1,
                    lambda2=lam2,
                    xi=xi,
                    A_sum=a_sum,
                    t_prime=t_cons,
                    n_digits=n,
                    d_digit=d,
                    t_radius=t_radius,
                    err=err,
                    accuracy_met=True,
                )
            next_target = max(err * (tolerance / spread) * 0.5, 1e-13)
        else:
            margin = xi - GAP_THRESHOLD
            if margin <= 0.0:
                break
            next_target = max(margin / 4.0, 1e-13)
        if not spectrum.accuracy_met or next_target >= target:
            break
        target = next_target
    xi, err = last if last is not None else (float("nan"), float("nan"))
    if not xi - 2.0 * err > GAP_THRESHOLD:
        raise SweepFailure(
            "margin",
            "gap margin not certifiable",
            j=j,
            i=i,
            x=x,
            y=y,
            xi=xi,
            err=err,
        )
    raise SweepFailure(
        "accuracy",
        "digit-rule accuracy not met",
        j=j,
        i=i,
        x=x,
        y=y,
        xi=xi,
        err=err,
    )


def _advance(pos: float, t: float, limit: float) -> float:
    """Advance by the certified radius, clamped to the window edge.

    Discs spaced a full radius apart only overlap to 0.866 t between
    centers, so a window edge that falls inside the final step would be
    left with uncovered scallops; landing one extra cell (or row) exactly
    on the edge closes them.  Positions already at or past the edge
    advance normally and fail the range check, ending the row or sweep.
    """
    nxt = pos + t
    if nxt > limit and pos < limit:
        return limit
    return nxt


def _row_continues(
    nx: float, y: float, window: SweepWindow, policy: SweepPolicy
) -> bool:
    """Step-3 checks on the advanced position plus the window bound."""
    if nx > window.x1:
        return False
    if nx * nx + y * y > 1.0:
        return False
    ex, ey = EQUILATERAL_APEX
    if math.hypot(nx - ex, y - ey) <= policy.exclusion_radius:
        return False
    return True


def _seed_allowed(y: float, window: SweepWindow, policy: SweepPolicy) -> bool:
    """Step-4 checks on a prospective row seed plus the window bound."""
    if y > window.y1:
        return False
    x0 = window.x0
    if x0 * x0 + y * y > 1.0:
        return False
    ex, ey = EQUILATERAL_APEX
    if math.hypot(x0 - ex, y - ey) <= policy.exclusion_radius:
        return False
    return True


def _certify_row(
    j: int,
    y: float,
    window: SweepWindow,
    policy: SweepPolicy,
    solver: Solver,
    sink: Callable[[CertifiedCell], None] | None,
) -> tuple[list[CertifiedCell], SweepFailure | None]:
    cells: list[CertifiedCell] = []
    x = window.x0
    i = 0
    while True:
        try:
            cell = _certify_cell(j, i, x, y, policy, solver)
        except SweepFailure as failure:
            return cells, failure
        cells.append(cell)
        if sink is not None:
            sink(cell)
        nx = _advance(x, cell.t_radius, window.x1)
        if not _row_continues(nx, y, window, policy):
            return cells, None
        x = nx
        i += 1


def _row_tail(
    j: int,
    y: float,
    seed: CertifiedCell,
    window: SweepWindow,
    policy: SweepPolicy,
    solver: Solver,
) -> tuple[list[CertifiedCell], SweepFailure | None]:
    cells: list[CertifiedCell] = []
    x = _advance(window.x0, seed.t_radius, window.x1)
    if not _row_continues(x, y, window, policy):
        return cells, None
    i = 1
    while True:
        try:
            cell = _certify_cell(j, i, x, y, policy, solver)
        except SweepFailure as failure:
            return cells, failure
        cells.append(cell)
        nx = _advance(x, cell.t_radius, window.x1)
        if not _row_continues(nx, y, window, policy):
            return cells, None
        x = nx
        i += 1


def _validate_start(window: SweepWindow) -> None:
    x0, y0 = window.x0, window.y0
    if x0 * x0 + y0 * y0 > 1.0 or y0 < THIN_STRIP_HEIGHT or x0 < 0.5:
        raise ValueError(f"window start ({x0}, {y0}) outside the sweep region")


def run_sweep(
    window: SweepWindow,
    policy: SweepPolicy | None = None,
    *,
    solver: Solver | None = None,
    sink: Callable[[CertifiedCell], None] | None = None,
    state_sink: Callable[[SweepState], None] | None = None,
    resume_from: SweepState | None = None,
    threads: int = 1,
    max_rows: int | None = None,
    max_cells: int | None = None,
) -> SweepResult:
    """Execute the certification sweep over a window.

    Rows are walked bottom-up; each row left to right.  Advances that would
    overshoot a window edge land one final cell (or row) on the edge itself,
    which keeps the union of certified discs over the whole rectangle.
    With threads > 1 the
    seed column is computed first (its y-advance is sequential by nature) and
    row tails fan out to a thread pool; the emitted cell order is canonical
    (sorted by (j, i)) either way, so the output is thread-count invariant.

    max_rows and max_cells stop the run at the next row boundary, leaving a
    resumable state ("budget" result).  A cell whose gap margin cannot be
    certified, or whose digit-accuracy rule cannot be met, ends the run with
    reason "failed" and the offending cell recorded.
    """
    policy = policy if policy is not None else SweepPolicy()
    active_solver = solver if solver is not None else _default_solver
    if threads < 1:
        raise ValueError("threads must be at least 1")
    _validate_start(window)

    if resume_from is not None:
        if resume_from.status == "complete":
            return SweepResult(
                cells=(), state=replace(resume_from), reason="complete"
            )
        j = resume_from.j
        y = resume_from.y
        count = resume_from.cells_emitted
        seed_radius = resume_from.seed_radius
    else:
        j, y, count, seed_radius = 0, window.y0, 0, 0.0

    state = SweepState(
        j=j, i=0, x=window.x0, y=y, seed_radius=seed_radius, cells_emitted=count
    )

    if threads == 1:
        return _run_sequential(
            window, policy, active_solver, sink, state_sink, state, max_rows, max_cells
        )
    return _run_threaded(
        window,
        policy,
        active_solver,
        sink,
        state_sink,
        state,
        threads,
        max_rows,
        max_cells,
    )


def _finalize(
    cells: list[CertifiedCell],
    state: SweepState,
    reason: str,
    failure: SweepFailure | None,
    state_sink: Callable[[SweepState], None] | None,
) -> SweepResult:
    if reason == "complete":
        state.status = "complete"
    elif reason == "failed":
        state.status = "failed"
        state.failure = str(failure)
    else:
        state.status = "running"
    if state_sink is not None:
        state_sink(state)
    return SweepResult(
        cells=tuple(cells), state=state, reason=reason, failure=failure
    )


def _run_sequential(
    window: SweepWindow,
    policy: SweepPolicy,
    solver: Solver,
    sink: Callable[[CertifiedCell], None] | None,
    state_sink: Callable[[SweepState], None] | None,
    state: SweepState,
    max_rows: int | None,
    max_cells: int | None,
) -> SweepResult:
    cells: list[CertifiedCell] = []
    rows_done = 0
    while True:
        if not _seed_allowed(state.y, window, policy):
            return _finalize(cells, state, "complete", None, state_sink)
        if max_rows is not None and rows_done >= max_rows:
            return _finalize(cells, state, "budget", None, state_sink)
        if max_cells is not None and state.cells_emitted >= max_cells:
            return _finalize(cells, state, "budget", None, state_sink)
        row_cells, failure = _certify_row(
            state.j, state.y, window, policy, solver, sink
        )
        cells.extend(row_cells)
        state.cells_emitted += len(row_cells)
        if failure is not None:
            return _finalize(cells, state, "failed", failure, state_sink)
        state.seed_radius = row_cells[0].t_radius
        state.y = _advance(state.y, state.seed_radius, window.y1)
        state.j += 1
        rows_done += 1
        if state_sink is not None:
            state_sink(replace(state))


def _run_threaded(
    window: SweepWindow,
    policy: SweepPolicy,
    solver: Solver,
    sink: Callable[[CertifiedCell], None] | None,
    state_sink: Callable[[SweepState], None] | None,
    state: SweepState,
    threads: int,
    max_rows: int | None,
    max_cells: int | None,
) -> SweepResult:
    # Phase 1: the seed column, sequential because each row height depends on
    # the previous seed radius.
    seeds: list[tuple[int, float, CertifiedCell | None, SweepFailure | None]] = []
    j, y = state.j, state.y
    natural_end = False
    while True:
        if not _seed_allowed(y, window, policy):
            natural_end = True
            break
        if max_rows is not None and len(seeds) >= max_rows:
            break
        try:
            seed = _certify_cell(j, 0, window.x0, y, policy, solver)
        except SweepFailure as failure:
            seeds.append((j, y, None, failure))
            break
        seeds.append((j, y, seed, None))
        y = _advance(y, seed.t_radius, window.y1)
        j += 1

    # Phase 2: row tails in parallel.
    tails: dict[int, tuple[list[CertifiedCell], SweepFailure | None]] = {}
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {
            pool.submit(_row_tail, sj, sy, seed, window, policy, solver): sj
            for sj, sy, seed, fail in seeds
            if seed is not None
        }
        for future, sj in futures.items():
            tails[sj] = future.result()

    # Reconcile in canonical row order, applying the same stop rules the
    # sequential path would have applied.
    cells: list[CertifiedCell] = []
    snapshots: list[SweepState] = []
    for index, (sj, sy, seed, seed_failure) in enumerate(seeds):
        if seed_failure is not None:
            result = _finalize(cells, state, "failed", seed_failure, None)
            _emit(result.cells, snapshots, sink, state_sink, state)
            return result
        tail_cells, tail_failure = tails[sj]
        row_cells = [seed] + tail_cells
        cells.extend(row_cells)
        state.cells_emitted += len(row_cells)
        if tail_failure is not None:
            result = _finalize(cells, state, "failed", tail_failure, None)
            _emit(result.cells, snapshots, sink, state_sink, state)
            return result
        state.seed_radius = row_cells[0].t_radius
        state.y = _advance(sy, state.seed_radius, window.y1)
        state.j = sj + 1
        snapshots.append(replace(state))
        more_rows = index + 1 < len(seeds) or not natural_end
        if max_cells is not None and state.cells_emitted >= max_cells and more_rows:
            result = _finalize(cells, state, "budget", None, None)
            _emit(result.cells, snapshots, sink, state_sink, state)
            return result
    reason = "complete" if natural_end else "budget"
    result = _finalize(cells, state, reason, None, None)
    _emit(result.cells, snapshots, sink, state_sink, state)
    return result


def _emit(
    cells: Sequence[CertifiedCell],
    snapshots: Sequence[SweepState],
    sink: Callable[[CertifiedCell], None] | None,
    state_sink: Callable[[SweepState], None] | None,
    final_state: SweepState,
) -> None:
    """Buffered canonical-order emission for the threaded path."""
    if sink is not None:
        for cell in cells:
            sink(cell)
    if state_sink is not None:
        for snapshot in snapshots:
            state_sink(snapshot)
        state_sink(final_state)


def _fmt(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def format_cell_row(cell: CertifiedCell) -> str:
    values = (
        cell.j,
        cell.i,
        cell.x,
        cell.y,
        cell.lambda1,
        cell.lambda2,
        cell.xi,
        cell.A_sum,
        cell.t_prime,
        cell.n_digits,
        cell.d_digit,
        cell.t_radius,
        cell.err,
        cell.accuracy_met,
    )
    return ",".join(_fmt(v) for v in values)


def cells_to_csv(cells: Iterable[CertifiedCell], header: bool = True) -> str:
    lines = [",".join(CSV_COLUMNS)] if header else []
    lines.extend(format_cell_row(cell) for cell in cells)
    return "\n".join(lines) + "\n"


def cells_from_csv(text: str) -> tuple[CertifiedCell, ...]:
    """Parse cells written by cells_to_csv; invariants re-checked on load."""
    cells: list[CertifiedCell] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith(CSV_COLUMNS[0] + ","):
            continue
        parts = line.split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise ValueError(f"malformed cell row: {line!r}")
        cells.append(
            CertifiedCell(
                j=int(parts[0]),
                i=int(parts[1]),
                x=float(parts[2]),
                y=float(parts[3]),
                lambda1=float(parts[4]),
                lambda2=float(parts[5]),
                xi=float(parts[6]),
                A_sum=float(parts[7]),
                t_prime=float(parts[8]),
                n_digits=int(parts[9]),
                d_digit=int(parts[10]),
                t_radius=float(parts[11]),
                err=float(parts[12]),
                accuracy_met=parts[13] == "true",
            )
        )
    return tuple(cells)


@dataclass(frozen=True)
class CoverageReport:
    """Result of the lattice coverage audit."""

    total_points: int
    uncovered_count: int
    uncovered_sample: tuple[tuple[float, float], ...]
    spacing: float

    @property
    def passed(self) -> bool:
        return self.uncovered_count == 0


def coverage_audit(
    cells: Sequence[CertifiedCell],
    window: SweepWindow,
    *,
    spacing: float = 1e-4,
    exclusion_radius: float = EXCLUSION_RADIUS,
    max_report: int = 50,
) -> CoverageReport:
    """Check that certified balls plus analytic sets cover a window lattice.

    A lattice point passes if it lies strictly within some cell's radius, or
    in the thin strip y < 0.005, or within the exclusion ball, or outside the
    moduli region.  Everything else is reported uncovered.
    """
    if spacing <= 0.0:
        raise ValueError("spacing must be positive")
    nx = int(math.floor((window.x1 - window.x0) / spacing + 1e-9)) + 1
    ny = int(math.floor((window.y1 - window.y0) / spacing + 1e-9)) + 1
    xs = window.x0 + spacing * np.arange(nx)
    ys = window.y0 + spacing * np.arange(ny)
    covered = np.zeros((ny, nx), dtype=bool)

    ex, ey = EQUILATERAL_APEX
    ball_r2 = exclusion_radius * exclusion_radius
    region_r2 = EXCLUSION_RADIUS * EXCLUSION_RADIUS
    chunk = 1024
    row_x = xs[None, :]
    for lo in range(0, ny, chunk):
        hi = min(lo + chunk, ny)
        col_y = ys[lo:hi][:, None]
        block = covered[lo:hi]
        rr = row_x * row_x + col_y * col_y
        block |= rr > 1.0
        block |= row_x < 0.5
        block |= row_x > 1.0
        block |= col_y < THIN_STRIP_HEIGHT
        block |= col_y > 1.0
        dd = (row_x - ex) ** 2 + (col_y - ey) ** 2
        block |= dd <= region_r2  # excluded from the region itself
        block |= dd <= ball_r2

    for cell in cells:
        t = cell.t_radius
        ix0 = int(np.searchsorted(xs, cell.x - t, side="left"))
        ix1 = int(np.searchsorted(xs, cell.x + t, side="right"))
        iy0 = int(np.searchsorted(ys, cell.y - t, side="left"))
        iy1 = int(np.searchsorted(ys, cell.y + t, side="right"))
        if ix0 >= ix1 or iy0 >= iy1:
            continue
        sub_x = xs[ix0:ix1][None, :] - cell.x
        sub_y = ys[iy0:iy1][:, None] - cell.y
        covered[iy0:iy1, ix0:ix1] |= sub_x * sub_x + sub_y * sub_y < t * t

    missing = np.argwhere(~covered)
    sample = tuple(
        (float(xs[col]), float(ys[row])) for row, col in missing[:max_report]
    )
    return CoverageReport(
        total_points=nx * ny,
        uncovered_count=int(missing.shape[0]),
        uncovered_sample=sample,
        spacing=spacing,
    )


@dataclass(frozen=True)
class GridPoint:
    """One lattice point of the shape-space gap grid; log_xi is None where
    the solver could not produce a value."""

    tau: float
    nu: float
    log_xi: float | None


def gap_grid(
    tau_steps: int,
    nu_steps: int,
    *,
    accuracy: float = 0.05,
    max_level: int | None = 8,
    solver: Solver | None = None,
) -> tuple[GridPoint, ...]:
    """Log-gap values over a uniform (tau, nu) lattice.

    tau_i = 2(i+1)/(tau_steps+1) spans (0, 2) exclusive; nu_j = (j+1)/nu_steps
    spans (0, 1] inclusive of 1.  Odd tau_steps place the equilateral point
    (1, 1) exactly on the lattice.
    """
    if tau_steps < 2 or nu_steps < 2:
        raise ValueError("need at least 2 steps on each axis")
    active_solver = solver if solver is not None else _default_solver
    points: list[GridPoint] = []
    for i in range(tau_steps):
        tau = 2.0 * (i + 1) / (tau_steps + 1)
        for jj in range(nu_steps):
            nu = (jj + 1) / nu_steps
            x, y = tau_nu_to_apex(TauNu(tau, nu))
            log_xi: float | None
            try:
                spectrum = active_solver(Triangle(x, y), accuracy, max_level)
                log_xi = math.log(spectrum.xi)
            except (ValueError, ConvergenceError, SweepFailure):
                log_xi = None
            points.append(GridPoint(tau=tau, nu=nu, log_xi=log_xi))
    return tuple(points)
