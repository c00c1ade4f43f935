"""Quadrature verification of the closed-form eigenfunction integral tables.

Every integral identity the deformation argument relies on (first- and
second-derivative products of the ground state and of the second-eigenspace
basis) is recomputed here by analytic differentiation plus numerical
quadrature and compared against its published closed form.  Rows that
disagree are flagged rather than silently corrected: the report exists
partly to adjudicate typos in the printed tables.

Known adjudications carried as extra rows:
  - the three-sine product form of the ground state needs a constant factor
    (it comes out to 4) relative to the sum form;
  - one proof display writes the ``int v_xx^2`` coefficient as 54049 where
    the table says 59049 (quadrature sides with 59049);
  - ``int u_y v_x`` is never printed but is implied by the mixed-derivative
    expansion of the combined eigenfunction; its derived value is checked;
  - the printed third eigenfunction is not normalized (nor an eigenfunction);
    the reconstructed one is.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .lame import (
    equilateral_integral,
    phi1_product_constant,
    phi1_trigsum,
    second_basis,
    third_eigenfunction_trigsum,
    _third_eigenfunction_printed,
)

__all__ = ["TableRow", "TableReport", "verify_integral_tables", "CSV_COLUMNS"]

REL_TOL = 1e-6
ABS_TOL_ZERO = 1e-9
CONVERGENCE_TOL = 1e-10

CSV_COLUMNS = (
    "integral_name",
    "stated_value",
    "computed_value",
    "abs_error",
    "rel_error",
    "status",
)

_PI2 = math.pi**2
_PI4 = math.pi**4
_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class TableRow:
    name: str
    stated_value: float
    computed_value: float
    abs_error: float
    rel_error: float
    status: str
    kind: str
    convergence_gap: float
    note: str = ""


@dataclass(frozen=True)
class TableReport:
    rows: tuple[TableRow, ...]
    quad_degree: int

    @property
    def table_rows_ok(self) -> bool:
        """All rows taken verbatim from the published tables agree."""
        return all(r.status == "ok" for r in self.rows if r.kind == "table")

    @property
    def converged(self) -> bool:
        return all(r.convergence_gap < CONVERGENCE_TOL for r in self.rows)

    @property
    def flagged(self) -> tuple[TableRow, ...]:
        return tuple(r for r in self.rows if r.status != "ok")

    def row(self, name: str) -> TableRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for r in self.rows:
                writer.writerow(
                    [
                        r.name,
                        format(r.stated_value, ".17g"),
                        format(r.computed_value, ".17g"),
                        format(r.abs_error, ".17g"),
                        format(r.rel_error, ".17g"),
                        r.status,
                    ]
                )


def _entries() -> list[tuple[str, Callable, float, str, str]]:
    """(name, integrand factory, published value, kind, note) quintuples."""
    p = phi1_trigsum()
    px, py = p.dx(), p.dy()
    pxx, pxy, pyy = px.dx(), px.dy(), py.dy()
    u, v = second_basis()
    ux, uy = u.dx(), u.dy()
    vx, vy = v.dx(), v.dy()
    uxx, uxy, uyy = ux.dx(), ux.dy(), uy.dy()
    vxx, vxy, vyy = vx.dx(), vx.dy(), vy.dy()
    a3 = third_eigenfunction_trigsum()
    a3_printed = _third_eigenfunction_printed()

    def prod(f, g):
        return lambda x, y: f(x, y) * g(x, y)

    def single(f):
        return lambda x, y: f(x, y)

    e: list[tuple[str, Callable, float, str, str]] = []

    # Ground-state table.
    e.append(("int_phi1_x_sq", prod(px, px), 8.0 * _PI2 / 3.0, "table", ""))
    e.append(("int_phi1_y_sq", prod(py, py), 8.0 * _PI2 / 3.0, "table", ""))
    e.append(("int_phi1_x_phi1_y", prod(px, py), 0.0, "table", ""))
    e.append(("int_phi1_xy_sq", prod(pxy, pxy), 32.0 * _PI4 / 9.0, "table", ""))
    e.append(("int_phi1_xx_sq", prod(pxx, pxx), 32.0 * _PI4 / 3.0, "table", ""))
    e.append(("int_phi1_yy_sq", prod(pyy, pyy), 32.0 * _PI4 / 3.0, "table", ""))
    e.append(("int_phi1", single(p), 3.0**0.75 / (math.sqrt(2.0) * math.pi), "table", ""))
    e.append(("int_phi1_xx_phi1_xy", prod(pxx, pxy), 0.0, "table", ""))
    e.append(("int_phi1_yy_phi1_xy", prod(pyy, pxy), 0.0, "table", ""))

    # Normalization and orthogonality claims.
    e.append(("int_phi1_sq", prod(p, p), 1.0, "normalization", ""))
    e.append(("int_u_sq", prod(u, u), 1.0, "normalization", ""))
    e.append(("int_v_sq", prod(v, v), 1.0, "normalization", ""))
    e.append(("int_u_v", prod(u, v), 0.0, "normalization", ""))
    e.append(("int_u_phi1", prod(u, p), 0.0, "normalization", ""))
    e.append(("int_v_phi1", prod(v, p), 0.0, "normalization", ""))

    # Second-eigenspace first-derivative table.
    q = 6561.0 / 800.0
    s56 = 56.0 * _PI2 / 9.0
    e.append(("int_u_x_sq", prod(ux, ux), -q + s56, "table", ""))
    e.append(("int_v_y_sq", prod(vy, vy), -q + s56, "table", ""))
    e.append(("int_u_x_u_y", prod(ux, uy), -q * _SQRT3, "table", ""))
    e.append(("int_v_x_v_y", prod(vx, vy), q * _SQRT3, "table", ""))
    e.append(("int_u_y_v_y", prod(uy, vy), q * _SQRT3, "table", ""))
    e.append(("int_u_x_v_y", prod(ux, vy), q, "table", ""))
    e.append(("int_u_x_v_x", prod(ux, vx), -q * _SQRT3, "table", ""))
    e.append(("int_u_y_sq", prod(uy, uy), q + s56, "table", ""))
    e.append(("int_v_x_sq", prod(vx, vx), q + s56, "table", ""))

    # Second-eigenspace second-derivative table.
    e.append(
        (
            "int_u_xy_sq",
            prod(uxy, uxy),
            -5103.0 * _PI2 / 200.0 + 1568.0 * _PI4 / 81.0,
            "table",
            "",
        )
    )
    e.append(
        (
            "int_u_yy_sq",
            prod(uyy, uyy),
            5103.0 * _PI2 / 40.0 + 1568.0 * _PI4 / 27.0,
            "table",
            "",
        )
    )
    e.append(
        (
            "int_u_xx_sq",
            prod(uxx, uxx),
            7.0 * _PI2 * (-59049.0 + 44800.0 * _PI2) / 5400.0,
            "table",
            "",
        )
    )
    e.append(
        (
            "int_v_xx_sq",
            prod(vxx, vxx),
            7.0 * _PI2 * (59049.0 + 44800.0 * _PI2) / 5400.0,
            "table",
            "",
        )
    )
    e.append(
        (
            "int_v_xy_sq",
            prod(vxy, vxy),
            5103.0 * _PI2 / 200.0 + 1568.0 * _PI4 / 81.0,
            "table",
            "",
        )
    )
    e.append(
        (
            "int_v_yy_sq",
            prod(vyy, vyy),
            -5103.0 * _PI2 / 40.0 + 1568.0 * _PI4 / 27.0,
            "table",
            "",
        )
    )
    e.append(
        (
            "int_v_xy_u_xy",
            prod(vxy, uxy),
            -5103.0 * _SQRT3 * _PI2 / 200.0,
            "table",
            "",
        )
    )
    e.append(
        (
            "int_v_xx_u_xx",
            prod(vxx, uxx),
            -15309.0 * _SQRT3 * _PI2 / 200.0,
            "table",
            "",
        )
    )
    e.append(
        (
            "int_v_yy_u_yy",
            prod(vyy, uyy),
            5103.0 * _SQRT3 * _PI2 / 40.0,
            "table",
            "",
        )
    )

    # Derived entry: implied by the mixed-derivative expansion of
    # alpha*u + beta*v but never printed.
    e.append(("int_u_y_v_x", prod(uy, vx), q, "derived", "implied, not printed"))

    # Adjudication entries (expected to be flagged).
    e.append(
        (
            "int_v_xx_sq_variant_54049",
            prod(vxx, vxx),
            7.0 * _PI2 * (54049.0 + 44800.0 * _PI2) / 5400.0,
            "adjudication",
            "proof-text variant; table value 59049 is the one quadrature matches",
        )
    )

    def product_form_unit_constant(x, y):
        return (
            (2.0 * math.sqrt(2.0) / 3.0**0.75)
            * np.sin(2.0 * np.pi * y / _SQRT3)
            * np.sin(np.pi * (x + y / _SQRT3))
            * np.sin(np.pi * (x - y / _SQRT3))
        ) * p(x, y)

    # <sum form, product form as printed>: equals 1 only if the printed
    # product identity held verbatim; it comes out to 1/4.
    e.append(
        (
            "int_phi1_sum_times_printed_product",
            product_form_unit_constant,
            1.0,
            "adjudication",
            "printed product form is low by the constant 4",
        )
    )

    # Third-eigenspace diagnostics.
    e.append(("int_A3_sq", prod(a3, a3), 1.0, "normalization", "reconstructed form"))
    e.append(("int_A3_phi1", prod(a3, p), 0.0, "normalization", "reconstructed form"))
    e.append(
        (
            "int_A3_printed_sq",
            prod(a3_printed, a3_printed),
            1.0,
            "adjudication",
            "printed third-eigenfunction formula is not normalized",
        )
    )
    return e


def verify_integral_tables(
    quad_degree: int = 6, subdivision: int = 4
) -> TableReport:
    """Evaluate every table entry at two quadrature degrees and compare.

    The value reported is from degree ``quad_degree + 1``; the difference
    against degree ``quad_degree`` is the convergence gap, which must be
    negligible before any disagreement can be blamed on the printed value.
    """
    if quad_degree < 4:
        raise ValueError("quad_degree below 4 cannot resolve the integrands")
    rows = []
    for name, integrand, stated_value, kind, note in _entries():
        lo = equilateral_integral(integrand, n=quad_degree, subdivision=subdivision)
        hi = equilateral_integral(
            integrand, n=quad_degree + 1, subdivision=subdivision
        )
        abs_error = abs(hi - stated_value)
        rel_error = abs_error / max(abs(stated_value), 1.0)
        if stated_value == 0.0:
            ok = abs_error <= ABS_TOL_ZERO
        else:
            ok = rel_error <= REL_TOL
        rows.append(
            TableRow(
                name=name,
                stated_value=stated_value,
                computed_value=hi,
                abs_error=abs_error,
                rel_error=rel_error,
                status="ok" if ok else "typo?",
                kind=kind,
                convergence_gap=abs(hi - lo),
                note=note,
            )
        )
    # Record the product-form constant itself for the report reader.
    const = phi1_product_constant()
    rows.append(
        TableRow(
            name="phi1_product_form_constant",
            stated_value=1.0,
            computed_value=const,
            abs_error=abs(const - 1.0),
            rel_error=abs(const - 1.0),
            status="ok" if abs(const - 1.0) <= REL_TOL else "typo?",
            kind="adjudication",
            convergence_gap=0.0,
            note="constant matching sum and product forms; printed identity implies 1",
        )
    )
    return TableReport(rows=tuple(rows), quad_degree=quad_degree)
