"""Piecewise-linear finite elements for triangle Dirichlet eigenvalues.

Uniform midpoint refinement of a triangle produces elements similar to the
parent, so local stiffness and mass matrices are exact closed forms and the
discrete eigenvalues converge at second order from above.  Two consecutive
refinement levels feed a Richardson extrapolation whose coarse/fine gap
supplies a working error estimate.

The error bound is empirical (an asymptotic estimate with a safety factor),
not a mathematically rigorous enclosure; every result carries it as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.linalg import splu

from .geometry import Triangle, diameter, gap_function

__all__ = [
    "Mesh",
    "AssembledSystem",
    "Spectrum",
    "ConvergenceError",
    "build_mesh",
    "assemble",
    "smallest_eigenpairs",
    "solve_triangle",
    "gap_with_error",
    "MAX_LEVEL",
    "THIN_APEX_HEIGHT",
]

#: Hard refinement cap (memory guard): 4**12 elements.
MAX_LEVEL = 12

#: Apex height below which a triangle is treated as thin (rate check enforced).
THIN_APEX_HEIGHT = 0.05

_DEGENERATE_AREA = 1e-14

#: Acceptable observed convergence-rate window around the theoretical 4.
RATE_WINDOW = (2.5, 6.0)


class ConvergenceError(RuntimeError):
    """Eigensolver failed to meet its residual tolerance within the cap."""


@dataclass(frozen=True)
class Mesh:
    """Structured triangulation from uniform midpoint subdivision."""

    vertices: np.ndarray
    elements: np.ndarray
    boundary: np.ndarray
    level: int

    @property
    def interior_count(self) -> int:
        return int(np.count_nonzero(~self.boundary))


@dataclass(frozen=True)
class AssembledSystem:
    """P1 stiffness and mass restricted to interior (Dirichlet) nodes.

    ``mass_total`` is the row-sum total of the unrestricted mass matrix,
    which equals the triangle area by partition of unity; the restricted
    matrices no longer satisfy that identity.
    """

    stiffness: csr_matrix
    mass: csr_matrix
    interior_index: np.ndarray
    mass_total: float
    area: float


@dataclass(frozen=True)
class Spectrum:
    """Extrapolated eigenvalues with empirical error bounds.

    xi is diameter**2 * (lambda2 - lambda1); xi_error folds both eigenvalue
    error estimates through the same scaling.  ``accuracy_met`` is False when
    the level cap was reached before the target, or when a thin triangle's
    observed convergence rate fell outside the trusted window.
    """

    eigenvalues: tuple[float, float]
    error_bounds: tuple[float, float]
    levels: tuple[int, int]
    diameter: float
    xi: float
    xi_error: float
    accuracy_met: bool
    rates: tuple[float, float] | None

    def __post_init__(self) -> None:
        l1, l2 = self.eigenvalues
        if not l1 < l2:
            raise ValueError(f"first eigenvalue must be simple: {l1} >= {l2}")
        if min(self.error_bounds) <= 0.0:
            raise ValueError("error bounds must be positive")

    @property
    def lambda1(self) -> float:
        return self.eigenvalues[0]

    @property
    def lambda2(self) -> float:
        return self.eigenvalues[1]

    @property
    def gap_clearly_simple(self) -> bool:
        """Discrete gap exceeds 10x the combined error bound."""
        return (self.lambda2 - self.lambda1) > 10.0 * sum(self.error_bounds)


def _as_vertices(triangle) -> np.ndarray:
    if isinstance(triangle, Triangle):
        v = np.asarray(triangle.vertices, dtype=float)
    else:
        v = np.asarray(triangle, dtype=float)
    if v.shape != (3, 2):
        raise ValueError(f"expected three 2D vertices, got shape {v.shape}")
    return v


def build_mesh(triangle, level: int) -> Mesh:
    """Subdivide a triangle into 4**level congruence classes of itself.

    Vertices are laid out in barycentric rows; boundary nodes are those on
    any edge of the parent.  Positive orientation is enforced by swapping
    two vertices if the input is clockwise.
    """
    if not 0 <= level <= MAX_LEVEL:
        raise ValueError(f"level must be in [0, {MAX_LEVEL}], got {level}")
    v = _as_vertices(triangle)
    e1, e2 = v[1] - v[0], v[2] - v[0]
    signed = 0.5 * (e1[0] * e2[1] - e1[1] * e2[0])
    if abs(signed) < _DEGENERATE_AREA:
        raise ValueError(f"degenerate triangle, area {abs(signed):.3e}")
    if signed < 0.0:
        v = v[[0, 2, 1]]

    n = 2**level
    # Row i holds lattice points (i, j), j = 0..n-i, at v0 + (i e1 + j e2)/n.
    i_of = np.repeat(np.arange(n + 1), np.arange(n + 1, 0, -1))
    offsets = np.concatenate(([0], np.cumsum(np.arange(n + 1, 0, -1))))
    j_of = np.arange(i_of.size) - offsets[i_of]
    e1 = (v[1] - v[0]) / n
    e2 = (v[2] - v[0]) / n
    vertices = v[0] + np.outer(i_of, e1) + np.outer(j_of, e2)
    boundary = (i_of == 0) | (j_of == 0) | (i_of + j_of == n)

    def idx(i, j):
        return offsets[i] + j

    up_mask = i_of + j_of <= n - 1
    ui, uj = i_of[up_mask], j_of[up_mask]
    up = np.column_stack([idx(ui, uj), idx(ui + 1, uj), idx(ui, uj + 1)])
    down_mask = i_of + j_of <= n - 2
    di, dj = i_of[down_mask], j_of[down_mask]
    down = np.column_stack([idx(di + 1, dj), idx(di + 1, dj + 1), idx(di, dj + 1)])
    elements = np.vstack([up, down]).astype(np.int32)
    return Mesh(vertices=vertices, elements=elements, boundary=boundary, level=level)


def assemble(mesh: Mesh) -> AssembledSystem:
    """Closed-form P1 assembly with Dirichlet elimination of boundary nodes."""
    interior = np.where(~mesh.boundary)[0]
    if interior.size == 0:
        raise ValueError("mesh has no interior vertices; refine further")

    pts = mesh.vertices[mesh.elements]
    # Edge-opposite gradient coefficients: grad(lambda_k) = (b_k, c_k)/(2A).
    b = pts[:, [1, 2, 0], 1] - pts[:, [2, 0, 1], 1]
    c = pts[:, [2, 0, 1], 0] - pts[:, [1, 2, 0], 0]
    area = 0.5 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    # b, c come from a positively oriented mesh, so area > 0 elementwise.
    k_local = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) / (
        4.0 * area[:, None, None]
    )
    m_pattern = (np.ones((3, 3)) + np.eye(3)) / 12.0
    m_local = area[:, None, None] * m_pattern

    rows = np.repeat(mesh.elements, 3, axis=1).ravel()
    cols = np.tile(mesh.elements, (1, 3)).ravel()
    nv = mesh.vertices.shape[0]
    stiffness = coo_matrix(
        (k_local.ravel(), (rows, cols)), shape=(nv, nv)
    ).tocsr()
    mass = coo_matrix((m_local.ravel(), (rows, cols)), shape=(nv, nv)).tocsr()
    mass_total = float(mass.sum())

    k_int = stiffness[interior][:, interior]
    m_int = mass[interior][:, interior]
    return AssembledSystem(
        stiffness=k_int,
        mass=m_int,
        interior_index=interior,
        mass_total=mass_total,
        area=float(np.sum(area)),
    )


def smallest_eigenpairs(
    system: AssembledSystem,
    k: int,
    tol: float = 1e-10,
    max_iterations: int = 10000,
    shift: float = 0.0,
) -> list[tuple[float, np.ndarray]]:
    """k smallest eigenpairs of K v = lambda M v by block inverse iteration.

    The matrix K - shift*M is factorized once; the block is
    M-orthonormalized each step and reduced by Rayleigh-Ritz.  Vectors are
    returned M-orthonormal.  A fixed seed makes the iteration deterministic.
    Raises ConvergenceError if the residual tolerance is not met within the
    iteration cap; never returns a silently unconverged answer.

    A shift strictly below the first eigenvalue keeps the factorization
    positive definite and sharpens the contraction when the low spectrum is
    clustered (thin triangles).  Any breakdown under a nonzero shift falls
    back to the unshifted iteration.
    """
    n = system.stiffness.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    try:
        return _block_inverse_iteration(system, k, tol, max_iterations, shift)
    except (ConvergenceError, np.linalg.LinAlgError, RuntimeError):
        if shift == 0.0:
            raise
        return _block_inverse_iteration(system, k, tol, max_iterations, 0.0)


def _block_inverse_iteration(
    system: AssembledSystem,
    k: int,
    tol: float,
    max_iterations: int,
    shift: float,
) -> list[tuple[float, np.ndarray]]:
    n = system.stiffness.shape[0]
    kk = system.stiffness
    mm = system.mass
    block = min(k + 3, n)
    op = kk if shift == 0.0 else (kk - shift * mm).tocsr()
    lu = splu(
        op.tocsc(),
        permc_spec="MMD_AT_PLUS_A",
        diag_pivot_thresh=0.0,
        options={"SymmetricMode": True},
    )
    rng = np.random.default_rng(0)
    v = rng.standard_normal((n, block))
    theta = np.zeros(block)
    for _ in range(max_iterations):
        w = lu.solve(mm @ v)
        gram = w.T @ (mm @ w)
        chol = np.linalg.cholesky(gram)
        w = solve_triangular(chol, w.T, lower=True).T
        h = w.T @ (kk @ w)
        h = 0.5 * (h + h.T)
        theta, s = np.linalg.eigh(h)
        v = w @ s
        kv = kk @ v[:, :k]
        resid = kv - mm @ v[:, :k] * theta[:k]
        ok = np.linalg.norm(resid, axis=0) <= tol * np.linalg.norm(kv, axis=0)
        if bool(np.all(ok)):
            return [(float(theta[i]), v[:, i].copy()) for i in range(k)]
    raise ConvergenceError(
        f"residual tolerance {tol} not reached in {max_iterations} iterations"
    )


def solve_triangle(
    triangle, level: int, k: int = 2, tol: float = 1e-10, shift: float = 0.0
) -> tuple[float, ...]:
    """Discrete k smallest Dirichlet eigenvalues at one refinement level."""
    system = assemble(build_mesh(triangle, level))
    return tuple(
        value for value, _ in smallest_eigenpairs(system, k, tol=tol, shift=shift)
    )


def _richardson(coarse: float, fine: float) -> tuple[float, float]:
    # Second-order convergence: the remaining fine-level error is one third
    # of the observed level difference; safety factor 2 on top.
    extrapolated = fine + (fine - coarse) / 3.0
    err = max(2.0 * abs(fine - extrapolated), 1e-15)
    return extrapolated, err


def gap_with_error(
    triangle,
    target: float,
    max_level: int | None = None,
    min_level: int = 4,
    tol: float = 1e-10,
) -> Spectrum:
    """Eigenvalue pair and gap with an empirical error bound at most ``target``.

    Refines until the Richardson error estimate on xi meets the target or the
    level cap is reached (the result is then flagged ``accuracy_met=False``
    and must not be used to certify anything).  Thin triangles additionally
    require the observed convergence rate to stay near second order.
    """
    if target <= 0.0:
        raise ValueError("target accuracy must be positive")
    tri = triangle if isinstance(triangle, Triangle) else None
    verts = _as_vertices(triangle)
    apex_y = tri.apex_y if tri is not None else None
    thin = apex_y is not None and apex_y <= THIN_APEX_HEIGHT
    cap = max_level if max_level is not None else (11 if thin else 10)
    cap = min(cap, MAX_LEVEL)
    if cap < min_level + 1:
        raise ValueError("level cap leaves no room for two consecutive solves")

    d = diameter(tri) if tri is not None else _vertex_diameter(verts)
    history: list[tuple[float, float]] = []
    spectrum: Spectrum | None = None
    shift = 0.0
    for level in range(min_level, cap + 1):
        history.append(solve_triangle(verts, level, k=2, tol=tol, shift=shift))
        if len(history) < 2:
            continue
        coarse, fine = history[-2], history[-1]
        l1, e1 = _richardson(coarse[0], fine[0])
        l2, e2 = _richardson(coarse[1], fine[1])
        # seed the next level's factorization just below the first eigenvalue;
        # the 4x error margin keeps K - shift*M positive definite
        shift = max(0.0, min(l1 - 4.0 * e1, 0.99 * l1))
        rates = _rates(history)
        xi = gap_function(l1, l2, d)
        xi_error = d * d * (e1 + e2)
        met = xi_error <= target
        if thin:
            met = met and _rates_trusted(rates) and len(history) >= 3
        spectrum = Spectrum(
            eigenvalues=(l1, l2),
            error_bounds=(e1, e2),
            levels=(level - 1, level),
            diameter=d,
            xi=xi,
            xi_error=xi_error,
            accuracy_met=met,
            rates=rates,
        )
        if met:
            break
    assert spectrum is not None
    return spectrum


def _vertex_diameter(verts: np.ndarray) -> float:
    sides = [
        float(np.hypot(*(verts[i] - verts[j])))
        for i, j in ((0, 1), (1, 2), (2, 0))
    ]
    return max(sides)


def _rates(history: list[tuple[float, float]]) -> tuple[float, float] | None:
    if len(history) < 3:
        return None
    out = []
    for i in range(2):
        d_prev = history[-3][i] - history[-2][i]
        d_last = history[-2][i] - history[-1][i]
        out.append(d_prev / d_last if d_last > 0.0 else math.inf)
    return (out[0], out[1])


def _rates_trusted(rates: tuple[float, float] | None) -> bool:
    if rates is None:
        return False
    lo, hi = RATE_WINDOW
    return all(lo <= r <= hi for r in rates)
