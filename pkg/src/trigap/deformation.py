"""Linear deformation theory around a triangle apex.

Moving the apex (j, k) by t(a, b) is an affine map, equivalently a flat
Riemannian metric on the undeformed triangle.  The extreme eigenvalues of
the inverse metric sandwich every Dirichlet eigenvalue of the deformed
triangle, and expanding the associated Laplacian in t yields the
perturbation operators whose quadratic forms control the first-order
behavior of the gap.  Specialized to the equilateral triangle (k = sqrt3/2),
the first-order gap change along any diameter-preserving direction has an
explicit closed form whose minimum over directions and second-eigenspace
rotations is strictly positive; that minimum is computed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .lame import (
    LAMBDA1,
    TrigSum,
    equilateral_integral,
    phi1_trigsum,
    second_basis,
)

__all__ = [
    "DeformationDirection",
    "InverseMetric",
    "GammaBounds",
    "SecondEigenspaceCoeffs",
    "MinimizeIResult",
    "EQUILATERAL_HEIGHT",
    "deformation_matrix",
    "inverse_metric",
    "gamma_bounds",
    "gamma_spread_closed_form",
    "alpha_bound",
    "perturbation_operator_coeffs",
    "apply_operator",
    "lambda1_slope",
    "lambda1_slope_closed_form",
    "slope_gap_I",
    "slope_gap_I_quadrature",
    "slope_gap_branch_extremes",
    "minimize_I",
    "preserves_diameter",
]

EQUILATERAL_HEIGHT = math.sqrt(3.0) / 2.0
_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class DeformationDirection:
    """Unit direction (a, b) of apex motion."""

    a: float
    b: float

    def __post_init__(self) -> None:
        norm = math.hypot(self.a, self.b)
        if not 0.999999 <= norm <= 1.000001:
            raise ValueError(f"direction must be a unit vector, |.|={norm}")
        object.__setattr__(self, "a", self.a / norm)
        object.__setattr__(self, "b", self.b / norm)


@dataclass(frozen=True)
class InverseMetric:
    """Entries [[A, B], [B, D]] of the inverse deformation metric."""

    A: float
    B: float
    D: float

    def __post_init__(self) -> None:
        if self.A <= 0.0 or self.A * self.D - self.B * self.B <= 0.0:
            raise ValueError("inverse metric must be positive definite")

    @property
    def determinant(self) -> float:
        return self.A * self.D - self.B * self.B


@dataclass(frozen=True)
class GammaBounds:
    """Sandwich factors: gamma_minus lam_i <= lam_i(t) <= gamma_plus lam_i."""

    gamma_minus: float
    gamma_plus: float

    @property
    def spread(self) -> float:
        return self.gamma_plus - self.gamma_minus


@dataclass(frozen=True)
class SecondEigenspaceCoeffs:
    """Unit coefficients of phi = alpha u + beta v in the second eigenspace."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        norm = math.hypot(self.alpha, self.beta)
        if not 0.999999 <= norm <= 1.000001:
            raise ValueError(f"coefficients must be a unit vector, |.|={norm}")
        object.__setattr__(self, "alpha", self.alpha / norm)
        object.__setattr__(self, "beta", self.beta / norm)


def _check_no_collapse(k: float, direction: DeformationDirection, t: float) -> None:
    if k <= 0.0:
        raise ValueError("apex height k must be positive")
    if t < 0.0:
        raise ValueError("deformation magnitude t must be non-negative")
    if k + t * direction.b <= 0.0:
        raise ValueError(f"deformation collapses the triangle: k + t*b = {k + t * direction.b}")


def deformation_matrix(
    apex: tuple[float, float], direction: DeformationDirection, t: float
) -> np.ndarray:
    """Affine map sending the triangle with the given apex onto the deformed one."""
    k = apex[1]
    _check_no_collapse(k, direction, t)
    return np.array(
        [[1.0, t * direction.a / k], [0.0, 1.0 + t * direction.b / k]]
    )


def inverse_metric(k: float, direction: DeformationDirection, t: float) -> InverseMetric:
    _check_no_collapse(k, direction, t)
    a, b = direction.a, direction.b
    denom = (k + t * b) ** 2
    return InverseMetric(
        A=(k * k + 2.0 * b * k * t + t * t) / denom,
        B=-t * a * k / denom,
        D=k * k / denom,
    )


def gamma_bounds(k: float, direction: DeformationDirection, t: float) -> GammaBounds:
    g = inverse_metric(k, direction, t)
    half_trace = 0.5 * (g.A + g.D)
    half_disc = 0.5 * math.sqrt((g.A - g.D) ** 2 + 4.0 * g.B * g.B)
    return GammaBounds(
        gamma_minus=half_trace - half_disc, gamma_plus=half_trace + half_disc
    )


def gamma_spread_closed_form(
    k: float, direction: DeformationDirection, t: float
) -> float:
    """gamma_plus - gamma_minus = t sqrt(4k^2 + t^2 + 4bkt) / (k + tb)^2."""
    _check_no_collapse(k, direction, t)
    b = direction.b
    return (
        t
        * math.sqrt(4.0 * k * k + t * t + 4.0 * b * k * t)
        / (k + t * b) ** 2
    )


def alpha_bound(direction: DeformationDirection, t: float) -> float:
    """Relative first-order bound at the equilateral triangle.

    |lam_i(t) - lam_i| <= t * alpha_bound * lam_i; the factor is
    4 sqrt(3 + 2 sqrt3 b t + t^2) / (sqrt3 + 2tb)^2 and stays below 2.32
    for t <= 0.0004 regardless of direction.
    """
    _check_no_collapse(EQUILATERAL_HEIGHT, direction, t)
    b = direction.b
    return (
        4.0
        * math.sqrt(3.0 + 2.0 * _SQRT3 * b * t + t * t)
        / (_SQRT3 + 2.0 * t * b) ** 2
    )


def perturbation_operator_coeffs(
    direction: DeformationDirection, t: float
) -> dict[str, dict[str, float]]:
    """Coefficients of L, L1, L2 on (dxx, dxy, dyy) at the equilateral base.

    The deformed Laplacian splits as Delta = Delta0 + t L = Delta0 + t L1
    + t^2 L2, an exact coefficient identity (not a truncation).
    """
    _check_no_collapse(EQUILATERAL_HEIGHT, direction, t)
    a, b = direction.a, direction.b
    denom = (_SQRT3 + 2.0 * t * b) ** 2
    pref_l = 3.0 / denom  # 1/(1 + 2tb/sqrt3)^2
    coeff_l = {
        "dxx": pref_l * 4.0 * t * a * a / 3.0,
        "dxy": pref_l * (-4.0 * a / _SQRT3),
        "dyy": pref_l * (-(4.0 * b / _SQRT3 + 4.0 * t * b * b / 3.0)),
    }
    pref1 = 4.0 * _SQRT3 / denom
    coeff_l1 = {"dxx": 0.0, "dxy": -a * pref1, "dyy": -b * pref1}
    pref2 = 4.0 / denom
    coeff_l2 = {"dxx": a * a * pref2, "dxy": 0.0, "dyy": -b * b * pref2}
    return {"L": coeff_l, "L1": coeff_l1, "L2": coeff_l2}


def apply_operator(coeffs: dict[str, float], f: TrigSum) -> TrigSum:
    """Second-order operator c_xx dxx + c_xy dxy + c_yy dyy applied to f."""
    fx = f.dx()
    fy = f.dy()
    parts = [
        fx.dx().scaled(coeffs["dxx"]),
        fx.dy().scaled(coeffs["dxy"]),
        fy.dy().scaled(coeffs["dyy"]),
    ]
    return TrigSum(
        np.concatenate([p.coef for p in parts]),
        np.concatenate([p.kx for p in parts]),
        np.concatenate([p.ky for p in parts]),
        np.concatenate([p.is_cos for p in parts]),
    )


def _l1_at_zero(direction: DeformationDirection) -> dict[str, float]:
    return perturbation_operator_coeffs(direction, 0.0)["L1"]


def lambda1_slope(direction: DeformationDirection, n: int = 6) -> float:
    """First-order change of lambda1: -int phi1 (L1|_{t=0}) phi1 by quadrature."""
    p = phi1_trigsum()
    lp = apply_operator(_l1_at_zero(direction), p)
    return -equilateral_integral(lambda x, y: p(x, y) * lp(x, y), n=n)


def lambda1_slope_closed_form(direction: DeformationDirection) -> float:
    """Equals -(2b/sqrt3) lambda1 (the cross-derivative integral vanishes)."""
    return -2.0 * direction.b * LAMBDA1 / _SQRT3


def _combined(coeffs: SecondEigenspaceCoeffs) -> TrigSum:
    u, v = second_basis()
    return TrigSum(
        np.concatenate([u.coef * coeffs.alpha, v.coef * coeffs.beta]),
        np.concatenate([u.kx, v.kx]),
        np.concatenate([u.ky, v.ky]),
        np.concatenate([u.is_cos, v.is_cos]),
    )


def slope_gap_I(
    coeffs: SecondEigenspaceCoeffs, direction: DeformationDirection
) -> float:
    """Closed form of I = -int phi L1 phi + int phi1 L1 phi1.

    I is the first-order gap slope along (a, b) when the second eigenvalue
    branch follows phi = alpha u + beta v.
    """
    a, b = direction.a, direction.b
    al, be = coeffs.alpha, coeffs.beta
    g = al * al - be * be + 2.0 * _SQRT3 * al * be
    h = be * be - al * al + 2.0 * al * be / _SQRT3
    return (
        -((25600.0 * math.pi**2 + g * 59049.0) / (1800.0 * _SQRT3)) * b
        - (6561.0 / 200.0) * h * a
    )


def slope_gap_I_quadrature(
    coeffs: SecondEigenspaceCoeffs, direction: DeformationDirection, n: int = 6
) -> float:
    """I evaluated directly from its defining integrals."""
    l1 = _l1_at_zero(direction)
    phi = _combined(coeffs)
    p = phi1_trigsum()
    lphi = apply_operator(l1, phi)
    lp = apply_operator(l1, p)
    term2 = equilateral_integral(lambda x, y: phi(x, y) * lphi(x, y), n=n)
    term1 = equilateral_integral(lambda x, y: p(x, y) * lp(x, y), n=n)
    return -term2 + term1


def preserves_diameter(direction: DeformationDirection) -> bool:
    """Directions that keep the deformed equilateral triangle's diameter at 1."""
    return direction.a >= -1e-12 and direction.a + _SQRT3 * direction.b <= 1e-12


def slope_gap_branch_extremes(
    direction: DeformationDirection,
) -> tuple[float, float]:
    """Range of I over all unit second-eigenspace coefficients, closed form.

    Writing (alpha, beta) = (cos s, sin s) and psi = 2s - pi/3 turns I into
    C0 - C1 cos(psi) - C2 sin(psi), so the extremes are C0 -+ sqrt(C1^2+C2^2).
    """
    a, b = direction.a, direction.b
    c0 = -25600.0 * math.pi**2 * b / (1800.0 * _SQRT3)
    c1 = 118098.0 * b / (1800.0 * _SQRT3)
    c2 = 6561.0 * a / (100.0 * _SQRT3)
    radius = math.hypot(c1, c2)
    return (c0 - radius, c0 + radius)


@dataclass(frozen=True)
class MinimizeIResult:
    value: float
    coeffs: SecondEigenspaceCoeffs
    direction: DeformationDirection
    angle_s: float

    @property
    def closed_form_minimum(self) -> float:
        return (25600.0 * math.pi**2 - 236196.0) / (3600.0 * _SQRT3)


def _objective_arrays(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # I(s, a) = A1(s) sqrt(1 - a^2) + A2(s) a  with b = -sqrt(1 - a^2).
    g = np.cos(2.0 * s) + _SQRT3 * np.sin(2.0 * s)
    h = -np.cos(2.0 * s) + np.sin(2.0 * s) / _SQRT3
    a1 = (25600.0 * math.pi**2 + 59049.0 * g) / (1800.0 * _SQRT3)
    a2 = -(6561.0 / 200.0) * h
    return a1, a2


def minimize_I(grid: int = 10000) -> MinimizeIResult:
    """Global minimum of I over unit (alpha, beta) and diameter-preserving (a, b).

    Dense separable grid (grid x grid) over the eigenspace angle s and
    a in [0, sqrt3/2] with b = -sqrt(1 - a^2), refined by local descent.
    The minimum sits at s = pi/2, a = sqrt3/2 and is strictly positive,
    which is what makes the equilateral triangle a strict local minimum.
    """
    s = np.linspace(0.0, 2.0 * math.pi, grid, endpoint=False)
    a = np.linspace(0.0, EQUILATERAL_HEIGHT, grid)
    root = np.sqrt(np.clip(1.0 - a * a, 0.0, None))
    a1, a2 = _objective_arrays(s)
    best = (math.inf, 0, 0)
    chunk = 256
    for lo in range(0, grid, chunk):
        block = a1[lo : lo + chunk, None] * root[None, :] + a2[
            lo : lo + chunk, None
        ] * a[None, :]
        flat = int(np.argmin(block))
        value = float(block.flat[flat])
        if value < best[0]:
            si, ai = divmod(flat, grid)
            best = (value, lo + si, ai)

    def objective(x):
        sv, av = x
        av = min(max(av, 0.0), EQUILATERAL_HEIGHT)
        one, two = _objective_arrays(np.asarray([sv]))
        return float(one[0] * math.sqrt(1.0 - av * av) + two[0] * av)

    start = np.array([s[best[1]], a[best[2]]])
    refined = optimize.minimize(
        objective,
        start,
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 2000},
    )
    sv = float(refined.x[0])
    av = float(min(max(refined.x[1], 0.0), EQUILATERAL_HEIGHT))
    value = objective([sv, av])
    if value > best[0]:
        sv, av, value = float(s[best[1]]), float(a[best[2]]), best[0]
    # the objective is pi-periodic in s (quadratic in the coefficients), so
    # report the canonical representative with beta = sin(s) >= 0
    sv = sv % math.pi
    return MinimizeIResult(
        value=value,
        coeffs=SecondEigenspaceCoeffs(math.cos(sv), math.sin(sv)),
        direction=DeformationDirection(av, -math.sqrt(1.0 - av * av)),
        angle_s=sv,
    )
