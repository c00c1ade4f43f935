"""Quadrature accuracy tests.

The oracle is the closed-form monomial integral over the reference triangle
with vertices (0,0), (1,0), (0,1):

    int x^a y^b dx dy = a! b! / (a + b + 2)!
"""

import math

import numpy as np
import pytest

from trigap.quadrature import integrate, reference_rule, triangle_rule

UNIT = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))


def exact_monomial(a: int, b: int) -> float:
    return math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)


def test_reference_rule_weights_sum_to_area():
    pts, wts = reference_rule(6)
    assert wts.sum() == pytest.approx(0.5, rel=1e-14)
    assert pts.shape[1] == 2
    assert np.all(wts > 0.0)
    # all nodes strictly inside the closed reference triangle
    assert np.all(pts >= -1e-14)
    assert np.all(pts.sum(axis=1) <= 1.0 + 1e-14)


@pytest.mark.parametrize("a,b", [(a, b) for a in range(0, 12) for b in range(0, 12 - a)])
def test_monomials_exact_to_degree_11(a, b):
    pts, wts = reference_rule(6)
    approx = float(np.sum(wts * pts[:, 0] ** a * pts[:, 1] ** b))
    assert approx == pytest.approx(exact_monomial(a, b), rel=1e-13, abs=1e-16)


def test_affine_mapping_preserves_polynomial_exactness():
    verts = ((0.2, -0.3), (1.7, 0.1), (0.4, 2.0))
    pts, wts = triangle_rule(verts, n=6, subdivision=1)
    # area check
    (x0, y0), (x1, y1), (x2, y2) = verts
    area = 0.5 * abs((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))
    assert wts.sum() == pytest.approx(area, rel=1e-14)
    # an affine-invariant comparison: integrate (x + y)^3 by two subdivisions
    coarse = float(np.sum(wts * (pts[:, 0] + pts[:, 1]) ** 3))
    fine = integrate(lambda x, y: (x + y) ** 3, verts, n=6, subdivision=3)
    assert coarse == pytest.approx(fine, rel=1e-13)


def test_subdivision_converges_on_non_polynomial():
    f = lambda x, y: np.exp(x) * np.cos(4.0 * y)
    vals = [integrate(f, UNIT, n=6, subdivision=s) for s in (1, 2, 4)]
    # richer rules should agree increasingly well
    assert abs(vals[2] - vals[1]) < abs(vals[1] - vals[0])
    assert vals[2] == pytest.approx(vals[1], rel=1e-10)


def test_integrate_matches_tensor_oracle():
    # separable integrand: int_0^1 int_0^{1-x} x e^y dy dx = e - 5/2
    f = lambda x, y: x * np.exp(y)
    exact = math.e - 2.5
    assert integrate(f, UNIT, n=6, subdivision=4) == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("n", [0, -3])
def test_rule_rejects_tiny_orders(n):
    with pytest.raises(ValueError):
        reference_rule(n)
