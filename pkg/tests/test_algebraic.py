import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from noncritical import elliptic as ek
from noncritical.algebraic import (AlgebraicFunction as A, ElementaryPrimitive, integrate_algebraic,
                                   monomial_orders, pole_order_at_puncture)
from noncritical.errors import UndefinedDegreeError

L = ek.lattice_from_periods(1.0, 0.3 + 1.1j)
Z = np.array([0.37 + 0.21j, 0.52 + 0.74j, 0.11 + 0.49j])

coef = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
polys = st.lists(coef, max_size=4)
algebraic = st.tuples(polys, polys).map(lambda t: A(L, t[0], t[1]))


@given(algebraic, algebraic)
def test_product_reduction_matches_pointwise(f, g):
    lhs = (f * g).evaluate(Z)
    rhs = f.evaluate(Z) * g.evaluate(Z)
    assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-9 * (1 + np.max(np.abs(rhs))))


@given(algebraic)
def test_derivative_matches_finite_difference(f):
    h = 1e-6
    fd = (f.evaluate(Z + h) - f.evaluate(Z - h)) / (2 * h)
    assert np.allclose(f.derivative().evaluate(Z), fd, rtol=1e-6, atol=1e-6 * (1 + np.max(np.abs(fd))))


@given(algebraic)
def test_primitive_differentiates_back(f):
    prim = integrate_algebraic(f)
    d = prim.derivative()
    assert np.allclose(d.evaluate(Z), f.evaluate(Z), rtol=1e-9,
                       atol=1e-9 * (1 + np.max(np.abs(f.evaluate(Z)))))


def test_wp_squared_primitive_closed_form(square):
    # int wp^2 = wp'/6 + g2 z / 12
    prim = integrate_algebraic(A.monomial(square, 4))
    assert prim.elliptic_part.p1 == (1 / 6,)
    assert abs(prim.linear_coeff - square.g2 / 12) < 1e-12
    assert prim.zeta_coeff == 0
    g2 = math.gamma(0.25) ** 8 / (16 * math.pi ** 2)
    assert abs(prim.linear_coeff - g2 / 12) < 1e-9


def test_base_primitives():
    p1 = integrate_algebraic(A.constant(L, 1.0))
    assert p1.linear_coeff == 1 and p1.elliptic_part.is_zero()
    pw = integrate_algebraic(A.monomial(L, 2))
    assert pw.zeta_coeff == -1 and pw.linear_coeff == 0


def test_primitive_increment_is_period():
    prim = ElementaryPrimitive(A(L), 2.0, 3.0)
    assert prim.increment(1, 0) == pytest.approx(2 * L.omega1 + 3 * L.eta1)
    z = 0.4 + 0.3j
    assert prim.evaluate(z + L.omega2) - prim.evaluate(z) == pytest.approx(prim.increment(0, 1))


def test_pole_orders():
    assert monomial_orders(5) == [0, 2, 3, 4, 5]
    for k in (0, 2, 3, 4, 7, 10):
        assert pole_order_at_puncture(A.monomial(L, k)) == k
    with pytest.raises(ValueError):
        A.monomial(L, 1)
    with pytest.raises(UndefinedDegreeError):
        pole_order_at_puncture(A(L))
    # reduction of wp'^2 keeps degree 6
    wpp = A.monomial(L, 3)
    assert pole_order_at_puncture(wpp * wpp) == 6


def test_monomial_pole_growth():
    r = 1e-4
    for k in (2, 3, 4, 5):
        v = abs(A.monomial(L, k).evaluate(r * np.exp(0.3j)))
        assert v * r ** k == pytest.approx(2 if k % 2 else 1, rel=1e-3)


def test_serialisation_round_trip():
    f = A(L, (1 + 2j, 0, 3), (0.5,))
    g = A.from_dict(L, f.to_dict())
    assert g.p0 == f.p0 and g.p1 == f.p1
    from noncritical import expr as ex
    assert np.allclose(ex.evaluate(f.to_expr(), Z), f.evaluate(Z))
