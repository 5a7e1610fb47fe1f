import numpy as np
import pytest

from noncritical import elliptic as ek
from noncritical import expr as ex
from noncritical.cycles import (integrate_around_point, integrate_over_cycle, integrate_over_path,
                                intersection_number, puncture_loop, pullback_winding,
                                standard_cycles, trapezoid_periodic, winding_number,
                                winding_on_circle)
from noncritical.errors import QuadratureError, WindingError


@pytest.fixture(scope="module", params=[1j, np.exp(1j * np.pi / 3), 0.4 + 1.3j])
def lattice_cycles(request):
    L = ek.lattice_from_periods(1.0, request.param)
    return L, standard_cycles(L)


def test_periods_of_dz_wp_wpprime(lattice_cycles):
    L, cycles = lattice_cycles
    for c, om, eta in zip(cycles, L.periods, L.etas):
        assert abs(integrate_over_cycle(ex.Const(1.0), c).value - om) < 1e-13
        assert abs(integrate_over_cycle(ex.Wp(L), c).value + eta) < 1e-10
        assert abs(integrate_over_cycle(ex.WpPrime(L), c).value) < 1e-10


def test_charts_map_circle_to_cycles(lattice_cycles):
    _, cycles = lattice_cycles
    for c in cycles:
        t, w, z = c.circle(64)
        assert np.allclose(c.chart(w[1:32]), z[1:32])
        assert c.chart(1.0) == pytest.approx(c.base_point)


def test_dz_pullback_winds_minus_one(lattice_cycles):
    _, cycles = lattice_cycles
    assert [pullback_winding(ex.Const(1.0), c) for c in cycles] == [-1, -1]


def test_intersection_numbers(lattice_cycles):
    L, (a1, a2) = lattice_cycles
    t = np.arange(64) / 64
    loop1, loop2 = a1.alpha(t), a2.alpha(t)
    assert intersection_number(a1, loop2) == 1
    assert intersection_number(a2, loop1) == -1
    assert intersection_number(a1, puncture_loop(0.1 * abs(L.omega1))[:-1]) == 0


def test_trapezoid_is_exact_on_trigonometric_polynomials():
    res = trapezoid_periodic(lambda t: 3 + np.cos(2 * np.pi * 5 * t))
    assert abs(res.value - 3) < 1e-15


def test_trapezoid_reports_nonconvergence():
    with pytest.raises(QuadratureError):
        trapezoid_periodic(lambda t: np.abs(t - 0.5) ** 0.5, nmax=2**10)


def test_windings():
    assert winding_on_circle(lambda w: w ** 2) == 2
    assert winding_on_circle(lambda w: np.exp(w)) == 0
    with pytest.raises(WindingError):
        winding_on_circle(lambda w: w - 1)


def test_winding_of_functions_along_cycles(square):
    cycles = standard_cycles(square)
    # exp(2 pi i z) winds once along alpha_1 and not along alpha_2
    f = lambda z: np.exp(2j * np.pi * z)
    assert [winding_number(f, c) for c in cycles] == [1, 0]


def test_path_and_circle_quadrature(square):
    # residue of wp is 0; residue of zeta is 1
    assert abs(integrate_around_point(ex.Wp(square), 0j, 0.2).value) < 1e-12
    assert abs(integrate_around_point(ex.Zeta(square), 0j, 0.2).value - 2j * np.pi) < 1e-12
    p = 0.5 + 0.5j
    val = integrate_over_path(ex.Wp(square), [p, p + 0.3, p + 0.3j]).value
    exact = -(ek.zeta_w(square, p + 0.3j) - ek.zeta_w(square, p))
    assert abs(val - exact) < 1e-12
