import numpy as np
import pytest

from noncritical import expr as ex
from noncritical.cycles import standard_cycles
from noncritical.errors import PreconditionError
from noncritical.normalization import find_xi, normalize, starting_form, winding_data, xi_period_residual


@pytest.mark.parametrize("fixture", ["square", "hexagonal", "skew"])
def test_dz_is_normalised(fixture, request):
    L = request.getfixturevalue(fixture)
    cycles = standard_cycles(L)
    nf = normalize(L, starting_form(L), cycles)
    assert nf.winding_before.n == (-1, -1)
    assert nf.winding_after.n == (0, 0)
    assert nf.xi_period_residual <= 1e-9


def test_xi_solves_period_system(skew):
    cycles = standard_cycles(skew)
    for targets in ([2j * np.pi, 0], [0, -4j * np.pi], [1 + 1j, 2]):
        xi = find_xi(skew, targets, cycles)
        assert xi_period_residual(xi, cycles, targets) < 1e-9


def test_windings_of_exponential_coefficients(square):
    cycles = standard_cycles(square)
    # exp(2 pi i z) contributes one turn along alpha_1 only, cancelling the chart's -1
    coef = ex.Exp(ex.Product((ex.Const(2j * np.pi), ex.Var())))
    assert winding_data(coef, cycles).n == (0, -1)
    both = ex.Exp(ex.Product((ex.Const(2j * np.pi + 2 * np.pi), ex.Var())))
    assert winding_data(both, cycles).n == (0, 0)
    nf = normalize(square, both, cycles)
    assert nf.form is both and nf.xi.coefficient.is_zero()


def test_bad_targets(square):
    with pytest.raises(PreconditionError):
        find_xi(square, [1.0])
