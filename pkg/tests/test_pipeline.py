import numpy as np
import pytest

from noncritical import expr as ex
from noncritical import pipeline as pl
from noncritical.algebraic import pole_order_at_puncture
from noncritical.config import RunConfig
from noncritical.errors import PreconditionError


def test_exit_code_priority():
    assert pl.exit_code({"a": True}) == 0
    assert pl.exit_code({"fit_epsilon": False, "polydisc": False}) == 3
    assert pl.exit_code({"polydisc": False, "periods": True}) == 4


def test_genus1_construction(square):
    g, nf, body, gates = pl.build_noncritical(square, RunConfig())
    for name in ("periods", "puncture_loop", "path_independence", "nonvanishing",
                 "order_finite", "phi_residual", "gram", "constants_chain"):
        assert gates[name], name
    assert max(body["period_residuals"]) <= 1e-8
    assert np.isfinite(body["min_log_modulus"])


def test_genus0_construction():
    g, nf, body, gates = pl.build_noncritical(None)
    assert all(gates.values()) and pl.exit_code(gates) == 0
    assert body["order"]["mu_hat"] == 0


def test_path_pair_share_endpoints(square):
    x = 0.3 + 0.7j
    a, b = pl.path_pair(square, x)
    assert a[0] == b[0] and a[-1] == b[-1] == x


def test_symmetric_divisor(square):
    a = 0.31 + 0.22j
    f, body, gates = pl.prescribe_divisor(square, [(a, 1), (-a, 1)])
    assert all(gates.values()), gates
    assert body["wp_identity_residual"] <= 1e-8


def test_divisor_with_multiplicity(hexagonal):
    f, body, gates = pl.prescribe_divisor(hexagonal, [(0.3 + 0.2j, 2), (0.6 + 0.5j, 1)])
    assert gates["zero_count"] and gates["zero_locations"] and gates["order_bound"]


@pytest.mark.parametrize("targets", [(1, 0), (0, 1), (1 + 1j, 2 - 1j)])
def test_prescribed_periods(square, targets):
    body, gates = pl.prescribe_periods(square, targets)
    assert gates["achieved_periods"] and gates["nonvanishing"]
    assert body["period_relative_error"] <= 1e-7


def test_prescribed_periods_need_two_targets(square):
    with pytest.raises(PreconditionError):
        pl.prescribe_periods(square, [1.0])


@pytest.mark.parametrize("text,d", [("wp", 2), ("wpp", 3), ("2*wp^2-3*wpp", 4),
                                    ("(1+2j)*wp*wpp+wp^3", 6), ("1-wp", 2)])
def test_parse_function_spec(square, text, d):
    f = pl.parse_function_spec(text, square)
    assert pole_order_at_puncture(f) == d


def test_parse_genus0_spec():
    p = pl.parse_function_spec("z^3-2*z", None)
    assert list(p.coef) == [0, -2, 0, 1]


def test_parse_rejects_garbage(square):
    with pytest.raises(PreconditionError):
        pl.parse_function_spec("sin(z)", square)


def test_count_critical_wp(square):
    rep, body, gates = pl.count_critical(square, "wp")
    assert rep.expected == 3 and gates["critical_count"]


def test_wp_identity_reference(square):
    # -sigma(a)^2 (wp(z) - wp(a)) is the classical form of the pair product
    a = 0.2 + 0.35j
    f, body, _ = pl.prescribe_divisor(square, [(a, 1), (-a, 1)])
    z = np.array([0.6 + 0.1j, 0.45 + 0.7j])
    assert np.all(np.isfinite(ex.evaluate(f, z)))
