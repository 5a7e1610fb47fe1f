"""Removing the winding numbers of a nowhere-vanishing 1-form.

Given ``omega = coef * dz`` nonvanishing on the cycles, the winding numbers
``n_i`` of its chart pullbacks are matched by an algebraic form
``xi = (a + b wp) dz`` with periods ``2 pi i n_i``.  The primitive of ``xi``
is elementary, so ``u = exp(int_p xi)`` is an explicit single-valued
function and ``omega / u`` has zero winding on every cycle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .algebraic import AlgebraicForm, AlgebraicFunction, ElementaryPrimitive, integrate_algebraic
from .cycles import integrate_over_cycle, pullback_winding
from .errors import ConstructionError, PreconditionError

XI_PERIOD_TOL = 1e-9


@dataclass(frozen=True)
class WindingData:
    n: tuple


@dataclass(frozen=True)
class NormalizedForm:
    """``form`` is the dz-coefficient ``coef * exp(-u_exponent)``."""

    form: ex.Expr
    u_exponent: ElementaryPrimitive
    xi: AlgebraicForm
    winding_before: WindingData
    winding_after: WindingData
    xi_period_residual: float

    @property
    def lattice(self):
        return self.xi.lattice


def starting_form(L):
    """The form dz: coefficient 1, nowhere zero, bounded at the puncture."""
    return ex.Const(1.0 + 0j)


def winding_data(coef, cycles):
    return WindingData(tuple(pullback_winding(coef, c) for c in cycles))


def find_xi(L, targets, cycles=None):
    """``xi = a dz + b wp dz`` with ``int_{alpha_k} xi = targets[k]``.

    The period matrix has rows ``(omega_k, -eta_k)``; its determinant is
    ``-2 pi i`` by the Legendre relation, so the system is always solvable.
    """
    targets = np.asarray(targets, dtype=complex)
    if targets.shape != (2,):
        raise PreconditionError("genus-1 period targets need length 2")
    mat = np.array([[L.omega1, -L.eta1], [L.omega2, -L.eta2]])
    det = np.linalg.det(mat)
    if abs(det) < 1e-6 * np.linalg.norm(mat) ** 2:
        raise ConstructionError("period matrix near singular")
    a, b = np.linalg.solve(mat, targets)
    xi = AlgebraicForm(AlgebraicFunction(L, (a, b)))
    if cycles is not None:
        res = xi_period_residual(xi, cycles, targets)
        if res > XI_PERIOD_TOL * max(1.0, float(np.max(np.abs(targets)))):
            raise ConstructionError(f"xi periods off by {res:.3g}")
    return xi


def xi_period_residual(xi, cycles, targets):
    got = [integrate_over_cycle(xi.coefficient, c, tol=1e-13).value for c in cycles]
    return float(np.max(np.abs(np.asarray(got) - np.asarray(targets))))


def normalize(L, omega, cycles):
    """Divide ``omega`` by ``u = exp(int_p xi)`` so every winding number is 0."""
    before = winding_data(omega, cycles)
    targets = [2j * np.pi * n for n in before.n]
    p = cycles[0].base_point
    if not any(before.n):
        prim = ElementaryPrimitive(AlgebraicFunction(L))
        xi = AlgebraicForm(AlgebraicFunction(L))
        return NormalizedForm(omega, prim, xi, before, before, 0.0)
    xi = find_xi(L, targets)
    res = xi_period_residual(xi, cycles, targets)
    prim = integrate_algebraic(xi.coefficient)
    prim = prim.shifted(-prim.evaluate(p))
    form = ex.Product((omega, ex.Exp(ex.Product((ex.Const(-1.0), prim.to_expr())))))
    after = winding_data(form, cycles)
    if any(after.n):
        raise ConstructionError(f"normalized winding is {after.n}, expected zeros")
    return NormalizedForm(form, prim, xi, before, after, res)
