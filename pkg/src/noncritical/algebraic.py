"""Elliptic functions with poles only at the puncture, and their primitives.

Every such function has a unique representation

    f = P0(wp) + wp' * P1(wp)

with polynomial coefficients ``P0``, ``P1``; products are reduced back to this
form with ``wp'^2 = 4 wp^3 - g2 wp - g3``.  The monomial of pole order ``k`` is
``wp^(k/2)`` for even ``k`` and ``wp^((k-3)/2) wp'`` for odd ``k >= 3``; no
monomial has pole order 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import elliptic as ek
from . import expr as ex
from .errors import UndefinedDegreeError


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(complex(x) for x in c)


def _padd(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _pmul(a, b):
    if not a or not b:
        return []
    return list(np.convolve(np.asarray(a, complex), np.asarray(b, complex)))


def _pscale(a, s):
    return [s * x for x in a]


@dataclass(frozen=True)
class AlgebraicFunction:
    lattice: ek.Lattice
    p0: tuple = ()
    p1: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "p0", _trim(self.p0))
        object.__setattr__(self, "p1", _trim(self.p1))

    # -- construction ------------------------------------------------------
    @classmethod
    def constant(cls, L, c):
        return cls(L, (c,))

    @classmethod
    def monomial(cls, L, pole_order):
        k = int(pole_order)
        if k < 0 or k == 1:
            raise ValueError(f"no monomial of pole order {k}")
        if k % 2 == 0:
            return cls(L, (0,) * (k // 2) + (1,))
        return cls(L, (), (0,) * ((k - 3) // 2) + (1,))

    @classmethod
    def from_basis(cls, L, orders, coefficients):
        out = cls(L)
        for k, c in zip(orders, coefficients):
            out = out + cls.monomial(L, k).scale(c)
        return out

    # -- algebra -----------------------------------------------------------
    def is_zero(self):
        return not self.p0 and not self.p1

    def __add__(self, other):
        if not isinstance(other, AlgebraicFunction):
            other = AlgebraicFunction.constant(self.lattice, other)
        return AlgebraicFunction(self.lattice, _padd(self.p0, other.p0),
                                 _padd(self.p1, other.p1))

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other if isinstance(other, AlgebraicFunction) else -other)

    def scale(self, s):
        return AlgebraicFunction(self.lattice, _pscale(self.p0, s), _pscale(self.p1, s))

    def __mul__(self, other):
        if not isinstance(other, AlgebraicFunction):
            return self.scale(other)
        L = self.lattice
        cubic = [-L.g3, -L.g2, 0, 4]  # wp'^2
        p0 = _padd(_pmul(self.p0, other.p0), _pmul(_pmul(self.p1, other.p1), cubic))
        p1 = _padd(_pmul(self.p0, other.p1), _pmul(self.p1, other.p0))
        return AlgebraicFunction(L, p0, p1)

    __rmul__ = __mul__

    def derivative(self):
        L = self.lattice
        # d(wp^a) = a wp^(a-1) wp'
        d1 = [a * c for a, c in enumerate(self.p0)][1:]
        # d(wp^a wp') = a wp^(a-1) wp'^2 + wp^a (6 wp^2 - g2/2)
        dP1 = [a * c for a, c in enumerate(self.p1)][1:]
        d0 = _padd(_pmul(dP1, [-L.g3, -L.g2, 0, 4]), _pmul(self.p1, [-L.g2 / 2, 0, 6]))
        return AlgebraicFunction(L, d0, d1)

    def canonical(self):
        return AlgebraicFunction(self.lattice, self.p0, self.p1)

    # -- evaluation --------------------------------------------------------
    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        if self.is_zero():
            out = np.zeros(z.shape, complex)
            return complex(out) if out.ndim == 0 else out
        p = ek.wp(self.lattice, z)
        val = np.polyval(self.p0[::-1], p) if self.p0 else 0j
        if self.p1:
            val = val + ek.wp_prime(self.lattice, z) * np.polyval(self.p1[::-1], p)
        val = np.asarray(val, complex) + np.zeros(z.shape)
        return complex(val) if val.ndim == 0 else val

    __call__ = evaluate

    def terms(self):
        """``(pole_order, coefficient)`` pairs of the nonzero monomials."""
        out = [(2 * a, c) for a, c in enumerate(self.p0) if c != 0]
        out += [(2 * a + 3, c) for a, c in enumerate(self.p1) if c != 0]
        return sorted(out, key=lambda t: t[0])

    def to_expr(self, leaves=None):
        L = self.lattice
        if leaves is None:
            leaves = (ex.Wp(L), ex.WpPrime(L))
        w, dw = leaves
        parts = []
        for a, c in enumerate(self.p0):
            if c == 0:
                continue
            parts.append(ex.Const(c) if a == 0 else
                         ex.Product((ex.Const(c), w if a == 1 else ex.Power(w, a))))
        for a, c in enumerate(self.p1):
            if c == 0:
                continue
            fac = (ex.Const(c),) + (() if a == 0 else (w if a == 1 else ex.Power(w, a),))
            parts.append(ex.Product(fac + (dw,)))
        if not parts:
            return ex.Const(0j)
        return parts[0] if len(parts) == 1 else ex.Sum(tuple(parts))

    def to_dict(self):
        return {"p0": [[c.real, c.imag] for c in self.p0],
                "p1": [[c.real, c.imag] for c in self.p1]}

    @classmethod
    def from_dict(cls, L, d):
        return cls(L, [complex(*c) for c in d["p0"]], [complex(*c) for c in d["p1"]])


def pole_order_at_puncture(f):
    """Order of the pole of ``f`` at the puncture (its degree as a map to P^1)."""
    if f.is_zero():
        raise UndefinedDegreeError("the zero function has no degree")
    return max(k for k, _ in f.terms())


def monomial_orders(max_pole_order):
    """Pole orders available up to ``max_pole_order``: 0, 2, 3, 4, ..."""
    return [k for k in range(int(max_pole_order) + 1) if k != 1]


def monomial_values(L, z, orders):
    """Matrix of monomial values, one column per pole order."""
    z = np.asarray(z, dtype=complex)
    p = ek.wp(L, z)
    dp = ek.wp_prime(L, z)
    cols = []
    for k in orders:
        cols.append(p ** (k // 2) if k % 2 == 0 else p ** ((k - 3) // 2) * dp)
    return np.stack(cols, axis=-1)


@dataclass(frozen=True)
class AlgebraicForm:
    """The 1-form ``coefficient * dz``."""

    coefficient: AlgebraicFunction

    @property
    def lattice(self):
        return self.coefficient.lattice


@dataclass(frozen=True)
class ElementaryPrimitive:
    """``elliptic_part + linear_coeff * z + zeta_coeff * zeta(z)``."""

    elliptic_part: AlgebraicFunction
    linear_coeff: complex = 0j
    zeta_coeff: complex = 0j

    @property
    def lattice(self):
        return self.elliptic_part.lattice

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        val = self.elliptic_part.evaluate(z) + self.linear_coeff * z
        if self.zeta_coeff != 0:
            val = val + self.zeta_coeff * ek.zeta_w(self.lattice, z)
        return complex(val) if np.ndim(val) == 0 else val

    __call__ = evaluate

    def derivative(self):
        L = self.lattice
        d = self.elliptic_part.derivative() + AlgebraicFunction.constant(L, self.linear_coeff)
        return d - AlgebraicFunction.monomial(L, 2).scale(self.zeta_coeff)

    def shifted(self, c):
        """The same primitive plus the constant ``c``."""
        return ElementaryPrimitive(self.elliptic_part + complex(c),
                                   self.linear_coeff, self.zeta_coeff)

    def increment(self, m, n):
        """Change across the lattice vector ``m*omega1 + n*omega2``."""
        L = self.lattice
        om = m * L.omega1 + n * L.omega2
        return self.linear_coeff * om + self.zeta_coeff * ek.eta_of(L, m, n)

    def to_expr(self, leaves=None):
        L = self.lattice
        parts = [self.elliptic_part.to_expr(leaves)]
        if self.linear_coeff != 0:
            parts.append(ex.Product((ex.Const(self.linear_coeff), ex.Var())))
        if self.zeta_coeff != 0:
            parts.append(ex.Product((ex.Const(self.zeta_coeff), ex.Zeta(L))))
        return parts[0] if len(parts) == 1 else ex.Sum(tuple(parts))

    def to_dict(self):
        lc, zc = complex(self.linear_coeff), complex(self.zeta_coeff)
        return {"elliptic_part": self.elliptic_part.to_dict(),
                "linear_coeff": [lc.real, lc.imag],
                "zeta_coeff": [zc.real, zc.imag]}


def integrate_algebraic(f):
    """Closed-form primitive of ``f dz``.

    ``wp^a wp'`` integrates to ``wp^(a+1)/(a+1)``.  Powers ``wp^a`` with
    ``a >= 2`` are lowered with

        (4a-2) wp^a = d(wp^(a-2) wp') + (a - 3/2) g2 wp^(a-2) + (a-2) g3 wp^(a-3)

    until only ``1`` and ``wp`` remain, which integrate to ``z`` and ``-zeta``.
    """
    L = f.lattice
    ell = [0j] * (len(f.p1) + 1)
    for a, c in enumerate(f.p1):
        ell[a + 1] += c / (a + 1)
    elliptic = AlgebraicFunction(L, ell)

    c = list(f.p0) + [0j, 0j]
    ell1 = [0j] * max(len(f.p0), 1)
    for a in range(len(f.p0) - 1, 1, -1):
        k = c[a] / (4 * a - 2)
        if k == 0:
            continue
        ell1[a - 2] += k
        c[a - 2] += k * (a - 1.5) * L.g2
        if a >= 3:
            c[a - 3] += k * (a - 2) * L.g3
    elliptic = elliptic + AlgebraicFunction(L, (), ell1)
    return ElementaryPrimitive(elliptic, complex(c[0]), -complex(c[1]))
