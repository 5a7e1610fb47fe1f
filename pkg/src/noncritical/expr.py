"""Immutable expression trees over the Weierstrass generators.

Trees are built literally by the arithmetic operators; no simplification
happens unless :func:`simplify` is called.  Evaluation is vectorised over
numpy arrays and memoises shared sub-trees within one call, so sharing leaf
objects (as :meth:`AlgebraicFunction.to_expr` does) keeps polynomial
evaluation cheap.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import elliptic as ek
from .errors import PoleProximityError, RangeError

_EXP_LIMIT = 709.0


def _as_expr(x):
    if isinstance(x, Expr):
        return x
    return Const(complex(x))


class Expr:
    """Base class of all nodes."""

    def __add__(self, other):
        return Sum((self, _as_expr(other)))

    def __radd__(self, other):
        return Sum((_as_expr(other), self))

    def __sub__(self, other):
        return Sum((self, Product((Const(-1.0), _as_expr(other)))))

    def __rsub__(self, other):
        return Sum((_as_expr(other), Product((Const(-1.0), self))))

    def __neg__(self):
        return Product((Const(-1.0), self))

    def __mul__(self, other):
        return Product((self, _as_expr(other)))

    def __rmul__(self, other):
        return Product((_as_expr(other), self))

    def __truediv__(self, other):
        return Quotient(self, _as_expr(other))

    def __rtruediv__(self, other):
        return Quotient(_as_expr(other), self)

    def __pow__(self, n):
        if int(n) != n:
            raise TypeError("only integer powers are supported")
        return Power(self, int(n))

    def __call__(self, z):
        return evaluate(self, z)

    def __str__(self):
        return to_prefix(self)

    @property
    def children(self):
        return ()


@dataclass(frozen=True, eq=False)
class Const(Expr):
    value: complex

    def _eval(self, z, memo):
        return self.value

    def _log(self, z, memo):
        return np.log(complex(self.value)) if self.value != 0 else -np.inf + 0j


@dataclass(frozen=True, eq=False)
class Var(Expr):
    def _eval(self, z, memo):
        return z


@dataclass(frozen=True, eq=False)
class _Kernel(Expr):
    lattice: ek.Lattice
    shift: complex = 0j


class Wp(_Kernel):
    def _eval(self, z, memo):
        return ek.wp(self.lattice, z - self.shift)


class WpPrime(_Kernel):
    def _eval(self, z, memo):
        return ek.wp_prime(self.lattice, z - self.shift)


class Zeta(_Kernel):
    def _eval(self, z, memo):
        return ek.zeta_w(self.lattice, z - self.shift)


class Sigma(_Kernel):
    """``sigma(z - shift)``."""

    def _eval(self, z, memo):
        return ek.sigma(self.lattice, z - self.shift)

    def _log(self, z, memo):
        return ek.log_sigma(self.lattice, z - self.shift)


@dataclass(frozen=True, eq=False)
class Exp(Expr):
    arg: Expr

    @property
    def children(self):
        return (self.arg,)

    def _eval(self, z, memo):
        a = _ev(self.arg, z, memo)
        top = np.max(np.real(a))
        if top > _EXP_LIMIT:
            raise RangeError(f"exp overflow, exponent real part {top:.4g}", top)
        return np.exp(a)

    def _log(self, z, memo):
        return _ev(self.arg, z, memo) + 0j


@dataclass(frozen=True, eq=False)
class Sum(Expr):
    terms: tuple

    @property
    def children(self):
        return self.terms

    def _eval(self, z, memo):
        out = 0j
        for t in self.terms:
            out = out + _ev(t, z, memo)
        return out

    def _log(self, z, memo):
        logs = [_lg(t, z, memo) for t in self.terms]
        top = np.max(np.real(np.broadcast_arrays(*logs)), axis=0)
        top = np.where(np.isfinite(top), top, 0.0)
        acc = sum(np.exp(lg - top) for lg in logs)
        with np.errstate(divide="ignore"):
            return top + np.log(acc + 0j)


@dataclass(frozen=True, eq=False)
class Product(Expr):
    factors: tuple

    @property
    def children(self):
        return self.factors

    def _eval(self, z, memo):
        out = 1.0 + 0j
        for f in self.factors:
            out = out * _ev(f, z, memo)
        return out

    def _log(self, z, memo):
        return sum(_lg(f, z, memo) for f in self.factors)


@dataclass(frozen=True, eq=False)
class Quotient(Expr):
    num: Expr
    den: Expr

    @property
    def children(self):
        return (self.num, self.den)

    def _eval(self, z, memo):
        d = _ev(self.den, z, memo)
        if np.any(d == 0):
            raise PoleProximityError("division by an exact zero")
        return _ev(self.num, z, memo) / d

    def _log(self, z, memo):
        return _lg(self.num, z, memo) - _lg(self.den, z, memo)


@dataclass(frozen=True, eq=False)
class Power(Expr):
    base: Expr
    n: int

    @property
    def children(self):
        return (self.base,)

    def _eval(self, z, memo):
        b = _ev(self.base, z, memo)
        if self.n < 0 and np.any(b == 0):
            raise PoleProximityError("negative power of an exact zero")
        return b**self.n

    def _log(self, z, memo):
        return self.n * _lg(self.base, z, memo)


def _ev(e, z, memo):
    key = id(e)
    if key not in memo:
        memo[key] = e._eval(z, memo)
    return memo[key]


def _lg(e, z, memo):
    key = ("log", id(e))
    if key not in memo:
        fn = getattr(e, "_log", None)
        if fn is None:
            with np.errstate(divide="ignore"):
                memo[key] = np.log(_ev(e, z, memo) + 0j)
        else:
            memo[key] = fn(z, memo)
    return memo[key]


def evaluate(e, z):
    """Value of ``e`` at ``z`` (scalar or array)."""
    z = np.asarray(z, dtype=complex)
    val = _ev(e, z, {})
    val = np.broadcast_to(np.asarray(val, dtype=complex), z.shape)
    return complex(val) if val.ndim == 0 else val.copy()


def log_evaluate(e, z):
    """A complex logarithm of ``e(z)``, computed without forming ``e(z)``.

    Products, quotients, powers, ``exp`` and ``sigma`` are combined in log
    space, so values far beyond double range are representable.  The
    imaginary part is only meaningful modulo ``2*pi``.
    """
    z = np.asarray(z, dtype=complex)
    val = np.broadcast_to(np.asarray(_lg(e, z, {}), dtype=complex), z.shape)
    return complex(val) if val.ndim == 0 else val.copy()


def log_abs(e, z):
    return np.real(log_evaluate(e, z))


# -- differentiation -------------------------------------------------------

def differentiate(e):
    """Symbolic d/dz.  The result is not simplified."""
    if isinstance(e, Const):
        return Const(0j)
    if isinstance(e, Var):
        return Const(1.0 + 0j)
    if isinstance(e, Wp):
        return WpPrime(e.lattice, e.shift)
    if isinstance(e, WpPrime):
        L = e.lattice
        return Const(6.0) * Power(Wp(L, e.shift), 2) - Const(L.g2 / 2)
    if isinstance(e, Zeta):
        return -Wp(e.lattice, e.shift)
    if isinstance(e, Sigma):
        return Product((e, Zeta(e.lattice, e.shift)))
    if isinstance(e, Exp):
        return Product((e, differentiate(e.arg)))
    if isinstance(e, Sum):
        return Sum(tuple(differentiate(t) for t in e.terms))
    if isinstance(e, Product):
        fs = e.factors
        terms = []
        for i, f in enumerate(fs):
            terms.append(Product(fs[:i] + (differentiate(f),) + fs[i + 1:]))
        return Sum(tuple(terms))
    if isinstance(e, Quotient):
        a, b = e.num, e.den
        top = Sum((Product((differentiate(a), b)),
                   Product((Const(-1.0), a, differentiate(b)))))
        return Quotient(top, Power(b, 2))
    if isinstance(e, Power):
        if e.n == 0:
            return Const(0j)
        return Product((Const(float(e.n)), Power(e.base, e.n - 1), differentiate(e.base)))
    raise TypeError(f"cannot differentiate {type(e).__name__}")


# -- simplification (explicit pass only) -----------------------------------

def simplify(e):
    """Constant folding, flattening, and removal of zero terms / unit factors."""
    if isinstance(e, Sum):
        terms, const = [], 0j
        for t in (simplify(t) for t in e.terms):
            parts = t.terms if isinstance(t, Sum) else (t,)
            for s in parts:
                if isinstance(s, Const):
                    const += s.value
                else:
                    terms.append(s)
        if const != 0 or not terms:
            terms.append(Const(const))
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))
    if isinstance(e, Product):
        factors, const = [], 1.0 + 0j
        for f in (simplify(f) for f in e.factors):
            parts = f.factors if isinstance(f, Product) else (f,)
            for s in parts:
                if isinstance(s, Const):
                    const *= s.value
                else:
                    factors.append(s)
        if const == 0:
            return Const(0j)
        if const != 1 or not factors:
            factors.insert(0, Const(const))
        return factors[0] if len(factors) == 1 else Product(tuple(factors))
    if isinstance(e, Quotient):
        num, den = simplify(e.num), simplify(e.den)
        if isinstance(num, Const) and num.value == 0:
            return Const(0j)
        if isinstance(den, Const):
            return simplify(Product((Const(1 / den.value), num)))
        return Quotient(num, den)
    if isinstance(e, Power):
        base = simplify(e.base)
        if e.n == 0:
            return Const(1.0 + 0j)
        if e.n == 1:
            return base
        if isinstance(base, Const):
            return Const(base.value**e.n)
        return Power(base, e.n)
    if isinstance(e, Exp):
        arg = simplify(e.arg)
        if isinstance(arg, Const):
            return Const(np.exp(arg.value))
        return Exp(arg)
    return e


def node_count(e):
    seen, stack = set(), [e]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        stack.extend(n.children)
    return len(seen)


# -- canonical prefix serialisation ----------------------------------------

_KERNEL_TAGS = {Wp: "wp", WpPrime: "wpp", Zeta: "zeta", Sigma: "sigma"}
_TAG_KERNELS = {v: k for k, v in _KERNEL_TAGS.items()}


def _num(x):
    return repr(float(x))


def _cpx(c):
    c = complex(c)
    return f"{_num(c.real)} {_num(c.imag)}"


def to_prefix(e):
    """Canonical prefix text, complex literals written as two decimals."""
    if isinstance(e, Const):
        return f"(const {_cpx(e.value)})"
    if isinstance(e, Var):
        return "(z)"
    if isinstance(e, _Kernel):
        return f"({_KERNEL_TAGS[type(e)]} {_cpx(e.shift)})"
    if isinstance(e, Exp):
        return f"(exp {to_prefix(e.arg)})"
    if isinstance(e, Sum):
        return "(sum " + " ".join(to_prefix(t) for t in e.terms) + ")"
    if isinstance(e, Product):
        return "(prod " + " ".join(to_prefix(f) for f in e.factors) + ")"
    if isinstance(e, Quotient):
        return f"(quot {to_prefix(e.num)} {to_prefix(e.den)})"
    if isinstance(e, Power):
        return f"(pow {to_prefix(e.base)} {e.n})"
    raise TypeError(type(e).__name__)


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def from_prefix(text, lattice=None):
    """Parse :func:`to_prefix` output.  Kernel leaves are interned."""
    tokens = _TOKEN.findall(text)
    pos = 0
    interned = {}

    def parse():
        nonlocal pos
        if tokens[pos] != "(":
            raise ValueError(f"expected '(' at token {pos}")
        tag = tokens[pos + 1]
        pos += 2
        if tag == "const":
            node = Const(complex(float(tokens[pos]), float(tokens[pos + 1])))
            pos += 2
        elif tag == "z":
            node = interned.setdefault("z", Var())
        elif tag in _TAG_KERNELS:
            if lattice is None:
                raise ValueError("a lattice is required to parse Weierstrass nodes")
            shift = complex(float(tokens[pos]), float(tokens[pos + 1]))
            pos += 2
            key = (tag, shift)
            if key not in interned:
                interned[key] = _TAG_KERNELS[tag](lattice, shift)
            node = interned[key]
        elif tag == "pow":
            base = parse()
            node = Power(base, int(tokens[pos]))
            pos += 1
        else:
            args = []
            while tokens[pos] != ")":
                args.append(parse())
            if tag == "exp":
                node = Exp(args[0])
            elif tag == "sum":
                node = Sum(tuple(args))
            elif tag == "prod":
                node = Product(tuple(args))
            elif tag == "quot":
                node = Quotient(args[0], args[1])
            else:
                raise ValueError(f"unknown node tag {tag!r}")
        if tokens[pos] != ")":
            raise ValueError(f"expected ')' at token {pos}")
        pos += 1
        return node

    node = parse()
    if pos != len(tokens):
        raise ValueError("trailing tokens after expression")
    return node
