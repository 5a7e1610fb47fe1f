"""Finite-order functions with a prescribed zero divisor on the punctured torus.

For an effective divisor ``sum m_k [a_k]`` avoiding the origin, take
representatives ``a_k`` in the fundamental parallelogram and put
``n = sum m_k``, ``s = sum m_k a_k``.  Then

    f(z) = exp(s * zeta(z)) * prod sigma(z - a_k)^m_k / sigma(z)^n

is doubly periodic: across ``omega_k`` the sigma quotient picks up
``exp(-eta_k s)`` and the exponential picks up ``exp(+eta_k s)``.  Its zeros
are exactly the ``a_k`` and its only singularity is the essential one at the
origin, where ``log|f| ~ Re(s/z)`` gives order at most 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .cycles import integrate_around_point
from .elliptic import TorusPoint
from .errors import InvalidDivisorError


@dataclass(frozen=True)
class Divisor:
    entries: tuple  # of (TorusPoint, multiplicity)

    @classmethod
    def from_points(cls, L, pairs):
        """Build from ``(z, multiplicity)`` pairs, merging equal points."""
        merged = {}
        order = []
        for z, m in pairs:
            m = int(m)
            if m <= 0:
                raise InvalidDivisorError(f"multiplicity must be positive, got {m}")
            pt = TorusPoint(complex(z), L)
            if pt.reduces_to_puncture():
                raise InvalidDivisorError(f"divisor point {z} reduces to the puncture")
            key = None
            for k in order:
                if L.is_lattice_point(k - pt.canonical(), atol=1e-12):
                    key = k
                    break
            if key is None:
                key = pt.canonical()
                order.append(key)
                merged[key] = 0
            merged[key] += m
        return cls(tuple((TorusPoint(k, L), merged[k]) for k in order))

    @property
    def degree(self):
        return sum(m for _, m in self.entries)

    def points(self):
        return [pt.canonical() for pt, _ in self.entries]

    def representatives(self):
        """Representatives ``a_k`` and ``s = sum m_k a_k`` used by the construction.

        Points start in the fundamental parallelogram; the entry of smallest
        multiplicity is then moved by a lattice vector so that ``s`` is as close
        to 0 as that multiplicity allows (``s = 0`` for principal divisors when
        that multiplicity is 1).
        """
        if not self.entries:
            return [], 0j
        L = self.entries[0][0].lattice
        reps = [[pt.canonical(), m] for pt, m in self.entries]
        s = sum(a * m for a, m in reps)
        k = min(range(len(reps)), key=lambda i: reps[i][1])
        m = reps[k][1]
        x, y = L.coordinates(s)
        dm, dn = np.round(x / m), np.round(y / m)
        reps[k][0] -= dm * L.omega1 + dn * L.omega2
        s = sum(a * m for a, m in reps)
        return [(complex(a), int(m)) for a, m in reps], complex(s)

    def to_list(self):
        return [[pt.canonical().real, pt.canonical().imag, m] for pt, m in self.entries]


def finite_order_with_divisor(L, delta):
    """Expression for a finite-order function whose zero divisor is ``delta``."""
    if not delta.entries:
        return ex.Const(1.0 + 0j)
    for pt, _ in delta.entries:
        if pt.reduces_to_puncture():
            raise InvalidDivisorError("divisor touches the puncture")
    n = delta.degree
    reps, s = delta.representatives()
    num = [ex.Sigma(L, a) if m == 1 else ex.Power(ex.Sigma(L, a), m) for a, m in reps]
    quotient = ex.Quotient(ex.Product(tuple(num)), ex.Power(ex.Sigma(L), n))
    if abs(s) <= 1e-14 * max(abs(L.omega1), abs(L.omega2)):
        return quotient
    return ex.Product((ex.Exp(ex.Product((ex.Const(s), ex.Zeta(L)))), quotient))


def log_derivative(L, delta):
    """``f'/f`` for the function built by :func:`finite_order_with_divisor`.

    Written out from the construction: ``-s wp + sum m_k zeta(z - a_k) - n zeta``.
    """
    n = delta.degree
    reps, s = delta.representatives()
    terms = [ex.Product((ex.Const(-s), ex.Wp(L))), ex.Product((ex.Const(-float(n)), ex.Zeta(L)))]
    for a, m in reps:
        terms.append(ex.Product((ex.Const(float(m)), ex.Zeta(L, a))))
    return ex.Sum(tuple(terms))


@dataclass(frozen=True)
class ZeroCount:
    total: float
    local_counts: tuple
    locations: tuple


def count_zeros(L, logderiv, centers, loop_radius, puncture_radius=None, offset=None):
    """Argument-principle zero count of a function on the punctured torus.

    ``logderiv`` is ``f'/f``.  The total is taken over the boundary of a period
    cell containing the origin, minus a small circle around the origin, so it
    counts the zeros in the cell excluding the puncture.  ``centers`` are
    candidate zero locations; each gets a local count and a centroid
    ``(1/2 pi i m) oint z f'/f dz``.
    """
    om1, om2 = L.omega1, L.omega2
    if offset is None:
        offset = _best_offset(L, centers)
    corner = -(om1 + om2) / 2 + offset
    if puncture_radius is None:
        puncture_radius = 0.05 * min(abs(om1), abs(om2))
    from .cycles import integrate_over_path

    path = [corner, corner + om1, corner + om1 + om2, corner + om2, corner]
    boundary = integrate_over_path(logderiv, path, tol=1e-12).value
    inner = integrate_around_point(logderiv, 0j, puncture_radius, n0=256, tol=1e-12).value
    total = (boundary - inner) / (2j * np.pi)

    counts, locs = [], []
    for a in centers:
        a = complex(a)
        m = integrate_around_point(logderiv, a, loop_radius, n0=256, tol=1e-12).value / (2j * np.pi)
        zf = integrate_around_point(lambda z: z * _ev(logderiv, z), a, loop_radius,
                                    n0=256, tol=1e-12).value / (2j * np.pi)
        counts.append(m)
        mr = np.round(m.real)
        locs.append(zf / mr if mr else complex("nan"))
    return ZeroCount(complex(total), tuple(counts), tuple(locs))


def _best_offset(L, centers):
    """Cell offset keeping the boundary far (in cell coordinates) from zeros."""
    grid = np.linspace(-0.2, 0.2, 9) + 0.0123
    best, best_d = 0j, -1.0
    for u in grid:
        for v in grid:
            d = 1.0
            for a in centers:
                s, t = L.coordinates(complex(a) + (L.omega1 + L.omega2) / 2 - u * L.omega1 - v * L.omega2)
                fs, ft = s % 1.0, t % 1.0
                d = min(d, fs, 1 - fs, ft, 1 - ft)
            if d > best_d:
                best, best_d = u * L.omega1 + v * L.omega2, d
    return best


def _ev(f, z):
    fn = getattr(f, "evaluate", None)
    return fn(z) if fn is not None else f(z)


def periodicity_residual(L, f, z):
    """Largest relative change of ``f`` under translation by either period."""
    z = np.asarray(z, dtype=complex)
    base = ex.log_evaluate(f, z)
    worst = 0.0
    for om in L.periods:
        shifted = ex.log_evaluate(f, z + om)
        # compare f(z+om)/f(z) - 1 in log space
        ratio = np.exp(shifted - base) - 1
        worst = max(worst, float(np.max(np.abs(ratio))))
    return worst
