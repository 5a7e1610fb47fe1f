"""Homology basis with annulus charts, contour quadrature, winding numbers.

The standard cycles are the straight loops ``alpha_i(t) = p + t*omega_i``
through ``p = (omega1 + omega2)/2``, with charts
``phi_i(w) = p + omega_i log(w) / (2 pi i)`` that send the positively
oriented unit circle onto ``alpha_i`` and ``1`` to ``p``.  Cycle integrals use
the periodic trapezoidal rule, which converges spectrally for the smooth
periodic integrands met here.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import elliptic as ek
from .errors import QuadratureError, WindingError

DEFAULT_SAMPLES = 256
MAX_SAMPLES = 2**16
CYCLE_TOL = 1e-10


@dataclass(frozen=True)
class ChartedCycle:
    index: int
    base_point: complex
    direction: complex
    lattice: ek.Lattice
    samples: int = DEFAULT_SAMPLES
    radius: float = 0.1

    def alpha(self, t):
        return self.base_point + np.asarray(t) * self.direction

    def chart(self, w):
        w = np.asarray(w, dtype=complex)
        return self.base_point + self.direction * np.log(w) / (2j * np.pi)

    def chart_derivative(self, w):
        return self.direction / (2j * np.pi * np.asarray(w, dtype=complex))

    def circle(self, n=None):
        n = self.samples if n is None else n
        t = np.arange(n) / n
        return t, np.exp(2j * np.pi * t), self.alpha(t)

    def with_samples(self, n):
        return replace(self, samples=int(n))


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error_estimate: float
    samples_used: int


def _call(f, z):
    fn = getattr(f, "evaluate", None)
    return np.asarray(fn(z) if fn is not None else f(z), dtype=complex)


def cell_distance_to_puncture(L, pts):
    return np.min(L.distance_to_lattice(pts))


def _tube_distance(L, p, om, r, n=512):
    t = np.arange(n) / n
    off = [om * np.log(1 - r) / (2j * np.pi), om * np.log(1 + r) / (2j * np.pi)]
    return min(cell_distance_to_puncture(L, p + t * om + o) for o in off)


def standard_cycles(L, samples=DEFAULT_SAMPLES, radius=None):
    """The cycles ``alpha_1, alpha_2`` through the half-period sum."""
    p = (L.omega1 + L.omega2) / 2
    t = np.linspace(0, 1, 2049)
    gamma_dist = min(cell_distance_to_puncture(L, p + t * om) for om in L.periods)
    cycles = []
    for i, om in enumerate(L.periods, start=1):
        r = radius
        if r is None:
            r = 0.1
            while _tube_distance(L, p, om, r) < 0.25 * gamma_dist and r > 1e-6:
                r *= 0.8
        cycles.append(ChartedCycle(i, complex(p), complex(om), L, samples, float(r)))
    return tuple(cycles)


def intersection_number(cycle, loop):
    """Algebraic intersection ``alpha_i . loop`` of a closed polyline with a cycle.

    The count is the net transverse coordinate change along the lifted loop,
    signed so that ``alpha_1 . alpha_2 = +1``.
    """
    L = cycle.lattice
    pts = np.asarray(loop, dtype=complex)
    pts = np.append(pts, pts[0])
    s, t = L.coordinates(pts)
    # steps are assumed short; rounding undoes jumps between lattice lifts
    ds, dt = np.diff(s), np.diff(t)
    ds, dt = np.sum(ds - np.round(ds)), np.sum(dt - np.round(dt))
    return int(np.round(dt if cycle.index == 1 else -ds))


def trapezoid_periodic(fn, n0=DEFAULT_SAMPLES, tol=CYCLE_TOL, nmax=MAX_SAMPLES):
    """Mean of a 1-periodic function on [0, 1) by doubling trapezoid rules.

    ``fn(t)`` takes an array of parameters.  The estimate compares two
    successive levels, relative to ``max(1, |value|)``.
    """
    n = n0
    prev = np.mean(fn(np.arange(n) / n))
    history = [prev]
    while n < nmax:
        n *= 2
        t = np.arange(1, n, 2) / n
        cur = 0.5 * prev + 0.5 * np.mean(fn(t))
        err = abs(cur - prev)
        history.append(cur)
        if err <= tol * max(1.0, abs(cur)):
            return QuadratureResult(complex(cur), float(err), n)
        prev = cur
    raise QuadratureError(
        f"trapezoid not converged at {nmax} samples", estimates=history[-2:]
    )


def integrate_over_cycle(form, c, tol=CYCLE_TOL):
    """``int_{alpha_i} g dz`` for the coefficient ``g`` of a 1-form."""
    return trapezoid_periodic(
        lambda t: _call(form, c.alpha(t)) * c.direction, c.samples, tol
    )


def integrate_on_circle(fn, n0=DEFAULT_SAMPLES, tol=CYCLE_TOL):
    """``int_{|w|=1} fn(w) dw`` by the trapezoid rule."""
    def integrand(t):
        w = np.exp(2j * np.pi * t)
        return fn(w) * 2j * np.pi * w
    return trapezoid_periodic(integrand, n0, tol)


_GL = {n: leggauss(n) for n in (16, 32, 64, 128)}


def _segment(f, a, b, tol, depth):
    prev = None
    for n in (16, 32, 64, 128):
        x, wts = _GL[n]
        z = (a + b) / 2 + (b - a) / 2 * x
        val = np.sum(wts * _call(f, z)) * (b - a) / 2
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val, abs(val - prev), n
        prev = val
    if depth >= 12:
        raise QuadratureError(f"path quadrature did not converge on [{a}, {b}]",
                              estimates=(prev, val))
    m = (a + b) / 2
    v1, e1, n1 = _segment(f, a, m, tol / 2, depth + 1)
    v2, e2, n2 = _segment(f, m, b, tol / 2, depth + 1)
    return v1 + v2, e1 + e2, n1 + n2


def integrate_over_path(form, path, tol=CYCLE_TOL):
    """``int g dz`` along the polyline ``path`` (segments in the plane).

    Adaptive Gauss-Legendre with bisection; the path must avoid the poles.
    """
    pts = [complex(getattr(x, "z", x)) for x in path]
    total, err, used = 0j, 0.0, 0
    for a, b in zip(pts[:-1], pts[1:]):
        if a == b:
            continue
        v, e, n = _segment(form, a, b, tol, 0)
        total += v
        err += e
        used += n
    return QuadratureResult(complex(total), float(err), used)


def winding_on_circle(fn, n0=DEFAULT_SAMPLES, nmax=MAX_SAMPLES, floor=None):
    """Winding number of ``fn(w)`` around the unit circle by phase unwrapping.

    Sampling doubles until every consecutive argument jump is below pi/2.
    """
    n = n0
    while True:
        t = np.arange(n + 1) / n
        vals = np.asarray(fn(np.exp(2j * np.pi * t)), dtype=complex)
        mags = np.abs(vals)
        lim = 1e-300 if floor is None else floor
        if np.min(mags) <= lim * max(1.0, np.max(mags)) or not np.all(np.isfinite(vals)):
            raise WindingError("function vanishes (or is not finite) on the trace")
        jumps = np.angle(vals[1:] / vals[:-1])
        if np.max(np.abs(jumps)) < np.pi / 2:
            raw = np.sum(jumps) / (2 * np.pi)
            k = int(np.round(raw))
            if abs(raw - k) > 1e-6:
                raise WindingError(f"non-integer winding {raw}; increase samples")
            return k
        if n >= nmax:
            raise WindingError(
                f"phase jumps >= pi/2 at {nmax} samples; increase samples"
            )
        n *= 2


def winding_number(g, c):
    """Winding of the function ``g`` along the cycle ``c``."""
    return winding_on_circle(lambda w: _call(g, c.chart(w)), c.samples)


def pullback_coefficient(coef, c):
    """``w -> coef(phi(w)) * phi'(w)``: the chart pullback of ``coef * dz``."""
    return lambda w: _call(coef, c.chart(w)) * c.chart_derivative(w)


def pullback_winding(coef, c):
    """Winding of the chart pullback of the 1-form ``coef * dz``."""
    return winding_on_circle(pullback_coefficient(coef, c), c.samples)


def puncture_loop(radius, n=64):
    t = np.arange(n + 1) / n
    return radius * np.exp(2j * np.pi * t)


def integrate_around_point(f, center, radius, n0=64, tol=CYCLE_TOL):
    """``oint f dz`` over a positively oriented circle."""
    def integrand(t):
        e = np.exp(2j * np.pi * t)
        return _call(f, center + radius * e) * 2j * np.pi * radius * e
    return trapezoid_periodic(integrand, n0, tol)
