"""Independent checks: order at the puncture, lower bounds, periods, critical points."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .algebraic import AlgebraicFunction, pole_order_at_puncture
from .cycles import (_call, integrate_around_point, integrate_over_cycle,
                     integrate_over_path)
from .errors import ContourError, PoleProximityError, PreconditionError, RangeError, UndefinedDegreeError

N_RAYS = 16


def _log_abs(f, z):
    if isinstance(f, ex.Expr):
        return np.asarray(ex.log_abs(f, z), float)
    fn = getattr(f, "log_abs", None)
    if fn is not None:
        return np.asarray(fn(z), float)
    return np.log(np.abs(_call(f, z)))


def _radii(lattice, r0, r_min):
    if lattice is not None:
        r0 = 0.25 * min(abs(lattice.omega1), abs(lattice.omega2)) if r0 is None else r0
        r_min = 4 * lattice.pole_guard if r_min is None else r_min
    r0 = 0.25 if r0 is None else r0
    r_min = 4e-8 if r_min is None else r_min
    radii = [r0]
    while radii[-1] / 2 >= r_min:
        radii.append(radii[-1] / 2)
    return np.array(radii)


def _ring_max(f, radii, sign=1.0):
    """Per radius, the max over rays of ``sign * log|f|`` (None where overflowed)."""
    ang = np.exp(2j * np.pi * np.arange(N_RAYS) / N_RAYS)
    out = []
    for r in radii:
        try:
            with np.errstate(all="ignore"):
                v = sign * _log_abs(f, r * ang)
        except (RangeError, PoleProximityError, FloatingPointError, OverflowError):
            v = np.array([np.nan])
        out.append(float(np.max(v)) if np.all(np.isfinite(v)) else np.nan)
    return np.array(out)


@dataclass(frozen=True)
class FiniteOrderCertificate:
    mu_hat: float
    lambda_hat: float
    sample_radii: tuple
    fit_quality: float
    log_lambda: float = 0.0
    meromorphic: bool = False
    partial: bool = False

    def to_dict(self):
        return {"mu_hat": self.mu_hat, "log_lambda": self.log_lambda,
                "fit_quality": self.fit_quality, "meromorphic": self.meromorphic,
                "partial": self.partial, "n_radii": len(self.sample_radii)}


def estimate_order(f, lattice=None, r0=None, r_min=None):
    """Regression estimate of the order of ``f`` at the origin.

    ``M(r)`` is the largest ``log|f|`` over rays at radius ``r``.  If ``M``
    stays bounded or grows linearly in ``log(1/r)`` (the meromorphic case) the
    order is 0.  Otherwise ``log M`` is fitted against ``log(1/r)`` over the
    inner half of the radii.  ``lambda_hat`` is the smallest constant making
    ``|f| <= lambda exp(r^-mu')`` hold at every sample, ``mu' = 1.1 mu_hat``
    (or 0.05 in the meromorphic case).
    """
    radii = _radii(lattice, r0, r_min)
    M = _ring_max(f, radii)
    ok = np.isfinite(M)
    partial = not np.all(ok)
    radii, M = radii[ok], M[ok]
    if len(radii) < 6:
        raise PreconditionError("too few finite samples near the puncture")
    x = np.log(1 / radii)
    tail = slice(len(radii) // 2, None)
    inc = np.diff(M[tail])
    mero = bool(np.max(M) <= 1.0 or np.max(np.abs(inc)) <= 1.5 * max(np.min(np.abs(inc)), 1e-12) + 1.0)
    if mero:
        mu, q = 0.0, _r2(x[tail], M[tail])
        mu_c = 0.05
    else:
        y = np.log(np.maximum(M, 1.0))
        slope, _ = np.polyfit(x[tail], y[tail], 1)
        mu, q = max(float(slope), 0.0), _r2(x[tail], y[tail])
        mu_c = max(1.1 * mu, 0.05)
    log_lam = float(np.max(M - radii ** (-mu_c)))
    log_lam = max(log_lam, 0.0)
    lam = float(np.exp(min(log_lam, 700.0)))
    return FiniteOrderCertificate(mu, lam, tuple(float(r) for r in radii), q, log_lam, mero, partial)


def _r2(x, y):
    if len(x) < 3 or np.ptp(y) == 0:
        return 1.0
    coef = np.polyfit(x, y, 1)
    res = y - np.polyval(coef, x)
    return float(1 - np.sum(res ** 2) / np.sum((y - np.mean(y)) ** 2))


def growth_bound_holds(f, cert, lattice=None):
    """Check ``log|f| <= log(lambda) + r^{-1.1 mu}`` on the certificate's radii."""
    radii = np.array(cert.sample_radii)
    M = _ring_max(f, radii)
    mu_c = max(1.1 * cert.mu_hat, 0.05)
    return bool(np.all(M <= cert.log_lambda + radii ** (-mu_c) + 1e-9 * (1 + np.abs(M))))


def hadamard_lower_bound_probe(f, mu, lattice=None, r0=None, r_min=None, tol=1e-6):
    """Probe ``1/|f| <= chi exp(r^-mu - r0^-mu)`` on shrinking circles.

    ``chi_hat`` is fitted on the outer half of the radii; the probe passes when
    the same constant also covers the inner half.
    """
    radii = _radii(lattice, r0, r_min)
    neg = _ring_max(f, radii, sign=-1.0)
    ok = np.isfinite(neg)
    radii, neg = radii[ok], neg[ok]
    if len(radii) < 4:
        raise PreconditionError("too few finite samples near the puncture")
    kappa = neg - (radii ** (-mu) - radii[0] ** (-mu))
    half = len(radii) // 2
    outer, inner = np.max(kappa[:half]), np.max(kappa[half:])
    chi = float(np.exp(min(outer, 700.0)))
    return chi, bool(inner <= outer + tol * (1 + abs(outer)))


# -- periods -------------------------------------------------------------------

def product_form(g, nf):
    return ex.Product((g, nf.form)) if nf is not None else g


def puncture_parallelogram(L, scale=0.8):
    """Closed parallelogram around the origin, homologous to zero in the puncture-free cell."""
    a, b = scale * L.omega1 / 2, scale * L.omega2 / 2
    return [-a - b, a - b, a + b, -a + b, -a - b]


def check_period_vanishing(g, nf, cycles, tol=1e-13):
    """``|int_{alpha_j} g omega|`` per cycle, then the loop around the puncture."""
    form = product_form(g, nf)
    res = [abs(integrate_over_cycle(form, c, tol=tol).value) for c in cycles]
    loop = integrate_over_path(form, puncture_parallelogram(cycles[0].lattice), tol=tol)
    return [float(r) for r in res] + [float(abs(loop.value))]


def min_log_modulus(f, lattice, n=40, cycles=()):
    """Smallest ``log|f|`` on a grid of the cell (away from the puncture) and on the cycles.

    A finite value certifies ``f != 0`` at every sample without underflow.
    """
    s = (np.arange(n) + 0.5) / n
    S, T = np.meshgrid(s, s)
    z = (S * lattice.omega1 + T * lattice.omega2).ravel()
    z = z[lattice.distance_to_lattice(z) > 0.1 * min(abs(lattice.omega1), abs(lattice.omega2))]
    pts = [z] + [c.alpha(np.arange(256) / 256) for c in cycles]
    z = np.concatenate(pts)
    return float(np.min(_log_abs(f, z)))


# -- critical points -----------------------------------------------------------

@dataclass(frozen=True)
class CriticalCountReport:
    d: int
    genus: int
    expected: int
    counted: int
    locations: tuple
    multiplicities: tuple = ()
    contour_value: complex = 0j

    @property
    def located(self):
        return int(sum(self.multiplicities))

    def to_dict(self):
        return {"d": self.d, "genus": self.genus, "expected": self.expected,
                "counted": self.counted, "located": self.located,
                "locations": [[complex(z).real, complex(z).imag] for z in self.locations],
                "multiplicities": list(self.multiplicities),
                "contour_value": [self.contour_value.real, self.contour_value.imag]}


def count_critical_points(f, seeds=20):
    """Count the zeros of ``f'`` by the argument principle and locate them.

    Genus 1: ``f`` is an :class:`AlgebraicFunction`.  The integral of
    ``f''/f'`` over a (shifted) cell boundary, minus a small circle around the
    origin, counts zeros in the cell.  Locations come from Newton runs seeded on
    a grid, each confirmed by a local argument-principle count.

    Genus 0: ``f`` is a :class:`numpy.polynomial.Polynomial`; the count uses a
    circle enclosing every root of ``f'``.
    """
    if isinstance(f, np.polynomial.Polynomial):
        return _count_polynomial(f)
    if not isinstance(f, AlgebraicFunction):
        raise PreconditionError("count_critical_points needs an algebraic function")
    if f.is_zero() or not f.terms() or max(k for k, _ in f.terms()) == 0:
        raise UndefinedDegreeError("constant function has no critical-point count")
    L = f.lattice
    d = pole_order_at_puncture(f)
    df, d2f = f.derivative(), f.derivative().derivative()
    ratio = lambda z: d2f.evaluate(z) / df.evaluate(z)
    zeros = _newton_zeros(df, d2f, L, seeds)
    scale = min(abs(L.omega1), abs(L.omega2))
    sep = _min_separation(L, zeros + [0j])
    loop_r = min(0.3 * sep, 0.05 * scale)
    mults = []
    for a in zeros:
        m = integrate_around_point(ratio, a, loop_r, n0=256, tol=1e-10).value / (2j * np.pi)
        mults.append(int(np.round(m.real)))
    total = None
    for attempt in range(6):
        offset = _cell_offset(L, zeros, attempt)
        corner = -(L.omega1 + L.omega2) / 2 + offset
        path = [corner, corner + L.omega1, corner + L.omega1 + L.omega2, corner + L.omega2, corner]
        try:
            b = integrate_over_path(ratio, path, tol=1e-10).value
            inner = integrate_around_point(ratio, 0j, loop_r, n0=256, tol=1e-10).value
        except Exception:  # noqa: BLE001  (nudge the contour and retry)
            continue
        total = (b - inner) / (2j * np.pi)
        if abs(total - np.round(total.real)) < 1e-6:
            break
    if total is None or abs(total - np.round(total.real)) >= 1e-6:
        raise ContourError("argument-principle count did not settle on an integer")
    return CriticalCountReport(d, 1, d + 1, int(np.round(total.real)), tuple(zeros), tuple(mults),
                               complex(total))


def _count_polynomial(p):
    d = p.degree()
    if d < 1:
        raise UndefinedDegreeError("constant polynomial")
    dp, d2p = p.deriv(), p.deriv(2)
    roots = dp.roots() if dp.degree() > 0 else np.array([])
    R = 2 * (1 + (np.max(np.abs(roots)) if roots.size else 0.0))
    val = integrate_around_point(lambda z: d2p(z) / dp(z), 0j, R, n0=256, tol=1e-12).value
    counted = int(np.round((val / (2j * np.pi)).real))
    locs = tuple(complex(r) for r in np.unique(np.round(roots, 8)))
    mults = tuple(int(np.sum(np.abs(roots - r) < 1e-4)) for r in locs)
    return CriticalCountReport(int(d), 0, int(d) - 1, counted, locs, mults, complex(val / (2j * np.pi)))


def _newton_zeros(df, d2f, L, n):
    s = (np.arange(n) + 0.5) / n
    S, T = np.meshgrid(s, s)
    z = (S * L.omega1 + T * L.omega2).ravel().astype(complex)
    z = z[L.distance_to_lattice(z) > 0.05 * min(abs(L.omega1), abs(L.omega2))]
    with np.errstate(all="ignore"):
        for _ in range(60):
            try:
                step = df.evaluate(z) / d2f.evaluate(z)
            except Exception:  # noqa: BLE001
                z = z[L.distance_to_lattice(z) > 10 * L.pole_guard]
                continue
            step[~np.isfinite(step)] = 0
            z = L.canonical(z - step)
            keep = L.distance_to_lattice(z) > 10 * L.pole_guard
            z = z[keep]
    out = []
    for a in z:
        try:
            v = abs(df.evaluate(a))
        except Exception:  # noqa: BLE001
            continue
        scale = abs(d2f.evaluate(a)) + 1
        if not np.isfinite(v) or v > 1e-8 * scale:
            continue
        if all(L.distance_to_lattice(a - b) > 1e-6 for b in out):
            out.append(complex(a))
    return sorted(out, key=lambda w: (round(w.real, 8), round(w.imag, 8)))


def _min_separation(L, pts):
    best = np.inf
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            best = min(best, float(L.distance_to_lattice(pts[i] - pts[j])))
    return best if np.isfinite(best) else min(abs(L.omega1), abs(L.omega2))


def _cell_offset(L, zeros, attempt):
    grid = np.linspace(-0.2, 0.2, 9) + 0.0123 + 0.017 * attempt
    best, best_d = 0j, -1.0
    for u in grid:
        for v in grid:
            d = 1.0
            for a in zeros:
                x, y = L.coordinates(a + (L.omega1 + L.omega2) / 2 - u * L.omega1 - v * L.omega2)
                fx, fy = x % 1.0, y % 1.0
                d = min(d, fx, 1 - fx, fy, 1 - fy)
            if d > best_d:
                best, best_d = u * L.omega1 + v * L.omega2, d
    return best
