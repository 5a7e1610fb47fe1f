r"""Weierstrass functions on a period lattice.

All evaluators go through the Jacobi theta function :math:`\vartheta_1` on a
Gauss-reduced basis :math:`(w_1, w_2)` of the lattice, so that the nome
satisfies :math:`|q| \le e^{-\pi\sqrt{3}/2}` and a handful of series terms
reach double precision.  With :math:`k = \pi/w_1` and :math:`v = k z`,

.. math::

    \sigma(z) = \frac{1}{k} e^{\eta z^2 / (2 w_1)}
        \frac{\vartheta_1(v)}{\vartheta_1'(0)},\qquad
    \zeta(z) = \frac{\eta z}{w_1} + k \frac{\vartheta_1'(v)}{\vartheta_1(v)},

and :math:`\wp = -\zeta'`, :math:`\wp' = -\zeta''`.  Arguments are first
reduced to the centred cell using the exact quasi-periodicity laws.

Periods here are *full* periods: :math:`\zeta(z + \omega_k) = \zeta(z) + \eta_k`
and the Legendre relation reads :math:`\eta_1\omega_2 - \eta_2\omega_1 = 2\pi i`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidLatticeError, PoleProximityError, PrecisionError

TWO_PI_I = 2j * np.pi

# Complex doubles cannot resolve tighter than this.
_FINEST_TOLERANCE = 1e-15
_MAX_THETA_TERMS = 40


@dataclass(frozen=True)
class _Reduced:
    w1: complex
    w2: complex
    tau: complex
    nterms: int
    theta_coef: np.ndarray
    odd: np.ndarray
    theta1p0: complex
    eta_w1: complex
    eta_w2: complex
    # rows: (w1, w2) = matrix @ (omega1, omega2)
    matrix: tuple


@dataclass(frozen=True)
class Lattice:
    """Period lattice with its Eisenstein invariants and quasi-periods.

    Build instances with :func:`lattice_from_periods`; the constructor does
    not validate its arguments.
    """

    omega1: complex
    omega2: complex
    g2: complex
    g3: complex
    eta1: complex
    eta2: complex
    tol: float = 1e-12
    pole_guard: float = 0.0
    _red: _Reduced = field(default=None, repr=False, compare=False)

    @property
    def periods(self):
        return (self.omega1, self.omega2)

    @property
    def etas(self):
        return (self.eta1, self.eta2)

    @property
    def tau(self):
        return self.omega2 / self.omega1

    def legendre_residual(self):
        return abs(self.eta1 * self.omega2 - self.eta2 * self.omega1 - TWO_PI_I)

    def coordinates(self, z):
        """Real coordinates ``(s, t)`` with ``z = s*omega1 + t*omega2``."""
        z = np.asarray(z, dtype=complex)
        r = z / self.omega1
        t = r.imag / self.tau.imag
        s = r.real - t * self.tau.real
        return s, t

    def canonical(self, z):
        """Representative of ``z`` in the half-open fundamental parallelogram."""
        s, t = self.coordinates(z)
        return (s - np.floor(s)) * self.omega1 + (t - np.floor(t)) * self.omega2

    def distance_to_lattice(self, z):
        z0, _, _ = _reduce(self, z)
        return np.abs(z0)

    def is_lattice_point(self, z, atol=None):
        atol = self.pole_guard if atol is None else atol
        return bool(np.all(self.distance_to_lattice(z) <= atol))

    def __str__(self):
        return f"Lattice({self.omega1}, {self.omega2})"


@dataclass(frozen=True)
class TorusPoint:
    """A point of C/Lattice, stored through a representative ``z``."""

    z: complex
    lattice: Lattice = field(repr=False, compare=False)

    def canonical(self):
        return complex(self.lattice.canonical(self.z))

    def reduces_to_puncture(self):
        return self.lattice.is_lattice_point(self.z)


def torus_point(L, z, punctured=True):
    """Make a :class:`TorusPoint`, refusing the puncture when ``punctured``."""
    pt = TorusPoint(complex(z), L)
    if punctured and pt.reduces_to_puncture():
        raise PoleProximityError(f"point {z} reduces to the puncture")
    return pt


def _gauss_reduce(omega1, omega2):
    w1, w2 = complex(omega1), complex(omega2)
    m = [[1, 0], [0, 1]]
    for _ in range(200):
        n = round((w2 / w1).real)
        if n:
            w2 -= n * w1
            m[1] = [m[1][0] - n * m[0][0], m[1][1] - n * m[0][1]]
        if abs(w2) < abs(w1) * (1 - 1e-14):
            # tau -> -1/tau keeps orientation
            w1, w2 = w2, -w1
            m = [m[1], [-m[0][0], -m[0][1]]]
        else:
            break
    return w1, w2, (tuple(m[0]), tuple(m[1]))


def _theta_terms(tau, tol):
    qim = np.pi * tau.imag
    for n in range(3, _MAX_THETA_TERMS):
        x = n + 0.5
        # bound on the first dropped term for |Im v| <= pi Im(tau) / 2, third derivative
        bound = np.exp(-qim * (x * x - x)) * (2 * n + 1) ** 3
        if bound < tol * 1e-3:
            return n
    raise PrecisionError(f"theta series did not reach tolerance {tol}")


def _theta1(red, v, order):
    """theta_1 and its first ``order`` derivatives at ``v`` (array)."""
    v = np.asarray(v, dtype=complex)
    arg = v[..., None] * red.odd
    s, c = np.sin(arg), np.cos(arg)
    out = [np.sum(red.theta_coef * s, axis=-1)]
    if order >= 1:
        out.append(np.sum(red.theta_coef * red.odd * c, axis=-1))
    if order >= 2:
        out.append(-np.sum(red.theta_coef * red.odd**2 * s, axis=-1))
    if order >= 3:
        out.append(-np.sum(red.theta_coef * red.odd**3 * c, axis=-1))
    return out


def lattice_from_periods(omega1, omega2, precision=1e-12, pole_guard=None):
    """Build a :class:`Lattice` from a period pair.

    The pair is swapped if ``Im(omega2/omega1) < 0``.  ``g2`` and ``g3`` come
    from the Eisenstein q-series, ``eta_k = 2 zeta(omega_k / 2)``.
    """
    omega1, omega2 = complex(omega1), complex(omega2)
    if omega1 == 0 or omega2 == 0:
        raise InvalidLatticeError("periods must be nonzero")
    ratio = omega2 / omega1
    if abs(ratio.imag) <= 1e-12 * abs(ratio):
        raise InvalidLatticeError(f"colinear periods {omega1}, {omega2}")
    if ratio.imag < 0:
        omega1, omega2 = omega2, omega1
    if not (precision > 0):
        raise PrecisionError("precision must be positive")
    if precision < _FINEST_TOLERANCE:
        raise PrecisionError(
            f"tolerance {precision} is below double-precision reach {_FINEST_TOLERANCE}"
        )

    w1, w2, mat = _gauss_reduce(omega1, omega2)
    tau = w2 / w1
    nterms = _theta_terms(tau, precision)
    n = np.arange(nterms)
    odd = (2 * n + 1).astype(float)
    coef = 2.0 * (-1.0) ** n * np.exp(1j * np.pi * tau * (n + 0.5) ** 2)
    k = np.pi / w1
    proto = _Reduced(w1, w2, tau, nterms, coef, odd, 0j, 0j, 0j, mat)
    _, t1p0, _, t1ppp0 = _theta1(proto, np.zeros(1), 3)
    t1p0, t1ppp0 = complex(t1p0[0]), complex(t1ppp0[0])
    eta_w1 = -np.pi**2 * t1ppp0 / (3 * w1 * t1p0)

    # eta_w2 = 2 zeta(w2/2) from the theta log-derivative, independent of Legendre
    v = np.array([k * w2 / 2])
    th, th1 = _theta1(proto, v, 1)
    eta_w2 = complex(2 * (eta_w1 * (w2 / 2) / w1 + k * th1[0] / th[0]))

    red = _Reduced(w1, w2, tau, nterms, coef, odd, t1p0, eta_w1, eta_w2, mat)

    # invert the unimodular change of basis
    (a, b), (c, d) = mat
    det = a * d - b * c
    inv = ((d * det, -b * det), (-c * det, a * det))
    eta1 = inv[0][0] * eta_w1 + inv[0][1] * eta_w2
    eta2 = inv[1][0] * eta_w1 + inv[1][1] * eta_w2

    g2, g3 = _eisenstein_qseries(w1, tau, precision)
    guard = 1e-8 * min(abs(omega1), abs(omega2)) if pole_guard is None else pole_guard
    return Lattice(omega1, omega2, g2, g3, complex(eta1), complex(eta2),
                   precision, guard, red)


def _eisenstein_qseries(w1, tau, tol):
    Q = np.exp(2j * np.pi * tau)
    s3 = s5 = 0j
    for n in range(1, 200):
        qn = Q**n
        t3 = n**3 * qn / (1 - qn)
        t5 = n**5 * qn / (1 - qn)
        s3 += t3
        s5 += t5
        if abs(t5) < tol * 1e-4:
            break
    else:
        raise PrecisionError("Eisenstein q-series did not converge")
    g2 = (4 * np.pi**4 / (3 * w1**4)) * (1 + 240 * s3)
    g3 = (8 * np.pi**6 / (27 * w1**6)) * (1 - 504 * s5)
    return complex(g2), complex(g3)


def _reduce(L, z):
    """Split ``z = z0 + m*w1 + n*w2`` with ``z0`` in the centred reduced cell."""
    red = L._red
    z = np.asarray(z, dtype=complex)
    r = z / red.w1
    y = r.imag / red.tau.imag
    x = r.real - y * red.tau.real
    m, n = np.round(x), np.round(y)
    return z - m * red.w1 - n * red.w2, m, n


def _guard(L, z0):
    if np.any(np.abs(z0) < L.pole_guard):
        raise PoleProximityError(
            f"evaluation within {L.pole_guard:g} of a lattice point"
        )


def _log_derivs(L, z0, order):
    red = L._red
    v = (np.pi / red.w1) * z0
    th = _theta1(red, v, order + 1)
    lg = th[1] / th[0]
    out = [lg]
    if order >= 1:
        r2 = th[2] / th[0]
        out.append(r2 - lg * lg)
    if order >= 2:
        out.append(th[3] / th[0] - 3 * r2 * lg + 2 * lg**3)
    return out


def _out(z, val):
    return complex(val) if np.ndim(z) == 0 else val


def wp(L, z):
    """Weierstrass ``p``-function."""
    z0, _, _ = _reduce(L, z)
    _guard(L, z0)
    red = L._red
    k = np.pi / red.w1
    _, d1 = _log_derivs(L, z0, 1)
    return _out(z, -red.eta_w1 / red.w1 - k * k * d1)


def wp_prime(L, z):
    z0, _, _ = _reduce(L, z)
    _guard(L, z0)
    k = np.pi / L._red.w1
    _, _, d2 = _log_derivs(L, z0, 2)
    return _out(z, -k**3 * d2)


def zeta_w(L, z):
    """Weierstrass zeta, ``zeta' = -wp``, quasi-periodic with increments eta."""
    z0, m, n = _reduce(L, z)
    _guard(L, z0)
    red = L._red
    (lg,) = _log_derivs(L, z0, 0)
    val = red.eta_w1 * z0 / red.w1 + (np.pi / red.w1) * lg
    return _out(z, val + m * red.eta_w1 + n * red.eta_w2)


def _sigma_parts(L, z):
    red = L._red
    z0, m, n = _reduce(L, z)
    k = np.pi / red.w1
    (th,) = _theta1(red, k * z0, 0)
    base = np.exp(red.eta_w1 * z0**2 / (2 * red.w1)) * th / (k * red.theta1p0)
    om = m * red.w1 + n * red.w2
    eta = m * red.eta_w1 + n * red.eta_w2
    parity = np.where((m % 2 == 0) & (n % 2 == 0), 1.0, -1.0)
    return base, parity, eta * (z0 + om / 2)


def sigma(L, z):
    """Weierstrass sigma (entire, odd)."""
    base, parity, expo = _sigma_parts(L, z)
    return _out(z, parity * np.exp(expo) * base)


def log_sigma(L, z):
    """A logarithm of sigma; the imaginary part is defined only mod 2 pi."""
    base, parity, expo = _sigma_parts(L, z)
    with np.errstate(divide="ignore"):
        val = np.log(base.astype(complex)) + expo + np.where(parity < 0, 1j * np.pi, 0)
    return _out(z, val)


def eta_of(L, m, n):
    """Quasi-period of ``m*omega1 + n*omega2``."""
    return m * L.eta1 + n * L.eta2


def ode_residual(L, z):
    """Scaled residual of ``wp'^2 = 4 wp^3 - g2 wp - g3``."""
    p, dp = wp(L, z), wp_prime(L, z)
    num = np.abs(dp * dp - (4 * p**3 - L.g2 * p - L.g3))
    return num / (1 + np.abs(p) ** 3)
