"""Dual basis, constants chain, period map and its zero.

With ``h`` fitted to the chart logarithms and ``f_1, f_2`` dual to the cycles,

    Phi_j(tau) = int_{alpha_j} exp(sum_i tau_i f_i - h) * omega

is close to the identity near 0.  A zero ``zeta`` gives the nowhere-vanishing
``g = exp(sum zeta_i f_i - h)`` with ``g * omega`` exact on the punctured torus.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebraic import AlgebraicFunction, monomial_orders, monomial_values
from .cycles import _call, integrate_on_circle
from .errors import BasisDegreeError, PreconditionError, QuadratureError, SolveError

GRAM_TOL = 1e-8
SAFETY = 1.1
DELTA = 1e-3
PHI_SAMPLES = 1024


# -- dual basis ----------------------------------------------------------------

@dataclass(frozen=True)
class DualBasis:
    f: tuple  # AlgebraicFunction per cycle
    gram_residual: float
    moments: np.ndarray = field(repr=False, compare=False, default=None)


def _circle_moments(L, cycles, c, orders, n):
    t = np.arange(n) / n
    w = np.exp(2j * np.pi * t)
    rows = []
    for cyc, cj in zip(cycles, c):
        B = monomial_values(L, cyc.alpha(t), orders)
        # int_{|w|=1} F(phi(w)) dw = int_0^1 F(alpha(t)) 2 pi i w dt
        rows.append(np.exp(cj) * np.mean(B * (2j * np.pi * w)[:, None], axis=0))
    return np.array(rows)


def gram_matrix(fs, cycles, c, tol=1e-13, n0=256):
    """``e^{c_j} int_{|w|=1} f_i(phi_j(w)) dw`` as a matrix indexed ``[j, i]``."""
    G = np.zeros((len(cycles), len(fs)), complex)
    for j, (cyc, cj) in enumerate(zip(cycles, c)):
        for i, f in enumerate(fs):
            G[j, i] = np.exp(cj) * integrate_on_circle(
                lambda w, f=f, cyc=cyc: f.evaluate(cyc.chart(w)), n0=n0, tol=tol).value
    return G


def choose_dual_basis(L, nf, lf, cycles, candidate_pole_order, n=512):
    """Minimum-norm solution of the moment system ``M x_i = e_i``.

    ``M[j, k] = e^{c_j} int_{|w|=1} b_k(phi_j(w)) dw`` for the monomials of
    pole order at most ``candidate_pole_order``.  The Kronecker property is
    then re-checked by adaptive quadrature of the assembled ``f_i``.
    """
    g = len(cycles)
    orders = monomial_orders(candidate_pole_order)
    M = _circle_moments(L, cycles, lf.c, orders, n)
    sv = np.linalg.svd(M, compute_uv=False)
    rank = int(np.sum(sv > 1e-10 * max(1.0, sv[0]))) if sv.size else 0
    if rank < g:
        raise BasisDegreeError(
            f"moment matrix has rank {rank} < {g} at pole order {candidate_pole_order}; "
            "raise the dual-basis cap"
        )
    X = np.linalg.pinv(M, rcond=1e-12)
    fs = tuple(AlgebraicFunction.from_basis(L, orders, X[:, i]) for i in range(g))
    G = gram_matrix(fs, cycles, lf.c)
    res = float(np.max(np.abs(G - np.eye(g))))
    if res > GRAM_TOL:
        raise BasisDegreeError(f"dual basis Gram residual {res:.3g} exceeds {GRAM_TOL}")
    return DualBasis(fs, res, M)


def revalidate_gram(db, cycles, c, n0=512):
    """Gram residual recomputed from doubled starting samples."""
    G = gram_matrix(db.f, cycles, c, tol=1e-14, n0=n0)
    return float(np.max(np.abs(G - np.eye(len(db.f)))))


# -- constants -----------------------------------------------------------------

@dataclass(frozen=True)
class ConstantsChain:
    c: float
    S: float
    epsilon0: float
    C0: float
    C1: float
    epsilon: float

    def inequalities(self):
        """The three defining inequalities, by direct substitution."""
        return {
            "eps0_bound": 8 * np.pi * self.C0 * np.exp(1 + self.c) * self.epsilon0 < 1,
            "exp_linear": self.C1 >= np.exp(self.epsilon0) and self.epsilon0 < 1,
            "eps_bound": 8 * np.pi * self.C1 * (1 + self.S) * self.epsilon < self.epsilon0,
            "C0_analytic": self.C0 >= max(1 + DELTA,
                                          0.5 * self.S ** 2 * np.exp(self.epsilon0 * self.S)),
        }

    def valid(self):
        return all(self.inequalities().values())

    def to_dict(self):
        return {k: float(getattr(self, k)) for k in ("c", "S", "epsilon0", "C0", "C1", "epsilon")}


def sup_sum_abs(fs, cycles, n=2048):
    t = np.arange(n) / n
    best = 0.0
    for cyc in cycles:
        z = cyc.alpha(t)
        best = max(best, float(np.max(sum(np.abs(f.evaluate(z)) for f in fs))))
    return best


def constants_from(c, S, candidate=1.0):
    """Constants chain from ``c = max|c_j|`` and the inflated sup ``S``."""
    eps0 = min(1.0, candidate)
    while True:
        C0 = max(1 + DELTA, 0.5 * S * S * np.exp(eps0 * S))
        if 8 * np.pi * C0 * np.exp(1 + c) * eps0 < 1:
            break
        eps0 /= 2
    C1 = float(np.exp(eps0))
    eps = eps0 / (16 * np.pi * C1 * (1 + S))
    return ConstantsChain(float(c), float(S), float(eps0), float(C0), C1, float(eps))


def estimate_constants(db, lf, cycles, candidate=1.0, n=2048):
    S = SAFETY * sup_sum_abs(db.f, cycles, n)
    return constants_from(lf.c_max, S, candidate)


def exp_bound_spot_check(db, cc, cycles, n_tau=200, n_points=64, seed=0):
    """Worst ratio ``|e^s - 1 - s| / (C0 max|tau|^2)`` over random polydisc points."""
    rng = np.random.default_rng(seed)
    pts = np.concatenate([cyc.alpha(np.arange(n_points // len(cycles)) / (n_points // len(cycles)))
                          for cyc in cycles])
    F = np.stack([f.evaluate(pts) for f in db.f], axis=-1)
    worst = 0.0
    for _ in range(n_tau):
        r = cc.epsilon0 * np.sqrt(rng.uniform(0, 1, len(db.f)))
        tau = r * np.exp(2j * np.pi * rng.uniform(0, 1, len(db.f)))
        s = F @ tau
        lhs = np.max(np.abs(np.expm1(s) - s))
        rhs = cc.C0 * np.max(np.abs(tau)) ** 2
        worst = max(worst, float(lhs / rhs) if rhs > 0 else 0.0)
    return worst


# -- period map ----------------------------------------------------------------

class PeriodMap:
    """``Phi`` and its Jacobian from cached samples on the cycles.

    The map is ``tau -> int_{alpha_j} exp(sum tau_i f_i - h) coef dz``, with
    ``coef`` the normalised form; the periodic trapezoid rule is used at a
    sample count fixed at construction (checked against its doubling).
    """

    def __init__(self, h, db, nf, cycles, n=PHI_SAMPLES):
        self.h, self.db, self.nf, self.cycles, self.n = h, db, nf, cycles, n
        self._data = [self._samples(cyc, n) for cyc in cycles]

    def _samples(self, cyc, n):
        t = np.arange(n) / n
        z = cyc.alpha(t)
        F = np.stack([f.evaluate(z) for f in self.db.f], axis=-1)
        base = np.exp(-self.h.evaluate(z)) * _call(self.nf.form, z) * cyc.direction
        return F, base

    @staticmethod
    def _eval(data, tau, jacobian):
        tau = np.asarray(tau, complex)
        out, J = [], []
        for F, base in data:
            integrand = np.exp(F @ tau) * base
            out.append(np.mean(integrand))
            if jacobian:
                J.append(np.mean(F * integrand[:, None], axis=0))
        return np.array(out), (np.array(J) if jacobian else None)

    def __call__(self, tau, jacobian=False):
        val, J = self._eval(self._data, tau, jacobian)
        return (val, J) if jacobian else val

    def quadrature_error(self, tau):
        """Change of ``Phi(tau)`` when the sample count is doubled."""
        fine = [self._samples(cyc, 2 * self.n) for cyc in self.cycles]
        return float(np.max(np.abs(self._eval(fine, tau, False)[0] - self(tau))))


def phi_map(tau, h, db, nf, cycles, jacobian=False):
    return PeriodMap(h, db, nf, cycles)(tau, jacobian)


def contraction_sample(pm, cc, n_tau=50, seed=0):
    """Sampled ``max_j |tau_j - Phi_j(tau)|`` over the closed polydisc."""
    rng = np.random.default_rng(seed)
    g = len(pm.cycles)
    worst = 0.0
    for _ in range(n_tau):
        r = cc.epsilon0 * np.sqrt(rng.uniform(0, 1, g))
        tau = r * np.exp(2j * np.pi * rng.uniform(0, 1, g))
        worst = max(worst, float(np.max(np.abs(tau - pm(tau)))))
    return worst


# -- solve ---------------------------------------------------------------------

@dataclass(frozen=True)
class SolveResult:
    zeta: tuple
    phi_residual: float
    iterations: int
    inside_polydisc: bool
    trace: tuple = ()
    quadrature_error: float = 0.0

    def to_dict(self):
        return {"zeta": [[complex(z).real, complex(z).imag] for z in self.zeta],
                "phi_residual": self.phi_residual, "iterations": self.iterations,
                "inside_polydisc": self.inside_polydisc}


def solve_zeta(h, db, nf, cycles, cc, target=None, *, period_map=None, tol=1e-9,
               max_iter=50, confine=True):
    """Solve ``Phi(zeta) = target`` by Newton with the quadrature Jacobian.

    Starts at ``tau = target``.  With ``confine``, a Newton step leaving the
    closed polydisc of radius ``epsilon0`` is replaced by the damped residual
    step ``tau - (Phi(tau) - target)``; if that also leaves, the solve fails.
    Without ``confine`` the Newton step is backtracked on the residual only.
    Iteration continues past ``tol`` while the residual still drops tenfold,
    so the reported residual sits near the quadrature floor.
    """
    pm = period_map or PeriodMap(h, db, nf, cycles)
    g = len(cycles)
    target = np.zeros(g, complex) if target is None else np.asarray(target, complex)
    if target.shape != (g,):
        raise PreconditionError(f"target needs length {g}")
    if confine and np.max(np.abs(target)) > cc.epsilon0 / 2:
        raise PreconditionError("target outside the certified neighbourhood; rescale first")
    tau = target.copy()
    val, J = pm(tau, jacobian=True)
    res = float(np.max(np.abs(val - target)))
    trace = [res]
    it = 0
    while it < max_iter:
        if res <= tol and (len(trace) < 2 or trace[-1] > 0.1 * trace[-2] or res < 1e-15):
            break
        try:
            step = np.linalg.solve(J, val - target)
        except np.linalg.LinAlgError:
            step = val - target
        new = tau - step
        if confine and np.max(np.abs(new)) > cc.epsilon0:
            new = tau - (val - target)
            if np.max(np.abs(new)) > cc.epsilon0:
                raise SolveError("iterate left the polydisc", trace=tuple(trace))
        elif not confine:
            lam = 1.0
            while lam > 1e-4:
                cand = tau - lam * step
                if np.max(np.abs(pm(cand) - target)) < res or res <= tol:
                    new = cand
                    break
                lam /= 2
            else:
                new = tau - lam * step
        nval, nJ = pm(new, jacobian=True)
        nres = float(np.max(np.abs(nval - target)))
        it += 1
        if res <= tol and nres >= res:
            break
        tau, val, J, res = new, nval, nJ, nres
        trace.append(res)
    if res > tol:
        raise SolveError(f"no convergence: residual {res:.3g} after {it} iterations",
                         trace=tuple(trace))
    inside = bool(np.max(np.abs(tau)) < cc.epsilon0)
    qerr = pm.quadrature_error(tau)
    if qerr > max(tol, 1e-12):
        raise QuadratureError(f"period map quadrature error {qerr:.3g}", estimates=(qerr,))
    return SolveResult(tuple(complex(x) for x in tau), res, it, inside, tuple(trace), qerr)


def exponent(zeta, db, h):
    """``sum zeta_i f_i - h`` as an algebraic function."""
    out = -h
    for z, f in zip(zeta, db.f):
        out = out + f.scale(z)
    return out
