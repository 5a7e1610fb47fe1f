"""Chart log-factorisation of the normalised form and the boundary fit.

On each cycle the pullback ``e_i(w) = coef(phi_i(w)) phi_i'(w)`` has zero
winding, so it has a continuous logarithm ``h_i(w) + c_i`` with
``h_i(1) = 0``.  Since every ``h_i`` vanishes at the common point ``p``, the
functions ``h_i o phi_i^{-1}`` glue to one continuous ``H`` on the union of
the cycles, which :func:`fit_h` approximates by monomials in ``wp, wp'``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebraic import AlgebraicFunction, monomial_orders, monomial_values
from .cycles import _call, pullback_coefficient
from .errors import ApproximationDegreeError, PreconditionError, WindingError

FIT_SAMPLES = 512
CHECK_SAMPLES = 2048
CONSISTENCY_TOL = 1e-9


def _continuous_log(vals):
    if np.any(vals == 0) or not np.all(np.isfinite(vals)):
        raise WindingError("pullback vanishes or is not finite on the circle")
    jumps = np.angle(vals[1:] / vals[:-1])
    if np.max(np.abs(jumps)) >= np.pi / 2:
        return None
    phase = np.angle(vals[0]) + np.concatenate([[0.0], np.cumsum(jumps)])
    return np.log(np.abs(vals)) + 1j * phase


@dataclass(frozen=True)
class LogFactorization:
    """Per cycle: constant ``c_i`` and samples of ``h_i`` at the N-th roots of unity."""

    c: tuple
    h: tuple
    consistency_residual: float
    samplers: tuple = field(default=(), repr=False, compare=False)

    @property
    def c_max(self):
        return max(abs(ci) for ci in self.c)

    def sample(self, i, n):
        """``h_i`` at ``n`` equally spaced parameters on cycle ``i`` (0-based)."""
        return self.samplers[i](n)

    @classmethod
    def from_function(cls, fn, cycles, c=None):
        """A synthetic factorisation whose ``H`` is ``fn`` restricted to the cycles."""
        c = tuple(0j for _ in cycles) if c is None else tuple(complex(x) for x in c)

        def make(cyc):
            def sampler(n):
                t = np.arange(n) / n
                return np.asarray(_call(fn, cyc.alpha(t)), complex)
            return sampler

        samplers = tuple(make(cyc) for cyc in cycles)
        return cls(c, tuple(s(FIT_SAMPLES) for s in samplers), 0.0, samplers)


def log_factorize(nf, cycles, n=FIT_SAMPLES):
    """Split each chart pullback of ``nf.form`` as ``exp(h_i(w) + c_i)``."""
    cs, hs, samplers, worst = [], [], [], 0.0
    for cyc in cycles:
        pull = pullback_coefficient(nf.form, cyc)

        def logs(m, pull=pull):
            while True:
                t = np.arange(m + 1) / m
                vals = np.asarray(pull(np.exp(2j * np.pi * t)), complex)
                lg = _continuous_log(vals)
                if lg is not None:
                    return lg, vals, m
                m *= 2
                if m > 2**18:
                    raise WindingError("could not unwrap the pullback phase")

        lg, vals, _ = logs(n)
        if abs(lg[-1] - lg[0]) > 1e-6:
            raise PreconditionError(
                f"pullback on cycle {cyc.index} winds "
                f"{(lg[-1] - lg[0]).imag / (2 * np.pi):.3f} times; normalise first"
            )
        c = lg[0]
        h = lg[:-1] - c
        worst = max(worst, float(np.max(np.abs(np.exp(h + c) - vals[:-1]) / np.abs(vals[:-1]))))

        def sampler(m, logs=logs, c=c):
            lg, _, used = logs(m)
            return lg[:-1][:: used // m] - c

        cs.append(complex(c))
        hs.append(h)
        samplers.append(sampler)
    return LogFactorization(tuple(cs), tuple(hs), worst, tuple(samplers))


@dataclass(frozen=True)
class BoundaryFit:
    h: AlgebraicFunction
    sup_residual: float
    basis_pole_order: int
    epsilon_required: float
    success: bool
    history: tuple = ()  # (pole order, sup residual) per attempt

    def require(self):
        if not self.success:
            raise ApproximationDegreeError(
                f"boundary fit residual {self.sup_residual:.3g} >= required "
                f"{self.epsilon_required:.3g} at pole order {self.basis_pole_order}; "
                "raise the fit pole-order cap"
            )
        return self


def _gamma_samples(H, cycles, n):
    zs, ys = [], []
    for i, cyc in enumerate(cycles):
        t = np.arange(n) / n
        zs.append(cyc.alpha(t))
        ys.append(H.sample(i, n))
    return np.concatenate(zs), np.concatenate(ys)


def boundary_residual(h, H, cycles, n=CHECK_SAMPLES):
    z, y = _gamma_samples(H, cycles, n)
    return float(np.max(np.abs(h.evaluate(z) - y)))


def fit_h(H, cycles, max_pole_order, epsilon_required, n_fit=FIT_SAMPLES,
          n_check=CHECK_SAMPLES, min_pole_order=0, rcond=1e-13):
    """Least-squares fit of ``H`` on the cycles by monomials of bounded pole order.

    Columns are scaled by their sup on the fitting grid and the system is
    solved with an SVD-based least-squares solver.  Pole orders are tried in
    increasing order; the first fit with check-grid sup residual below
    ``epsilon_required`` wins, otherwise the lowest-residual fit is returned
    with ``success=False``.
    """
    if not epsilon_required > 0:
        raise PreconditionError("epsilon_required must be positive")
    L = cycles[0].lattice
    z, y = _gamma_samples(H, cycles, n_fit)
    zc, yc = _gamma_samples(H, cycles, n_check)
    all_orders = monomial_orders(max_pole_order)
    B = monomial_values(L, z, all_orders)
    Bc = monomial_values(L, zc, all_orders)
    best, history = None, []
    for K in all_orders:
        if K < min_pole_order:
            continue
        cols = [j for j, k in enumerate(all_orders) if k <= K]
        scale = np.max(np.abs(B[:, cols]), axis=0)
        scale[scale == 0] = 1.0
        x, *_ = np.linalg.lstsq(B[:, cols] / scale, y, rcond=rcond)
        x = x / scale
        res = float(np.max(np.abs(Bc[:, cols] @ x - yc)))
        history.append((K, res))
        h = AlgebraicFunction.from_basis(L, [all_orders[j] for j in cols], x)
        if best is None or res < best[1]:
            best = (h, res, K)
        if res < epsilon_required:
            return BoundaryFit(h, res, K, epsilon_required, True, tuple(history))
    h, res, K = best
    return BoundaryFit(h, res, K, epsilon_required, False, tuple(history))
