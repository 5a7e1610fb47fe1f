"""Noncritical holomorphic functions of finite order on punctured tori.

The kernel evaluates the Weierstrass functions of a lattice; on top of it sit
an expression calculus, divisor constructions, cycle quadrature, and the
pipeline that turns ``dz`` into an exact nowhere-vanishing form whose
primitive has no critical points.
"""
from .config import RunConfig
from .elliptic import Lattice, lattice_from_periods, sigma, wp, wp_prime, zeta_w
from .pipeline import build_noncritical, prescribe_divisor, prescribe_periods

__all__ = ["Lattice", "RunConfig", "build_noncritical", "lattice_from_periods",
           "prescribe_divisor", "prescribe_periods", "sigma", "wp", "wp_prime", "zeta_w"]
__version__ = "0.1.0"
