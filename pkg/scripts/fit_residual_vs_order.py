"""Boundary fit residual of h against the pole-order cap and the sample count.

The residual decays slowly in the cap because the glued boundary function has
a corner at the base point of the cycles; compare with the required epsilon.
"""
import argparse

from noncritical import pipeline as pl
from noncritical.approximation import fit_h
from noncritical.config import RunConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--omega2", type=complex, default=1j)
    ap.add_argument("--caps", type=int, nargs="+", default=[4, 6, 8, 10, 12, 16, 20])
    args = ap.parse_args()
    w2 = args.omega2
    cfg = RunConfig(lattice=((1.0, 0.0), (w2.real, w2.imag)))
    st = pl.prepare(pl.lattice_of(cfg), cfg)
    print(f"required epsilon {st.cc.epsilon:.3e}")
    print(f"{'cap':>4} {'used':>4} {'sup residual':>14}")
    for k in args.caps:
        fit = fit_h(st.lf, st.cycles, k, cfg.fit_tol)
        print(f"{k:4d} {fit.basis_pole_order:4d} {fit.sup_residual:14.6e}")


if __name__ == "__main__":
    main()
