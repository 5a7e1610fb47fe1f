"""Order estimates of reference functions near the puncture."""
import numpy as np

from noncritical import expr as ex
from noncritical.elliptic import lattice_from_periods
from noncritical.verification import estimate_order


def main():
    L = lattice_from_periods(1.0, 1j)
    z = ex.Zeta(L)
    cases = {
        "wp": ex.Wp(L),
        "exp(zeta)": ex.Exp(z),
        "exp(3i zeta)": ex.Exp(ex.Product((ex.Const(3j), z))),
        "exp(zeta) wp": ex.Product((ex.Exp(z), ex.Wp(L))),
        "exp(wp)": ex.Exp(ex.Wp(L)),
        "exp(wp')": ex.Exp(ex.WpPrime(L)),
    }
    for name, f in cases.items():
        c = estimate_order(f, L)
        print(f"{name:14s} mu_hat {c.mu_hat:6.3f} fit quality {c.fit_quality:.4f}")


if __name__ == "__main__":
    np.seterr(all="ignore")
    main()
