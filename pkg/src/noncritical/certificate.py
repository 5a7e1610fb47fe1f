"""Versioned JSON certificates and their re-validation."""
from __future__ import annotations

import json
import platform
import sys

import numpy as np

from . import expr as ex
from .config import RunConfig
from .cycles import integrate_over_cycle, standard_cycles
from .errors import ConstructionError
from .solver import ConstantsChain

VERSION = 1
ENV_KEY = "environment"


class CertificateError(ConstructionError):
    """A certificate that fails to load or re-validate."""


def environment_stamp():
    return {"python": platform.python_version(), "numpy": np.__version__,
            "platform": sys.platform}


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if np.isfinite(x) else repr(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    return x


def make_certificate(kind, cfg, body, gates, code):
    return _plain({
        "version": VERSION, "kind": kind, "config": cfg.to_dict(), "body": body,
        "gates": gates, "passed": all(gates.values()), "exit_code": code,
        ENV_KEY: environment_stamp(),
    })


def dumps(cert):
    return json.dumps(_plain(cert), indent=2, sort_keys=True) + "\n"


def without_environment(cert):
    return {k: v for k, v in cert.items() if k != ENV_KEY}


def revalidate_constants(cert):
    """Re-check the constants-chain inequalities from the stored reals."""
    consts = cert.get("body", {}).get("constants")
    if consts is None:
        return True
    cc = ConstantsChain(**consts)
    stored = cert["body"].get("constants_inequalities", {})
    now = {k: bool(v) for k, v in cc.inequalities().items()}
    return now == stored and all(now.values())


def loads(text):
    cert = json.loads(text)
    if cert.get("version") != VERSION:
        raise CertificateError(f"unsupported certificate version {cert.get('version')!r}")
    for key in ("kind", "config", "body", "gates"):
        if key not in cert:
            raise CertificateError(f"certificate lacks {key!r}")
    if not revalidate_constants(cert):
        raise CertificateError("constants chain does not re-validate")
    return cert


def load(path):
    with open(path) as fh:
        return loads(fh.read())


# -- verify ----------------------------------------------------------------------

def _close(a, b, rel=1e-8, abs_=1e-12):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return bool(np.all(np.abs(a - b) <= abs_ + rel * np.abs(b)))


def verify(cert):
    """Recompute every residual of ``cert`` from its serialised expressions.

    Returns a report with per-check agreement, the recomputed gates and
    ``reproduced`` (every recomputed gate equals the recorded one and the
    recorded values are matched).
    """
    from . import pipeline as pl

    cfg = RunConfig.from_dict(cert["config"])
    body, kind = cert["body"], cert["kind"]
    checks, gates = {}, {}
    if cfg.genus == 0:
        if kind == "count-critical":
            _, nb, gates = pl.count_critical(None, body["function"])
            checks["counted"] = nb["counted"] == body["counted"]
        else:
            _, _, nb, gates = pl.build_noncritical(None, cfg)
            checks["primitive"] = ex.to_prefix(ex.from_prefix(body["primitive"])) == body["primitive"]
            checks["order"] = nb["order"]["mu_hat"] == body["order"]["mu_hat"]
    else:
        L = pl.lattice_of(cfg)
        if kind in ("construct-noncritical", "prescribe-periods") and "form" in body:
            checks.update(_verify_form(L, cfg, body, gates))
        elif kind == "prescribe-divisor":
            f, nb, gates = pl.prescribe_divisor(L, [(complex(x, y), m) for x, y, m in body["divisor"]], cfg)
            checks["expression"] = ex.to_prefix(f) == body["f"]
            checks["periodicity"] = nb["periodicity_residual"] <= 1e-8
            if "zero_total" in body:
                checks["zero_total"] = _close(nb["zero_total"], body["zero_total"], abs_=1e-9)
        elif kind == "count-critical":
            _, nb, gates = pl.count_critical(L, body["function"])
            checks["counted"] = nb["counted"] == body["counted"]
            checks["located"] = nb["located"] == body["located"]
        else:
            raise CertificateError(f"unknown certificate kind {kind!r}")
    recorded = cert["gates"]
    for k, v in gates.items():
        if k in recorded:
            checks[f"gate:{k}"] = bool(v) == bool(recorded[k])
    checks["constants"] = revalidate_constants(cert)
    return {"kind": kind, "checks": checks, "gates": gates,
            "reproduced": all(checks.values()), "passed": all(gates.values())}


def _verify_form(L, cfg, body, gates):
    from . import pipeline as pl
    from .algebraic import AlgebraicFunction

    checks = {}
    form = ex.from_prefix(body["form"], L)
    checks["round_trip"] = ex.to_prefix(form) == body["form"]
    F = AlgebraicFunction.from_dict(L, body["exponent"])
    cycles = standard_cycles(L, cfg.cycle_samples)
    if "achieved_periods" not in body:
        # structure: exp(exponent) times the normalised form
        checks["structure"] = (isinstance(form, ex.Product) and isinstance(form.factors[0], ex.Exp)
                               and ex.to_prefix(form.factors[0]) == ex.to_prefix(ex.Exp(F.to_expr())))
        rng = np.random.default_rng(cfg.seed)
        c = pl.form_checks(L, form, cycles, cfg, rng)
        gates.update({
            "periods": max(c["period_residuals"]) <= cfg.period_tol,
            "puncture_loop": c["puncture_loop"] <= cfg.period_tol,
            "path_independence": c["path_independence"] <= cfg.path_tol,
            "nonvanishing": bool(np.isfinite(c["min_log_modulus"])),
            "order_finite": bool(np.isfinite(c["order"]["mu_hat"]) and c["order_growth_bound"]),
        })
        checks["primitive_value"] = _close(c["primitive_value"], body["primitive_value"], rel=1e-9)
        checks["order"] = _close(c["order"]["mu_hat"], body["order"]["mu_hat"], rel=1e-6)
    else:
        k, unit = form.factors[0], form.factors[1]
        checks["structure"] = isinstance(k, ex.Const) and isinstance(unit.factors[0], ex.Exp)
        got = k.value * np.array([integrate_over_cycle(unit, cyc, tol=cfg.quad_tol).value
                                  for cyc in cycles])
        targets = np.array([complex(*t) for t in body["targets"]])
        rel = float(np.max(np.abs(got - targets)) / np.max(np.abs(targets)))
        gates["achieved_periods"] = rel <= 1e-7
        gates["nonvanishing"] = bool(np.isfinite(pl.min_log_modulus(form, L, cycles=cycles)))
        checks["achieved"] = _close([[z.real, z.imag] for z in got], body["achieved_periods"],
                                    rel=1e-9, abs_=1e-10)
    return checks
