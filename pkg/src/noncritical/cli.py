"""Command-line entry point.

Exit codes: 0 all gates pass, 2 precondition, 3 approximation degree,
4 solver, 5 quadrature.  Certificates go to ``--out`` (stdout by default);
diagnostics go to stderr as one JSON object.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import certificate as cert_mod
from . import pipeline as pl
from .config import RunConfig
from .errors import ConstructionError, PreconditionError


def _config(args):
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if getattr(args, "seed", None) is not None:
        cfg = RunConfig.from_dict(dict(cfg.to_dict(), seed=args.seed))
    return cfg


def _complex_list(text):
    try:
        return [complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise PreconditionError(f"cannot read complex list {text!r}") from exc


def _divisor(text):
    out = []
    for item in text.split(","):
        if not item.strip():
            continue
        z, _, m = item.partition(":")
        try:
            out.append((complex(z.strip()), int(m or 1)))
        except ValueError as exc:
            raise PreconditionError(f"cannot read divisor entry {item!r}") from exc
    return out


def cmd_construct_noncritical(cfg):
    _, _, body, gates = pl.build_noncritical(pl.lattice_of(cfg), cfg)
    return "construct-noncritical", body, gates


def cmd_prescribe_divisor(cfg, pairs):
    L = pl.lattice_of(cfg)
    if L is None:
        raise PreconditionError("divisor prescription needs a lattice")
    _, body, gates = pl.prescribe_divisor(L, pairs, cfg)
    return "prescribe-divisor", body, gates


def cmd_prescribe_periods(cfg, targets):
    L = pl.lattice_of(cfg)
    if L is None:
        raise PreconditionError("period prescription needs a lattice")
    body, gates = pl.prescribe_periods(L, targets, cfg)
    return "prescribe-periods", body, gates


def cmd_count_critical(cfg, spec):
    _, body, gates = pl.count_critical(pl.lattice_of(cfg), spec)
    return "count-critical", body, gates


def run(kind, body, gates, cfg):
    code = pl.exit_code(gates)
    return cert_mod.make_certificate(kind, cfg, body, gates, code), code


def build_parser():
    ap = argparse.ArgumentParser(prog="noncritical", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--seed", type=int, help="override the configured seed")
        p.add_argument("--out", help="certificate path (default: stdout)")

    common(sub.add_parser("construct-noncritical", help="noncritical function of finite order"))
    p = sub.add_parser("prescribe-divisor", help="finite-order function with a given zero divisor")
    common(p)
    p.add_argument("--divisor", required=True, help="comma list of z:m, e.g. '0.3+0.2j:1,-0.3-0.2j:1'")
    p = sub.add_parser("prescribe-periods", help="nowhere-vanishing 1-form with given periods")
    common(p)
    p.add_argument("--targets", required=True, help="comma list of complex periods, e.g. '1,0'")
    p = sub.add_parser("count-critical", help="critical points of an algebraic function")
    common(p)
    p.add_argument("--function", required=True, help="e.g. 'wp', 'wp^2+wpp', or 'z^3' for genus 0")
    p = sub.add_parser("verify", help="recompute every residual of a certificate")
    p.add_argument("certificate")
    p.add_argument("--out", help="report path (default: stdout)")
    return ap


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            report = cert_mod.verify(cert_mod.load(args.certificate))
            _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
            return 0 if report["reproduced"] else 2
        cfg = _config(args)
        if args.command == "construct-noncritical":
            res = cmd_construct_noncritical(cfg)
        elif args.command == "prescribe-divisor":
            res = cmd_prescribe_divisor(cfg, _divisor(args.divisor))
        elif args.command == "prescribe-periods":
            res = cmd_prescribe_periods(cfg, _complex_list(args.targets))
        else:
            res = cmd_count_critical(cfg, args.function)
        cert, code = run(*res, cfg)
        _emit(cert_mod.dumps(cert), args.out)
        failed = [k for k, v in cert["gates"].items() if not v]
        sys.stderr.write(json.dumps({"exit_code": code, "failed_gates": failed}) + "\n")
        return code
    except ConstructionError as exc:
        diag = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        sys.stderr.write(json.dumps(diag) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
