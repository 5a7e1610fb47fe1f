"""Run every CLI command into a directory and re-verify each certificate."""
import argparse
import json
import pathlib

from noncritical.cli import main as cli
from noncritical.config import RunConfig

RUNS = {
    "construct": ["construct-noncritical"],
    "construct_genus0": ["construct-noncritical"],
    "divisor": ["prescribe-divisor", "--divisor", "0.3+0.2j:1,-0.3-0.2j:1"],
    "periods": ["prescribe-periods", "--targets", "1+1j,2-1j"],
    "critical": ["count-critical", "--function", "wp^2+wpp"],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", nargs="?", default="runs")
    args = ap.parse_args()
    out = pathlib.Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    RunConfig().dump(out / "genus1.json")
    RunConfig(lattice="genus0").dump(out / "genus0.json")
    summary = {}
    for name, argv in RUNS.items():
        cfg = out / ("genus0.json" if name.endswith("genus0") else "genus1.json")
        cert = out / f"{name}.cert.json"
        code = cli(argv + ["--config", str(cfg), "--out", str(cert)])
        vcode = cli(["verify", str(cert), "--out", str(out / f"{name}.verify.json")])
        summary[name] = {"exit_code": code, "verify_exit_code": vcode}
    print(json.dumps(summary, indent=2))


if __name__ == "__main__":
    main()
