import json

import pytest

from noncritical import certificate as cm
from noncritical.cli import main
from noncritical.config import RunConfig


def _run(tmp_path, name, *args, config=None):
    out = tmp_path / f"{name}.json"
    argv = list(args) + ["--out", str(out)]
    if config is not None:
        cfg = tmp_path / f"{name}-cfg.json"
        config.dump(cfg)
        argv += ["--config", str(cfg)]
    code = main(argv)
    return code, (json.loads(out.read_text()) if out.exists() else None), out


def test_genus0_exits_zero(tmp_path, capsys):
    code, cert, _ = _run(tmp_path, "g0", "construct-noncritical", config=RunConfig(lattice="genus0"))
    assert code == 0 and cert["exit_code"] == 0
    assert json.loads(capsys.readouterr().err)["failed_gates"] == []


def test_small_cap_exits_three(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(dict(RunConfig().to_dict(), fit_pole_order=2)))
    assert main(["construct-noncritical", "--config", str(cfg)]) == 3
    assert json.loads(capsys.readouterr().err)["error"] == "ApproximationDegreeError"


def test_malformed_config_exits_two(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lattice": "torus"}))
    assert main(["construct-noncritical", "--config", str(cfg)]) == 2


def test_genus1_reports_failed_gates(tmp_path, capsys):
    code, cert, _ = _run(tmp_path, "g1", "construct-noncritical")
    diag = json.loads(capsys.readouterr().err)
    assert code == cert["exit_code"] == 3
    assert set(diag["failed_gates"]) == {"fit_epsilon", "contraction", "polydisc"}
    assert cert["gates"]["periods"] and cert["gates"]["nonvanishing"]


def test_determinism_and_verify(tmp_path):
    _, a, pa = _run(tmp_path, "a", "construct-noncritical", "--seed", "5")
    _, b, pb = _run(tmp_path, "b", "construct-noncritical", "--seed", "5")
    assert cm.dumps(cm.without_environment(a)) == cm.dumps(cm.without_environment(b))
    rep = tmp_path / "rep.json"
    assert main(["verify", str(pa), "--out", str(rep)]) == 0
    assert json.loads(rep.read_text())["reproduced"]


@pytest.mark.parametrize("args", [
    ("count-critical", "--function", "wp"),
    ("prescribe-divisor", "--divisor", "0.3+0.2j:1,-0.3-0.2j:1"),
])
def test_commands_pass_and_verify(tmp_path, args):
    code, cert, path = _run(tmp_path, args[0], *args)
    assert code == 0
    assert main(["verify", str(path), "--out", str(tmp_path / "r.json")]) == 0


def test_genus0_count(tmp_path):
    code, cert, _ = _run(tmp_path, "z", "count-critical", "--function", "z^3",
                         config=RunConfig(lattice="genus0"))
    assert code == 0 and cert["body"]["counted"] == 2


def test_tampered_certificate_is_not_reproduced(tmp_path):
    _, cert, path = _run(tmp_path, "w", "count-critical", "--function", "wp")
    cert["body"]["counted"] = 4
    path.write_text(json.dumps(cert))
    assert main(["verify", str(path), "--out", str(tmp_path / "r.json")]) != 0


def test_bad_divisor_text(tmp_path):
    assert main(["prescribe-divisor", "--divisor", "abc:1"]) == 2
