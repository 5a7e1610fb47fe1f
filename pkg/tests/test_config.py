import json

import pytest

from noncritical.config import RunConfig
from noncritical.errors import ApproximationDegreeError, PreconditionError


def test_defaults_are_the_square_lattice():
    cfg = RunConfig()
    assert cfg.genus == 1 and cfg.periods == (1, 1j)


def test_round_trip(tmp_path):
    cfg = RunConfig(lattice=((1, 0), (0.4, 1.3)), seed=7)
    path = tmp_path / "cfg.json"
    cfg.dump(path)
    assert RunConfig.load(path) == cfg
    assert json.loads(path.read_text())["seed"] == 7


def test_genus0_token():
    cfg = RunConfig(lattice="genus0")
    assert cfg.genus == 0 and cfg.periods is None
    assert RunConfig.from_dict(cfg.to_dict()) == cfg


@pytest.mark.parametrize("bad", [
    {"lattice": "torus"},
    {"quad_tol": 0.0},
    {"solve_tol": -1e-9},
    {"fit_samples": 8},
    {"fit_samples": 1024, "check_samples": 2048},
    {"lattice": ((1, 0), (1, 0, 0))},
])
def test_invalid_values_are_preconditions(bad):
    with pytest.raises(PreconditionError) as info:
        RunConfig(**bad)
    assert info.value.exit_code == 2


def test_unknown_keys_rejected():
    with pytest.raises(PreconditionError):
        RunConfig.from_dict({"typo_tol": 1})


def test_small_caps_are_degree_failures():
    with pytest.raises(ApproximationDegreeError) as info:
        RunConfig(fit_pole_order=2)
    assert info.value.exit_code == 3
