import copy
import json

import numpy as np
import pytest

from footprint_mppi.geometry import FIXTURE_DIR
from footprint_mppi.scenario import Scenario, ScenarioError, load_scenario, save_scenario

SCEN = FIXTURE_DIR / "scenarios"


@pytest.fixture
def base():
    with open(SCEN / "open_field.json") as f:
        return json.load(f)


@pytest.mark.parametrize(
    "mutate, pointer",
    [
        (lambda d: d.__setitem__("start", [0.0, 0.0]), "/start"),
        (lambda d: d["obstacles"].append({"type": "disc", "center": [9, 9], "radius": -1}), "/obstacles/"),
        (lambda d: d["model"].__setitem__("kind", "hovercraft"), "/model/kind"),
        (lambda d: d["mppi"].__setitem__("bogus", 1), "/mppi/bogus"),
        (lambda d: d.pop("goal"), "/"),
        (lambda d: d["goal_tolerance"].__setitem__("position", "far"), "/goal_tolerance/position"),
    ],
)
def test_schema_errors_carry_pointers(base, mutate, pointer):
    data = copy.deepcopy(base)
    mutate(data)
    with pytest.raises(ScenarioError) as exc:
        Scenario.from_dict(data)
    assert str(exc.value).startswith(pointer)


def test_round_trip(tmp_path, base):
    sc = Scenario.from_dict(base)
    save_scenario(sc, tmp_path / "s.json")
    back = load_scenario(tmp_path / "s.json")
    assert back.to_dict() == sc.to_dict()
    assert back.mppi == sc.mppi


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{ not json")
    with pytest.raises(ScenarioError):
        load_scenario(p)


def test_footprint_by_fixture_name(base):
    data = copy.deepcopy(base)
    data["footprint"] = "l_shape"
    assert Scenario.from_dict(data).footprint.name == "L"
    data["footprint"] = "no_such_shape"
    with pytest.raises(ScenarioError):
        Scenario.from_dict(data)


def test_with_seed_updates_rng():
    sc = load_scenario(SCEN / "open_field.json").with_seed(12)
    assert sc.seed == 12 and sc.mppi.rng_seed == 12


@pytest.mark.parametrize("path", sorted(SCEN.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_fixtures_load(path):
    sc = load_scenario(path)
    assert sc.goal_tolerance[0] > 0 and sc.goal_tolerance[1] > 0
    assert np.asarray(sc.guidance).shape[1] == 2
