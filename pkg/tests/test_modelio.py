import json
from importlib import resources

import numpy as np
import pytest

from frcheck import halpern as h
from frcheck.logic.sampling import random_model
from frcheck.modelio import ModelFileError, dumps, load_model, loads, save_model
from frcheck.scenario.derivations import fig1_model


def test_shipped_fig1_file_matches_reconstruction():
    text = resources.files("frcheck").joinpath("data/fig1.model").read_text(encoding="utf-8")
    assert loads(text) == fig1_model()
    assert dumps(fig1_model()) == text


def test_round_trip_random_models(tmp_path):
    rng = np.random.default_rng(0)
    for k in range(30):
        m = random_model(rng, max_worlds=4)
        path = tmp_path / f"m{k}.model"
        save_model(m, path)
        back = load_model(path)
        assert back == m
        assert dumps(back) == path.read_text(encoding="utf-8")


@pytest.mark.parametrize("generalized", [False, True])
def test_round_trip_structures(generalized):
    rng = np.random.default_rng(1)
    for _ in range(10):
        s = h.random_structure(rng, generalized=generalized)
        text = dumps(s)
        back = loads(text)
        assert type(back) is type(s)
        assert back.weights == s.weights
        assert dumps(back) == text


def _doc(**over):
    doc = {"worlds": ["w0", "w1"], "agents": ["x"], "relations": {"x": [["w0", "w1"]]}, "valuation": {"p": ["w1"]}}
    doc.update(over)
    return json.dumps(doc)


def test_weights_not_summing_to_one_rejected():
    with pytest.raises(ModelFileError) as err:
        loads(_doc(weights={"x": {"w0": 0.5, "w1": 0.4}}))
    assert err.value.field == "weights"


def test_unknown_agent_in_relations_rejected():
    with pytest.raises(ModelFileError) as err:
        loads(_doc(relations={"z": [["w0", "w1"]]}))
    assert err.value.field == "relations.z"


@pytest.mark.parametrize(
    "over, field",
    [
        ({"valuation": {"p": ["w9"]}}, "valuation.p"),
        ({"point": "w9"}, "point"),
        ({"relations": {"x": [["w0"]]}}, "relations.x"),
        ({"worlds": ["w0", "w0"]}, "worlds"),
        ({"extra": 1}, "<root>"),
    ],
)
def test_field_diagnostics(over, field):
    with pytest.raises(ModelFileError) as err:
        loads(_doc(**over))
    assert err.value.field == field


def test_syntax_error_reports_line():
    with pytest.raises(ModelFileError) as err:
        loads('{\n  "worlds": ["w0"],\n  "agents": [x]\n}')
    assert err.value.line == 3
