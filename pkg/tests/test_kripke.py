import numpy as np
import pytest

from frcheck.logic.formula import Atom, Box, Diamond, Implies, Not, Or, is_box_free, parse
from frcheck.logic.kripke import (
    AxiomSchema,
    FrameProperty,
    ModelError,
    UnknownAgentError,
    UnknownAtomError,
    axiom_validity,
    check_frame_property,
    falsifying_worlds,
    model,
    satisfies,
    valid_in_model,
)
from frcheck.logic.sampling import random_formula, random_model
from frcheck.scenario.derivations import fig1_model

P = Atom("p")


def probes(rng, n=12):
    return [random_formula(rng, ("p", "q"), ("x", "y"), 3) for _ in range(n)]


def test_fig1_model_evaluation():
    m = fig1_model()
    assert satisfies(m, "w0", parse("[x][y]phi"))
    assert satisfies(m, "w0", parse("<x>~phi"))
    # x is reflexive here; the T-instance fails for y
    assert valid_in_model(m, parse("[x]phi -> phi"))
    assert not valid_in_model(m, parse("[y]phi -> phi"))
    assert falsifying_worlds(m, parse("[y]phi -> phi")) == ("w0",)


def test_tautology_and_k_instance_everywhere():
    rng = np.random.default_rng(1)
    for _ in range(30):
        m = random_model(rng)
        assert valid_in_model(m, Or(P, Not(P)))
        f, g = random_formula(rng, ("p", "q"), ("x",), 2), random_formula(rng, ("p", "q"), ("x",), 2)
        assert valid_in_model(m, AxiomSchema.K.instantiate("x", f, g))


def test_reflexive_single_world():
    m = model(["w"], {"x": [("w", "w")]}, {"p": []})
    assert valid_in_model(m, Implies(Box("x", P), P))


def test_unknown_atom_and_agent_are_errors():
    m = model(["w"], {"x": []}, {"p": ["w"]})
    with pytest.raises(UnknownAtomError):
        satisfies(m, "w", Atom("q"))
    with pytest.raises(UnknownAgentError):
        satisfies(m, "w", Box("z", P))
    with pytest.raises(ModelError):
        satisfies(m, "v", P)


def test_relation_to_unknown_world_rejected():
    with pytest.raises(ModelError):
        model(["w"], {"x": [("w", "v")]}, {})


def test_frame_property_examples():
    ws = ["a", "b", "c"]
    empty = model(ws, {"x": []}, {})
    assert not check_frame_property(empty, "serial")
    assert check_frame_property(empty, "transitive")
    ident = model(ws, {"x": [(w, w) for w in ws]}, {})
    for prop in FrameProperty:
        assert check_frame_property(ident, prop)
    fig = fig1_model()
    assert all(check_frame_property(fig, p) for p in ("serial", "transitive", "euclidean"))
    bad = check_frame_property(fig, "reflexive")
    assert not bad and bad.agent == "y" and bad.violation == ("w0",)


def test_duality_and_box_free_monotonicity():
    rng = np.random.default_rng(2)
    for _ in range(60):
        m = random_model(rng)
        f = random_formula(rng, ("p", "q"), ("x", "y"), 3)
        for w in m.worlds:
            assert satisfies(m, w, Diamond("x", f)) == satisfies(m, w, Not(Box("x", Not(f))))
        if is_box_free(f):
            bigger = m.with_relations({a: set(m.frame.relation(a)) | {(m.worlds[0], m.worlds[-1])} for a in m.agents})
            for w in m.worlds:
                assert satisfies(m, w, f) == satisfies(bigger, w, f)


def test_necessitation_only_on_validities():
    rng = np.random.default_rng(3)
    for _ in range(80):
        m = random_model(rng)
        for f in probes(rng, 4):
            if valid_in_model(m, f):
                assert valid_in_model(m, Box("x", f)) and valid_in_model(m, Box("y", f))


@pytest.mark.parametrize(
    "prop, schema",
    [
        (FrameProperty.REFLEXIVE, AxiomSchema.T),
        (FrameProperty.SERIAL, AxiomSchema.D),
        (FrameProperty.TRANSITIVE, AxiomSchema.FOUR),
        (FrameProperty.EUCLIDEAN, AxiomSchema.FIVE),
    ],
)
def test_frame_correspondence_sample(prop, schema):
    rng = np.random.default_rng(4)
    for _ in range(40):
        m = random_model(rng, prop=prop)
        assert check_frame_property(m, prop)
        assert axiom_validity(m, schema, probes(rng, 6)).valid


def test_axiom_validity_reports_failures():
    m = fig1_model()
    report = axiom_validity(m, "T", [Atom("phi")])
    assert not report.valid
    assert report.failures[0].agent == "y"
    with pytest.raises(ValueError):
        axiom_validity(m, "T", [])
