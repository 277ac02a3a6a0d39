import itertools

import numpy as np
import pytest

from frcheck.logic.finder import (
    BoundExceededError,
    ModelSpec,
    Witness,
    audit,
    find_model,
    frame_class,
    refutation_tree_complete,
)
from frcheck.logic.formula import Atom, Not, parse
from frcheck.logic.kripke import FrameProperty, check_frame_property, model, satisfies, valid_in_model
from frcheck.logic.sampling import random_formula

PHI_SPEC = (parse("[x][y]phi"), parse("<x>~phi"))


def test_reflexive_validity_forces_atom_at_point():
    spec = ModelSpec(("x",), frame_class("x", "reflexive"), valid=(Atom("p"),), at_point=(Not(Atom("p")),))
    res = find_model(spec)
    assert not res.sat
    assert res.certificate.is_complete()
    assert res.certificate.bound == 3


def test_serial_transitive_euclidean_countermodel_has_two_worlds():
    spec = ModelSpec(("x", "y"), frame_class("xy", "serial", "transitive", "euclidean"), at_point=PHI_SPEC)
    res = find_model(spec)
    assert res.sat
    m = res.model
    assert len(m.worlds) == 2
    for prop in ("serial", "transitive", "euclidean"):
        assert check_frame_property(m, prop)
    assert all(satisfies(m, m.point, f) for f in PHI_SPEC)


def test_reflexive_version_is_unsat():
    spec = ModelSpec(("x", "y"), frame_class("xy", "reflexive"), at_point=PHI_SPEC, world_count_max=4)
    res = find_model(spec)
    assert not res.sat and res.certificate.is_complete()


def test_bound_is_enforced():
    with pytest.raises(BoundExceededError):
        find_model(ModelSpec(("x",), at_point=(Atom("p"),), world_count_max=7))


def test_fixed_worlds_with_forbidden_pairs_and_witness():
    ws = ("u", "v", "w")
    val = {"p": frozenset({"w"})}
    spec = ModelSpec(
        ("x",),
        frame_class("x", "serial"),
        forbidden={"x": {("u", "v"): "no u->v", ("u", "u"): "no u->u"}},
        witnesses=(Witness("x", Atom("p"), ("v",), "v sees p"),),
        worlds=ws,
        valuation=val,
        point="u",
    )
    res = find_model(spec)
    assert res.sat
    rel = res.model.frame.relation("x")
    assert ("u", "w") in rel and ("v", "w") in rel
    assert not {("u", "v"), ("u", "u")} & rel
    assert audit(spec, res.model) == []


def test_fixed_unsat_names_the_clashing_labels():
    spec = ModelSpec(
        ("x",),
        frame_class("x", "reflexive"),
        forbidden={"x": {("u", "u"): "rule-7 forbids x:(u,u)"}},
        worlds=("u",),
        valuation={},
        point="u",
    )
    res = find_model(spec)
    assert not res.sat and res.certificate.is_complete()
    reasons = res.certificate.root_reasons()
    assert "rule-7 forbids x:(u,u)" in reasons
    assert any("reflexive[x]" in r for r in reasons)


def test_subset_carrier_may_drop_worlds():
    ws = ("u", "v")
    spec = ModelSpec(
        ("x",),
        frame_class("x", "reflexive"),
        valid=(Atom("p"),),
        worlds=ws,
        valuation={"p": frozenset({"u"})},
        point="u",
        carrier="subset",
    )
    res = find_model(spec)
    assert res.sat and res.model.worlds == ("u",)


def test_audit_catches_a_bad_model():
    spec = ModelSpec(("x",), frame_class("x", "reflexive"), at_point=(Atom("p"),))
    m = model(["w0"], {"x": []}, {"p": []}, "w0")
    problems = audit(spec, m)
    assert any("reflexive" in p for p in problems) and any("fails at point" in p for p in problems)


def test_refutation_tree_completeness():
    assert refutation_tree_complete([()])
    assert refutation_tree_complete([("a=0",), ("a=1", "b=0"), ("a=1", "b=1")])
    assert not refutation_tree_complete([("a=0",), ("a=1", "b=0")])
    assert not refutation_tree_complete([])


def _brute_force_sat(f, max_worlds, reflexive=False):
    """Enumerate every model with one agent and atom p, point w0."""
    for n in range(1, max_worlds + 1):
        ws = [f"w{i}" for i in range(n)]
        pairs = list(itertools.product(ws, ws))
        for bits in itertools.product((0, 1), repeat=len(pairs)):
            rel = [pr for pr, b in zip(pairs, bits) if b]
            if reflexive and any((w, w) not in rel for w in ws):
                continue
            for vbits in itertools.product((0, 1), repeat=n):
                m = model(ws, {"x": rel}, {"p": [w for w, b in zip(ws, vbits) if b]}, "w0")
                if satisfies(m, "w0", f):
                    return True
    return False


@pytest.mark.parametrize("reflexive", [False, True])
def test_agrees_with_exhaustive_enumeration(reflexive):
    rng = np.random.default_rng(11 + reflexive)
    props = frame_class("x", "reflexive") if reflexive else {}
    for _ in range(40):
        f = random_formula(rng, ("p",), ("x",), 3)
        res = find_model(ModelSpec(("x",), props, at_point=(f,), world_count_max=2))
        assert res.sat == _brute_force_sat(f, 2, reflexive)
        if not res.sat:
            assert res.certificate.is_complete()


def test_random_searches_self_audit():
    rng = np.random.default_rng(5)
    found = 0
    for _ in range(40):
        f = random_formula(rng, ("p", "q"), ("x", "y"), 3)
        g = random_formula(rng, ("p", "q"), ("x", "y"), 2)
        props = frame_class("xy", FrameProperty.SERIAL, FrameProperty.TRANSITIVE)
        spec = ModelSpec(("x", "y"), props, valid=(g,), at_point=(f,), world_count_max=3)
        res = find_model(spec)
        if res.sat:
            found += 1
            assert audit(spec, res.model) == []
            assert valid_in_model(res.model, g)
    assert found > 0


def test_search_is_deterministic():
    spec = ModelSpec(("x", "y"), frame_class("xy", "serial", "transitive", "euclidean"), at_point=PHI_SPEC)
    a, b = find_model(spec), find_model(spec)
    assert a.model == b.model
