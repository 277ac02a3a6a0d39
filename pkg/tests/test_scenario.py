import pytest

from frcheck import quantum as q
from frcheck.logic.formula import Atom, parse
from frcheck.logic.kripke import check_frame_property, satisfies, valid_in_model
from frcheck.scenario import derivations as D
from frcheck.scenario.protocol import (
    ALL_WORLDS,
    HAT,
    INIT_ALL,
    OutcomeWorld,
    build_worlds,
    ket_atom,
    protocol_formulas,
)
from frcheck.scenario.report import CONTRADICTION, SAT, VALID
from frcheck.scenario.rules import (
    NECESSITY,
    WITNESS,
    BridgeRule,
    UnitaryNotPermittedError,
    protocol_rules,
    rule_map,
    star_constraints,
)


@pytest.fixture(scope="module")
def skel():
    return build_worlds()


@pytest.fixture(scope="module")
def fr_report():
    return D.run_theorem_fr()


@pytest.fixture(scope="module")
def fr_star_report():
    return D.run_theorem_fr_star()


# protocol ---------------------------------------------------------------------------


def test_world_atoms(skel):
    assert satisfies(skel, HAT.name, Atom(ket_atom("+", "l", "t2")))
    for w in ALL_WORLDS:
        if w.a_t1 == "0":
            assert satisfies(skel, w.name, Atom(ket_atom("0", "l", "t2")))
        assert satisfies(skel, w.name, Atom(ket_atom("init", "r", "0")))
        assert satisfies(skel, w.name, Atom(INIT_ALL))


def test_protocol_formulas_valid_on_skeleton(skel):
    assert len(skel.worlds) == 16
    for name, f in protocol_formulas().items():
        assert valid_in_model(skel, f), name


def test_outcome_world_names():
    assert OutcomeWorld.parse("1.1.ok.ok") == HAT
    with pytest.raises(ValueError):
        OutcomeWorld.parse("1.1.ok")
    with pytest.raises(ValueError):
        OutcomeWorld.parse("2.1.ok.ok")


# bridge rules -----------------------------------------------------------------------


def test_rule_expectations_and_kinds():
    for rule in protocol_rules():
        e = rule.expectation()
        if rule.name in ("c.FR", "d.FR"):
            assert abs(e - 11 / 12) <= q.EPS
            assert rule.kind() == WITNESS
        else:
            assert abs(e - 1) <= q.EPS, rule.name
            assert rule.kind() == NECESSITY


def test_nested_rules_check_memory_overlap():
    for rule in protocol_rules():
        if rule.inner is not None:
            assert abs(rule.memory_overlap() - 1) <= q.EPS


def test_amanda_may_not_use_global_unitaries():
    base = rule_map()["a.U.fail"]
    with pytest.raises(UnitaryNotPermittedError):
        BridgeRule("bad", "a", base.indicator, base.state, base.projector, base.target, "t4", ("U_t1",))


def test_star_constraints_examples(skel):
    star = star_constraints(skel, protocol_rules())
    # the U_a rule only constrains a at eigenlink worlds, away from d's fail outcome
    u_pairs = [pair for pair, label in star.forbidden["a"].items() if label.startswith("a.U.fail")]
    assert u_pairs and all(u.startswith("1.") and not v.endswith(".fail") for u, v in u_pairs)
    assert (HAT.name, HAT.name) in star.forbidden_pairs("a")
    # c's A1 rule forbids access to worlds with ok_c and 0_g
    c_pairs = star.forbidden_pairs("c")
    assert all((u, "1.0.ok.ok") in c_pairs for u in (w.name for w in ALL_WORLDS))
    witnesses = {w.label.split()[0]: w for w in star.witnesses}
    assert set(witnesses) == {"c.FR", "d.FR"}
    assert len(star.validities) == 2


# lemmas ---------------------------------------------------------------------------


def test_lemma1():
    rep = D.run_lemma1()
    assert rep.verdict == VALID and rep.all_verified
    assert "degenerate" in rep.step("S/degenerate").note


def test_lemma2_and_countermodel():
    rep = D.run_lemma2()
    assert rep.verdict == VALID
    m = rep.model
    assert len(m.worlds) == 2
    assert all(check_frame_property(m, p) for p in ("serial", "transitive", "euclidean"))
    assert satisfies(m, m.point, parse(D.COUNTER_FORMULA))
    assert rep.step("C").frames == ("reflexive[y]",)


# theorems -------------------------------------------------------------------------

FOUR_STEPS = ("i", "ii", "iii", "iv")


def test_theorem_fr_contradiction(fr_report):
    assert fr_report.verdict == CONTRADICTION
    assert fr_report.certificate["complete"]
    for sid in FOUR_STEPS + ("S", "bottom"):
        assert fr_report.step(sid).verified, sid


def test_theorem_fr_steps_are_rechecked(fr_report):
    again = D.verify_claim(next(c for c in D.fr_claims() if c.id == "i"), HAT.name)
    assert again == fr_report.step("i")


def test_theorem_fr_other_point_is_sat():
    rep = D.run_theorem_fr(OutcomeWorld("1", "1", "ok", "fail").name)
    assert rep.verdict == SAT and rep.model is not None


def test_theorem_fr_star(fr_star_report):
    rep = fr_star_report
    assert rep.verdict == CONTRADICTION and rep.all_verified
    assert abs(rep.values["c.FR"] - 11 / 12) <= q.EPS
    assert "one-world carrier UNSAT" in rep.step("II.W1").check
    assert rep.step("bottom").formula == "M[d,t4]=ok & ~M[d,t4]=ok"


@pytest.mark.parametrize("drop, frame", sorted(D.EXPECTED_ABLATION))
def test_ablations(drop, frame):
    rep = D.ablate(drop, frame)
    assert rep.verdict == D.EXPECTED_ABLATION[(drop, frame)]
    assert rep.all_verified
    if rep.verdict == SAT:
        assert rep.model is not None


def test_unknown_ablation():
    with pytest.raises(ValueError):
        D.ablation_rules("everything")


def test_machine_report_is_deterministic(fr_report):
    assert fr_report.to_machine() == D.run_theorem_fr().to_machine()
