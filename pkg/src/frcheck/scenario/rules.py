"""Bridge rules tying an agent's certainty to a projector expectation.

A rule says: at worlds where ``indicator`` holds, the agent's memory
records ``state``. If the Heisenberg projector for ``target`` has
expectation one in that state, every world the agent can access from
there satisfies ``target`` (the pairs violating this are forbidden). If
the expectation is below one, the agent must be able to access some
world where ``target`` fails.

Nested rules (``inner`` set) concern an agent recording another agent's
record. Both the memory overlap and the system expectation must be one;
the rule then makes ``indicator -> [agent][inner]target`` valid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

from .. import quantum as q
from ..logic.finder import Witness
from ..logic.formula import Atom, Box, Formula, Implies, Not, to_text
from ..logic.kripke import KripkeModel, extension
from .protocol import EIGENLINK, PERMITTED_UNITARIES, PHI_FR, M, ind2_atom, ind_atom, ket_atom

NECESSITY = "necessity"
WITNESS = "witness"


class NonHermitianError(q.QuantumError):
    pass


class UnitaryNotPermittedError(ValueError):
    pass


@dataclass(frozen=True)
class BridgeRule:
    name: str
    agent: str
    indicator: str
    state: q.StateVector
    projector: q.DenseOperator
    target: Formula
    time: str
    unitaries: tuple[str, ...] = ()
    inner: str | None = None
    # product of non-commuting evolved projectors, taken as written
    sequential: bool = False
    note: str = ""

    def __post_init__(self):
        allowed = PERMITTED_UNITARIES[self.agent]
        if not set(self.unitaries) <= allowed:
            raise UnitaryNotPermittedError(
                f"{self.name}: agent {self.agent} may not use {sorted(set(self.unitaries) - allowed)}"
            )

    def expectation(self, eps: float = q.EPS) -> float:
        if self.sequential:
            return q.expectation(self.state, self.projector, eps)
        if not q.is_hermitian(self.projector, eps):
            raise NonHermitianError(f"{self.name}: projector is not Hermitian")
        return q.born(self.state, self.projector, eps)

    def memory_overlap(self, eps: float = q.EPS) -> float:
        return q.born(self.state, q.projector_onto(self.state), eps)

    def kind(self, eps: float = q.EPS) -> str:
        e = self.expectation(eps)
        if self.inner is not None:
            if abs(self.memory_overlap(eps) - 1) > eps or abs(e - 1) > eps:
                raise ValueError(f"{self.name}: nested rule needs both expectations equal to one")
            return NECESSITY
        return NECESSITY if abs(e - 1) <= eps else WITNESS

    @property
    def uses_amanda_unitary(self) -> bool:
        return self.agent == "a" and "U_a" in self.unitaries

    def formula(self) -> Formula:
        """What the rule asserts at indicator worlds, as a formula."""
        if self.inner is not None:
            return Implies(Atom(self.indicator), Box(self.agent, Box(self.inner, self.target)))
        return Implies(Atom(self.indicator), Box(self.agent, self.target))


GLOBAL_UNITARIES = ("U_t1", "U_tprime", "U_t2")


def _local(register, matrix) -> q.DenseOperator:
    return q.operator(register, matrix)


@lru_cache(maxsize=None)
def protocol_rules() -> tuple[BridgeRule, ...]:
    ket0, ket1 = q.StateVector(("r",), q.KET0), q.StateVector(("r",), q.KET1)
    l0, l1 = q.StateVector(("l",), q.KET0), q.StateVector(("l",), q.KET1)
    ra, lg = ("r", "a"), ("l", "g")
    ok_ra, fail_ra = q.ok_state(ra), q.fail_state(ra)
    ok_lg, fail_lg = q.ok_state(lg), q.fail_state(lg)
    pi_ok_ra, pi_fail_ra = q.projector_onto(ok_ra), q.projector_onto(fail_ra)
    pi_ok_lg, pi_fail_lg = q.projector_onto(ok_lg), q.projector_onto(fail_lg)
    not_ok_lg = q.identity(lg) - pi_ok_lg
    not_fail_lg = q.identity(lg) - pi_fail_lg
    init = q.init_state()
    amanda = q.amanda_projectors()
    no_ok0 = q.no_ok_and_zero_g()
    not_fr = q.not_joint_event()
    ok_c, ok_d = M("c", "ok"), M("d", "ok")
    a1_target = Implies(ok_c, Not(M("g", "0")))
    return (
        BridgeRule("a.own.0", "a", ind_atom("a", "0", "r", "t1"), ket0, _local(("r",), q.PI0), M("a", "0"), "t1"),
        BridgeRule("a.own.1", "a", ind_atom("a", "1", "r", "t1"), ket1, _local(("r",), q.PI1), M("a", "1"), "t1"),
        BridgeRule(
            "a.U.fail", "a", EIGENLINK, q.plus_zero(), amanda["fail"], M("d", "fail"), "t4", ("U_a",),
            note="indicator from the eigenvalue-eigenstate link",
        ),
        BridgeRule(
            "a.U.not_ok", "a", EIGENLINK, q.plus_zero(), amanda["not_ok"], Not(ok_d), "t4", ("U_a",),
            note="indicator from the eigenvalue-eigenstate link",
        ),
        BridgeRule("g.own.0", "g", ind_atom("g", "0", "l", "t2"), l0, _local(("l",), q.PI0), M("g", "0"), "t2"),
        BridgeRule("g.own.1", "g", ind_atom("g", "1", "l", "t2"), l1, _local(("l",), q.PI1), M("g", "1"), "t2"),
        BridgeRule(
            "g.not_zero_l", "g", ind_atom("g", "1", "l", "t2"), l1,
            _local(("l",), q.ID2 - q.PI0), Not(Atom(ket_atom("0", "l", "t2"))), "t2",
        ),
        BridgeRule("c.own.ok", "c", ind_atom("c", "ok", "ra", "t3"), ok_ra, pi_ok_ra, ok_c, "t3"),
        BridgeRule("c.own.fail", "c", ind_atom("c", "fail", "ra", "t3"), fail_ra, pi_fail_ra, M("c", "fail"), "t3"),
        BridgeRule(
            "c.A1", "c", ind_atom("c", "init", "ralg", "0"), init, no_ok0, a1_target, "t3", GLOBAL_UNITARIES
        ),
        BridgeRule(
            "c.FR", "c", ind_atom("c", "init", "ralg", "0"), init, not_fr, Not(PHI_FR), "t4",
            GLOBAL_UNITARIES, sequential=True,
        ),
        BridgeRule("d.own.ok", "d", ind_atom("d", "ok", "lg", "t4"), ok_lg, pi_ok_lg, ok_d, "t4"),
        BridgeRule(
            "d.own.ok.not_fail", "d", ind_atom("d", "ok", "lg", "t4"), ok_lg, not_fail_lg, Not(M("d", "fail")), "t4"
        ),
        BridgeRule("d.own.fail", "d", ind_atom("d", "fail", "lg", "t4"), fail_lg, pi_fail_lg, M("d", "fail"), "t4"),
        BridgeRule(
            "d.own.fail.not_ok", "d", ind_atom("d", "fail", "lg", "t4"), fail_lg, not_ok_lg, Not(ok_d), "t4"
        ),
        BridgeRule(
            "d.nested.A1", "d", ind2_atom("d", "c", "init", "ralg", "0"), init, no_ok0, a1_target, "t3",
            GLOBAL_UNITARIES, inner="c",
        ),
        BridgeRule(
            "d.nested.c_ok", "d", ind2_atom("d", "c", "ok", "ra", "5"), ok_ra, pi_ok_ra, ok_c, "t3", inner="c"
        ),
        BridgeRule(
            "d.FR", "d", ind_atom("d", "init", "ralg", "0"), init, not_fr, Not(PHI_FR), "t4",
            GLOBAL_UNITARIES, sequential=True,
        ),
    )


def rule_map() -> dict[str, BridgeRule]:
    return {r.name: r for r in protocol_rules()}


def select(names: Iterable[str]) -> tuple[BridgeRule, ...]:
    table = rule_map()
    return tuple(table[n] for n in names)


@dataclass(frozen=True)
class StarConstraints:
    forbidden: Mapping[str, Mapping[tuple[str, str], str]]
    witnesses: tuple[Witness, ...]
    validities: tuple[tuple[str, Formula], ...]
    expectations: Mapping[str, float] = field(default_factory=dict)

    def forbidden_pairs(self, agent: str) -> frozenset[tuple[str, str]]:
        return frozenset(self.forbidden.get(agent, {}))


def _negate(f: Formula) -> Formula:
    return f.sub if isinstance(f, Not) else Not(f)


def star_constraints(
    skeleton: KripkeModel, rules: Iterable[BridgeRule], eps: float = q.EPS
) -> StarConstraints:
    """Compile rules into forbidden pairs, witness requirements and validities."""
    forbidden: dict[str, dict[tuple[str, str], str]] = {}
    witnesses = []
    validities = []
    values = {}
    cache: dict = {}
    for rule in rules:
        values[rule.name] = rule.expectation(eps)
        kind = rule.kind(eps)
        sources = extension(skeleton, Atom(rule.indicator), cache)
        if rule.inner is not None:
            validities.append((rule.name, rule.formula()))
            continue
        if kind == WITNESS:
            order = [w for w in skeleton.worlds if w in sources]
            witnesses.append(
                Witness(rule.agent, _negate(rule.target), tuple(order), f"{rule.name} <{rule.agent}>{to_text(_negate(rule.target))}")
            )
            continue
        good = extension(skeleton, rule.target, cache)
        pairs = forbidden.setdefault(rule.agent, {})
        for u in skeleton.worlds:
            if u not in sources:
                continue
            for v in skeleton.worlds:
                if v not in good:
                    pairs.setdefault((u, v), f"{rule.name} forbids {rule.agent}:({u},{v})")
    return StarConstraints(forbidden, tuple(witnesses), tuple(validities), values)
