"""Worlds, atoms and protocol formulas of the four-agent Wigner's-friend run.

A world is fixed by the four recorded outcomes (Amanda's at t1, Gabe's at
t2, Chris's at t3, David's at t4). Every other atom (state assignments,
indicator states of agents' memories) is computed from that tuple by
forward-chaining the protocol formulas, so the valuation is a pure
function of the outcomes.

Times are symbolic and ordered ``0 < t1 < t' < t2 < t3 < t4 < 5``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from ..logic.formula import Atom, Equiv, Formula, Implies, Not, Or, conj
from ..logic.kripke import KripkeModel, model, valid_in_model

TIMES = ("0", "t1", "t'", "t2", "t3", "t4", "5")
AGENTS = ("a", "c", "d", "g")

# agent -> (measurement time, possible values)
MEASUREMENTS = {
    "a": ("t1", ("0", "1")),
    "g": ("t2", ("0", "1")),
    "c": ("t3", ("ok", "fail")),
    "d": ("t4", ("ok", "fail")),
}

# unitaries each agent may use to evolve projectors; Amanda only has her
# local coupling since the global ones act on her own memory
PERMITTED_UNITARIES = {
    "a": frozenset({"U_a"}),
    "c": frozenset({"U_t1", "U_tprime", "U_t2"}),
    "d": frozenset({"U_t1", "U_tprime", "U_t2"}),
    "g": frozenset({"U_t1", "U_tprime", "U_t2"}),
}


def m_atom(agent: str, value: str) -> str:
    time, _ = MEASUREMENTS[agent]
    return f"M[{agent},{time}]={value}"


def ket_atom(state: str, system: str, time: str) -> str:
    return f"ket[{state};{system};{time}]"


def ind_atom(agent: str, state: str, system: str, time: str) -> str:
    return f"ind[{agent};{state};{system};{time}]"


def ind2_atom(agent: str, inner: str, state: str, system: str, time: str) -> str:
    return f"ind2[{agent};{inner};{state};{system};{time}]"


def M(agent: str, value: str) -> Atom:
    return Atom(m_atom(agent, value))


UPSILON = "upsilon"
PLUS_ZERO = ket_atom("+,0", "lg", "t'")
INIT_ALL = ket_atom("init", "ralg", "0")
EIGENLINK = ind_atom("a", "+,0", "lg", "t'")


@dataclass(frozen=True, order=True)
class OutcomeWorld:
    a_t1: str
    g_t2: str
    c_t3: str
    d_t4: str

    @property
    def name(self) -> str:
        return f"{self.a_t1}.{self.g_t2}.{self.c_t3}.{self.d_t4}"

    def outcome(self, agent: str) -> str:
        return {"a": self.a_t1, "g": self.g_t2, "c": self.c_t3, "d": self.d_t4}[agent]

    @classmethod
    def parse(cls, name: str) -> "OutcomeWorld":
        parts = name.split(".")
        w = cls(*parts) if len(parts) == 4 else None
        if w is None or w not in ALL_WORLDS:
            raise ValueError(f"not an outcome world: {name!r}")
        return w


ALL_WORLDS = tuple(
    OutcomeWorld(*t) for t in itertools.product(("0", "1"), ("0", "1"), ("ok", "fail"), ("ok", "fail"))
)
HAT = OutcomeWorld("1", "1", "ok", "ok")
PHI_FR = conj([M("a", "1"), M("g", "1"), M("c", "ok"), M("d", "ok")])


# always-true conjuncts of the initial-state formula
_PHI0_ATOMS = (
    ket_atom("init", "r", "0"),
    ket_atom("0", "a", "0"),
    ket_atom("0", "l", "0"),
    ket_atom("0", "l", "t1"),
    ket_atom("0", "g", "0"),
    ket_atom("0", "g", "t1"),
    ket_atom("0", "g", "t'"),
)
# Chris and David know the initial global state; David also knows that Chris knows it
_KNOWN_EVERYWHERE = (
    ind_atom("c", "init", "ralg", "0"),
    ind_atom("d", "init", "ralg", "0"),
    ind2_atom("d", "c", "init", "ralg", "0"),
    INIT_ALL,
    UPSILON,
)


def atoms_at(w: OutcomeWorld) -> frozenset[str]:
    """All atoms true at ``w``: outcomes plus whatever the protocol formulas force."""
    out = set(_PHI0_ATOMS) | set(_KNOWN_EVERYWHERE)
    for agent in AGENTS:
        out.add(m_atom(agent, w.outcome(agent)))
    a, g, c, d = w.a_t1, w.g_t2, w.c_t3, w.d_t4
    lab = "0" if a == "0" else "+"
    out.add(ind_atom("a", a, "r", "t1"))
    out |= {ket_atom(lab, "l", "t'"), ket_atom(lab, "l", "t2")}
    if a == "1":
        out.add(PLUS_ZERO)
        out.add(EIGENLINK)
    out.add(ind_atom("g", g, "l", "t2"))
    out |= {ind_atom("c", c, "ra", t) for t in ("t3", "t4", "5")}
    out |= {ind_atom("d", d, "lg", t) for t in ("t4", "5")}
    out.add(ind2_atom("d", "c", c, "ra", "5"))
    out.add(ind2_atom("c", "d", d, "lg", "5"))
    return frozenset(out)


@lru_cache(maxsize=None)
def all_atoms() -> tuple[str, ...]:
    return tuple(sorted(set().union(*(atoms_at(w) for w in ALL_WORLDS))))


def _outcome_block(agent: str, consequences: dict[str, list[str]]) -> Formula:
    values = MEASUREMENTS[agent][1]
    parts: list[Formula] = [Or(M(agent, values[0]), M(agent, values[1]))]
    for v in values:
        parts.append(Implies(M(agent, v), conj([Atom(x) for x in consequences[v]])))
    return conj(parts)


def protocol_formulas() -> dict[str, Formula]:
    """phi0..phi5, the tensor conditions, the eigenstate link and upsilon."""
    phi1 = _outcome_block(
        "a",
        {
            "0": [ind_atom("a", "0", "r", "t1"), ket_atom("0", "l", "t'"), ket_atom("0", "l", "t2")],
            "1": [ind_atom("a", "1", "r", "t1"), ket_atom("+", "l", "t'"), ket_atom("+", "l", "t2")],
        },
    )
    phi2 = _outcome_block("g", {v: [ind_atom("g", v, "l", "t2")] for v in ("0", "1")})
    phi3 = _outcome_block("c", {v: [ind_atom("c", v, "ra", t) for t in ("t3", "t4", "5")] for v in ("ok", "fail")})
    phi4 = _outcome_block("d", {v: [ind_atom("d", v, "lg", t) for t in ("t4", "5")] for v in ("ok", "fail")})
    phi5 = conj(
        [Implies(M("c", v), Atom(ind2_atom("d", "c", v, "ra", "5"))) for v in ("ok", "fail")]
        + [Implies(M("d", v), Atom(ind2_atom("c", "d", v, "lg", "5"))) for v in ("ok", "fail")]
    )
    # outcomes are exclusive; the formulas above only state that one occurs
    exclusive = conj([Not(conj([M(x, vs[0]), M(x, vs[1])])) for x, (_, vs) in MEASUREMENTS.items()])
    # state assignments fixed by the outcome are not also held for the other branch
    branch = conj(
        [
            Equiv(Atom(ket_atom("0", "l", "t2")), M("a", "0")),
            Equiv(Atom(ket_atom("+", "l", "t2")), M("a", "1")),
        ]
    )
    tensor_plus = Equiv(Atom(PLUS_ZERO), conj([Atom(ket_atom("+", "l", "t'")), Atom(ket_atom("0", "g", "t'"))]))
    tensor_init = Equiv(
        Atom(INIT_ALL),
        conj([Atom(ket_atom("init", "r", "0"))] + [Atom(ket_atom("0", s, "0")) for s in ("a", "l", "g")]),
    )
    return {
        "phi0": conj([Atom(x) for x in _PHI0_ATOMS]),
        "phi1": phi1,
        "phi2": phi2,
        "phi3": phi3,
        "phi4": phi4,
        "phi5": phi5,
        "exclusive": exclusive,
        "branch": branch,
        "tensor[+,0;lg;t']": tensor_plus,
        "tensor[init;ralg;0]": tensor_init,
        "known_init": conj([Atom(x) for x in _KNOWN_EVERYWHERE[:3]]),
        "eigenlink": Implies(Atom(ket_atom("+", "l", "t'")), Atom(EIGENLINK)),
        "upsilon": Atom(UPSILON),
    }


def valuation() -> dict[str, frozenset[str]]:
    per_world = {w.name: atoms_at(w) for w in ALL_WORLDS}
    return {p: frozenset(n for n, ats in per_world.items() if p in ats) for p in all_atoms()}


def build_worlds() -> KripkeModel:
    """The 16-world skeleton with empty relations; protocol formulas are valid on it."""
    m = model([w.name for w in ALL_WORLDS], {x: () for x in AGENTS}, valuation(), HAT.name)
    bad = [k for k, f in protocol_formulas().items() if not valid_in_model(m, f)]
    if bad:
        raise AssertionError(f"protocol formulas not valid on the skeleton: {bad}")
    return m
