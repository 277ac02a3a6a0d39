"""Kripke frames and models, satisfaction, frame properties, axiom schemata."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .formula import (
    And,
    Atom,
    Box,
    Diamond,
    Equiv,
    Formula,
    Implies,
    Not,
    Or,
    subformulas,
    to_text,
)


class UnknownAtomError(LookupError):
    pass


class UnknownAgentError(LookupError):
    pass


class ModelError(ValueError):
    pass


Pair = tuple[str, str]


@dataclass(frozen=True)
class KripkeFrame:
    worlds: tuple[str, ...]
    relations: Mapping[str, frozenset[Pair]]

    def __post_init__(self):
        worlds = tuple(self.worlds)
        if len(set(worlds)) != len(worlds):
            raise ModelError("duplicate world names")
        known = set(worlds)
        relations = {}
        for agent, pairs in self.relations.items():
            pairs = frozenset((str(u), str(v)) for u, v in pairs)
            bad = [p for p in pairs if p[0] not in known or p[1] not in known]
            if bad:
                raise ModelError(f"relation of {agent} mentions unknown worlds: {sorted(bad)[:3]}")
            relations[agent] = pairs
        object.__setattr__(self, "worlds", worlds)
        object.__setattr__(self, "relations", relations)

    @property
    def agents(self) -> tuple[str, ...]:
        return tuple(self.relations)

    def relation(self, agent: str) -> frozenset[Pair]:
        try:
            return self.relations[agent]
        except KeyError:
            raise UnknownAgentError(agent) from None

    def successors(self, agent: str, world: str) -> tuple[str, ...]:
        rel = self.relation(agent)
        return tuple(v for v in self.worlds if (world, v) in rel)

    def complement(self, agent: str) -> frozenset[Pair]:
        rel = self.relation(agent)
        return frozenset(p for p in itertools.product(self.worlds, repeat=2) if p not in rel)


@dataclass(frozen=True)
class KripkeModel:
    frame: KripkeFrame
    valuation: Mapping[str, frozenset[str]]
    point: str | None = None
    _succ: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        known = set(self.frame.worlds)
        valuation = {}
        for atom, ws in self.valuation.items():
            ws = frozenset(ws)
            if not ws <= known:
                raise ModelError(f"valuation of {atom} mentions unknown worlds {sorted(ws - known)}")
            valuation[atom] = ws
        if self.point is not None and self.point not in known:
            raise ModelError(f"point {self.point} is not a world")
        object.__setattr__(self, "valuation", valuation)
        succ = {
            agent: {w: self.frame.successors(agent, w) for w in self.frame.worlds}
            for agent in self.frame.agents
        }
        object.__setattr__(self, "_succ", succ)

    @property
    def worlds(self) -> tuple[str, ...]:
        return self.frame.worlds

    @property
    def agents(self) -> tuple[str, ...]:
        return self.frame.agents

    def successors(self, agent: str, world: str) -> tuple[str, ...]:
        try:
            return self._succ[agent][world]
        except KeyError:
            if agent not in self._succ:
                raise UnknownAgentError(agent) from None
            raise ModelError(f"unknown world {world}") from None

    def with_point(self, point: str | None) -> "KripkeModel":
        return KripkeModel(self.frame, self.valuation, point)

    def with_relations(self, relations: Mapping[str, Iterable[Pair]]) -> "KripkeModel":
        return KripkeModel(KripkeFrame(self.worlds, relations), self.valuation, self.point)


def model(
    worlds: Sequence[str],
    relations: Mapping[str, Iterable[Pair]],
    valuation: Mapping[str, Iterable[str]],
    point: str | None = None,
) -> KripkeModel:
    return KripkeModel(
        KripkeFrame(tuple(worlds), {a: frozenset(r) for a, r in relations.items()}),
        {p: frozenset(ws) for p, ws in valuation.items()},
        point,
    )


# satisfaction ------------------------------------------------------------------------


def extension(m: KripkeModel, f: Formula, _cache: dict | None = None) -> frozenset[str]:
    """The set of worlds of ``m`` at which ``f`` holds."""
    cache = {} if _cache is None else _cache
    for g in subformulas(f):
        if g in cache:
            continue
        cache[g] = _extension_step(m, g, cache)
    return cache[f]


def _extension_step(m: KripkeModel, g: Formula, cache: dict) -> frozenset[str]:
    everything = frozenset(m.worlds)
    if isinstance(g, Atom):
        try:
            return m.valuation[g.name]
        except KeyError:
            raise UnknownAtomError(g.name) from None
    if isinstance(g, Not):
        return everything - cache[g.sub]
    if isinstance(g, And):
        return cache[g.left] & cache[g.right]
    if isinstance(g, Or):
        return cache[g.left] | cache[g.right]
    if isinstance(g, Implies):
        return (everything - cache[g.left]) | cache[g.right]
    if isinstance(g, Equiv):
        left, right = cache[g.left], cache[g.right]
        return (left & right) | (everything - left - right)
    if isinstance(g, Box):
        inner = cache[g.sub]
        return frozenset(w for w in m.worlds if all(v in inner for v in m.successors(g.agent, w)))
    if isinstance(g, Diamond):
        inner = cache[g.sub]
        return frozenset(w for w in m.worlds if any(v in inner for v in m.successors(g.agent, w)))
    raise TypeError(f"not a formula: {g!r}")


def satisfies(m: KripkeModel, world: str, f: Formula) -> bool:
    if world not in m.worlds:
        raise ModelError(f"unknown world {world}")
    return world in extension(m, f)


def valid_in_model(m: KripkeModel, f: Formula) -> bool:
    return extension(m, f) == frozenset(m.worlds)


def falsifying_worlds(m: KripkeModel, f: Formula) -> tuple[str, ...]:
    ext = extension(m, f)
    return tuple(w for w in m.worlds if w not in ext)


# frame properties ----------------------------------------------------------------------


class FrameProperty(enum.Enum):
    REFLEXIVE = "reflexive"
    SERIAL = "serial"
    TRANSITIVE = "transitive"
    SYMMETRIC = "symmetric"
    EUCLIDEAN = "euclidean"


@dataclass(frozen=True)
class PropertyCheck:
    holds: bool
    agent: str | None = None
    violation: tuple[str, ...] | None = None

    def __bool__(self) -> bool:
        return self.holds


def _violation(frame: KripkeFrame, prop: FrameProperty, agent: str) -> tuple[str, ...] | None:
    rel = frame.relation(agent)
    ws = frame.worlds
    if prop is FrameProperty.REFLEXIVE:
        return next(((w,) for w in ws if (w, w) not in rel), None)
    if prop is FrameProperty.SERIAL:
        return next(((w,) for w in ws if not any((w, v) in rel for v in ws)), None)
    if prop is FrameProperty.SYMMETRIC:
        return next(((u, v) for u, v in sorted(rel) if (v, u) not in rel), None)
    if prop is FrameProperty.TRANSITIVE:
        for u, v in sorted(rel):
            for x in ws:
                if (v, x) in rel and (u, x) not in rel:
                    return (u, v, x)
        return None
    if prop is FrameProperty.EUCLIDEAN:
        for u, v in sorted(rel):
            for x in ws:
                if (u, x) in rel and (v, x) not in rel:
                    return (u, v, x)
        return None
    raise ValueError(prop)


def check_frame_property(
    frame: KripkeFrame | KripkeModel, prop: FrameProperty | str, agent: str | None = None
) -> PropertyCheck:
    """Exhaustive check; on failure the result carries a violating tuple.

    Violations are ``(w,)`` for reflexivity/seriality, ``(u, v)`` for a
    pair lacking its mirror, and ``(u, v, x)`` for transitivity
    (uRv, vRx, not uRx) and Euclideanness (uRv, uRx, not vRx).
    """
    if isinstance(frame, KripkeModel):
        frame = frame.frame
    prop = FrameProperty(prop)
    for a in ([agent] if agent is not None else frame.agents):
        bad = _violation(frame, prop, a)
        if bad is not None:
            return PropertyCheck(False, a, bad)
    return PropertyCheck(True)


# axiom schemata ------------------------------------------------------------------------


class AxiomSchema(enum.Enum):
    K = "K"
    T = "T"
    D = "D"
    FOUR = "4"
    FIVE = "5"

    @property
    def arity(self) -> int:
        return 2 if self is AxiomSchema.K else 1

    def instantiate(self, agent: str, phi: Formula, psi: Formula | None = None) -> Formula:
        box = lambda f: Box(agent, f)  # noqa: E731
        if self is AxiomSchema.K:
            if psi is None:
                raise ValueError("K needs two formulas")
            return Implies(box(Implies(phi, psi)), Implies(box(phi), box(psi)))
        if self is AxiomSchema.T:
            return Implies(box(phi), phi)
        if self is AxiomSchema.D:
            return Implies(box(phi), Diamond(agent, phi))
        if self is AxiomSchema.FOUR:
            return Implies(box(phi), box(box(phi)))
        return Implies(Not(box(phi)), box(Not(box(phi))))


SYSTEMS = {
    "K": (AxiomSchema.K,),
    "T": (AxiomSchema.K, AxiomSchema.T),
    "KD45": (AxiomSchema.K, AxiomSchema.D, AxiomSchema.FOUR, AxiomSchema.FIVE),
    "S5": (AxiomSchema.K, AxiomSchema.T, AxiomSchema.FOUR, AxiomSchema.FIVE),
}

# frame condition each schema corresponds to
CORRESPONDENCE = {
    AxiomSchema.T: FrameProperty.REFLEXIVE,
    AxiomSchema.D: FrameProperty.SERIAL,
    AxiomSchema.FOUR: FrameProperty.TRANSITIVE,
    AxiomSchema.FIVE: FrameProperty.EUCLIDEAN,
}


def schema_instances(
    schema: AxiomSchema, agents: Iterable[str], probes: Sequence[Formula]
) -> Iterable[tuple[str, Formula]]:
    for agent in agents:
        if schema.arity == 2:
            for phi, psi in itertools.product(probes, repeat=2):
                yield agent, schema.instantiate(agent, phi, psi)
        else:
            for phi in probes:
                yield agent, schema.instantiate(agent, phi)


@dataclass(frozen=True)
class AxiomFailure:
    agent: str
    instance: str
    worlds: tuple[str, ...]


@dataclass(frozen=True)
class AxiomReport:
    schema: AxiomSchema
    checked: int
    failures: tuple[AxiomFailure, ...]

    @property
    def valid(self) -> bool:
        return not self.failures


def axiom_validity(
    m: KripkeModel, schema: AxiomSchema | str, probes: Sequence[Formula]
) -> AxiomReport:
    """Instantiate ``schema`` over the probes for every agent and check validity."""
    if not probes:
        raise ValueError("axiom_validity needs at least one probe formula")
    schema = AxiomSchema(schema)
    cache: dict = {}
    failures = []
    checked = 0
    for agent, inst in schema_instances(schema, m.agents, probes):
        checked += 1
        ext = extension(m, inst, cache)
        if len(ext) != len(m.worlds):
            bad = tuple(w for w in m.worlds if w not in ext)
            failures.append(AxiomFailure(agent, to_text(inst), bad))
    return AxiomReport(schema, checked, tuple(failures))
