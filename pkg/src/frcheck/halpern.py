"""Certainty as probability one over finite probability structures.

A box ``[x]phi`` holds at ``w`` under the measure condition when the
agent's distribution gives the phi-worlds weight at least ``1 - eps``;
under the support condition it holds when phi is true at every world of
weight above ``eps``. Plain structures carry one distribution per agent,
generalized ones one per agent and world.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .logic.formula import And, Atom, Box, Diamond, Equiv, Formula, Implies, Not, Or, subformulas, to_text
from .logic.kripke import SYSTEMS, KripkeModel, UnknownAgentError, UnknownAtomError, model, schema_instances
from .quantum import EPS

DAGGER = "dagger"
DAGGER_PRIME = "dagger_prime"


class StructureError(ValueError):
    pass


def _check_distribution(dist: Mapping[str, float], worlds: set[str], where: str, eps: float) -> dict[str, float]:
    unknown = set(dist) - worlds
    if unknown:
        raise StructureError(f"{where}: unknown worlds {sorted(unknown)}")
    if any(w < 0 for w in dist.values()):
        raise StructureError(f"{where}: negative weight")
    total = float(sum(dist.values()))
    if abs(total - 1.0) > eps:
        raise StructureError(f"{where}: weights sum to {total!r}, not 1")
    return {w: float(dist.get(w, 0.0)) for w in sorted(worlds)}


@dataclass(frozen=True)
class ProbabilityStructure:
    """One distribution ``weights[agent][world]`` per agent."""

    worlds: tuple[str, ...]
    valuation: Mapping[str, frozenset[str]]
    weights: Mapping[str, Mapping[str, float]]

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        known = set(self.worlds)
        object.__setattr__(self, "valuation", _check_valuation(self.valuation, known))
        object.__setattr__(
            self,
            "weights",
            {a: _check_distribution(d, known, f"weights of {a}", EPS) for a, d in self.weights.items()},
        )

    @property
    def agents(self) -> tuple[str, ...]:
        return tuple(self.weights)

    def distribution(self, agent: str, world: str | None = None) -> Mapping[str, float]:
        try:
            return self.weights[agent]
        except KeyError:
            raise UnknownAgentError(agent) from None


@dataclass(frozen=True)
class GeneralizedProbabilityStructure:
    """One distribution ``weights[agent][world][world']`` per agent and world."""

    worlds: tuple[str, ...]
    valuation: Mapping[str, frozenset[str]]
    weights: Mapping[str, Mapping[str, Mapping[str, float]]]

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        known = set(self.worlds)
        object.__setattr__(self, "valuation", _check_valuation(self.valuation, known))
        checked = {}
        for a, per_world in self.weights.items():
            if set(per_world) != known:
                raise StructureError(f"weights of {a} must give a distribution for every world")
            checked[a] = {
                w: _check_distribution(per_world[w], known, f"weights of {a} at {w}", EPS) for w in self.worlds
            }
        object.__setattr__(self, "weights", checked)

    @property
    def agents(self) -> tuple[str, ...]:
        return tuple(self.weights)

    def distribution(self, agent: str, world: str | None = None) -> Mapping[str, float]:
        if world is None:
            raise ValueError("a generalized structure needs the evaluation world")
        try:
            return self.weights[agent][world]
        except KeyError:
            raise UnknownAgentError(agent) from None


Structure = ProbabilityStructure | GeneralizedProbabilityStructure


def _check_valuation(valuation, known: set[str]) -> dict[str, frozenset[str]]:
    out = {}
    for p, ws in valuation.items():
        ws = frozenset(ws)
        if not ws <= known:
            raise StructureError(f"valuation of {p} mentions unknown worlds")
        out[p] = ws
    return out


def support(dist: Mapping[str, float], eps: float = EPS) -> frozenset[str]:
    return frozenset(w for w, p in dist.items() if p > eps)


# evaluation -----------------------------------------------------------------------------


def _box_holds(s: Structure, agent: str, world: str, inner: frozenset[str], semantics: str, eps: float) -> bool:
    dist = s.distribution(agent, world)
    if semantics == DAGGER:
        return sum(p for w, p in dist.items() if w in inner) >= 1 - eps
    return support(dist, eps) <= inner


def extension(s: Structure, f: Formula, semantics: str = DAGGER, eps: float = EPS, _cache=None) -> frozenset[str]:
    if semantics not in (DAGGER, DAGGER_PRIME):
        raise ValueError(f"unknown semantics {semantics!r}")
    cache = {} if _cache is None else _cache
    everything = frozenset(s.worlds)
    for g in subformulas(f):
        if g in cache:
            continue
        if isinstance(g, Atom):
            if g.name not in s.valuation:
                raise UnknownAtomError(g.name)
            out = s.valuation[g.name]
        elif isinstance(g, Not):
            out = everything - cache[g.sub]
        elif isinstance(g, And):
            out = cache[g.left] & cache[g.right]
        elif isinstance(g, Or):
            out = cache[g.left] | cache[g.right]
        elif isinstance(g, Implies):
            out = (everything - cache[g.left]) | cache[g.right]
        elif isinstance(g, Equiv):
            l, r = cache[g.left], cache[g.right]
            out = (l & r) | (everything - l - r)
        elif isinstance(g, Box):
            out = frozenset(w for w in s.worlds if _box_holds(s, g.agent, w, cache[g.sub], semantics, eps))
        elif isinstance(g, Diamond):
            neg = everything - cache[g.sub]
            out = frozenset(w for w in s.worlds if not _box_holds(s, g.agent, w, neg, semantics, eps))
        else:
            raise TypeError(f"not a formula: {g!r}")
        cache[g] = out
    return cache[f]


def holds(s: Structure, world: str, f: Formula, semantics: str = DAGGER, eps: float = EPS) -> bool:
    if world not in s.worlds:
        raise StructureError(f"unknown world {world}")
    return world in extension(s, f, semantics, eps)


def certain(s: Structure, agent: str, f: Formula, world: str | None = None, eps: float = EPS) -> bool:
    """Measure condition: the agent gives the f-worlds probability one."""
    inner = extension(s, f, DAGGER, eps)
    return _box_holds(s, agent, world, inner, DAGGER, eps)


def certain_prime(s: Structure, agent: str, f: Formula, world: str | None = None, eps: float = EPS) -> bool:
    """Support condition: f holds at every world the agent gives positive weight."""
    inner = extension(s, f, DAGGER_PRIME, eps)
    return _box_holds(s, agent, world, inner, DAGGER_PRIME, eps)


@dataclass(frozen=True)
class FalseBeliefSet:
    agent: str
    worlds: frozenset[str]
    measure: float


def false_beliefs(
    s: Structure, agent: str, probes: Sequence[Formula], world: str | None = None, eps: float = EPS
) -> FalseBeliefSet:
    """Worlds where the agent is certain of some probe that is false there.

    ``measure`` is taken under the agent's distribution (at ``world`` for
    generalized structures).
    """
    cache: dict = {}
    bad: set[str] = set()
    for phi in probes:
        believed = extension(s, Box(agent, phi), DAGGER, eps, cache)
        bad |= believed - extension(s, phi, DAGGER, eps, cache)
    dist = s.distribution(agent, world)
    return FalseBeliefSet(agent, frozenset(bad), float(sum(dist[w] for w in bad)))


def induced_kripke(s: Structure, eps: float = EPS) -> KripkeModel:
    """Accessibility is the support: w R_x w' iff p_x^w(w') > eps."""
    relations = {
        a: {(w, v) for w in s.worlds for v in support(s.distribution(a, w), eps)} for a in s.agents
    }
    return model(s.worlds, relations, s.valuation)


# soundness spot checks ------------------------------------------------------------------


@dataclass(frozen=True)
class SoundnessFailure:
    structure: int
    agent: str
    instance: str
    worlds: tuple[str, ...]


@dataclass(frozen=True)
class SoundnessReport:
    system: str
    structures: int
    instances: int
    failures: tuple[SoundnessFailure, ...]

    @property
    def sound(self) -> bool:
        return not self.failures


def soundness_probe(
    system: str, samples: Sequence[Structure], probes: Sequence[Formula], eps: float = EPS
) -> SoundnessReport:
    """Evaluate every schema instance of ``system`` under the measure condition."""
    if system not in SYSTEMS:
        raise ValueError(f"unknown system {system!r}; expected one of {sorted(SYSTEMS)}")
    if not probes:
        raise ValueError("soundness_probe needs probe formulas")
    failures = []
    checked = 0
    for k, s in enumerate(samples):
        cache: dict = {}
        for schema in SYSTEMS[system]:
            for agent, inst in schema_instances(schema, s.agents, probes):
                checked += 1
                ext = extension(s, inst, DAGGER, eps, cache)
                if len(ext) != len(s.worlds):
                    bad = tuple(w for w in s.worlds if w not in ext)
                    failures.append(SoundnessFailure(k, agent, to_text(inst), bad))
    return SoundnessReport(system, len(samples), checked, tuple(failures))


# random structures ----------------------------------------------------------------------


def _random_distribution(rng: np.random.Generator, n: int, full_support: bool) -> np.ndarray:
    if full_support:
        mask = np.ones(n, dtype=bool)
    else:
        mask = rng.random(n) < 0.5
        if not mask.any():
            mask[rng.integers(n)] = True
    raw = np.where(mask, rng.uniform(0.05, 1.0, n), 0.0)
    return raw / raw.sum()


def random_structure(
    rng: np.random.Generator,
    agents: Sequence[str] = ("x", "y"),
    atoms: Sequence[str] = ("p", "q"),
    max_worlds: int = 6,
    full_support: bool = False,
    generalized: bool = False,
) -> Structure:
    """Random finite structure; positive weights stay well above ``EPS``.

    ``full_support=True`` samples the class where every world gets positive
    weight; otherwise roughly half the worlds get weight exactly zero.
    """
    n = int(rng.integers(1, max_worlds + 1))
    worlds = [f"w{i}" for i in range(n)]
    valuation = {p: {w for w in worlds if rng.random() < 0.5} for p in atoms}
    if generalized:
        weights = {
            a: {w: dict(zip(worlds, _random_distribution(rng, n, full_support).tolist())) for w in worlds}
            for a in agents
        }
        return GeneralizedProbabilityStructure(tuple(worlds), valuation, weights)
    weights = {a: dict(zip(worlds, _random_distribution(rng, n, full_support).tolist())) for a in agents}
    return ProbabilityStructure(tuple(worlds), valuation, weights)


def t_counterexample() -> tuple[ProbabilityStructure, Formula]:
    """Two worlds, the agent's weight all on w1, p true only at w1.

    [x]p holds everywhere but p fails at w0, so the T-instance breaks.
    """
    s = ProbabilityStructure(("w0", "w1"), {"p": {"w1"}}, {"x": {"w0": 0.0, "w1": 1.0}})
    return s, Implies(Box("x", Atom("p")), Atom("p"))

