"""Seeded random formulas and models for property-based checks."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .formula import And, Atom, Box, Diamond, Equiv, Formula, Implies, Not, Or
from .kripke import FrameProperty, KripkeModel, model

_BINARY = (And, Or, Implies, Equiv)


def random_formula(
    rng: np.random.Generator, atoms: Sequence[str], agents: Sequence[str], depth: int = 3
) -> Formula:
    """Formula tree of height at most ``depth``; leaves are atoms."""
    if depth <= 0 or rng.random() < 0.25:
        return Atom(atoms[rng.integers(len(atoms))])
    kind = rng.integers(4)
    if kind == 0:
        return Not(random_formula(rng, atoms, agents, depth - 1))
    if kind == 1:
        op = _BINARY[rng.integers(len(_BINARY))]
        return op(random_formula(rng, atoms, agents, depth - 1), random_formula(rng, atoms, agents, depth - 1))
    modal = Box if kind == 2 else Diamond
    return modal(agents[rng.integers(len(agents))], random_formula(rng, atoms, agents, depth - 1))


def random_relation(rng: np.random.Generator, worlds: Sequence[str], density: float = 0.35) -> set[tuple[str, str]]:
    return {(u, v) for u in worlds for v in worlds if rng.random() < density}


def close_relation(rel: set[tuple[str, str]], worlds: Sequence[str], prop: FrameProperty) -> set[tuple[str, str]]:
    """Smallest superset of ``rel`` with the given property (seriality adds self-loops)."""
    rel = set(rel)
    if prop is FrameProperty.REFLEXIVE:
        return rel | {(w, w) for w in worlds}
    if prop is FrameProperty.SERIAL:
        return rel | {(w, w) for w in worlds if not any(u == w for u, _ in rel)}
    if prop is FrameProperty.SYMMETRIC:
        return rel | {(v, u) for u, v in rel}
    changed = True
    while changed:
        changed = False
        for u, v in list(rel):
            for x, y in list(rel):
                if prop is FrameProperty.TRANSITIVE and v == x and (u, y) not in rel:
                    rel.add((u, y))
                    changed = True
                if prop is FrameProperty.EUCLIDEAN and u == x and (v, y) not in rel:
                    rel.add((v, y))
                    changed = True
    return rel


def random_model(
    rng: np.random.Generator,
    agents: Sequence[str] = ("x", "y"),
    atoms: Sequence[str] = ("p", "q"),
    max_worlds: int = 5,
    prop: FrameProperty | None = None,
) -> KripkeModel:
    n = int(rng.integers(1, max_worlds + 1))
    worlds = [f"w{i}" for i in range(n)]
    relations = {}
    for a in agents:
        rel = random_relation(rng, worlds, float(rng.uniform(0.1, 0.6)))
        relations[a] = close_relation(rel, worlds, prop) if prop is not None else rel
    valuation = {p: {w for w in worlds if rng.random() < 0.5} for p in atoms}
    return model(worlds, relations, valuation, worlds[0])
