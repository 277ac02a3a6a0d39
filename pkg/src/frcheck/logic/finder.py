"""Bounded model finding over constrained Kripke frames.

Problems are compiled to labelled clauses over relation bits, valuation
bits and (optionally) world-membership bits, then searched with a
chronological DPLL that logs each refuted branch together with the
constraint labels in its implication cone. A found model is rebuilt as a
:class:`KripkeModel` and re-checked with the plain evaluator before it
is returned.

Two modes:

* generic: worlds ``w0..w{n-1}`` for n up to ``world_count_max``
  (at most :data:`GENERIC_BOUND`), valuation searched, point ``w0``;
* fixed: the caller supplies worlds, valuation and point. With
  ``carrier="subset"`` the model may drop worlds other than the point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .formula import And, Atom, Box, Diamond, Equiv, Formula, Implies, Not, Or, atoms, to_text
from .kripke import (
    FrameProperty,
    KripkeModel,
    check_frame_property,
    extension,
    model,
    satisfies,
    valid_in_model,
)

GENERIC_BOUND = 6
FIXED_BOUND = 64

Pair = tuple[str, str]


class BoundExceededError(ValueError):
    pass


class SelfAuditError(RuntimeError):
    """A model produced by the search failed independent re-evaluation."""


@dataclass(frozen=True)
class Witness:
    """Every source world must reach some ``agent``-successor satisfying ``target``."""

    agent: str
    target: Formula
    sources: tuple[str, ...] | None = None
    label: str = ""


@dataclass(frozen=True)
class ModelSpec:
    agents: tuple[str, ...]
    frame_properties: Mapping[str, frozenset[FrameProperty]] = field(default_factory=dict)
    valid: tuple[Formula, ...] = ()
    at_point: tuple[Formula, ...] = ()
    forbidden: Mapping[str, Mapping[Pair, str]] = field(default_factory=dict)
    witnesses: tuple[Witness, ...] = ()
    world_count_max: int = 3
    world_count_min: int = 1
    worlds: tuple[str, ...] | None = None
    valuation: Mapping[str, frozenset[str]] | None = None
    point: str | None = None
    carrier: str = "fixed"

    @property
    def fixed(self) -> bool:
        return self.worlds is not None


def frame_class(agents: Iterable[str], *props: FrameProperty | str) -> dict[str, frozenset[FrameProperty]]:
    props = frozenset(FrameProperty(p) for p in props)
    return {a: props for a in agents}


@dataclass(frozen=True)
class Conflict:
    path: tuple[str, ...]
    clause: str
    reasons: tuple[str, ...]


@dataclass(frozen=True)
class Refutation:
    world_count: int
    decisions: int
    conflicts: tuple[Conflict, ...]

    def is_complete(self) -> bool:
        return refutation_tree_complete([c.path for c in self.conflicts])


@dataclass(frozen=True)
class UnsatCertificate:
    bound: int
    refutations: tuple[Refutation, ...]

    def is_complete(self) -> bool:
        return all(r.is_complete() for r in self.refutations)

    def root_reasons(self) -> tuple[str, ...]:
        """Constraint labels behind refutations that needed no branching."""
        out: list[str] = []
        for r in self.refutations:
            for c in r.conflicts:
                if not c.path:
                    out.extend(x for x in c.reasons if x not in out)
        return tuple(out)


@dataclass(frozen=True)
class SearchResult:
    sat: bool
    model: KripkeModel | None = None
    point: str | None = None
    certificate: UnsatCertificate | None = None

    @property
    def verdict(self) -> str:
        return "SAT" if self.sat else "UNSAT"


def refutation_tree_complete(paths: Sequence[tuple[str, ...]]) -> bool:
    """Do the conflict leaves cover every branch of the decision tree?

    A decision literal is ``"name=0"`` or ``"name=1"``; a prefix is covered
    when it is itself a leaf or both values of one variable are covered.
    """
    leaves = set(paths)

    def flip(lit: str) -> str:
        name, value = lit.rsplit("=", 1)
        return f"{name}={'1' if value == '0' else '0'}"

    extensions: dict[tuple[str, ...], set[str]] = {}
    for p in leaves:
        for k in range(len(p)):
            extensions.setdefault(p[:k], set()).add(p[k])

    def covered(prefix: tuple[str, ...]) -> bool:
        if prefix in leaves:
            return True
        for lit in extensions.get(prefix, ()):
            if lit.endswith("=0") and flip(lit) in extensions[prefix]:
                if covered(prefix + (lit,)) and covered(prefix + (flip(lit),)):
                    return True
        return False

    return covered(())


# clause database and DPLL ---------------------------------------------------------------

DEF = "def"


class _Cnf:
    def __init__(self):
        self.names: list[object] = [None]
        self.clauses: list[list[int]] = []
        self.labels: list[str] = []
        self.true = self.var(("TRUE",))
        self.add([self.true], "constant")

    def var(self, name) -> int:
        self.names.append(name)
        return len(self.names) - 1

    def add(self, lits: Iterable[int], label: str) -> None:
        lits = list(dict.fromkeys(lits))
        if any(-l in lits for l in lits) or self.true in lits:
            return
        lits = [l for l in lits if l != -self.true]
        self.clauses.append(lits)
        self.labels.append(label)


class _Dpll:
    def __init__(self, cnf: _Cnf, describe):
        self.cnf = cnf
        self.describe = describe
        n = len(cnf.names)
        self.value = [0] * n
        self.reason: list[int | None] = [None] * n
        self.trail: list[int] = []
        self.qhead = 0
        self.watches: dict[int, list[int]] = {}
        self.units: list[int] = []
        self.empty: int | None = None
        for ci, clause in enumerate(cnf.clauses):
            if not clause:
                self.empty = ci
            elif len(clause) == 1:
                self.units.append(ci)
            else:
                self.watches.setdefault(clause[0], []).append(ci)
                self.watches.setdefault(clause[1], []).append(ci)
        self.conflicts: list[Conflict] = []
        self.decisions = 0

    def lit_value(self, lit: int) -> int:
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def assign(self, lit: int, reason: int | None) -> None:
        self.value[abs(lit)] = 1 if lit > 0 else -1
        self.reason[abs(lit)] = reason
        self.trail.append(lit)

    def propagate(self) -> int | None:
        clauses = self.cnf.clauses
        while self.qhead < len(self.trail):
            false_lit = -self.trail[self.qhead]
            self.qhead += 1
            watching = self.watches.get(false_lit, [])
            keep: list[int] = []
            for idx, ci in enumerate(watching):
                clause = clauses[ci]
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                if self.lit_value(clause[0]) == 1:
                    keep.append(ci)
                    continue
                for k in range(2, len(clause)):
                    if self.lit_value(clause[k]) != -1:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches.setdefault(clause[1], []).append(ci)
                        break
                else:
                    keep.append(ci)
                    if self.lit_value(clause[0]) == -1:
                        keep.extend(watching[idx + 1 :])
                        self.watches[false_lit] = keep
                        return ci
                    self.assign(clause[0], ci)
            self.watches[false_lit] = keep
        return None

    def cone(self, ci: int) -> tuple[str, ...]:
        labels: dict[str, None] = {}
        seen: set[int] = set()
        stack = [ci]
        while stack:
            c = stack.pop()
            label = self.cnf.labels[c]
            if not label.startswith(DEF) and label != "constant":
                labels[label] = None
            for lit in self.cnf.clauses[c]:
                v = abs(lit)
                if v not in seen and self.reason[v] is not None:
                    seen.add(v)
                    stack.append(self.reason[v])
        return tuple(labels)

    def record(self, path: list[int], ci: int) -> None:
        self.conflicts.append(
            Conflict(
                tuple(self.describe(l) for l in path),
                self.cnf.labels[ci],
                self.cone(ci),
            )
        )

    def undo(self, size: int) -> None:
        while len(self.trail) > size:
            lit = self.trail.pop()
            self.value[abs(lit)] = 0
            self.reason[abs(lit)] = None
        self.qhead = min(self.qhead, size)

    def solve(self, order: Sequence[int]) -> list[int] | None:
        if self.empty is not None:
            self.record([], self.empty)
            return None
        for ci in self.units:
            lit = self.cnf.clauses[ci][0]
            if self.lit_value(lit) == -1:
                self.record([], ci)
                return None
            if self.lit_value(lit) == 0:
                self.assign(lit, ci)
        stack: list[list] = []  # [decision literal, trail size before it, flipped]
        cursor = 0
        while True:
            conflict = self.propagate()
            if conflict is not None:
                self.record([s[0] for s in stack], conflict)
                while stack and stack[-1][2]:
                    stack.pop()
                if not stack:
                    return None
                top = stack[-1]
                self.undo(top[1])
                top[0], top[2] = -top[0], True
                self.assign(top[0], None)
                cursor = 0
                continue
            while cursor < len(order) and self.value[order[cursor]] != 0:
                cursor += 1
            if cursor == len(order):
                return [v for v in range(1, len(self.value)) if self.value[v] == 1]
            self.decisions += 1
            lit = -order[cursor]
            stack.append([lit, len(self.trail), False])
            self.assign(lit, None)


# encoding -----------------------------------------------------------------------------


class _Encoder:
    def __init__(self, spec: ModelSpec, worlds: Sequence[str], point: str):
        self.spec = spec
        self.worlds = list(worlds)
        self.index = {w: i for i, w in enumerate(self.worlds)}
        self.point = point
        self.cnf = _Cnf()
        self.subset = spec.fixed and spec.carrier == "subset"
        n = len(self.worlds)
        self.E = [self.cnf.var(("E", w)) for w in self.worlds] if self.subset else None
        self.R = {
            a: [[self.cnf.var(("R", a, u, v)) for v in self.worlds] for u in self.worlds]
            for a in spec.agents
        }
        self.V: dict[str, list[int]] = {}
        if not spec.fixed:
            names = set()
            for f in self._all_formulas():
                names |= atoms(f)
            for p in sorted(names):
                self.V[p] = [self.cnf.var(("V", p, w)) for w in self.worlds]
        self.decision_vars = list(range(2, len(self.cnf.names)))
        self.memo: dict[tuple[Formula, int], int] = {}
        self.n = n

    def _all_formulas(self) -> list[Formula]:
        return list(self.spec.valid) + list(self.spec.at_point) + [w.target for w in self.spec.witnesses]

    def member(self, i: int) -> int:
        return self.E[i] if self.subset else self.cnf.true

    def describe(self, lit: int) -> str:
        name = self.cnf.names[abs(lit)]
        bit = "1" if lit > 0 else "0"
        if name[0] == "R":
            return f"R[{name[1]}]({name[2]},{name[3]})={bit}"
        if name[0] == "E":
            return f"E({name[1]})={bit}"
        if name[0] == "V":
            return f"V[{name[1]}]({name[2]})={bit}"
        return f"aux{abs(lit)}={bit}"

    # formula literals with constant folding
    def lit(self, f: Formula, i: int) -> int:
        key = (f, i)
        if key in self.memo:
            return self.memo[key]
        out = self._lit(f, i)
        self.memo[key] = out
        return out

    def _fresh(self) -> int:
        return self.cnf.var(("aux",))

    def _and(self, a: int, b: int) -> int:
        T = self.cnf.true
        if a == -T or b == -T:
            return -T
        if a == T:
            return b
        if b == T or a == b:
            return a
        if a == -b:
            return -T
        t = self._fresh()
        self.cnf.add([-t, a], DEF)
        self.cnf.add([-t, b], DEF)
        self.cnf.add([t, -a, -b], DEF)
        return t

    def _or(self, a: int, b: int) -> int:
        return -self._and(-a, -b)

    def _iff(self, a: int, b: int) -> int:
        return self._or(self._and(a, b), self._and(-a, -b))

    def _lit(self, f: Formula, i: int) -> int:
        T = self.cnf.true
        if isinstance(f, Atom):
            if self.spec.fixed:
                try:
                    ws = self.spec.valuation[f.name]
                except KeyError:
                    from .kripke import UnknownAtomError

                    raise UnknownAtomError(f.name) from None
                return T if self.worlds[i] in ws else -T
            return self.V[f.name][i]
        if isinstance(f, Not):
            return -self.lit(f.sub, i)
        if isinstance(f, And):
            return self._and(self.lit(f.left, i), self.lit(f.right, i))
        if isinstance(f, Or):
            return self._or(self.lit(f.left, i), self.lit(f.right, i))
        if isinstance(f, Implies):
            return self._or(-self.lit(f.left, i), self.lit(f.right, i))
        if isinstance(f, Equiv):
            return self._iff(self.lit(f.left, i), self.lit(f.right, i))
        if isinstance(f, Diamond):
            return -self.lit(Box(f.agent, Not(f.sub)), i)
        if isinstance(f, Box):
            if f.agent not in self.R:
                from .kripke import UnknownAgentError

                raise UnknownAgentError(f.agent)
            row = self.R[f.agent][i]
            inner = [self.lit(f.sub, j) for j in range(self.n)]
            if all(x == T for x in inner):
                return T
            t = self._fresh()
            escapes = []
            for j in range(self.n):
                if inner[j] == T:
                    continue
                self.cnf.add([-t, -row[j], inner[j]], DEF)
                d = self._fresh()
                self.cnf.add([-d, row[j]], DEF)
                self.cnf.add([-d, -inner[j]], DEF)
                escapes.append(d)
            self.cnf.add([t] + escapes, DEF)
            return t
        raise TypeError(f"not a formula: {f!r}")

    def encode(self) -> None:
        spec, cnf, W = self.spec, self.cnf, self.worlds
        n = self.n
        if self.subset:
            cnf.add([self.E[self.index[self.point]]], f"point {self.point} is a world")
            for a in spec.agents:
                for i, j in itertools.product(range(n), repeat=2):
                    r = self.R[a][i][j]
                    cnf.add([-r, self.E[i]], "carrier")
                    cnf.add([-r, self.E[j]], "carrier")
        for a in spec.agents:
            rel = self.R[a]
            for prop in sorted(spec.frame_properties.get(a, ()), key=lambda p: p.value):
                tag = f"{prop.value}[{a}]"
                if prop is FrameProperty.REFLEXIVE:
                    for i in range(n):
                        cnf.add([-self.member(i), rel[i][i]], f"{tag} at {W[i]}")
                elif prop is FrameProperty.SERIAL:
                    for i in range(n):
                        cnf.add([-self.member(i)] + [rel[i][j] for j in range(n)], f"{tag} at {W[i]}")
                elif prop is FrameProperty.SYMMETRIC:
                    for i, j in itertools.permutations(range(n), 2):
                        cnf.add([-rel[i][j], rel[j][i]], f"{tag} ({W[i]},{W[j]})")
                elif prop is FrameProperty.TRANSITIVE:
                    for i, j, k in itertools.product(range(n), repeat=3):
                        cnf.add([-rel[i][j], -rel[j][k], rel[i][k]], f"{tag} ({W[i]},{W[j]},{W[k]})")
                elif prop is FrameProperty.EUCLIDEAN:
                    for i, j, k in itertools.product(range(n), repeat=3):
                        cnf.add([-rel[i][j], -rel[i][k], rel[j][k]], f"{tag} ({W[i]},{W[j]},{W[k]})")
        for a, pairs in spec.forbidden.items():
            if a not in self.R:
                continue
            for (u, v), label in sorted(pairs.items()):
                if u in self.index and v in self.index:
                    cnf.add([-self.R[a][self.index[u]][self.index[v]]], label or f"forbidden[{a}] ({u},{v})")
        for f in spec.valid:
            text = to_text(f)
            for i in range(n):
                cnf.add([-self.member(i), self.lit(f, i)], f"valid {text} at {W[i]}")
        p = self.index[self.point]
        for f in spec.at_point:
            cnf.add([self.lit(f, p)], f"at point: {to_text(f)}")
        for wit in spec.witnesses:
            sources = W if wit.sources is None else [s for s in wit.sources if s in self.index]
            label = wit.label or f"witness[{wit.agent}] <{wit.agent}>{to_text(wit.target)}"
            for s in sources:
                i = self.index[s]
                options = []
                for j in range(n):
                    t = self.lit(wit.target, j)
                    if t == -cnf.true:
                        continue
                    r = self.R[wit.agent][i][j]
                    options.append(r if t == cnf.true else self._and(r, t))
                cnf.add([-self.member(i)] + options, f"{label} from {s}")

    def decode(self, true_vars: list[int]) -> KripkeModel:
        truth = set(true_vars)
        if self.subset:
            carrier = [w for i, w in enumerate(self.worlds) if self.E[i] in truth]
        else:
            carrier = list(self.worlds)
        inside = set(carrier)
        relations = {
            a: {
                (self.worlds[i], self.worlds[j])
                for i, j in itertools.product(range(self.n), repeat=2)
                if self.R[a][i][j] in truth
                and self.worlds[i] in inside
                and self.worlds[j] in inside
            }
            for a in self.spec.agents
        }
        if self.spec.fixed:
            valuation = {p: set(ws) & inside for p, ws in self.spec.valuation.items()}
        else:
            valuation = {
                p: {self.worlds[i] for i in range(self.n) if bits[i] in truth}
                for p, bits in self.V.items()
            }
        return model(carrier, relations, valuation, self.point)


# public API ---------------------------------------------------------------------------


def audit(spec: ModelSpec, m: KripkeModel) -> list[str]:
    """Independent re-evaluation of every constraint on a candidate model."""
    problems = []
    for a in spec.agents:
        for prop in spec.frame_properties.get(a, ()):
            check = check_frame_property(m.frame, prop, a)
            if not check:
                problems.append(f"{prop.value}[{a}] violated at {check.violation}")
    for a, pairs in spec.forbidden.items():
        if a in m.agents:
            hit = m.frame.relation(a) & set(pairs)
            if hit:
                problems.append(f"forbidden pairs used by {a}: {sorted(hit)[:3]}")
    for f in spec.valid:
        if not valid_in_model(m, f):
            problems.append(f"not valid: {to_text(f)}")
    for f in spec.at_point:
        if not satisfies(m, m.point, f):
            problems.append(f"fails at point: {to_text(f)}")
    for wit in spec.witnesses:
        target = extension(m, wit.target)
        sources = m.worlds if wit.sources is None else [s for s in wit.sources if s in m.worlds]
        for s in sources:
            if not any(v in target for v in m.successors(wit.agent, s)):
                problems.append(f"{wit.label or 'witness'}: no {wit.agent}-successor of {s}")
    return problems


def find_model(spec: ModelSpec) -> SearchResult:
    """Search for a pointed model meeting ``spec``; SAT results are self-audited."""
    if spec.fixed:
        if len(spec.worlds) > FIXED_BOUND:
            raise BoundExceededError(f"fixed world set larger than {FIXED_BOUND}")
        if spec.point is None or spec.point not in spec.worlds:
            raise ValueError("fixed-world search needs a point among the worlds")
        if spec.carrier not in ("fixed", "subset"):
            raise ValueError(f"unknown carrier mode {spec.carrier!r}")
        plans = [(list(spec.worlds), spec.point)]
        bound = len(spec.worlds)
    else:
        if spec.world_count_max > GENERIC_BOUND:
            raise BoundExceededError(
                f"world_count_max={spec.world_count_max} exceeds the generic bound {GENERIC_BOUND}"
            )
        sizes = range(max(1, spec.world_count_min), spec.world_count_max + 1)
        plans = [([f"w{i}" for i in range(n)], "w0") for n in sizes]
        bound = spec.world_count_max
    refutations = []
    for worlds, point in plans:
        enc = _Encoder(spec, worlds, point)
        enc.encode()
        solver = _Dpll(enc.cnf, enc.describe)
        # subformula variables first, newest (outermost) first: the search
        # then follows the formula's structure rather than blind relation bits
        order = list(range(len(enc.cnf.names) - 1, 1, -1))
        found = solver.solve(order)
        if found is not None:
            m = enc.decode(found)
            problems = audit(spec, m)
            if problems:
                raise SelfAuditError("; ".join(problems))
            return SearchResult(True, m, point)
        refutations.append(Refutation(len(worlds), solver.decisions, tuple(solver.conflicts)))
    return SearchResult(False, certificate=UnsatCertificate(bound, tuple(refutations)))
