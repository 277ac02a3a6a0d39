"""JSON model files for Kripke models and probability structures.

Layout (keys in this order when written)::

    {"worlds": [...], "agents": [...],
     "relations": {agent: [[w, w'], ...]},
     "valuation": {atom: [w, ...]},
     "point": w,                                   optional
     "weights": {agent: {w: p}} | {agent: {w: {w': p}}}}   optional

A file with ``weights`` loads as a probability structure; relations are
then ignored on load and written as the induced support.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .halpern import GeneralizedProbabilityStructure, ProbabilityStructure, StructureError, induced_kripke
from .logic.kripke import KripkeModel, ModelError, model

KEY_ORDER = ("worlds", "agents", "relations", "valuation", "point", "weights")


class ModelFileError(ValueError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.field = field
        self.line = line


def _expect(cond: bool, message: str, field: str) -> None:
    if not cond:
        raise ModelFileError(message, field)


def _string_list(doc: dict, key: str) -> list[str]:
    value = doc.get(key)
    _expect(isinstance(value, list) and all(isinstance(x, str) for x in value), "expected a list of strings", key)
    return value


def from_document(doc: Any) -> KripkeModel | ProbabilityStructure | GeneralizedProbabilityStructure:
    _expect(isinstance(doc, dict), "top level must be an object", "<root>")
    unknown = set(doc) - set(KEY_ORDER)
    _expect(not unknown, f"unknown keys {sorted(unknown)}", "<root>")
    worlds = _string_list(doc, "worlds")
    _expect(len(set(worlds)) == len(worlds), "duplicate worlds", "worlds")
    agents = _string_list(doc, "agents")
    known = set(worlds)

    valuation = doc.get("valuation", {})
    _expect(isinstance(valuation, dict), "expected an object", "valuation")
    for atom, ws in valuation.items():
        field = f"valuation.{atom}"
        _expect(isinstance(ws, list) and all(isinstance(w, str) for w in ws), "expected a list of worlds", field)
        _expect(set(ws) <= known, f"unknown worlds {sorted(set(ws) - known)}", field)

    point = doc.get("point")
    _expect(point is None or point in known, f"point {point!r} is not a world", "point")

    relations = doc.get("relations", {})
    _expect(isinstance(relations, dict), "expected an object", "relations")
    for agent, pairs in relations.items():
        field = f"relations.{agent}"
        _expect(agent in agents, f"unknown agent {agent!r}", field)
        _expect(isinstance(pairs, list), "expected a list of pairs", field)
        for pair in pairs:
            _expect(isinstance(pair, list) and len(pair) == 2, f"bad pair {pair!r}", field)
            _expect(pair[0] in known and pair[1] in known, f"pair {pair!r} mentions unknown worlds", field)

    if "weights" in doc:
        weights = doc["weights"]
        _expect(isinstance(weights, dict), "expected an object", "weights")
        for agent in weights:
            _expect(agent in agents, f"unknown agent {agent!r}", f"weights.{agent}")
        generalized = any(isinstance(v, dict) for d in weights.values() for v in d.values())
        try:
            if generalized:
                return GeneralizedProbabilityStructure(tuple(worlds), valuation, weights)
            return ProbabilityStructure(tuple(worlds), valuation, weights)
        except StructureError as exc:
            raise ModelFileError(str(exc), "weights") from None

    try:
        return model(worlds, {a: [tuple(p) for p in relations.get(a, [])] for a in agents}, valuation, point)
    except ModelError as exc:
        raise ModelFileError(str(exc)) from None


def to_document(obj: KripkeModel | ProbabilityStructure | GeneralizedProbabilityStructure) -> dict:
    if isinstance(obj, KripkeModel):
        m, weights, point = obj, None, obj.point
    else:
        m, weights, point = induced_kripke(obj), obj.weights, None
    order = {w: i for i, w in enumerate(m.worlds)}
    doc: dict[str, Any] = {
        "worlds": list(m.worlds),
        "agents": list(m.agents),
        "relations": {
            a: [list(p) for p in sorted(m.frame.relation(a), key=lambda p: (order[p[0]], order[p[1]]))]
            for a in m.agents
        },
        "valuation": {p: sorted(ws, key=order.__getitem__) for p, ws in sorted(m.valuation.items())},
    }
    if point is not None:
        doc["point"] = point
    if weights is not None:
        doc["weights"] = {a: _plain(d) for a, d in weights.items()}
    return doc


def _plain(d):
    return {k: _plain(v) for k, v in d.items()} if isinstance(d, dict) else float(d)


def dumps(obj) -> str:
    return json.dumps(to_document(obj), indent=2, ensure_ascii=False) + "\n"


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(exc.msg, line=exc.lineno) from None
    return from_document(doc)


def load_model(path: str | Path):
    return loads(Path(path).read_text(encoding="utf-8"))


def save_model(obj, path: str | Path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")
