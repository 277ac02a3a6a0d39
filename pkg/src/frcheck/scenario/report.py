"""Scenario reports: a verdict, a checked derivation trace, and a model or certificate."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from ..logic.finder import UnsatCertificate
from ..logic.kripke import KripkeModel
from ..modelio import to_document

SAT = "SAT"
UNSAT = "UNSAT"
CONTRADICTION = "CONTRADICTION"
VALID = "VALID"
INVALID = "INVALID"


@dataclass(frozen=True)
class TraceStep:
    id: str
    world: str | None
    formula: str
    justification: str
    premises: tuple[str, ...] = ()
    frames: tuple[str, ...] = ()
    check: str = ""
    verified: bool = False
    note: str = ""

    def to_document(self) -> dict:
        return {
            "id": self.id,
            "world": self.world,
            "formula": self.formula,
            "justification": self.justification,
            "premises": list(self.premises),
            "frames": list(self.frames),
            "check": self.check,
            "verified": self.verified,
            "note": self.note,
        }


def certificate_summary(cert: UnsatCertificate, limit: int = 8) -> dict:
    return {
        "bound": cert.bound,
        "complete": cert.is_complete(),
        "refutations": [
            {
                "world_count": r.world_count,
                "decisions": r.decisions,
                "conflicts": len(r.conflicts),
                "first_conflict": r.conflicts[0].clause if r.conflicts else None,
            }
            for r in cert.refutations
        ],
        "root_reasons": list(cert.root_reasons()[:limit]),
    }


@dataclass(frozen=True)
class ScenarioReport:
    name: str
    verdict: str
    point: str | None
    steps: tuple[TraceStep, ...]
    model: KripkeModel | None = None
    certificate: dict | None = None
    values: dict[str, float] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def all_verified(self) -> bool:
        return all(s.verified for s in self.steps)

    def step(self, step_id: str) -> TraceStep:
        for s in self.steps:
            if s.id == step_id:
                return s
        raise KeyError(step_id)

    def to_document(self) -> dict[str, Any]:
        return {
            "report": self.name,
            "verdict": self.verdict,
            "point": self.point,
            "all_verified": self.all_verified,
            "values": {k: float(v) for k, v in self.values.items()},
            "trace": [s.to_document() for s in self.steps],
            "model": to_document(self.model) if self.model is not None else None,
            "certificate": self.certificate,
            "notes": list(self.notes),
        }

    def to_machine(self) -> str:
        return json.dumps(self.to_document(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [f"{self.name}: {self.verdict}"]
        if self.point is not None:
            lines.append(f"point: {self.point}")
        for k, v in self.values.items():
            lines.append(f"value {k} = {v:.12g}")
        for n, s in enumerate(self.steps, 1):
            mark = "ok" if s.verified else "FAILED"
            where = f" @ {s.world}" if s.world else ""
            lines.append(f"{n:2d}. [{s.id}]{where}  {s.formula}")
            lines.append(f"      by {s.justification}")
            if s.premises:
                lines.append(f"      rules: {', '.join(s.premises)}")
            if s.frames:
                lines.append(f"      frames: {', '.join(s.frames)}")
            lines.append(f"      check: {s.check} [{mark}]")
            if s.note:
                lines.append(f"      note: {s.note}")
        if self.model is not None:
            lines.append(f"model: {len(self.model.worlds)} worlds: {', '.join(self.model.worlds)}")
            for a in self.model.agents:
                pairs = sorted(self.model.frame.relation(a))
                lines.append(f"  R_{a}: " + " ".join(f"({u},{v})" for u, v in pairs))
        if self.certificate is not None:
            c = self.certificate
            lines.append(f"certificate: bound {c['bound']}, complete={c['complete']}")
            for r in c["refutations"]:
                lines.append(
                    f"  {r['world_count']} worlds: {r['decisions']} decisions, {r['conflicts']} conflicts"
                )
            for reason in c["root_reasons"]:
                lines.append(f"  root: {reason}")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"
