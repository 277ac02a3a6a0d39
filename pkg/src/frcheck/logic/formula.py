"""Formulas of the multi-agent modal language and their text syntax.

Grammar, loosest binding first::

    equiv   := implies ("<->" implies)*            left-assoc
    implies := or ("->" implies)?                  right-assoc
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "~" unary | "[" agent "]" unary | "<" agent ">" unary | primary
    primary := atom | "(" equiv ")"

Atoms are bare identifiers or bracketed protocol atoms such as
``M[a,t1]=1``, ``ket[+;l;t2]``, ``ind[c;ok;ra;t3]`` and
``ind2[d;c;ok;ra;5]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator, Union


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Equiv:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Box:
    agent: str
    sub: "Formula"


@dataclass(frozen=True)
class Diamond:
    agent: str
    sub: "Formula"


Formula = Union[Atom, Not, And, Or, Implies, Equiv, Box, Diamond]
BINARY = (And, Or, Implies, Equiv)
MODAL = (Box, Diamond)


# constructors -------------------------------------------------------------------


def conj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        raise ValueError("empty conjunction")
    return reduce(And, parts)


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        raise ValueError("empty disjunction")
    return reduce(Or, parts)


def boxes(agents: Iterable[str], sub: Formula) -> Formula:
    """``boxes("cga", p)`` is ``[c][g][a]p``."""
    for agent in reversed(list(agents)):
        sub = Box(agent, sub)
    return sub


# traversal ----------------------------------------------------------------------


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Atom):
        return ()
    if isinstance(f, (Not, Box, Diamond)):
        return (f.sub,)
    return (f.left, f.right)


def subformulas(f: Formula) -> Iterator[Formula]:
    """Post-order walk; children come before their parents."""
    for c in children(f):
        yield from subformulas(c)
    yield f


def atoms(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


def agents(f: Formula) -> set[str]:
    return {g.agent for g in subformulas(f) if isinstance(g, MODAL)}


def modal_depth(f: Formula) -> int:
    below = max((modal_depth(c) for c in children(f)), default=0)
    return below + 1 if isinstance(f, MODAL) else below


def is_box_free(f: Formula) -> bool:
    return modal_depth(f) == 0


def nnf(f: Formula, negate: bool = False) -> Formula:
    """Negation normal form over ~, &, |, [x], <x> (implications expanded)."""
    if isinstance(f, Atom):
        return Not(f) if negate else f
    if isinstance(f, Not):
        return nnf(f.sub, not negate)
    if isinstance(f, And):
        l, r = nnf(f.left, negate), nnf(f.right, negate)
        return Or(l, r) if negate else And(l, r)
    if isinstance(f, Or):
        l, r = nnf(f.left, negate), nnf(f.right, negate)
        return And(l, r) if negate else Or(l, r)
    if isinstance(f, Implies):
        return nnf(Or(Not(f.left), f.right), negate)
    if isinstance(f, Equiv):
        both = And(Implies(f.left, f.right), Implies(f.right, f.left))
        return nnf(both, negate)
    if isinstance(f, Box):
        return Diamond(f.agent, nnf(f.sub, True)) if negate else Box(f.agent, nnf(f.sub))
    if isinstance(f, Diamond):
        return Box(f.agent, nnf(f.sub, True)) if negate else Diamond(f.agent, nnf(f.sub))
    raise TypeError(f"not a formula: {f!r}")


def is_box_positive(f: Formula) -> bool:
    """True when the NNF has no diamonds.

    Such formulas stay true when accessibility relations shrink.
    """
    return not any(isinstance(g, Diamond) for g in subformulas(nnf(f)))


# printing -----------------------------------------------------------------------

_PREC = {Equiv: 1, Implies: 2, Or: 3, And: 4}
_SYMBOL = {Equiv: "<->", Implies: "->", Or: "|", And: "&"}
_UNARY_PREC = 5


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), _UNARY_PREC)


def to_text(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "~" + _wrap(f.sub, _UNARY_PREC)
    if isinstance(f, Box):
        return f"[{f.agent}]" + _wrap(f.sub, _UNARY_PREC)
    if isinstance(f, Diamond):
        return f"<{f.agent}>" + _wrap(f.sub, _UNARY_PREC)
    prec = _PREC[type(f)]
    if isinstance(f, Implies):
        # right-associative
        left, right = _wrap(f.left, prec + 1), _wrap(f.right, prec)
    else:
        left, right = _wrap(f.left, prec), _wrap(f.right, prec + 1)
    return f"{left} {_SYMBOL[type(f)]} {right}"


def _wrap(f: Formula, needed: int) -> str:
    text = to_text(f)
    return f"({text})" if _prec(f) < needed else text


# parsing ------------------------------------------------------------------------

_IDENT = r"[A-Za-z_][A-Za-z0-9_']*"
_FIELD = r"[^;\[\]\s]+"
_ATOM_PATTERNS = [
    re.compile(r"M\[(?P<agent>[^,\[\]\s]+),(?P<time>[^,\[\]\s]+)\]=(?P<value>(?:[A-Za-z0-9_+']|-(?!>))+)"),
    re.compile(rf"ket\[{_FIELD};{_FIELD};{_FIELD}\]"),
    re.compile(rf"ind\[{_FIELD};{_FIELD};{_FIELD};{_FIELD}\]"),
    re.compile(rf"ind2\[{_FIELD};{_FIELD};{_FIELD};{_FIELD};{_FIELD}\]"),
]
_IDENT_RE = re.compile(_IDENT)
_SPACE = re.compile(r"\s*")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        self.pos = _SPACE.match(self.text, self.pos).end()

    def peek(self, token: str) -> bool:
        self.skip()
        return self.text.startswith(token, self.pos)

    def eat(self, token: str) -> bool:
        if self.peek(token):
            self.pos += len(token)
            return True
        return False

    def error(self, message: str):
        raise FormulaSyntaxError(message, self.pos)

    def parse(self) -> Formula:
        f = self.equiv()
        self.skip()
        if self.pos != len(self.text):
            self.error(f"unexpected {self.text[self.pos]!r}")
        return f

    def equiv(self) -> Formula:
        f = self.implies()
        while self.eat("<->"):
            f = Equiv(f, self.implies())
        return f

    def implies(self) -> Formula:
        f = self.disjunction()
        if self.eat("->"):
            return Implies(f, self.implies())
        return f

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.eat("|"):
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.eat("&"):
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.eat("~"):
            return Not(self.unary())
        if self.peek("["):
            self.pos += 1
            return Box(self.agent("]"), self.unary())
        if self.peek("<") and not self.peek("<->"):
            self.pos += 1
            return Diamond(self.agent(">"), self.unary())
        return self.primary()

    def agent(self, close: str) -> str:
        self.skip()
        m = _IDENT_RE.match(self.text, self.pos)
        if not m:
            self.error("expected agent identifier")
        self.pos = m.end()
        if not self.eat(close):
            self.error(f"expected {close!r}")
        return m.group()

    def primary(self) -> Formula:
        if self.eat("("):
            f = self.equiv()
            if not self.eat(")"):
                self.error("expected ')'")
            return f
        self.skip()
        for pattern in _ATOM_PATTERNS:
            m = pattern.match(self.text, self.pos)
            if m:
                self.pos = m.end()
                return Atom(m.group())
        m = _IDENT_RE.match(self.text, self.pos)
        if m:
            if self.text.startswith("[", m.end()) and m.group() in ("M", "ket", "ind", "ind2"):
                self.error(f"malformed {m.group()}[...] atom")
            self.pos = m.end()
            return Atom(m.group())
        if self.pos >= len(self.text):
            self.error("unexpected end of input")
        self.error(f"unexpected {self.text[self.pos]!r}")


def parse(text: str) -> Formula:
    return _Parser(text).parse()


def is_atom_name(name: str) -> bool:
    try:
        return parse(name) == Atom(name)
    except FormulaSyntaxError:
        return False
