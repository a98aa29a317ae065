"""Propositional formulas, sequents, the concrete syntax and a truth-table oracle.

Concrete syntax (ASCII)::

    formula := imp
    imp     := disj ( "->" imp )?          right associative
    disj    := conj ( "|" conj )*          left associative
    conj    := unary ( "&" unary )*        left associative
    unary   := "~" unary | atom | "true" | "false" | "(" formula ")"
    sequent := [ formula { "," formula } ] "=>" [ formula { "," formula } ]
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

__all__ = [
    "Atom", "Top", "Bottom", "Not", "And", "Or", "Implies", "Formula",
    "TOP", "BOTTOM", "Sequent", "OccurrencePath", "Language",
    "ParseError", "UnassignedAtom",
    "parse_formula", "parse_sequent", "vars_of", "eval_classical",
    "is_valid_classical", "size", "depth", "subformula_at", "atom_leaves",
    "canonical_key", "conj", "disj", "to_text",
]


class ParseError(ValueError):
    def __init__(self, message: str, position: int, token: str = ""):
        super().__init__(f"{message} at position {position}" + (f" (token {token!r})" if token else ""))
        self.position = position
        self.token = token


class UnassignedAtom(KeyError):
    pass


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class Bottom:
    def __str__(self) -> str:
        return "false"


@dataclass(frozen=True)
class Not:
    child: "Formula"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return to_text(self)


Formula = Union[Atom, Top, Bottom, Not, And, Or, Implies]
Language = frozenset  # of atom names

TOP = Top()
BOTTOM = Bottom()

_BINARY = {And: "&", Or: "|", Implies: "->"}
_PREC = {Implies: 1, Or: 2, And: 3, Not: 4}


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), 5)


def to_text(f: Formula) -> str:
    """Print with the fewest parentheses the grammar allows."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Not):
        inner = to_text(f.child)
        return "~" + (f"({inner})" if _prec(f.child) < 4 else inner)
    p = _prec(f)
    left, right = to_text(f.left), to_text(f.right)
    if isinstance(f, Implies):
        wrap_left, wrap_right = _prec(f.left) <= p, _prec(f.right) < p
    else:
        wrap_left, wrap_right = _prec(f.left) < p, _prec(f.right) <= p
    if wrap_left:
        left = f"({left})"
    if wrap_right:
        right = f"({right})"
    return f"{left} {_BINARY[type(f)]} {right}"


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(=>)|(->)|([~&|(),])|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        if m.group(5) is not None:
            raise ParseError("unexpected character", m.start(5), m.group(5))
        tok = next(g for g in m.groups() if g is not None)
        tokens.append((tok, m.start(m.lastindex)))
        pos = m.end()
    tokens.append(("<end>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self) -> tuple[str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str) -> ParseError:
        tok, pos = self.tokens[self.i]
        return ParseError(message, pos, tok)

    def expect(self, tok: str) -> None:
        if self.peek() != tok:
            raise self.error(f"expected {tok!r}")
        self.take()

    def formula(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.formula())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            f = self.formula()
            self.expect(")")
            return f
        if tok == "true":
            self.take()
            return TOP
        if tok == "false":
            self.take()
            return BOTTOM
        if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok):
            self.take()
            return Atom(tok)
        raise self.error("expected a formula")

    def cedent(self, stop: set[str]) -> list[Formula]:
        if self.peek() in stop:
            return []
        items = [self.formula()]
        while self.peek() == ",":
            self.take()
            items.append(self.formula())
        return items


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.peek() != "<end>":
        raise p.error("unexpected token")
    return f


def parse_sequent(text: str) -> "Sequent":
    p = _Parser(text)
    ant = p.cedent({"=>"})
    if p.peek() != "=>":
        raise p.error("expected '=>'")
    p.take()
    suc = p.cedent({"<end>"})
    if p.peek() != "<end>":
        raise p.error("unexpected token")
    return Sequent(tuple(ant), tuple(suc))


# -- sequents and occurrences ----------------------------------------------

def canonical_key(f: Formula) -> str:
    return to_text(f)


@dataclass(frozen=True, eq=False)
class Sequent:
    """Two-sided sequent; compares as a pair of multisets.

    The stored tuple order is kept so that occurrence indices are stable.
    """

    antecedent: tuple = ()
    succedent: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "antecedent", tuple(self.antecedent))
        object.__setattr__(self, "succedent", tuple(self.succedent))

    def side(self, name: str) -> tuple:
        return self.antecedent if name == "ant" else self.succedent

    def _multisets(self):
        return Counter(self.antecedent), Counter(self.succedent)

    def __eq__(self, other):
        if not isinstance(other, Sequent):
            return NotImplemented
        return self._multisets() == other._multisets()

    def __hash__(self):
        return hash((tuple(sorted(map(canonical_key, self.antecedent))),
                     tuple(sorted(map(canonical_key, self.succedent)))))

    def canonical(self) -> "Sequent":
        """Same multisets, ordered by printed form (stable on ties)."""
        return Sequent(tuple(sorted(self.antecedent, key=canonical_key)),
                       tuple(sorted(self.succedent, key=canonical_key)))

    def occurrences(self) -> Iterator[tuple[str, int, Formula]]:
        for i, f in enumerate(self.antecedent):
            yield "ant", i, f
        for i, f in enumerate(self.succedent):
            yield "suc", i, f

    def vars(self) -> frozenset:
        out: set = set()
        for _, _, f in self.occurrences():
            out |= vars_of(f)
        return frozenset(out)

    def __str__(self) -> str:
        left = ", ".join(map(to_text, self.antecedent))
        right = ", ".join(map(to_text, self.succedent))
        return f"{left} => {right}".strip()

    def __repr__(self) -> str:
        return f"Sequent({str(self)!r})"


@dataclass(frozen=True, order=True)
class OccurrencePath:
    side: str            # "ant" | "suc"
    index: int
    path: tuple = ()     # steps in {"left", "right", "down"}

    def __str__(self) -> str:
        return f"{self.side}:{self.index}:{'.'.join(self.path) or '-'}"


def subformula_at(f: Formula, path) -> Formula:
    for step in path:
        if step == "down" and isinstance(f, Not):
            f = f.child
        elif step in ("left", "right") and isinstance(f, (And, Or, Implies)):
            f = getattr(f, step)
        else:
            raise ValueError(f"path step {step!r} does not resolve in {to_text(f)}")
    return f


def atom_leaves(f: Formula, prefix: tuple = ()) -> list[tuple[tuple, str]]:
    """(path, atom name) for every atomic leaf, left to right."""
    if isinstance(f, Atom):
        return [(prefix, f.name)]
    if isinstance(f, (Top, Bottom)):
        return []
    if isinstance(f, Not):
        return atom_leaves(f.child, prefix + ("down",))
    return atom_leaves(f.left, prefix + ("left",)) + atom_leaves(f.right, prefix + ("right",))


# -- measures and semantics ------------------------------------------------

def vars_of(f: Formula) -> frozenset:
    return frozenset(name for _, name in atom_leaves(f))


def size(f: Formula) -> int:
    """Symbol count: atoms, constants and connectives."""
    if isinstance(f, (Atom, Top, Bottom)):
        return 1
    if isinstance(f, Not):
        return 1 + size(f.child)
    return 1 + size(f.left) + size(f.right)


def depth(f: Formula) -> int:
    """Tree height, counting a leaf as depth 1."""
    if isinstance(f, (Atom, Top, Bottom)):
        return 1
    if isinstance(f, Not):
        return 1 + depth(f.child)
    return 1 + max(depth(f.left), depth(f.right))


def eval_classical(f: Formula, assignment: Mapping[str, bool]) -> bool:
    if isinstance(f, Atom):
        try:
            return bool(assignment[f.name])
        except KeyError:
            raise UnassignedAtom(f.name) from None
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Not):
        return not eval_classical(f.child, assignment)
    a = eval_classical(f.left, assignment)
    b = eval_classical(f.right, assignment)
    if isinstance(f, And):
        return a and b
    if isinstance(f, Or):
        return a or b
    return (not a) or b


def conj(items) -> Formula:
    items = list(items)
    if not items:
        return TOP
    out = items[0]
    for f in items[1:]:
        out = And(out, f)
    return out


def disj(items) -> Formula:
    items = list(items)
    if not items:
        return BOTTOM
    out = items[0]
    for f in items[1:]:
        out = Or(out, f)
    return out


def is_valid_classical(s: Sequent) -> bool:
    """Truth-table check of  /\\ antecedent -> \\/ succedent."""
    names = sorted(s.vars())
    for values in itertools.product((False, True), repeat=len(names)):
        env = dict(zip(names, values))
        if all(eval_classical(a, env) for a in s.antecedent) and \
                not any(eval_classical(b, env) for b in s.succedent):
            return False
    return True
