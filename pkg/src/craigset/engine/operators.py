"""Concrete operators: formula-tree rules, contraction, plain merges; regular pairs."""

from __future__ import annotations

from typing import Callable

from ..logic import And, Atom, Implies, Not, Or
from .core import (
    Embedding, EngineError, Fresh, OperatorSpec, PointSet, apply_operator,
    derive_operator, formula_set, StructuredSet,
)

__all__ = [
    "RegistryGap", "RegularPairRegistry", "LOGIC_OPS", "logic_op", "formula_operator",
    "contraction", "merge", "logic_registry", "sets_registry", "additive",
    "validate_pair",
]


class RegistryGap(EngineError):
    pass


def formula_operator(name: str, signature: tuple, value_component: int,
                     combine: Callable, prefixes: list) -> OperatorSpec:
    """Value is ``combine`` of the argument formulas; leaves embed by position."""

    def build(args, fresh):
        value = formula_set(combine(*[a.formula for a in args]), fresh)
        where = dict(value.leaves)
        embs = [Embedding(a.id, value.id, {(pt, where[pre + path]) for path, pt in a.leaves})
                for a, pre in zip(args, prefixes)]
        return value, embs

    return OperatorSpec(name, signature, value_component, build, True)


def _same(*fs):
    if any(f != fs[0] for f in fs):
        raise EngineError("contraction needs copies of one set")
    return fs[0]


def contraction(n: int, component: int) -> OperatorSpec:
    """n copies in one component mapped into a single copy."""
    name = ("ContrL" if component == 1 else "ContrR") + ("" if n == 2 else str(n))
    sig = ((n, 0),) if component == 1 else ((0, n),)
    return formula_operator(name, sig, component, _same, [()] * n)


L, R, D = ("left",), ("right",), ("down",)

LOGIC_OPS: dict[str, OperatorSpec] = {op.name: op for op in [
    formula_operator("NotL", ((0, 1),), 1, Not, [D]),
    formula_operator("NotR", ((1, 0),), 2, Not, [D]),
    formula_operator("AndL-mult", ((2, 0),), 1, And, [L, R]),
    formula_operator("AndR", ((0, 1), (0, 1)), 2, And, [L, R]),
    formula_operator("OrL", ((1, 0), (1, 0)), 1, Or, [L, R]),
    formula_operator("OrR-mult", ((0, 2),), 2, Or, [L, R]),
    formula_operator("ImpL", ((0, 1), (1, 0)), 1, Implies, [L, R]),
    formula_operator("ImpR", ((1, 1),), 2, Implies, [L, R]),
    contraction(2, 1),
    contraction(2, 2),
]}

# additive rule -> (multiplicative base, slot filled by the missing formula)
ADDITIVE = {
    "AndL-add-left": ("AndL-mult", 1), "AndL-add-right": ("AndL-mult", 0),
    "OrR-add-left": ("OrR-mult", 1), "OrR-add-right": ("OrR-mult", 0),
}


def logic_op(name: str) -> OperatorSpec:
    if name in LOGIC_OPS:
        return LOGIC_OPS[name]
    if name.startswith("Contr") and name[6:].isdigit():
        return contraction(int(name[6:]), 1 if name[5] == "L" else 2)
    if name.startswith("merge"):
        return merge(*map(int, name[5:].split("x")))
    raise KeyError(name)


def additive(rule: str, missing: PointSet) -> OperatorSpec:
    """Additive form as the multiplicative operator with one auxiliary set."""
    base, slot = ADDITIVE[rule]
    return derive_operator(LOGIC_OPS[base], 1, [(0, slot, missing)])


# -- plain point sets ---------------------------------------------------------

def merge(l: int, per_input: int = 1) -> OperatorSpec:
    """Plain union up to renaming: one fresh point per argument point."""
    sig = ((per_input, 0),) * l

    def build(args, fresh):
        sid = fresh()
        embs, pts = [], []
        for a in args:
            rel = set()
            for p in a.points:
                q = fresh()
                pts.append(q)
                rel.add((p, q))
            embs.append(Embedding(a.id, sid, rel))
        value = PointSet(sid, tuple(pts))
        return value, [Embedding(e.source, sid, e.relation) for e in embs]

    return OperatorSpec(f"merge{l}x{per_input}", sig, 1, build, True)


# -- regular pairs ----------------------------------------------------------

def _lary_key(op: OperatorSpec) -> tuple:
    comps = tuple(1 if j1 else 2 for j1, _ in op.signature)
    return op.arity, comps, op.value_component


def validate_pair(lary: OperatorSpec, unary: OperatorSpec, plain: bool = False) -> list[str]:
    """The three regular-pair clauses, checked on sample arguments."""
    problems = []
    if any(j1 + j2 != 1 for j1, j2 in lary.signature):
        problems.append("the l-ary operator must take one argument per input")
    l, comps, v = _lary_key(lary)
    if unary.arity != 1 or unary.subarity != l:
        problems.append("the dual must be unary of subarity l")
        return problems
    if not plain:
        want = (sum(1 for c in comps if c == 2), sum(1 for c in comps if c == 1))
        if unary.signature[0] != want:
            problems.append("dual arguments must sit in the opposite components")
        if unary.value_component == v:
            problems.append("values must lie in opposite components")
    # same value and embeddings on the same arguments
    fresh = Fresh(1000)
    if lary.root.name.startswith("merge"):
        samples = [PointSet(fresh(), (fresh(), fresh())) for _ in range(l)]
    else:
        samples = [formula_set(Atom(f"x{h}"), fresh) for h in range(l)]
    opp = (lambda c: c) if plain else (lambda c: 3 - c)
    try:
        inputs = [StructuredSet([s] if c == 1 else [], [s] if c == 2 else []) for s, c in zip(samples, comps)]
        a = apply_operator(lary, inputs, [[(c, s.id)] for s, c in zip(samples, comps)], 5000)
        order = sorted(range(l), key=lambda h: opp(comps[h]))
        S = StructuredSet([samples[h] for h in order if opp(comps[h]) == 1],
                          [samples[h] for h in order if opp(comps[h]) == 2])
        u = apply_operator(unary, [S], [[(opp(comps[h]), samples[h].id) for h in order]], 5000)
    except EngineError as exc:
        problems.append(f"pair does not apply to sample arguments: {exc}")
        return problems
    if a.value != u.value:
        problems.append("values differ")
    if {(e.source, e.relation) for e in a.embeddings} != {(e.source, e.relation) for e in u.embeddings}:
        problems.append("embeddings into the value differ")
    return problems


class RegularPairRegistry:
    """(l, argument components, value component) -> (l-ary op, dual unary op)."""

    def __init__(self, plain: bool = False):
        self.plain = plain
        self.pairs: dict = {}

    def add(self, lary: OperatorSpec, unary: OperatorSpec) -> None:
        problems = validate_pair(lary, unary, self.plain)
        if problems:
            raise EngineError(f"({lary.name}, {unary.name}) is not regular: {problems[0]}")
        self.pairs[_lary_key(lary)] = (lary, unary)

    def pair(self, l: int, comps: tuple, value: int) -> tuple:
        key = (l, tuple(comps), value)
        if key not in self.pairs:
            raise RegistryGap(f"no regular pair for signature {key}")
        return self.pairs[key]

    def contraction(self, n: int, component: int) -> OperatorSpec:
        if self.plain:
            return merge(1, n)
        return contraction(n, component)

    def __iter__(self):
        return iter(self.pairs.items())


def logic_registry() -> RegularPairRegistry:
    reg = RegularPairRegistry()
    ops = LOGIC_OPS
    reg.add(ops["OrL"], ops["OrR-mult"])
    reg.add(ops["AndR"], ops["AndL-mult"])
    reg.add(ops["ImpL"], ops["ImpR"])
    reg.add(ops["NotL"], ops["NotR"])
    reg.add(ops["NotR"], ops["NotL"])
    return reg


def sets_registry(max_arity: int = 4) -> RegularPairRegistry:
    reg = RegularPairRegistry(plain=True)
    for l in range(1, max_arity + 1):
        reg.add(merge(l), merge(1, l))
    return reg
