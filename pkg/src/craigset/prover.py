"""Backward proof search for cut-free LK and LJ.

Both searches run on a contraction-free calculus (G3c-style for LK, G3i-style
with loop checking for LJ) and then rebuild an explicit proof in the rules of
:mod:`craigset.calculus`.  The rebuild keeps only the formulas a subproof
actually uses, so additive rule forms appear where one auxiliary formula is
idle, and the missing context is added with weakenings at the root.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Union

from .calculus import (
    SCHEMAS, Proof, axiom, bottom_axiom, infer, top_axiom,
)
from .logic import (
    And, Atom, Bottom, Formula, Implies, Not, Or, Sequent, Top, canonical_key,
)

__all__ = [
    "Verdict", "NotProvable", "BudgetExceeded", "SearchBudget",
    "prove_lk", "prove_lj", "prove", "provable_lk", "provable_lj",
]


class Verdict(enum.Enum):
    NOT_PROVABLE = "not provable"
    BUDGET_EXCEEDED = "budget exceeded"

    def __str__(self) -> str:
        return self.value


NotProvable = Verdict.NOT_PROVABLE
BudgetExceeded = Verdict.BUDGET_EXCEEDED


@dataclass(frozen=True)
class SearchBudget:
    max_depth: int = 64
    max_sequent_size: int = 48

    def __post_init__(self):
        if self.max_depth <= 0 or self.max_sequent_size <= 0:
            raise ValueError("search budget must be positive")


def _sorted(fs) -> tuple:
    return tuple(sorted(fs, key=canonical_key))


def _find(p: Proof, side: str, f: Formula, skip: Optional[int] = None) -> Optional[int]:
    for i, g in enumerate(p.conclusion.side(side)):
        if g == f and i != skip:
            return i
    return None


def _fit(p: Proof, ant_cap: Counter, suc_cap: Counter) -> Proof:
    """Contract duplicates until no formula exceeds its cap."""
    for side, rule, cap in (("ant", "ContrL", ant_cap), ("suc", "ContrR", suc_cap)):
        while True:
            seen: dict = {}
            pair = None
            counts = Counter(p.conclusion.side(side))
            for i, f in enumerate(p.conclusion.side(side)):
                if counts[f] > cap[f]:
                    if f in seen:
                        pair = (seen[f], i)
                        break
                    seen[f] = i
            if pair is None:
                break
            p = infer(rule, [p], pair)
    return p


def _weaken_to(p: Proof, target: Sequent) -> Proof:
    for side, rule in (("ant", "WeakL"), ("suc", "WeakR")):
        missing = Counter(target.side(side)) - Counter(p.conclusion.side(side))
        for f in _sorted(missing.elements()):
            p = infer(rule, [p], (), formula=f)
    return p


def _reorder_root(p: Proof, target: Sequent) -> Proof:
    """Re-list the root conclusion in ``target``'s order (multisets agree)."""
    perm = {}
    for side in ("ant", "suc"):
        slots = list(enumerate(target.side(side)))
        used = set()
        for i, f in enumerate(p.conclusion.side(side)):
            j = next(j for j, g in slots if g == f and j not in used)
            used.add(j)
            perm[(side, i)] = j
    if p.rule == "Axiom":
        i, j = p.principal
        pr = (perm[("ant", i)] if i >= 0 else -1, perm[("suc", j)] if j >= 0 else -1)
    else:
        side = SCHEMAS[p.rule][0]
        pr = (perm[(side, p.principal[0])], *p.principal[1:])
    return Proof(p.rule, Sequent(target.antecedent, target.succedent), p.premises, pr)


# -- LK --------------------------------------------------------------------

def _g3c(ant: tuple, suc: tuple):
    """G3c search tree as nested tuples, or None when the sequent fails."""
    for f in ant:
        if isinstance(f, Bottom):
            return ("bot",)
        if isinstance(f, Atom) and f in suc:
            return ("ax", f)
    if any(isinstance(f, Top) for f in suc):
        return ("top",)
    for side, items in (("ant", ant), ("suc", suc)):
        for i, f in enumerate(items):
            if isinstance(f, Atom):
                continue
            rest = items[:i] + items[i + 1:]
            if side == "ant":
                steps = _g3c_left(f, rest, suc)
            else:
                steps = _g3c_right(f, ant, rest)
            children = []
            for a, s in steps:
                sub = _g3c(_sorted(a), _sorted(s))
                if sub is None:
                    return None
                children.append(sub)
            return (side, f, tuple(children))
    return None


def _g3c_left(f, rest, suc):
    if isinstance(f, Top):
        return [(rest, suc)]
    if isinstance(f, Not):
        return [(rest, suc + (f.child,))]
    if isinstance(f, And):
        return [(rest + (f.left, f.right), suc)]
    if isinstance(f, Or):
        return [(rest + (f.left,), suc), (rest + (f.right,), suc)]
    return [(rest, suc + (f.left,)), (rest + (f.right,), suc)]


def _g3c_right(f, ant, rest):
    if isinstance(f, Bottom):
        return [(ant, rest)]
    if isinstance(f, Not):
        return [(ant + (f.child,), rest)]
    if isinstance(f, And):
        return [(ant, rest + (f.left,)), (ant, rest + (f.right,))]
    if isinstance(f, Or):
        return [(ant, rest + (f.left, f.right))]
    return [(ant + (f.left,), rest + (f.right,))]


def _both(p: Proof, side_a, a_f, side_b, b_f):
    a = _find(p, side_a, a_f)
    b = _find(p, side_b, b_f, skip=a if side_a == side_b else None)
    return a, b


def _unary_pair(p: Proof, f, mult: str, left: str, right: str, side: str) -> Proof:
    a, b = _both(p, side, f.left, side, f.right)
    if a is not None and b is not None:
        return infer(mult, [p], (a, b))
    if a is not None:
        return infer(left, [p], (a,), formula=f.right)
    if b is not None:
        return infer(right, [p], (b,), formula=f.left)
    return p


def _imp_right(p: Proof, f: Implies) -> Proof:
    a, b = _find(p, "ant", f.left), _find(p, "suc", f.right)
    if a is None and b is None:
        return p
    if a is None:
        p = infer("WeakL", [p], (), formula=f.left)
        a, b = 0, _find(p, "suc", f.right)
    elif b is None:
        p = infer("WeakR", [p], (), formula=f.right)
        b = 0
    return infer("ImpR", [p], (a, b))


def _binary(rule, p1, s1, f1, p2, s2, f2):
    a = _find(p1, s1, f1)
    if a is None:
        return p1
    b = _find(p2, s2, f2)
    if b is None:
        return p2
    return infer(rule, [p1, p2], (a, b))


def _rebuild_lk(t, ant: tuple, suc: tuple) -> Proof:
    kind = t[0]
    if kind == "bot":
        return bottom_axiom()
    if kind == "top":
        return top_axiom()
    if kind == "ax":
        return axiom(t[1])
    side, f, children = t
    rest_ant = list(ant)
    rest_suc = list(suc)
    (rest_ant if side == "ant" else rest_suc).remove(f)
    steps = (_g3c_left(f, tuple(rest_ant), tuple(rest_suc)) if side == "ant"
             else _g3c_right(f, tuple(rest_ant), tuple(rest_suc)))
    subs = [_rebuild_lk(c, _sorted(a), _sorted(s)) for c, (a, s) in zip(children, steps)]
    cap = (Counter(ant), Counter(suc))
    if isinstance(f, (Top, Bottom)):
        return subs[0]
    if isinstance(f, Not):
        p = subs[0]
        aux_side = "suc" if side == "ant" else "ant"
        a = _find(p, aux_side, f.child)
        return p if a is None else infer("NotL" if side == "ant" else "NotR", [p], (a,))
    if side == "ant" and isinstance(f, And):
        return _unary_pair(subs[0], f, "AndL-mult", "AndL-add-left", "AndL-add-right", "ant")
    if side == "suc" and isinstance(f, Or):
        return _unary_pair(subs[0], f, "OrR-mult", "OrR-add-left", "OrR-add-right", "suc")
    if side == "suc" and isinstance(f, Implies):
        return _imp_right(subs[0], f)
    if side == "ant" and isinstance(f, Or):
        p = _binary("OrL", subs[0], "ant", f.left, subs[1], "ant", f.right)
    elif side == "ant":
        p = _binary("ImpL", subs[0], "suc", f.left, subs[1], "ant", f.right)
    else:
        p = _binary("AndR", subs[0], "suc", f.left, subs[1], "suc", f.right)
    return _fit(p, *cap)


def prove_lk(s: Sequent) -> Union[Proof, Verdict]:
    ant, suc = _sorted(s.antecedent), _sorted(s.succedent)
    tree = _g3c(ant, suc)
    if tree is None:
        return NotProvable
    p = _rebuild_lk(tree, ant, suc)
    return _reorder_root(_weaken_to(p, s), s)


def provable_lk(s: Sequent) -> bool:
    return _g3c(_sorted(s.antecedent), _sorted(s.succedent)) is not None


# -- LJ --------------------------------------------------------------------

class _LJSearch:
    """Depth-bounded G3i search; contexts are sets, left implications stay put."""

    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.proved: dict = {}
        self.refuted: set = set()
        self.hit_budget = False

    def run(self, gamma: frozenset, goal):
        return self.search(gamma, goal, 0, frozenset())[0]

    def search(self, gamma: frozenset, goal, depth: int, history: frozenset):
        """Return (tree or None, clean) where clean means no loop/budget pruning."""
        key = (gamma, goal)
        if key in self.proved:
            return self.proved[key], True
        if key in self.refuted:
            return None, True
        if key in history:
            return None, False
        if depth >= self.budget.max_depth or len(gamma) + 1 > self.budget.max_sequent_size:
            self.hit_budget = True
            return None, False
        tree, clean = self._expand(gamma, goal, depth + 1, history | {key})
        if tree is not None:
            self.proved[key] = tree
        elif clean:
            self.refuted.add(key)
        return tree, clean

    def _all(self, kind, f, premises, depth, history, gamma=None):
        subs = []
        clean = True
        for g, c in premises:
            t, ok = self.search(g, c, depth, history)
            clean = clean and ok
            if t is None:
                return None, clean
            subs.append(t)
        return (kind, f, tuple(premises), tuple(subs), gamma), clean

    def _expand(self, gamma, goal, depth, history):
        if goal is not None and goal in gamma and isinstance(goal, Atom):
            return ("ax", goal), True
        if any(isinstance(f, Bottom) for f in gamma):
            return ("bot",), True
        if isinstance(goal, Top):
            return ("top",), True
        ordered = _sorted(gamma)
        # invertible steps first
        for f in ordered:
            rest = gamma - {f}
            if isinstance(f, Top):
                return self._all("dropL", f, [(rest, goal)], depth, history)
            if isinstance(f, And):
                return self._all("AndL", f, [(rest | {f.left, f.right}, goal)], depth, history)
            if isinstance(f, Or):
                return self._all("OrL", f, [(rest | {f.left}, goal), (rest | {f.right}, goal)],
                                 depth, history, gamma)
        if isinstance(goal, Bottom):
            return self._all("dropR", goal, [(gamma, None)], depth, history)
        if isinstance(goal, Implies):
            return self._all("ImpR", goal, [(gamma | {goal.left}, goal.right)], depth, history)
        if isinstance(goal, Not):
            return self._all("NotR", goal, [(gamma | {goal.child}, None)], depth, history)
        if isinstance(goal, And):
            return self._all("AndR", goal, [(gamma, goal.left), (gamma, goal.right)], depth, history)
        # choice points
        clean = True
        options = []
        if isinstance(goal, Or):
            options.append(("OrR-left", goal, [(gamma, goal.left)]))
            options.append(("OrR-right", goal, [(gamma, goal.right)]))
        for f in ordered:
            if isinstance(f, Implies):
                options.append(("ImpL", f, [(gamma, f.left), ((gamma - {f}) | {f.right}, goal)]))
            elif isinstance(f, Not):
                options.append(("NotL", f, [(gamma, f.child)]))
        for kind, f, prem in options:
            t, ok = self._all(kind, f, prem, depth, history)
            if t is not None:
                return t, True
            clean = clean and ok
        return None, clean


def _rebuild_lj(t) -> Proof:
    kind = t[0]
    if kind == "ax":
        return axiom(t[1])
    if kind == "bot":
        return bottom_axiom()
    if kind == "top":
        return top_axiom()
    kind, f, premises, subs, orig_gamma = t
    ps = [_rebuild_lj(s) for s in subs]
    gamma, goal = premises[0]
    if kind in ("dropL", "dropR"):
        return ps[0]
    if kind == "AndL":
        return _unary_pair(ps[0], f, "AndL-mult", "AndL-add-left", "AndL-add-right", "ant")
    if kind == "ImpR":
        return _imp_right(ps[0], f)
    if kind == "NotR":
        a = _find(ps[0], "ant", f.child)
        return ps[0] if a is None else infer("NotR", [ps[0]], (a,))
    if kind in ("OrR-left", "OrR-right"):
        sub = f.left if kind == "OrR-left" else f.right
        a = _find(ps[0], "suc", sub)
        if a is None:
            return ps[0]
        rule = "OrR-add-left" if kind == "OrR-left" else "OrR-add-right"
        return infer(rule, [ps[0]], (a,), formula=f.right if kind == "OrR-left" else f.left)
    if kind == "NotL":
        a = _find(ps[0], "suc", f.child)
        if a is None:
            return ps[0]
        return _fit(infer("NotL", [ps[0]], (a,)), Counter(_sorted(gamma)), Counter())
    if kind == "OrL":
        conclusion_gamma = orig_gamma
        p = _binary("OrL", ps[0], "ant", f.left, ps[1], "ant", f.right)
    elif kind == "AndR":
        conclusion_gamma = gamma
        p = _binary_lj_right(ps[0], ps[1])
    else:  # ImpL
        conclusion_gamma = gamma
        p = _binary("ImpL", ps[0], "suc", f.left, ps[1], "ant", f.right)
    cap_suc = Counter(p.conclusion.succedent[:1])
    return _fit(p, Counter(conclusion_gamma), cap_suc)


def _binary_lj_right(p1: Proof, p2: Proof) -> Proof:
    if not p1.conclusion.succedent:
        return p1
    if not p2.conclusion.succedent:
        return p2
    return infer("AndR", [p1, p2], (0, 0))


def _lj_shape_ok(s: Sequent) -> bool:
    return len(set(s.succedent)) <= 1


def prove_lj(s: Sequent, budget: Optional[SearchBudget] = None) -> Union[Proof, Verdict]:
    if not _lj_shape_ok(s):
        raise ValueError(f"not an LJ sequent (distinct succedent formulas): {s}")
    search = _LJSearch(budget or SearchBudget())
    goal = s.succedent[0] if s.succedent else None
    tree = search.run(frozenset(s.antecedent), goal)
    if tree is None:
        return BudgetExceeded if search.hit_budget else NotProvable
    p = _rebuild_lj(tree)
    return _reorder_root(_weaken_to(p, s), s)


def provable_lj(s: Sequent, budget: Optional[SearchBudget] = None) -> bool:
    return isinstance(prove_lj(s, budget), Proof)


def prove(s: Sequent, system: str = "LK", budget: Optional[SearchBudget] = None):
    return prove_lk(s) if system.upper() == "LK" else prove_lj(s, budget)
