"""Interpolant sets by induction on a derivation from a trivial space.

Every structured set of the input derivation gets up to two counterparts: an
A-half built in one derivation and a B-half built in another.  A set with both
halves carries an I-set, the same point set in both, in opposite components.
The orientation ``o`` of a set names the half whose I-set sits in the first
component.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Optional

from ..logic import BOTTOM, TOP, And, Bottom, Formula, Implies, Not, Or, Top
from ..maehara import HypothesisViolated
from .core import (
    Builder, Derivation, Embedding, EngineError, Fresh, PointSet, StructuredSet,
    derive_operator, empty_set, is_surjective, witness_surjective,
)
from .operators import RegistryGap, RegularPairRegistry, logic_op, logic_registry, sets_registry

__all__ = [
    "EngineResult", "NotRestricted", "PreconditionViolated", "HypothesisViolated",
    "interpolate_derivation", "interpolate_restricted", "interpolate_sets",
    "empty_interpolant_simplify", "engine_formula", "fold_constants",
]

A, B = "A", "B"


class NotRestricted(EngineError):
    pass


class PreconditionViolated(EngineError):
    pass


class _Unrestricted(Exception):
    pass


def _other(c: str) -> str:
    return B if c == A else A


@dataclass
class EngineResult:
    interpolant: Optional[PointSet]
    left: Optional[Derivation]          # derivation of the A-half
    right: Optional[Derivation]         # derivation of the B-half
    orientation: str
    shape: str
    traces: tuple                       # (I point, A point, B point)
    final_colors: dict
    orderings: list = field(default_factory=list)
    surjective: bool = False            # every step and witness of the input is surjective


@dataclass
class _Node:
    halves: dict
    I: Optional[PointSet]
    o: str
    fixed: bool


class _Run:
    def __init__(self, d: Derivation, reg: RegularPairRegistry, final_colors: Optional[dict], mode: str):
        self.d, self.reg, self.mode = d, reg, mode
        self.plain = mode == "sets"
        self.space, self.apps = d.replay(logic_op)
        if len(self.space) != 1:
            raise EngineError("the derivation must end in a single structured set")
        final = self.space[0]
        if final_colors is None:
            final_colors = {s.id: (A if c == 1 else B) for c, s in final.sets()}
        if set(final_colors) != {s.id for _, s in final.sets()}:
            raise EngineError("final colors must cover exactly the final sets")
        self.final_colors = final_colors
        self.parent = {a.id: app.value.id for app in self.apps for a in app.args}
        top = 0
        for S, w in d.initial:
            for _, s in S.sets():
                top = max([top, s.id, *s.points])
        for app in self.apps:
            for s in [app.value, *app.args]:
                top = max([top, s.id, *s.points])
        self.fresh = Fresh(top + 1)
        self.b = {A: Builder(self.plain), B: Builder(self.plain)}
        self.origin: dict = {}          # I point -> ("copy", point) | ("base", (A point, B points))
        self.orderings: list = []

    # -- helpers ----------------------------------------------------------

    def color(self, sid: int) -> str:
        while sid not in self.final_colors:
            sid = self.parent[sid]
        return self.final_colors[sid]

    def comp(self, o: str, X: str) -> int:
        if self.plain:
            return 1
        return 1 if o == X else 2

    def split(self, S: StructuredSet, X: str) -> tuple[list, list]:
        return ([s for s in S.first if self.color(s.id) == X],
                [s for s in S.second if self.color(s.id) == X])

    def succ_color(self, S: StructuredSet) -> Optional[str]:
        cs = {self.color(s.id) for s in S.second}
        if len(cs) > 1:
            raise HypothesisViolated(f"second component of {S!r} is embedded into both A and B")
        return cs.pop() if cs else None

    def apply(self, X: str, op, keys, selection, base: Optional[int] = None) -> int:
        if base is None:
            base = self.fresh.next_id
        key = self.b[X].apply(op, keys, selection, base)
        v = self.b[X].apps[-1].value
        self.fresh.next_id = max(self.fresh.next_id, v.id + 1, *(p + 1 for p in v.points))
        if self.mode == "lj" and not self.b[X].get(key).is_restricted():
            raise _Unrestricted(repr(self.b[X].get(key)))
        return key

    def copy_set(self, s: PointSet) -> tuple[PointSet, dict]:
        sid = self.fresh()
        mapping = {p: self.fresh() for p in s.points}
        for old, new in mapping.items():
            self.origin[new] = ("copy", old)
        return PointSet(sid, tuple(mapping.values()), s.formula,
                        tuple((path, mapping[p]) for path, p in s.leaves)), mapping

    # -- base cases ------------------------------------------------------------

    def base(self, S: StructuredSet, w: Embedding) -> _Node:
        (sc, src), (_, tgt) = S.find(w.source), S.find(w.target)
        cs, ct = self.color(src.id), self.color(tgt.id)
        fixed = bool(S.second)
        z = self.succ_color(S) if self.mode == "lj" else None
        if cs == ct:
            X, Y = cs, _other(cs)
            yf, ys = self.split(S, Y)
            if not yf and not ys:
                return _Node({X: self.b[X].add_initial(S, w)}, None, z or X, fixed)
            if self.plain:
                e = empty_set(self.fresh)
                SX = StructuredSet(list(S.first) + [e], S.second)
                SY = StructuredSet([e] + yf + ys, [])
                return _Node({X: self.b[X].add_initial(SX, w),
                              Y: self.b[Y].add_initial(SY, Embedding(e.id, (yf + ys)[0].id))}, e, B, fixed)
            pref = (z or B) if self.mode == "lj" else B
            for o in (pref, _other(pref)):
                cY = self.comp(o, Y)
                partner = (yf, ys)[2 - cY]
                if partner:
                    break
            e = empty_set(self.fresh, TOP if cY == 2 else BOTTOM)
            cX = self.comp(o, X)
            SX = StructuredSet(list(S.first) + ([e] if cX == 1 else []), list(S.second) + ([e] if cX == 2 else []))
            SY = StructuredSet(yf + ([e] if cY == 1 else []), ys + ([e] if cY == 2 else []))
            node = _Node({X: self.b[X].add_initial(SX, w),
                          Y: self.b[Y].add_initial(SY, Embedding(e.id, partner[0].id))}, e, o, fixed)
        else:
            I, copy_of = self.copy_set(src)
            for u in src.points:
                ends = w.image(u)
                self.origin[copy_of[u]] = ("base", ({u}, ends) if cs == A else (ends, {u}))
            sf, ss = self.split(S, cs)
            tf, ts = self.split(S, ct)
            ic_src = 1 if self.plain else 3 - sc
            ic_tgt = 1 if self.plain else sc
            Ssrc = StructuredSet(sf + ([I] if ic_src == 1 else []), ss + ([I] if ic_src == 2 else []))
            Stgt = StructuredSet(tf + ([I] if ic_tgt == 1 else []), ts + ([I] if ic_tgt == 2 else []))
            w_src = Embedding(src.id, I.id, {(u, copy_of[u]) for u in src.points})
            w_tgt = Embedding(I.id, tgt.id, {(copy_of[u], v) for u, v in w.relation})
            o = B if self.plain else (cs if ic_src == 1 else ct)
            node = _Node({cs: self.b[cs].add_initial(Ssrc, w_src),
                          ct: self.b[ct].add_initial(Stgt, w_tgt)}, I, o, fixed)
        if self.mode == "lk" and node.o == A and self._has_negation():
            self.flip(node, B)
        return node

    def _has_negation(self) -> bool:
        return (1, (2,), 1) in self.reg.pairs

    def flip(self, node: _Node, target: str) -> None:
        """Move the I-set across components with the negation pair."""
        if node.I is None or node.o == target:
            node.o = target
            return
        lary, unary = self.reg.pair(1, (2,), 1)
        o = node.o
        base = self.fresh.next_id
        ko = self.apply(o, unary, [node.halves[o]], [[(1, node.I.id)]], base)
        kn = self.apply(_other(o), lary, [node.halves[_other(o)]], [[(2, node.I.id)]], base)
        value = self.b[o].apps[-1].value
        assert value == self.b[_other(o)].apps[-1].value
        node.halves = {o: ko, _other(o): kn}
        node.I, node.o = value, target

    # -- inductive step ------------------------------------------------------

    def step(self, t: int, nodes: list, out: StructuredSet) -> _Node:
        step, app = self.d.steps[t], self.apps[t]
        op = self.d.resolve(step, logic_op)
        X = self.color(app.value.id)
        Y = _other(X)
        fixed = bool(out.second)
        is_imp = op.root.name == "ImpL"
        if any(X not in n.halves for n in nodes):
            raise EngineError("an argument is missing from its half")
        with_i = [h for h, n in enumerate(nodes) if n.I is not None]
        if self.mode == "lj":
            z = self.succ_color(out)
            o0 = z or next((nodes[h].o for h in reversed(with_i)), nodes[-1].o)
            for h in with_i:
                if nodes[h].o != o0 and not (is_imp and h == 0):
                    if nodes[h].fixed:
                        raise HypothesisViolated("a sequent with a succedent cannot change orientation")
                    self.flip(nodes[h], o0)
        else:
            o0 = nodes[with_i[-1]].o if with_i else B

        keys = [n.halves[X] for n in nodes]
        if len(with_i) <= 1:
            kX = self._wrap(lambda: self.apply(X, op, keys, step.args, step.fresh))
            if not with_i:
                return _Node({X: kX}, None, o0, fixed)
            n = nodes[with_i[0]]
            if self.mode == "lj" and is_imp and with_i[0] == 0 and n.o != o0:
                raise EngineError("implication premise oriented against its conclusion")
            return _Node({X: kX, Y: n.halves[Y]}, n.I, n.o, fixed)
        if len(with_i) < len(nodes):
            raise RegistryGap("duals with empty auxiliary inputs are not provided")

        cY = tuple(self.comp(nodes[h].o, Y) for h in with_i)
        pair, cY0 = None, None
        prefs = (B, A) if self.mode != "lj" else (o0,)
        for o in prefs:
            try:
                pair = self.reg.pair(len(with_i), cY, self.comp(o, Y))
                cY0, o0 = self.comp(o, Y), o
                break
            except RegistryGap:
                continue
        if pair is None:
            raise RegistryGap(f"no regular pair for components {cY}")
        lary, unary = pair
        if self.mode == "lj":
            saved = (copy.deepcopy(self.b), Fresh(self.fresh.next_id), dict(self.origin))
            try:
                node = self._dual_first(op, step, nodes, with_i, X, cY, cY0, lary, unary, fixed, o0)
                self.orderings.append("dual-first")
                return node
            except _Unrestricted:
                self.b, self.fresh, self.origin = saved
            try:
                node = self._rule_first(op, step, nodes, with_i, X, cY, lary, unary, fixed, o0)
                self.orderings.append("rule-first")
                return node
            except _Unrestricted as exc:
                raise NotRestricted(f"no restricted ordering for step {t}: {exc}") from None
        node = self._rule_first(op, step, nodes, with_i, X, cY, lary, unary, fixed, o0)
        self.orderings.append("rule-first")
        return node

    def _wrap(self, thunk):
        try:
            return thunk()
        except _Unrestricted as exc:
            raise NotRestricted(str(exc)) from None

    def _rule_first(self, op, step, nodes, with_i, X, cY, lary, unary, fixed, o0) -> _Node:
        Y = _other(X)
        kX = self.apply(X, op, [n.halves[X] for n in nodes], step.args, step.fresh)
        base = self.fresh.next_id
        sel = [(1 if self.plain else 3 - c, nodes[h].I.id) for h, c in zip(with_i, cY)]
        kX = self.apply(X, unary, [kX], [sel], base)
        kY = self.apply(Y, lary, [nodes[h].halves[Y] for h in with_i],
                        [[(c, nodes[h].I.id)] for h, c in zip(with_i, cY)], base)
        return _Node({X: kX, Y: kY}, self.b[Y].apps[-1].value, o0, fixed)

    def _dual_first(self, op, step, nodes, with_i, X, cY, cY0, lary, unary, fixed, o0) -> _Node:
        """Combine the I-sets inside every argument first, then contract the copies."""
        Y = _other(X)
        cX = [3 - c for c in cY]
        order = sorted(range(len(with_i)), key=lambda i: cX[i])
        slot = {i: order.index(i) for i in range(len(with_i))}
        copies = {(i, j): self.copy_set(nodes[with_i[j]].I)[0]
                  for i in range(len(with_i)) for j in range(len(with_i)) if i != j}
        base = self.fresh.next_id
        self.fresh.next_id += 1 + sum(len(nodes[h].I.points) for h in with_i)
        keys = [n.halves[X] for n in nodes]
        for i, h in enumerate(with_i):
            aux = [(0, slot[j], copies[(i, j)]) for j in range(len(with_i)) if j != i]
            derived = derive_operator(unary, 1, aux)
            keys[h] = self.apply(X, derived, [keys[h]], [[(cX[i], nodes[h].I.id)]], base)
        s0 = self.b[X].apps[-1].value
        kX = self.apply(X, op, keys, step.args, step.fresh)
        cX0 = 3 - cY0
        base = self.fresh.next_id
        kX = self.apply(X, self.reg.contraction(len(with_i), cX0), [kX], [[(cX0, s0.id)] * len(with_i)], base)
        kY = self.apply(Y, lary, [nodes[h].halves[Y] for h in with_i],
                        [[(c, nodes[h].I.id)] for h, c in zip(with_i, cY)], base)
        I = self.b[Y].apps[-1].value
        if I != self.b[X].apps[-1].value:
            raise EngineError("contracted value differs from the dual value")
        return _Node({X: kX, Y: kY}, I, o0, fixed)

    # -- driver ------------------------------------------------------------------

    def run(self) -> EngineResult:
        if self.mode == "lj":
            for S in [S for S, _ in self.d.initial] + [a.output for a in self.apps]:
                if not S.is_restricted():
                    raise NotRestricted(f"{S!r} is not restricted")
                self.succ_color(S)
        state, order = {}, []
        for k, (S, w) in enumerate(self.d.initial):
            state[k] = self.base(S, w)
            order.append(k)
        nxt = len(order)
        for t, step in enumerate(self.d.steps):
            ks = [order[i] for i in step.inputs]
            try:
                state[nxt] = self.step(t, [state[k] for k in ks], self.apps[t].output)
            except _Unrestricted as exc:
                raise NotRestricted(str(exc)) from None
            order = [k for k in order if k not in ks] + [nxt]
            nxt += 1
        root = state[order[0]]
        if self.mode == "lj" and root.I is not None and root.o != B:
            if root.fixed:
                raise HypothesisViolated("the succedent must lie in B")
            self.flip(root, B)
        halves = {X: self.b[X].derivation() if X in root.halves else None for X in (A, B)}
        traces = self.traces(root.I) if root.I is not None and A in root.halves else ()
        if self.plain:
            shape = "{A, I}, {B, I}"
        else:
            shape = "<A | I>, <I | B>" if root.o == B else "<A, I |>, <| B, I>"
        surjective = all(map(is_surjective, self.apps)) and \
            all(witness_surjective(S, w) for S, w in self.d.initial)
        return EngineResult(root.I, halves[A], halves[B], root.o, shape, traces,
                            self.final_colors, self.orderings, surjective)

    # -- traces --------------------------------------------------------------

    def traces(self, I: PointSet) -> tuple:
        back: dict = {}
        for app in self.b[A].apps:
            for e in app.embeddings:
                for a, b in e.relation:
                    back.setdefault(b, set()).add(a)
        fwd: dict = {}
        for app in self.apps:
            for e in app.embeddings:
                for a, b in e.relation:
                    fwd.setdefault(a, set()).add(b)
        final_pts = {p for _, s in self.space[0].sets() for p in s.points}

        def forward(p):
            if p in final_pts:
                return {p}
            out = set()
            for q in fwd.get(p, ()):
                out |= forward(q)
            return out

        def roots(z):
            if z in self.origin:
                kind, v = self.origin[z]
                return [v] if kind == "base" else roots(v)
            out = []
            for a in sorted(back.get(z, ())):
                out += roots(a)
            return out

        result = []
        for z in I.points:
            for a_ends, b_ends in roots(z):
                xs = set().union(*(forward(a) for a in a_ends))
                ys = set().union(*(forward(b) for b in b_ends))
                if xs and ys:
                    result.append((z, min(xs), min(ys)))
                    break
        return tuple(result)


# -- public entry points ---------------------------------------------------------

def interpolate_derivation(d: Derivation, reg: Optional[RegularPairRegistry] = None,
                           final_colors: Optional[dict] = None, normalize: bool = True) -> EngineResult:
    if d.plain:
        raise EngineError("plain collections go through interpolate_sets")
    reg = reg or logic_registry()
    return _Run(d, reg, final_colors, "lk" if normalize else "bipartite").run()


def interpolate_restricted(d: Derivation, reg: Optional[RegularPairRegistry] = None,
                           final_colors: Optional[dict] = None) -> EngineResult:
    if d.plain:
        raise EngineError("restricted sets are bipartite")
    reg = reg or logic_registry()
    return _Run(d, reg, final_colors, "lj").run()


def interpolate_sets(d: Derivation, reg: Optional[RegularPairRegistry] = None,
                     final_colors: Optional[dict] = None) -> EngineResult:
    if not d.plain or any(S.second for S, _ in d.initial):
        raise EngineError("bipartite input: use interpolate_derivation")
    reg = reg or sets_registry()
    if final_colors is None:
        final = d.final[0].first
        final_colors = {final[0].id: A, **{s.id: B for s in final[1:]}}
    return _Run(d, reg, final_colors, "sets").run()


def fold_constants(f: Formula) -> Formula:
    """Rewrite ~true to false and ~false to true, bottom up."""
    if isinstance(f, Not):
        c = fold_constants(f.child)
        if isinstance(c, Top):
            return BOTTOM
        if isinstance(c, Bottom):
            return TOP
        return Not(c)
    if isinstance(f, (And, Or, Implies)):
        return type(f)(fold_constants(f.left), fold_constants(f.right))
    return f


def engine_formula(result: EngineResult) -> Formula:
    """The interpolant as a formula; a missing I-set reads as false (all A) or true."""
    if result.interpolant is None:
        return BOTTOM if A in result.final_colors.values() else TOP
    if result.interpolant.formula is None:
        raise EngineError("plain interpolant sets carry no formula")
    return result.interpolant.formula


# -- empty interpolant ---------------------------------------------------------

def empty_interpolant_simplify(d: Derivation, result: EngineResult) -> tuple[str, Derivation]:
    """Derivation of the A-sets alone or the B-sets alone of the final set.

    A structured set is justified by the color it can be rebuilt in: an
    initial set by the color of its witness, a step output by the color of
    the first input justified against the value's color (that input's
    derivation, with the other inputs' sets of its color dragged along from an
    initial set), else by the value's color with the step replayed.
    """
    if result.interpolant is not None and result.interpolant.points:
        raise PreconditionViolated("the interpolant has points")
    if any(not w.relation for _, w in d.initial):
        raise PreconditionViolated("an initial set is trivial only through an empty embedding")
    space, apps = d.replay(logic_op)
    colors = result.final_colors
    parent = {a.id: app.value.id for app in apps for a in app.args}

    def color(sid):
        while sid not in colors:
            sid = parent[sid]
        return colors[sid]

    extras: dict = {}
    plans, order, live = {}, [], {}
    for k, (S, w) in enumerate(d.initial):
        cs, ct = color(w.source), color(w.target)
        if cs != ct:
            raise PreconditionViolated("an initial set joins an A-set to a B-set")
        plans[k] = (cs, ("init", k))
        order.append(k)
        live[k] = S
    nxt = len(order)

    def leftmost(tree):
        return tree[1] if tree[0] == "init" else leftmost(tree[2][0])

    for t, step in enumerate(d.steps):
        ks = [order[i] for i in step.inputs]
        X = color(apps[t].value.id)
        off = [i for i, k in enumerate(ks) if plans[k][0] != X]
        if off:
            Yc, tree = plans[ks[off[0]]]
            leaf = leftmost(tree)
            for i, k in enumerate(ks):
                if i != off[0]:
                    extras.setdefault(leaf, []).extend((c, s) for c, s in live[k].sets() if color(s.id) == Yc)
            plans[nxt] = (Yc, tree)
        else:
            plans[nxt] = (X, ("apply", t, [plans[k][1] for k in ks]))
        live[nxt] = apps[t].output
        order = [k for k in order if k not in ks] + [nxt]
        nxt += 1

    Yc, tree = plans[order[0]]
    b = Builder(d.plain)

    def build(tree):
        if tree[0] == "init":
            S, w = d.initial[tree[1]]
            more = extras.get(tree[1], [])
            S2 = StructuredSet([s for s in S.first if color(s.id) == Yc] + [s for c, s in more if c == 1],
                               [s for s in S.second if color(s.id) == Yc] + [s for c, s in more if c == 2])
            return b.add_initial(S2, w)
        _, t, kids = tree
        keys = [build(k) for k in kids]
        return b.apply(d.resolve(d.steps[t], logic_op), keys, d.steps[t].args, d.steps[t].fresh)

    build(tree)
    return Yc, b.derivation()
