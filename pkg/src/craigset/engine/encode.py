"""Proofs as derivations: atomic occurrences become points, formulas point sets,
axioms trivial structured sets and inferences operator applications."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..calculus import SCHEMAS, Proof, check_proof, iter_nodes, occurrence_map
from ..logic import OccurrencePath, Sequent
from ..maehara import Partition, node_colors
from .core import (
    Builder, Derivation, Embedding, EngineError, Fresh, StructuredSet, formula_set, transform,
)
from .operators import ADDITIVE, LOGIC_OPS, additive, logic_op

__all__ = ["Encoding", "NotEncodable", "lk_as_operators", "decode_derivation"]


class NotEncodable(EngineError):
    pass


@dataclass
class Encoding:
    derivation: Derivation
    final_colors: dict          # set id -> "A" | "B"
    occurrence_sets: dict       # (side, index) of the end sequent -> set id
    point_occurrence: dict      # point of a final set -> OccurrencePath


def _comp(side: str) -> int:
    return 1 if side == "ant" else 2


def _weak_targets(p: Proof, colors: dict, restricted: bool = False) -> dict:
    """weakening path -> leaf path receiving its formula.

    Post-order, so pushes from higher weakenings already color the nodes below
    them; descend into the leftmost child that has the formula's color, else
    the leftmost child.  With ``restricted`` a succedent formula prefers a
    child whose succedent has no other color, keeping LJ succedents one-colored.
    """
    nodes = dict(iter_nodes(p))
    seen = {path: set(c.values()) for path, c in colors.items()}
    seen_suc = {path: {v for (side, _), v in c.items() if side == "suc"} for path, c in colors.items()}
    out = {}

    def visit(path):
        node = nodes[path]
        for k in range(len(node.premises)):
            visit(path + (k,))
        if node.rule in ("WeakL", "WeakR"):
            side = SCHEMAS[node.rule][0]
            x = colors[path][(side, node.principal[0])]
            cur = path + (0,)
            while True:
                seen[cur].add(x)
                if side == "suc":
                    seen_suc[cur].add(x)
                if nodes[cur].rule == "Axiom":
                    break
                kids = [cur + (k,) for k in range(len(nodes[cur].premises))]
                pick = None
                if restricted and side == "suc":
                    pick = next((c for c in kids if seen_suc[c] <= {x}), None)
                cur = pick or next((c for c in kids if x in seen[c]), kids[0])
            out[path] = cur

    visit(())
    return out


def lk_as_operators(p: Proof, part: Optional[Partition] = None, system: str = "LK") -> Encoding:
    problems = check_proof(p, system)
    if problems:
        raise ValueError(f"not an {system} proof: {problems[0]}")
    part = part or Partition.default(p.conclusion)
    colors = node_colors(p, part)
    targets = _weak_targets(p, colors, system.upper() == "LJ")
    nodes = dict(iter_nodes(p))
    fresh = Fresh(1)
    pushed: dict = {}            # weakening path -> (component, PointSet)
    extras: dict = {}            # leaf path -> [(component, PointSet)]
    for wpath in sorted(targets, key=len):
        node = nodes[wpath]
        side = SCHEMAS[node.rule][0]
        s = formula_set(node.conclusion.side(side)[node.principal[0]], fresh)
        pushed[wpath] = (_comp(side), s)
        extras.setdefault(targets[wpath], []).append((_comp(side), s))

    b = Builder()

    def encode(path: tuple):
        """(builder key, {(side, i): set id}) for the node at ``path``."""
        node = nodes[path]
        concl = node.conclusion
        if node.rule == "Axiom":
            i, j = node.principal
            if i < 0 or j < 0:
                raise NotEncodable("constant axioms have no trivial structured set")
            sets = {(s, k): formula_set(f, fresh) for s, k, f in concl.occurrences()}
            more = extras.get(path, [])
            S = StructuredSet(
                [sets[("ant", k)] for k in range(len(concl.antecedent))] + [s for c, s in more if c == 1],
                [sets[("suc", k)] for k in range(len(concl.succedent))] + [s for c, s in more if c == 2])
            src, tgt = sets[("ant", i)], sets[("suc", j)]
            w = Embedding(src.id, tgt.id, {(a, c) for (_, a), (_, c) in zip(src.leaves, tgt.leaves)})
            return b.add_initial(S, w), {o: s.id for o, s in sets.items()}

        subs = [encode(path + (k,)) for k in range(len(node.premises))]
        main_side = SCHEMAS[node.rule][0]
        m = node.principal[0]
        mapping = occurrence_map(node)
        if node.rule in ("WeakL", "WeakR"):
            key, ids = subs[0]
            out = {(cs, ci): ids[(s, i)] for (_, s, i), (cs, ci, _) in mapping.items()}
            out[(main_side, m)] = pushed[path][1].id
            return key, out

        rule = node.rule
        aux = SCHEMAS[rule][2]
        selection = [[] for _ in node.premises]
        for (k, aside, _), idx in zip(aux, node.principal[1:]):
            selection[k].append((_comp(aside), subs[k][1][(aside, idx)]))
        if rule in ADDITIVE:
            main_f = concl.side(main_side)[m]
            _, slot = ADDITIVE[rule]
            op = additive(rule, formula_set(main_f.right if slot == 1 else main_f.left, fresh))
        else:
            op = LOGIC_OPS[rule]
        base = fresh.next_id
        key = b.apply(op, [subs[k][0] for k in range(len(subs))], selection, base)
        value = b.apps[-1].value
        fresh.next_id = max(fresh.next_id, base + 1 + len(value.points))
        out = {}
        for (k, s, i), (cs, ci, _) in mapping.items():
            out[(cs, ci)] = value.id if (cs, ci) == (main_side, m) else subs[k][1][(s, i)]
        return key, out

    _, ids = encode(())
    d = b.derivation()
    final_colors = {ids[o]: c for o, c in part.color.items()}
    final = d.final[0]
    by_id = {s.id: s for _, s in final.sets()}
    point_occ = {}
    for (side, idx), sid in ids.items():
        for leaf, pt in by_id[sid].leaves:
            point_occ[pt] = OccurrencePath(side, idx, leaf)
    return Encoding(d, final_colors, ids, point_occ)


# -- decoding -----------------------------------------------------------------

def _index(S: StructuredSet, comp: int, sid: int, used: set) -> int:
    for k, s in enumerate(S.component(comp)):
        if s.id == sid and (comp, k) not in used:
            used.add((comp, k))
            return k
    raise NotEncodable(f"set {sid} missing from component {comp}")


def _sequent(S: StructuredSet) -> Sequent:
    return Sequent(tuple(s.formula for s in S.first), tuple(s.formula for s in S.second))


def decode_derivation(d: Derivation) -> Proof:
    """Read a formula-tree derivation ending in one structured set as a proof."""
    space = []
    proofs = []
    for S, w in d.initial:
        src, tgt = S.find(w.source), S.find(w.target)
        if src is None or tgt is None or src[0] == tgt[0]:
            raise NotEncodable("witness does not cross components")
        (c1, s1), (_, s2) = sorted([src, tgt], key=lambda t: t[0])
        if s1.formula != s2.formula:
            raise NotEncodable("axiom sets carry different formulas")
        pr = (_index(S, 1, s1.id, set()), _index(S, 2, s2.id, set()))
        space.append(S)
        proofs.append(Proof("Axiom", _sequent(S), (), pr))
    for step in d.steps:
        op = d.resolve(step, logic_op)
        space2, app = transform(space, op, step.inputs, step.args, step.fresh)
        rule = step.op
        if step.kept is not None:
            slots = [k for _, k, _ in step.aux]
            rule = next((r for r, (b, k) in ADDITIVE.items() if b == step.op and [k] == slots), None)
            if rule is None:
                raise NotEncodable(f"derived {step.op} has no rule counterpart")
        premises = [proofs[i] for i in step.inputs]
        concl = app.output
        pr = [0]
        aux = SCHEMAS[rule][2]
        used: dict = {k: set() for k in range(len(premises))}
        sel = [sorted(s, key=lambda cs: cs[0]) for s in step.args]
        flat = [(k, c, sid) for k, s in enumerate(sel) for c, sid in s]
        for (k, aside, _), (kk, c, sid) in zip(aux, flat):
            pr.append(_index(space[step.inputs[kk]], c, sid, used[kk]))
        proofs = [q for i, q in enumerate(proofs) if i not in step.inputs] + \
            [Proof(rule, _sequent(concl), tuple(premises), tuple(pr))]
        space = space2
    if len(proofs) != 1:
        raise NotEncodable(f"derivation ends in {len(proofs)} structured sets")
    return proofs[0]
