"""Cut-free propositional LK/LJ: rule schemas, proof trees, checking, logical links.

A proof node stores its conclusion, the rule id, its premises and ``principal``,
a tuple of explicit occurrence indices:

* ``Axiom``: ``(i, j)`` with ``antecedent[i] == succedent[j]``; the constant
  axioms use ``(-1, j)`` for ``=> true`` and ``(i, -1)`` for ``false =>``.
* every other rule: ``(main, aux_1, ..., aux_n)`` where ``main`` indexes the
  conclusion side the rule acts on and the ``aux`` indices point into the
  premise sides listed in :data:`SCHEMAS`.

Side formulas are matched between premises and conclusion as multisets, first
unused equal occurrence first, so duplicates never need disambiguation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .logic import (
    BOTTOM, TOP, And, Bottom, Formula, Implies, Not, OccurrencePath, Or,
    Sequent, Top, atom_leaves, parse_sequent, to_text,
)

__all__ = [
    "RULES", "SCHEMAS", "LJ_RULES", "Proof", "Violation", "Link", "FlowGraph",
    "ProofFormatError", "check_proof", "per_rule_links", "flow_graph", "descendant_map",
    "occurrence_map", "node_count", "iter_nodes", "uses_rule",
    "axiom", "top_axiom", "bottom_axiom", "infer",
    "proof_to_json", "proof_from_json", "proof_to_dict", "proof_from_dict",
    "flow_graph_dot", "proof_dot",
]


class ProofFormatError(ValueError):
    pass


# rule -> (main side, connective or None, aux list of (premise, side, role))
SCHEMAS: dict[str, tuple] = {
    "NotL": ("ant", Not, [(0, "suc", "down")]),
    "NotR": ("suc", Not, [(0, "ant", "down")]),
    "AndL-mult": ("ant", And, [(0, "ant", "left"), (0, "ant", "right")]),
    "AndL-add-left": ("ant", And, [(0, "ant", "left")]),
    "AndL-add-right": ("ant", And, [(0, "ant", "right")]),
    "AndR": ("suc", And, [(0, "suc", "left"), (1, "suc", "right")]),
    "OrL": ("ant", Or, [(0, "ant", "left"), (1, "ant", "right")]),
    "OrR-mult": ("suc", Or, [(0, "suc", "left"), (0, "suc", "right")]),
    "OrR-add-left": ("suc", Or, [(0, "suc", "left")]),
    "OrR-add-right": ("suc", Or, [(0, "suc", "right")]),
    "ImpL": ("ant", Implies, [(0, "suc", "left"), (1, "ant", "right")]),
    "ImpR": ("suc", Implies, [(0, "ant", "left"), (0, "suc", "right")]),
    "WeakL": ("ant", None, []),
    "WeakR": ("suc", None, []),
    "ContrL": ("ant", None, [(0, "ant", "same"), (0, "ant", "same")]),
    "ContrR": ("suc", None, [(0, "suc", "same"), (0, "suc", "same")]),
}
RULES = frozenset(SCHEMAS) | {"Axiom"}
# LJ uses every rule; what separates it is the succedent restriction.
LJ_RULES = RULES
_BINARY = {"AndR", "OrL", "ImpL"}


def _arity(rule: str) -> int:
    if rule == "Axiom":
        return 0
    return 2 if rule in _BINARY else 1


@dataclass(frozen=True)
class Proof:
    rule: str
    conclusion: Sequent
    premises: tuple = ()
    principal: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))
        object.__setattr__(self, "principal", tuple(self.principal))


@dataclass(frozen=True)
class Violation:
    node: tuple          # path of premise indices from the root
    expected: str
    found: str

    def __str__(self) -> str:
        where = "/".join(map(str, self.node)) or "root"
        return f"[{where}] expected {self.expected}; found {self.found}"


@dataclass(frozen=True)
class Link:
    """Atomic link from an upper occurrence to a lower one.

    ``premise`` is the premise index, or ``None`` for the axiom link that
    joins the two principal occurrences of an axiom.
    """

    premise: Optional[int]
    upper: OccurrencePath
    lower: OccurrencePath


def iter_nodes(p: Proof, path: tuple = ()):
    yield path, p
    for k, q in enumerate(p.premises):
        yield from iter_nodes(q, path + (k,))


def node_count(p: Proof) -> int:
    return sum(1 for _ in iter_nodes(p))


def uses_rule(p: Proof, rules: Iterable[str]) -> bool:
    rules = set(rules)
    return any(q.rule in rules for _, q in iter_nodes(p))


# -- local schema matching -------------------------------------------------

def _aux_formula(main: Formula, role: str) -> Formula:
    if role == "same":
        return main
    if role == "down":
        return main.child
    return getattr(main, role)


def _local_check(node: Proof) -> tuple[list[tuple[str, str]], dict]:
    """Return (problems, mapping) for one inference.

    ``mapping`` sends (premise, side, index) to (side, index, path prefix)
    in the conclusion.
    """
    rule, concl, prem, pr = node.rule, node.conclusion, node.premises, node.principal
    if rule not in RULES:
        return [("a known rule", rule)], {}
    if len(prem) != _arity(rule):
        return [(f"{_arity(rule)} premises for {rule}", str(len(prem)))], {}
    if rule == "Axiom":
        if len(pr) != 2:
            return [("principal (i, j)", repr(pr))], {}
        i, j = pr
        try:
            if i >= 0 and j >= 0:
                if concl.antecedent[i] != concl.succedent[j]:
                    return [("A, G => D, A", str(concl))], {}
            elif i < 0 and j >= 0:
                if not isinstance(concl.succedent[j], Top):
                    return [("G => D, true", str(concl))], {}
            elif j < 0 and i >= 0:
                if not isinstance(concl.antecedent[i], Bottom):
                    return [("false, G => D", str(concl))], {}
            else:
                return [("a principal occurrence", repr(pr))], {}
        except IndexError:
            return [("principal indices inside the sequent", repr(pr))], {}
        return [], {}

    main_side, conn, aux = SCHEMAS[rule]
    if len(pr) != 1 + len(aux):
        return [(f"{1 + len(aux)} principal indices for {rule}", repr(pr))], {}
    m = pr[0]
    side = concl.side(main_side)
    if not 0 <= m < len(side):
        return [("main index inside the conclusion", repr(pr))], {}
    main = side[m]
    if conn is not None and not isinstance(main, conn):
        return [(f"main formula built with {conn.__name__}", to_text(main))], {}

    mapping: dict = {}
    used = set()
    for (k, aside, role), idx in zip(aux, pr[1:]):
        pside = prem[k].conclusion.side(aside)
        if not 0 <= idx < len(pside) or (k, aside, idx) in used:
            return [(f"distinct auxiliary index in premise {k}", repr(pr))], {}
        want = _aux_formula(main, role)
        if pside[idx] != want:
            return [(f"auxiliary {to_text(want)}", to_text(pside[idx]))], {}
        used.add((k, aside, idx))
        prefix = () if role == "same" else (role,)
        mapping[(k, aside, idx)] = (main_side, m, prefix)

    # side formulas: conclusion context minus the main occurrence
    free = {s: [(i, f) for i, f in enumerate(concl.side(s)) if not (s == main_side and i == m)]
            for s in ("ant", "suc")}
    taken = {s: [False] * len(free[s]) for s in free}
    for k, q in enumerate(prem):
        for s, i, f in q.conclusion.occurrences():
            if (k, s, i) in used:
                continue
            for slot, (ci, cf) in enumerate(free[s]):
                if not taken[s][slot] and cf == f:
                    taken[s][slot] = True
                    mapping[(k, s, i)] = (s, ci, ())
                    break
            else:
                return [(f"side formula {to_text(f)} present below", str(concl))], {}
    leftover = [to_text(free[s][slot][1]) for s in free for slot, t in enumerate(taken[s]) if not t]
    if leftover:
        return [("no unexplained formulas in the conclusion", ", ".join(leftover))], {}
    return [], mapping


def occurrence_map(node: Proof) -> dict:
    problems, mapping = _local_check(node)
    if problems:
        raise ValueError(f"ill-formed {node.rule} inference: {problems[0]}")
    return mapping


def _lj_ok(s: Sequent) -> bool:
    return len(set(s.succedent)) <= 1


def check_proof(p: Proof, system: str = "LK") -> list[Violation]:
    """Every violation in the tree; an empty list means the proof checks."""
    system = system.upper()
    if system not in ("LK", "LJ"):
        raise ValueError(f"unknown system {system!r}")
    out = []
    for path, node in iter_nodes(p):
        for expected, found in _local_check(node)[0]:
            out.append(Violation(path, expected, found))
        if system == "LJ" and not _lj_ok(node.conclusion):
            out.append(Violation(path, "LJ succedent (copies of one formula)", str(node.conclusion)))
    return out


# -- logical links and flow graphs -----------------------------------------

def per_rule_links(node: Proof) -> set[Link]:
    if node.rule == "Axiom":
        i, j = node.principal
        if i < 0 or j < 0:
            return set()
        f = node.conclusion.antecedent[i]
        return {Link(None, OccurrencePath("ant", i, path), OccurrencePath("suc", j, path))
                for path, _ in atom_leaves(f)}
    links = set()
    for (k, s, i), (cs, ci, prefix) in occurrence_map(node).items():
        f = node.premises[k].conclusion.side(s)[i]
        for path, _ in atom_leaves(f):
            links.add(Link(k, OccurrencePath(s, i, path), OccurrencePath(cs, ci, prefix + path)))
    return links


@dataclass
class FlowGraph:
    vertices: list
    atoms: dict                     # OccurrencePath -> atom name
    edges: set = field(default_factory=set)   # frozenset({x, y})

    def partners(self, v: OccurrencePath) -> set:
        return {w for e in self.edges if v in e for w in e if w != v}

    def has_edge(self, x, y) -> bool:
        return frozenset((x, y)) in self.edges


def _end_atoms(s: Sequent) -> dict:
    out = {}
    for side, i, f in s.occurrences():
        for path, name in atom_leaves(f):
            out[OccurrencePath(side, i, path)] = name
    return out


def descendant_map(p: Proof) -> dict:
    """node path -> {atomic occurrence of that node -> end-sequent occurrences}.

    Composes the per-rule links downwards; weakened material maps to nothing
    above its weakening.
    """
    out: dict = {}

    def walk(node: Proof, path: tuple, down: dict):
        out[path] = down
        if node.rule == "Axiom":
            return
        per_premise = [dict() for _ in node.premises]
        for link in per_rule_links(node):
            per_premise[link.premise].setdefault(link.upper, set()).update(down.get(link.lower, ()))
        for k, (q, d) in enumerate(zip(node.premises, per_premise)):
            walk(q, path + (k,), d)

    walk(p, (), {v: {v} for v in _end_atoms(p.conclusion)})
    return out


def flow_graph(p: Proof) -> FlowGraph:
    atoms = _end_atoms(p.conclusion)
    edges: set = set()
    desc = descendant_map(p)
    for path, node in iter_nodes(p):
        if node.rule != "Axiom":
            continue
        down = desc[path]
        for link in per_rule_links(node):
            for x in down.get(link.upper, ()):
                for y in down.get(link.lower, ()):
                    edges.add(frozenset((x, y)))
    return FlowGraph(sorted(atoms), atoms, edges)


def flow_graph_dot(g: FlowGraph, name: str = "flow") -> str:
    lines = [f"graph {name} {{"]
    ids = {}
    for n, v in enumerate(g.vertices):
        ids[v] = f"n{n}"
        label = f"{v}:{g.atoms[v]}"
        lines.append(f'  n{n} [label="{label}"];')
    for e in sorted(tuple(sorted(e)) for e in g.edges):
        lines.append(f"  {ids[e[0]]} -- {ids[e[1]]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- construction helpers --------------------------------------------------

def axiom(f: Formula, left=(), right=()) -> Proof:
    return Proof("Axiom", Sequent((f, *left), (f, *right)), (), (0, 0))


def top_axiom() -> Proof:
    return Proof("Axiom", Sequent((), (TOP,)), (), (-1, 0))


def bottom_axiom() -> Proof:
    return Proof("Axiom", Sequent((BOTTOM,), ()), (), (0, -1))


def _build_main(rule: str, auxf: list, other: Optional[Formula]) -> Formula:
    conn = SCHEMAS[rule][1]
    if rule in ("NotL", "NotR"):
        return Not(auxf[0])
    if rule.endswith("add-left"):
        return conn(auxf[0], other)
    if rule.endswith("add-right"):
        return conn(other, auxf[0])
    return conn(auxf[0], auxf[1])


def infer(rule: str, premises, aux=(), formula: Optional[Formula] = None) -> Proof:
    """Apply ``rule`` below ``premises``; the main formula goes first on its side.

    ``aux`` are the auxiliary indices (schema order).  ``formula`` is the
    weakened formula for WeakL/WeakR and the missing disjunct/conjunct for
    the additive rules.
    """
    premises = list(premises)
    main_side, conn, spec = SCHEMAS[rule]
    aux = tuple(aux)
    auxf = [premises[k].conclusion.side(s)[i] for (k, s, _), i in zip(spec, aux)]
    if rule in ("WeakL", "WeakR"):
        main = formula
    elif rule in ("ContrL", "ContrR"):
        main = auxf[0]
    else:
        main = _build_main(rule, auxf, formula)
    skip = {(k, s, i) for (k, s, _), i in zip(spec, aux)}
    ctx = {"ant": [], "suc": []}
    for k, q in enumerate(premises):
        for s, i, f in q.conclusion.occurrences():
            if (k, s, i) not in skip:
                ctx[s].append(f)
    ctx[main_side].insert(0, main)
    return Proof(rule, Sequent(ctx["ant"], ctx["suc"]), premises, (0, *aux))


# -- JSON ------------------------------------------------------------------

def proof_to_dict(p: Proof) -> dict:
    return {
        "rule": p.rule,
        "conclusion": str(p.conclusion),
        "principal": list(p.principal),
        "premises": [proof_to_dict(q) for q in p.premises],
    }


def proof_from_dict(d: dict) -> Proof:
    try:
        rule = d["rule"]
        if rule not in RULES:
            raise ProofFormatError(f"unknown rule {rule!r}")
        return Proof(rule, parse_sequent(d["conclusion"]),
                     tuple(proof_from_dict(q) for q in d.get("premises", [])),
                     tuple(int(i) for i in d.get("principal", [])))
    except (KeyError, TypeError) as exc:
        raise ProofFormatError(f"malformed proof node: {exc}") from None


def proof_to_json(p: Proof, indent: Optional[int] = 2) -> str:
    return json.dumps(proof_to_dict(p), indent=indent)


def proof_from_json(text: str) -> Proof:
    return proof_from_dict(json.loads(text))


def proof_dot(p: Proof, name: str = "proof") -> str:
    """Proof tree with edges from each premise to its conclusion."""
    lines = [f"digraph {name} {{", "  node [shape=plaintext];"]
    ids = {}
    for path, node in iter_nodes(p):
        n = ids[path] = f"n{len(ids)}"
        label = f"{node.conclusion}  [{node.rule}]".replace('"', r"\"")
        lines.append(f'  {n} [label="{label}"];')
        if path:
            lines.append(f"  {n} -> {ids[path[:-1]]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
