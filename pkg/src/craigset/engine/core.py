"""Point sets, structured sets, embeddings, operators and derivations."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..logic import Formula, atom_leaves, parse_formula, to_text

__all__ = [
    "PointSet", "StructuredSet", "Embedding", "OperatorSpec", "Step", "Derivation",
    "Application", "Fresh", "Builder", "EngineError", "ArgumentMissing", "ComponentMismatch",
    "ArityMismatch", "NonReplayableDerivation",
    "formula_set", "empty_set", "plain_set", "validate_embedding", "validate_trivial",
    "apply_operator", "derive_operator", "is_surjective", "witness_surjective", "transform", "replay",
    "derivation_to_json", "derivation_from_json", "space_dot",
]


class EngineError(ValueError):
    pass


class ArgumentMissing(EngineError):
    pass


class ComponentMismatch(EngineError):
    pass


class ArityMismatch(EngineError):
    pass


class NonReplayableDerivation(EngineError):
    pass


class Fresh:
    """Deterministic id counter; points and sets share one namespace."""

    def __init__(self, start: int):
        self.next_id = start

    def __call__(self) -> int:
        self.next_id += 1
        return self.next_id - 1


@dataclass(frozen=True)
class PointSet:
    id: int
    points: tuple = ()
    formula: Optional[Formula] = None
    leaves: tuple = ()          # ((leaf path, point), ...) in atom_leaves order

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(sorted(self.points)))
        if self.formula is not None:
            paths = [path for path, _ in atom_leaves(self.formula)]
            if [path for path, _ in self.leaves] != paths:
                raise EngineError(f"leaf map of set {self.id} does not match its formula")
            if sorted(pt for _, pt in self.leaves) != list(self.points) or \
                    len(set(self.points)) != len(self.points):
                raise EngineError(f"set {self.id}: each leaf needs its own point")

    @property
    def structure(self) -> str:
        return "plain" if self.formula is None else "formula-tree"

    def same_shape(self, other: "PointSet") -> bool:
        """Copies of one set: same formula, or same size for plain sets."""
        if self.formula is not None or other.formula is not None:
            return self.formula == other.formula
        return len(self.points) == len(other.points)

    def label(self) -> str:
        if self.formula is not None:
            return to_text(self.formula)
        return "{" + ",".join(map(str, self.points)) + "}"


def formula_set(f: Formula, fresh: Fresh) -> PointSet:
    sid = fresh()
    leaves = tuple((path, fresh()) for path, _ in atom_leaves(f))
    return PointSet(sid, tuple(pt for _, pt in leaves), f, leaves)


def empty_set(fresh: Fresh, formula: Optional[Formula] = None) -> PointSet:
    return PointSet(fresh(), (), formula, ())


def plain_set(n: int, fresh: Fresh) -> PointSet:
    sid = fresh()
    return PointSet(sid, tuple(fresh() for _ in range(n)))


@dataclass(frozen=True)
class Embedding:
    source: int
    target: int
    relation: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "relation", frozenset(self.relation))

    def image(self, point: int) -> set:
        return {t for s, t in self.relation if s == point}


def validate_embedding(e: Embedding, src: PointSet, tgt: PointSet) -> list[str]:
    problems = []
    if (e.source, e.target) != (src.id, tgt.id):
        problems.append(f"embedding {e.source}->{e.target} attached to sets {src.id}->{tgt.id}")
    sp, tp = set(src.points), set(tgt.points)
    if any(s not in sp or t not in tp for s, t in e.relation):
        problems.append("relation mentions points outside its sets")
    missing = sp - {s for s, _ in e.relation}
    if missing:
        problems.append(f"not defined on source points {sorted(missing)}")
    return problems


@dataclass(frozen=True, eq=False)
class StructuredSet:
    """Bipartite collection <first | second>; each component is a multiset."""

    first: tuple = ()
    second: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "first", tuple(self.first))
        object.__setattr__(self, "second", tuple(self.second))

    def component(self, c: int) -> tuple:
        return self.first if c == 1 else self.second

    def sets(self):
        for s in self.first:
            yield 1, s
        for s in self.second:
            yield 2, s

    def find(self, set_id: int) -> Optional[tuple]:
        for c, s in self.sets():
            if s.id == set_id:
                return c, s
        return None

    def is_restricted(self) -> bool:
        return all(s.same_shape(self.second[0]) for s in self.second)

    def __eq__(self, other):
        if not isinstance(other, StructuredSet):
            return NotImplemented
        return Counter(self.first) == Counter(other.first) and Counter(self.second) == Counter(other.second)

    def __hash__(self):
        return hash((tuple(sorted(s.id for s in self.first)), tuple(sorted(s.id for s in self.second))))

    def __repr__(self) -> str:
        left = ", ".join(s.label() for s in self.first)
        right = ", ".join(s.label() for s in self.second)
        return f"<{left} | {right}>"


def validate_trivial(s: StructuredSet, witness: Embedding, plain: bool = False) -> list[str]:
    """Empty list when ``witness`` makes ``s`` trivial."""
    problems = []
    if plain:
        if len(s.first) + len(s.second) < 2:
            problems.append("a trivial collection needs two sets")
    elif not s.first or not s.second:
        problems.append("the components of a trivial structured set are non-empty")
    src, tgt = s.find(witness.source), s.find(witness.target)
    if src is None or tgt is None:
        problems.append("witness sets are not in the structured set")
        return problems
    if not plain and src[0] == tgt[0]:
        problems.append("witness connects sets in the same component")
    if witness.source == witness.target:
        problems.append("witness must join two distinct sets")
    problems += validate_embedding(witness, src[1], tgt[1])
    return problems


@dataclass(frozen=True)
class OperatorSpec:
    """Operator as data.

    ``signature`` holds (j1, j2) per input; ``build(args, fresh)`` returns the
    value set and the embeddings of every argument into it, with args given
    input by input, first-component arguments before second-component ones.
    """

    name: str
    signature: tuple
    value_component: int
    build: Callable = field(compare=False, repr=False)
    surjective: bool = True
    base: Optional["OperatorSpec"] = field(default=None, compare=False, repr=False)
    kept: Optional[int] = None
    aux: tuple = ()             # ((input, slot, PointSet), ...) filled in on the base

    def __post_init__(self):
        if any(j1 + j2 <= 0 for j1, j2 in self.signature):
            raise ArityMismatch(f"{self.name}: every input needs an argument")

    @property
    def arity(self) -> int:
        return len(self.signature)

    @property
    def subarity(self) -> int:
        return sum(j1 + j2 for j1, j2 in self.signature)

    @property
    def root(self) -> "OperatorSpec":
        return self if self.base is None else self.base.root


@dataclass
class Application:
    output: StructuredSet
    value: PointSet
    args: list                  # PointSets consumed, in builder order
    embeddings: list            # one per argument
    bystanders: list            # ids of sets carried over by identity


def apply_operator(op: OperatorSpec, inputs: list, selection: list, fresh_base: int) -> Application:
    """Apply ``op``; ``selection`` lists (component, set id) per input."""
    if len(inputs) != op.arity or len(selection) != op.arity:
        raise ArgumentMissing(f"{op.name} takes {op.arity} inputs")
    args, rest1, rest2 = [], [], []
    for S, sel, (j1, j2) in zip(inputs, selection, op.signature):
        sel = sorted(sel, key=lambda cs: cs[0])
        counts = Counter(c for c, _ in sel)
        if counts[1] + counts[2] != j1 + j2:
            raise ArgumentMissing(f"{op.name} expects {j1 + j2} arguments per input, got {len(sel)}")
        if (counts[1], counts[2]) != (j1, j2):
            raise ComponentMismatch(f"{op.name} expects ({j1}, {j2}) arguments by component")
        comps = {1: list(S.first), 2: list(S.second)}
        for c, sid in sel:
            hit = next((k for k, s in enumerate(comps[c]) if s.id == sid), None)
            if hit is None:
                if any(s.id == sid for s in comps[3 - c]):
                    raise ComponentMismatch(f"set {sid} is not in component {c}")
                raise ArgumentMissing(f"set {sid} is not available")
            args.append(comps[c].pop(hit))
        rest1 += comps[1]
        rest2 += comps[2]
    value, embeddings = op.build(args, Fresh(fresh_base))
    first = ([value] if op.value_component == 1 else []) + rest1
    second = ([value] if op.value_component == 2 else []) + rest2
    return Application(StructuredSet(first, second), value, args, embeddings,
                       [s.id for s in rest1 + rest2])


def is_surjective(app: Application) -> bool:
    """Every value point lies in the image of some argument."""
    hit = {t for e in app.embeddings for _, t in e.relation}
    return set(app.value.points) <= hit


def witness_surjective(S: StructuredSet, w: Embedding) -> bool:
    tgt = S.find(w.target)
    return tgt is not None and set(tgt[1].points) <= {t for _, t in w.relation}


def derive_operator(base: OperatorSpec, kept: int, auxiliaries) -> OperatorSpec:
    """Fix some arguments of ``base`` (and every argument of inputs >= kept).

    ``auxiliaries`` are (input, slot, PointSet) with ``slot`` indexing the
    input's ordered argument list; empty sets are fine.
    """
    if not 1 <= kept <= base.arity:
        raise ArityMismatch(f"cannot keep {kept} of {base.arity} inputs")
    aux = tuple(sorted(auxiliaries, key=lambda a: (a[0], a[1])))
    slots = {(h, k) for h, k, _ in aux}
    if len(slots) != len(aux):
        raise ArityMismatch("two auxiliaries fill the same slot")
    sig = []
    for h, (j1, j2) in enumerate(base.signature):
        mine = {k for hh, k in slots if hh == h}
        if any(k >= j1 + j2 for k in mine):
            raise ArityMismatch(f"slot out of range for input {h}")
        if h >= kept:
            if len(mine) != j1 + j2:
                raise ArityMismatch(f"dropped input {h} must be filled by auxiliaries")
            continue
        d1 = sum(1 for k in mine if k < j1)
        sig.append((j1 - d1, j2 - (len(mine) - d1)))

    def build(args, fresh):
        full, it = [], iter(args)
        for h, (j1, j2) in enumerate(base.signature):
            given = {k: s for hh, k, s in aux if hh == h}
            for k in range(j1 + j2):
                full.append(given[k] if k in given else next(it))
        value, embs = base.build(full, fresh)
        aux_ids = {s.id for _, _, s in aux}
        return value, [e for e in embs if e.source not in aux_ids]

    return OperatorSpec(base.name, tuple(sig), base.value_component, build,
                        base.surjective, base, kept, aux)


def transform(space: list, op: OperatorSpec, inputs: tuple, selection, fresh_base: int):
    """One transformation: the output replaces its inputs at the end of the space."""
    if len(set(inputs)) != len(inputs) or any(not 0 <= i < len(space) for i in inputs):
        raise NonReplayableDerivation(f"bad input indices {inputs}")
    app = apply_operator(op, [space[i] for i in inputs], selection, fresh_base)
    rest = [s for i, s in enumerate(space) if i not in inputs]
    return rest + [app.output], app


# -- derivations -------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    op: str
    inputs: tuple
    args: tuple                  # per input: ((component, set id), ...)
    fresh: int
    kept: Optional[int] = None
    aux: tuple = ()


@dataclass
class Derivation:
    initial: list                # [(StructuredSet, Embedding)]
    steps: list
    final: list
    plain: bool = False

    def resolve(self, step: Step, catalog) -> OperatorSpec:
        try:
            op = catalog(step.op) if callable(catalog) else catalog[step.op]
        except KeyError:
            raise NonReplayableDerivation(f"unknown operator {step.op}") from None
        if step.kept is not None:
            op = derive_operator(op, step.kept, step.aux)
        return op

    def replay(self, catalog) -> tuple[list, list]:
        """(final space, applications); checks witnesses and the stored final."""
        space = []
        for S, w in self.initial:
            problems = validate_trivial(S, w, self.plain)
            if problems:
                raise NonReplayableDerivation(f"initial set {S!r}: {problems[0]}")
            space.append(S)
        apps = []
        for step in self.steps:
            try:
                space, app = transform(space, self.resolve(step, catalog), step.inputs,
                                       step.args, step.fresh)
            except EngineError as exc:
                if isinstance(exc, NonReplayableDerivation):
                    raise
                raise NonReplayableDerivation(str(exc)) from exc
            apps.append(app)
        if [(S.first, S.second) for S in space] != [(S.first, S.second) for S in self.final]:
            raise NonReplayableDerivation("replay does not reproduce the final space")
        return space, apps


def replay(d: Derivation, catalog) -> list:
    return d.replay(catalog)[0]


class Builder:
    """Grows a derivation, addressing structured sets by stable keys.

    Initial sets may be added at any time; positions are worked out when the
    derivation is read off, with every initial set present from the start.
    """

    def __init__(self, plain: bool = False):
        self.initial: list = []          # (key, StructuredSet, witness)
        self.steps: list = []            # (op, keys, selection, fresh, output key)
        self.live: dict = {}             # key -> StructuredSet
        self.apps: list = []
        self.plain = plain
        self._next_key = 0

    def _key(self) -> int:
        self._next_key += 1
        return self._next_key - 1

    def add_initial(self, S: StructuredSet, witness: Embedding) -> int:
        k = self._key()
        self.initial.append((k, S, witness))
        self.live[k] = S
        return k

    def get(self, key: int) -> StructuredSet:
        return self.live[key]

    def apply(self, op: OperatorSpec, keys: list, selection, fresh_base: int) -> int:
        app = apply_operator(op, [self.live[k] for k in keys], selection, fresh_base)
        for k in keys:
            del self.live[k]
        out = self._key()
        self.live[out] = app.output
        self.steps.append((op, tuple(keys), tuple(tuple(s) for s in selection), fresh_base, out))
        self.apps.append(app)
        return out

    def derivation(self) -> Derivation:
        order = [k for k, _, _ in self.initial]
        steps = []
        for op, keys, selection, fresh_base, out in self.steps:
            idx = tuple(order.index(k) for k in keys)
            base = op.base.name if op.base is not None else op.name
            steps.append(Step(base, idx, selection, fresh_base, op.kept, op.aux))
            order = [k for k in order if k not in keys] + [out]
        return Derivation([(S, w) for _, S, w in self.initial], steps,
                          [self.live[k] for k in order], self.plain)


# -- serialization ------------------------------------------------------------

def _set_to(s: PointSet) -> dict:
    return {"id": s.id, "points": list(s.points),
            "formula": None if s.formula is None else to_text(s.formula),
            "leaves": [[list(p), pt] for p, pt in s.leaves]}


def _set_from(d: dict) -> PointSet:
    f = None if d["formula"] is None else parse_formula(d["formula"])
    return PointSet(d["id"], tuple(d["points"]), f, tuple((tuple(p), pt) for p, pt in d["leaves"]))


def _ss_to(S: StructuredSet) -> dict:
    return {"first": [_set_to(s) for s in S.first], "second": [_set_to(s) for s in S.second]}


def _ss_from(d: dict) -> StructuredSet:
    return StructuredSet([_set_from(s) for s in d["first"]], [_set_from(s) for s in d["second"]])


def derivation_to_json(d: Derivation, indent: Optional[int] = 2) -> str:
    doc = {
        "plain": d.plain,
        "initial": [{"set": _ss_to(S), "witness": {"source": w.source, "target": w.target,
                                                     "relation": sorted(map(list, w.relation))}}
                    for S, w in d.initial],
        "steps": [{"op": s.op, "inputs": list(s.inputs),
                   "args": [[list(a) for a in sel] for sel in s.args], "fresh": s.fresh,
                   "kept": s.kept, "aux": [[h, k, _set_to(p)] for h, k, p in s.aux]}
                  for s in d.steps],
        "final": [_ss_to(S) for S in d.final],
    }
    return json.dumps(doc, indent=indent)


def derivation_from_json(text: str) -> Derivation:
    doc = json.loads(text)
    initial = [(_ss_from(e["set"]), Embedding(e["witness"]["source"], e["witness"]["target"],
                                              {tuple(p) for p in e["witness"]["relation"]}))
               for e in doc["initial"]]
    steps = [Step(s["op"], tuple(s["inputs"]), tuple(tuple(tuple(a) for a in sel) for sel in s["args"]),
                  s["fresh"], s.get("kept"), tuple((h, k, _set_from(p)) for h, k, p in s.get("aux", [])))
             for s in doc["steps"]]
    return Derivation(initial, steps, [_ss_from(S) for S in doc["final"]], doc.get("plain", False))


def space_dot(space: list, embeddings=(), name: str = "space") -> str:
    """Graphviz rendering: one cluster per structured set, one per component."""
    out = [f"digraph {name} {{", "  compound=true;", "  node [shape=box];"]
    for n, S in enumerate(space):
        out.append(f"  subgraph cluster_{n} {{ label=\"S{n}\";")
        for c in (1, 2):
            out.append(f"    subgraph cluster_{n}_{c} {{ label=\"{'first' if c == 1 else 'second'}\";")
            for k, s in enumerate(S.component(c)):
                label = s.label().replace('"', r'\"')
                out.append(f"      s{n}_{c}_{k} [label=\"{label} #{s.id}\"];")
            out.append("    }")
        out.append("  }")
    where = {s.id: f"s{n}_{c}_{k}" for n, S in enumerate(space)
             for c in (1, 2) for k, s in enumerate(S.component(c))}
    for e in embeddings:
        if e.source in where and e.target in where:
            pairs = ",".join(f"{a}>{b}" for a, b in sorted(e.relation))
            out.append(f"  {where[e.source]} -> {where[e.target]} [style=dashed, label=\"{pairs}\"];")
    out.append("}")
    return "\n".join(out)
