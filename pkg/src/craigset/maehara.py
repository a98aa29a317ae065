"""Interpolant extraction by induction on cut-free LK and LJ proofs.

Every occurrence in the proof gets the color of its end-sequent descendant
(weakened occurrences included), and each node yields a partial interpolant:
``None`` stands for a node whose sequent is all one color.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Union

from .calculus import (
    Proof, check_proof, descendant_map, iter_nodes, occurrence_map, uses_rule,
)
from .logic import (
    BOTTOM, TOP, And, Atom, Bottom, Formula, Implies, Not, OccurrencePath, Or,
    Sequent, Top, atom_leaves,
)
from .prover import SearchBudget, Verdict, prove_lj, prove_lk

__all__ = [
    "Partition", "InterpolationCertificate", "Trace", "InterpolationError",
    "PartitionError", "LJRestrictionError", "HypothesisViolated",
    "NoReplacementAvailable", "TraceUnavailable",
    "interpolate_lk", "interpolate_lj", "normalize_constants", "trace_atoms",
    "node_colors",
]

A, B = "A", "B"


class InterpolationError(RuntimeError):
    pass


class PartitionError(ValueError):
    pass


class LJRestrictionError(ValueError):
    pass


class HypothesisViolated(ValueError):
    pass


class NoReplacementAvailable(ValueError):
    pass


class TraceUnavailable(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    """Color of every end-sequent occurrence, keyed by (side, index)."""

    color: dict

    @classmethod
    def default(cls, s: Sequent) -> "Partition":
        """Antecedent in the A-part, succedent in the B-part."""
        return cls({(side, i): (A if side == "ant" else B) for side, i, _ in s.occurrences()})

    @classmethod
    def from_a_part(cls, s: Sequent, a_part: Iterable) -> "Partition":
        a_part = set(a_part)
        occ = {(side, i) for side, i, _ in s.occurrences()}
        if not a_part <= occ:
            raise PartitionError(f"occurrences {sorted(a_part - occ)} are not in {s}")
        return cls({o: (A if o in a_part else B) for o in occ})

    def check_total(self, s: Sequent) -> None:
        occ = {(side, i) for side, i, _ in s.occurrences()}
        missing = occ - set(self.color)
        if missing:
            raise PartitionError(f"partition leaves {sorted(missing)} uncolored")
        bad = {c for c in self.color.values()} - {A, B}
        if bad:
            raise PartitionError(f"unknown colors {sorted(bad)}")

    def parts(self, s: Sequent) -> tuple[Sequent, Sequent]:
        def pick(c):
            return Sequent(tuple(f for i, f in enumerate(s.antecedent) if self.color[("ant", i)] == c),
                           tuple(f for i, f in enumerate(s.succedent) if self.color[("suc", i)] == c))
        return pick(A), pick(B)


class Trace(NamedTuple):
    i_path: tuple              # position of the atom inside the interpolant
    atom: str
    a_occ: OccurrencePath      # end-sequent occurrence in the A-part
    b_occ: OccurrencePath      # end-sequent occurrence in the B-part


@dataclass(frozen=True)
class InterpolationCertificate:
    interpolant: Formula
    proof_left: Proof          # A-part with I added to its succedent
    proof_right: Proof         # I added to the antecedent of the B-part
    a_part: Sequent
    b_part: Sequent
    system: str = "LK"
    traces: Optional[tuple] = None
    weakening_free: bool = field(default=True)


def node_colors(p: Proof, part: Partition) -> dict:
    """node path -> {(side, index): color} for every node of ``p``."""
    part.check_total(p.conclusion)
    out = {(): dict(part.color)}
    for path, node in iter_nodes(p):
        below = out[path]
        for (k, s, i), (cs, ci, _) in occurrence_map(node).items():
            out.setdefault(path + (k,), {})[(s, i)] = below[(cs, ci)]
        for k in range(len(node.premises)):
            out.setdefault(path + (k,), {})
    return out


def _other(c: str) -> str:
    return B if c == A else A


# -- shared pieces -----------------------------------------------------------

class _Ctx:
    def __init__(self, p: Proof, part: Partition, want_traces: bool):
        self.colors = node_colors(p, part)
        self.desc = descendant_map(p) if want_traces else None

    def origins_of_axiom(self, path: tuple, node: Proof, col: dict) -> list:
        """Trace origins for the leaves of C at an A/B-split axiom."""
        if self.desc is None:
            return []
        i, j = node.principal
        f = node.conclusion.antecedent[i]
        down = self.desc[path]
        out = []
        for leaf, name in atom_leaves(f):
            u, w = OccurrencePath("ant", i, leaf), OccurrencePath("suc", j, leaf)
            if col[("ant", i)] == B:
                u, w = w, u
            out.append((name, min(down[u]), min(down[w])))
        return out


def _traces(formula: Formula, origins: list) -> tuple:
    leaves = atom_leaves(formula)
    assert len(leaves) == len(origins)
    return tuple(Trace(path, name, a, b) for (path, name), (_, a, b) in zip(leaves, origins))


def _prove_half(s: Sequent, system: str, budget: Optional[SearchBudget]) -> Proof:
    res = prove_lk(s) if system == "LK" else prove_lj(s, budget)
    if isinstance(res, Verdict):
        raise InterpolationError(f"half sequent {s} not provable ({res})")
    return res


def _certificate(p, part, I, origins, system, budget) -> InterpolationCertificate:
    a_part, b_part = part.parts(p.conclusion)
    weak_free = not uses_rule(p, {"WeakL", "WeakR"})
    left = Sequent(a_part.antecedent, a_part.succedent + (I,))
    right = Sequent((I,) + b_part.antecedent, b_part.succedent)
    return InterpolationCertificate(
        I, _prove_half(left, system, budget), _prove_half(right, system, budget),
        a_part, b_part, system, _traces(I, origins) if weak_free else None, weak_free)


# -- LK ----------------------------------------------------------------------

def _lk(node: Proof, path: tuple, ctx: _Ctx):
    """(interpolant or None, origins); None means a one-colored sequent."""
    col = ctx.colors[path]
    present = set(col.values())
    if node.rule == "Axiom":
        i, j = node.principal
        if i < 0 or j < 0:
            x = col[("suc", j)] if i < 0 else col[("ant", i)]
            if len(present) < 2:
                return None, []
            return (BOTTOM if x == A else TOP), []
        a, b = col[("ant", i)], col[("suc", j)]
        f = node.conclusion.antecedent[i]
        if a == b:
            if len(present) < 2:
                return None, []
            return (BOTTOM if a == A else TOP), []
        origins = ctx.origins_of_axiom(path, node, col)
        return (f, origins) if a == A else (Not(f), origins)

    subs = [_lk(q, path + (k,), ctx) for k, q in enumerate(node.premises)]
    if node.rule in ("WeakL", "WeakR"):
        I, origins = subs[0]
        if I is None:
            before = set(ctx.colors[path + (0,)].values())
            if len(present) == 2 and len(before) == 1:
                (y,) = before
                return (BOTTOM if y == A else TOP), []
        return I, origins
    if len(subs) == 1:
        return subs[0]
    (i1, o1), (i2, o2) = subs
    if i1 is None:
        return i2, o2
    if i2 is None:
        return i1, o1
    side = "ant" if node.rule in ("OrL", "ImpL") else "suc"
    main = col[(side, node.principal[0])]
    return (Or(i1, i2) if main == A else And(i1, i2)), o1 + o2


def interpolate_lk(p: Proof, part: Optional[Partition] = None) -> InterpolationCertificate:
    """Maehara interpolant of ``p`` for ``part`` (default: antecedent | succedent)."""
    problems = check_proof(p, "LK")
    if problems:
        raise ValueError(f"not an LK proof: {problems[0]}")
    part = part or Partition.default(p.conclusion)
    ctx = _Ctx(p, part, want_traces=True)
    I, origins = _lk(p, (), ctx)
    if I is None:
        a_part, _ = part.parts(p.conclusion)
        I = BOTTOM if a_part.antecedent or a_part.succedent else TOP
    return _certificate(p, part, I, origins, "LK", None)


# -- LJ ----------------------------------------------------------------------
# A node's orientation o is the color of its succedent ("sink").  o == B reads
# Gamma_A => I and I, Gamma_B => Delta; o == A swaps the roles.  Nodes with an
# empty succedent are free and may flip orientation by negating I.

class _LJRes(NamedTuple):
    I: Optional[Formula]
    o: str
    fixed: bool
    origins: list


def _succ_color(node: Proof, col: dict) -> Optional[str]:
    cs = {col[("suc", j)] for j in range(len(node.conclusion.succedent))}
    if len(cs) > 1:
        raise HypothesisViolated(f"succedent of {node.conclusion} spans both parts")
    return cs.pop() if cs else None


def _orient(r: _LJRes, target: str) -> _LJRes:
    if r.I is None or r.o == target:
        return r._replace(o=target)
    if r.fixed:
        raise HypothesisViolated("cannot flip the orientation of a sequent with a succedent")
    return _LJRes(Not(r.I), target, r.fixed, r.origins)


def _lj(node: Proof, path: tuple, ctx: _Ctx) -> _LJRes:
    col = ctx.colors[path]
    present = set(col.values())
    z = _succ_color(node, col)
    fixed = z is not None
    if node.rule == "Axiom":
        i, j = node.principal
        if i < 0 or j < 0:
            x = col[("suc", j)] if i < 0 else col[("ant", i)]
            o = z or x
            if len(present) < 2:
                return _LJRes(None, o, fixed, [])
            return _LJRes(TOP if x == o else BOTTOM, o, fixed, [])
        a = col[("ant", i)]
        f = node.conclusion.antecedent[i]
        if a == z:
            return _LJRes(TOP if len(present) == 2 else None, z, fixed, [])
        return _LJRes(f, z, fixed, ctx.origins_of_axiom(path, node, col))

    subs = [_lj(q, path + (k,), ctx) for k, q in enumerate(node.premises)]
    if node.rule in ("WeakL", "WeakR"):
        r = subs[0]
        before = set(ctx.colors[path + (0,)].values())
        if r.I is None and len(present) == 2 and len(before) == 1:
            (y,) = before
            o = z or y
            return _LJRes(TOP if y == o else BOTTOM, o, fixed, [])
        return _orient(r, z or r.o)._replace(fixed=fixed)
    if len(subs) == 1:
        return _orient(subs[0], z or subs[0].o)._replace(fixed=fixed)

    r1, r2 = subs
    rule = node.rule
    main = col[("ant" if rule in ("OrL", "ImpL") else "suc", node.principal[0])]
    o = z or (r2.o if r2.I is not None else r1.o)
    r2 = _orient(r2, o)
    if rule != "ImpL":
        r1 = _orient(r1, o)
    if r1.I is None and r2.I is None:
        return _LJRes(None, o, fixed, [])
    if r1.I is None:
        return _LJRes(r2.I, o, fixed, r2.origins)
    if r2.I is None:
        if rule == "ImpL" and r1.o != o:
            raise InterpolationError("ImpL left premise oriented against its conclusion")
        return _LJRes(r1.I, o, fixed, r1.origins)
    if main == o:
        I = And(r1.I, r2.I)
    elif rule == "ImpL":
        I = Implies(r1.I, r2.I)
    else:
        I = Or(r1.I, r2.I)
    return _LJRes(I, o, fixed, r1.origins + r2.origins)


def interpolate_lj(p: Proof, split: Union[Partition, Iterable[int]],
                   budget: Optional[SearchBudget] = None) -> InterpolationCertificate:
    """Interpolant for an LJ proof of Gamma1, Gamma2 => C.

    ``split`` is a partition with the succedent in the B-part, or the
    antecedent indices that form Gamma1.
    """
    problems = check_proof(p, "LJ")
    if problems:
        raise LJRestrictionError(f"input violates the LJ restriction: {problems[0]}")
    s = p.conclusion
    if not isinstance(split, Partition):
        split = Partition.from_a_part(s, {("ant", i) for i in split})
    split.check_total(s)
    if any(split.color[("suc", j)] != B for j in range(len(s.succedent))):
        raise PartitionError("the succedent must lie in the B-part")
    ctx = _Ctx(p, split, want_traces=True)
    r = _lj(p, (), ctx)
    if r.I is None:
        a_part, _ = split.parts(s)
        I, origins = (BOTTOM if a_part.antecedent else TOP), []
    else:
        r = _orient(r, B)
        I, origins = r.I, r.origins
    return _certificate(p, split, I, origins, "LJ", budget or SearchBudget())


# -- post-processing -------------------------------------------------------

def _replace_constants(f: Formula, bot: Formula, top: Formula) -> Formula:
    if isinstance(f, Bottom):
        return bot
    if isinstance(f, Top):
        return top
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(_replace_constants(f.child, bot, top))
    return type(f)(_replace_constants(f.left, bot, top), _replace_constants(f.right, bot, top))


def _has_constants(f: Formula) -> bool:
    if isinstance(f, (Top, Bottom)):
        return True
    if isinstance(f, Atom):
        return False
    if isinstance(f, Not):
        return _has_constants(f.child)
    return _has_constants(f.left) or _has_constants(f.right)


def normalize_constants(cert: InterpolationCertificate, lang: Iterable[str]) -> InterpolationCertificate:
    """Swap true/false for q -> q and q & ~q over the least atom q of ``lang``."""
    if not _has_constants(cert.interpolant):
        return cert
    lang = sorted(lang)
    if not lang:
        raise NoReplacementAvailable("no shared atom to express the constants with")
    q = Atom(lang[0])
    I = _replace_constants(cert.interpolant, And(q, Not(q)), Implies(q, q))
    left = Sequent(cert.a_part.antecedent, cert.a_part.succedent + (I,))
    right = Sequent((I,) + cert.b_part.antecedent, cert.b_part.succedent)
    budget = SearchBudget() if cert.system == "LJ" else None
    # new atoms in I come from the replacements and have no end-sequent trace
    return InterpolationCertificate(
        I, _prove_half(left, cert.system, budget), _prove_half(right, cert.system, budget),
        cert.a_part, cert.b_part, cert.system, None, cert.weakening_free)


def trace_atoms(cert: InterpolationCertificate, p: Proof, part: Optional[Partition] = None) -> tuple:
    """Pair every atom of the interpolant with linked A- and B-part occurrences."""
    if uses_rule(p, {"WeakL", "WeakR"}):
        raise TraceUnavailable("the proof uses weakening")
    if cert.traces is None:
        raise TraceUnavailable("the certificate carries no traces")
    return cert.traces
