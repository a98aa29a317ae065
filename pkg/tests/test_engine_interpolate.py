import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from craigset.calculus import axiom, check_proof, flow_graph, infer, uses_rule
from craigset.engine.core import Builder, Embedding, EngineError, Fresh, StructuredSet, plain_set
from craigset.engine.encode import NotEncodable, decode_derivation, lk_as_operators
from craigset.engine.interpolate import (
    HypothesisViolated, NotRestricted, PreconditionViolated, empty_interpolant_simplify,
    engine_formula, interpolate_derivation, interpolate_restricted, interpolate_sets,
)
from craigset.engine.operators import logic_op, merge
from craigset.gen import random_implication
from craigset.logic import BOTTOM, Atom, Sequent, parse_sequent, vars_of
from craigset.maehara import Partition, interpolate_lj, interpolate_lk
from craigset.prover import Verdict, prove_lj, prove_lk

from conftest import formulas
from oracle import tautology

p, q, r = Atom("p"), Atom("q"), Atom("r")


def run(text, part=None):
    pr = prove_lk(parse_sequent(text))
    enc = lk_as_operators(pr, part)
    return pr, enc, interpolate_derivation(enc.derivation, final_colors=enc.final_colors)


def test_axiom_split_gives_singleton():
    _, _, res = run("p => p")
    assert len(res.interpolant.points) == 1 and res.interpolant.formula == p
    res.left.replay(logic_op)
    res.right.replay(logic_op)
    assert res.shape == "<A | I>, <I | B>"


def test_all_a_trivial_gives_pointless_interpolant():
    _, _, res = run("p & ~p => q")
    assert res.interpolant.points == ()
    assert engine_formula(res) == BOTTOM


def test_running_example_matches_maehara():
    pr, _, res = run("p & q => q | r")
    assert engine_formula(res) == q == interpolate_lk(pr).interpolant


def test_halves_decode_to_proofs_of_the_halves():
    pr, _, res = run("p -> q, q -> r => p -> r")
    I = engine_formula(res)
    left, right = decode_derivation(res.left), decode_derivation(res.right)
    assert check_proof(left) == [] and check_proof(right) == []
    ab = parse_sequent("p -> q, q -> r => p -> r")
    assert left.conclusion == Sequent(ab.antecedent, (I,))
    assert right.conclusion == Sequent((I,), ab.succedent)


def test_restricted_example():
    pr = prove_lj(parse_sequent("p & q => p"))
    enc = lk_as_operators(pr, Partition.from_a_part(pr.conclusion, {("ant", 0)}), "LJ")
    res = interpolate_restricted(enc.derivation, final_colors=enc.final_colors)
    assert engine_formula(res) == p


def test_restricted_contraction_ordering():
    pr = prove_lj(parse_sequent("p -> q, q -> r => p -> r"))
    enc = lk_as_operators(pr, Partition.from_a_part(pr.conclusion, {("ant", 0)}), "LJ")
    res = interpolate_restricted(enc.derivation, final_colors=enc.final_colors)
    assert engine_formula(res) == interpolate_lj(pr, [0]).interpolant
    assert res.orderings
    for half in (res.left, res.right):
        space, apps = half.replay(logic_op)
        assert all(a.output.is_restricted() for a in apps)


def test_two_distinct_second_sets_not_restricted():
    pr = prove_lk(parse_sequent("=> p | ~p"))
    enc = lk_as_operators(pr)
    with pytest.raises(NotRestricted):
        interpolate_restricted(enc.derivation, final_colors=enc.final_colors)


def test_split_second_component_violates_hypothesis():
    pr = infer("WeakR", [axiom(p)], (), p)            # p => p, p
    part = Partition({("ant", 0): "A", ("suc", 0): "A", ("suc", 1): "B"})
    enc = lk_as_operators(pr, part, "LJ")
    with pytest.raises(HypothesisViolated):
        interpolate_restricted(enc.derivation, final_colors=enc.final_colors)


def _plain_join():
    f = Fresh(1)
    b = Builder(plain=True)
    a1, b1, a2, b2 = plain_set(2, f), plain_set(2, f), plain_set(1, f), plain_set(1, f)
    k1 = b.add_initial(StructuredSet([a1, b1], []), Embedding(a1.id, b1.id, set(zip(a1.points, b1.points))))
    k2 = b.add_initial(StructuredSet([a2, b2], []), Embedding(a2.id, b2.id, set(zip(a2.points, b2.points))))
    b.apply(merge(2), [k1, k2], [[(1, a1.id)], [(1, a2.id)]], f.next_id)
    v = b.apps[-1].value
    return b.derivation(), {v.id: "A", b1.id: "B", b2.id: "B"}, (b1, b2)


def test_sets_shared_points():
    d, colors, (b1, b2) = _plain_join()
    res = interpolate_sets(d, final_colors=colors)
    assert len(res.interpolant.points) == len(b1.points) + len(b2.points)
    space_a = res.left.replay(logic_op)[0]
    space_b = res.right.replay(logic_op)[0]
    assert res.interpolant in space_a[0].first and res.interpolant in space_b[0].first
    # every I point traces to a shared pair
    assert {z for z, _, _ in res.traces} == set(res.interpolant.points)
    assert {y for _, _, y in res.traces} == set(b1.points) | set(b2.points)


def test_sets_all_a():
    d, colors, _ = _plain_join()
    res = interpolate_sets(d, final_colors={k: "A" for k in colors})
    assert res.interpolant is None or res.interpolant.points == ()


def test_sets_reject_bipartite_input():
    _, enc, _ = run("p => p")
    with pytest.raises(EngineError):
        interpolate_sets(enc.derivation)


def test_empty_simplify_weakened_succedent():
    pr, enc, res = run("p & ~p => q")
    color, d = empty_interpolant_simplify(enc.derivation, res)
    assert color == "A"
    out = decode_derivation(d)
    assert check_proof(out) == [] and out.conclusion == parse_sequent("p & ~p =>")
    assert not isinstance(prove_lk(out.conclusion), Verdict)


def test_empty_simplify_b_side():
    pr, enc, res = run("q => p | ~p")
    color, d = empty_interpolant_simplify(enc.derivation, res)
    assert color == "B" and decode_derivation(d).conclusion == parse_sequent("=> p | ~p")


def test_empty_simplify_precondition():
    _, enc, res = run("p => p")
    with pytest.raises(PreconditionViolated):
        empty_interpolant_simplify(enc.derivation, res)


def test_constant_axioms_are_not_encodable():
    with pytest.raises(NotEncodable):
        lk_as_operators(prove_lk(parse_sequent("=> true")))


def test_encode_decode_round_trip():
    for text in ["p & q => q | r", "p | p => p", "(p -> q) -> p => p", "~(p & q) => ~p | ~q"]:
        pr = prove_lk(parse_sequent(text))
        back = decode_derivation(lk_as_operators(pr).derivation)
        assert check_proof(back) == [] and back.conclusion == pr.conclusion


def test_lj_contraction_becomes_contraction_step():
    pr = prove_lj(parse_sequent("p -> p -> q, p => q"))
    enc = lk_as_operators(pr, system="LJ")
    ops = [s.op for s in enc.derivation.steps]
    assert any(o.startswith("Contr") for o in ops) == uses_rule(pr, {"ContrL", "ContrR"})


@settings(max_examples=120, deadline=None)
@given(formulas(max_leaves=8, constants=False), formulas(max_leaves=8, constants=False))
def test_cross_engine_agreement(a, b):
    assume(tautology([a], [b]))
    pr = prove_lk(Sequent((a,), (b,)))
    enc = lk_as_operators(pr)
    res = interpolate_derivation(enc.derivation, final_colors=enc.final_colors)
    assert engine_formula(res) == interpolate_lk(pr).interpolant
    for half in (res.left, res.right):
        if half is not None:
            half.replay(logic_op)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_surjective_traces_are_flow_edges(seed):
    rng = random.Random(seed)
    while True:
        a, b = random_implication(rng, 4, 4)
        pr = prove_lk(Sequent((a,), (b,)))
        if not uses_rule(pr, {"WeakL", "WeakR"}):
            break
    enc = lk_as_operators(pr)
    res = interpolate_derivation(enc.derivation, final_colors=enc.final_colors)
    if res.interpolant is None:
        return
    g = flow_graph(pr)
    assert {z for z, _, _ in res.traces} == set(res.interpolant.points)
    for _, x, y in res.traces:
        assert g.has_edge(enc.point_occurrence[x], enc.point_occurrence[y])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_restricted_engine_triple(seed):
    rng = random.Random(seed)
    while True:
        a, b = random_implication(rng, 3, 4)
        pr = prove_lj(Sequent((a,), (b,)))
        if isinstance(pr, Verdict):
            continue
        enc = lk_as_operators(pr, system="LJ")
        try:
            res = interpolate_restricted(enc.derivation, final_colors=enc.final_colors)
            break
        except (NotRestricted, HypothesisViolated):
            # weakenings pushed to leaves can break the restriction; see the ledger
            continue
    I = engine_formula(res)
    assert I == interpolate_lj(pr, [0]).interpolant
    assert vars_of(I) <= vars_of(a) & vars_of(b)
    assert not isinstance(prove_lj(Sequent((a,), (I,))), Verdict)
    assert not isinstance(prove_lj(Sequent((I,), (b,))), Verdict)


def test_surjectivity_is_checked_per_step():
    _, _, res = run("p, q => p & q")
    assert res.surjective
    _, _, res = run("p & q => q")            # additive AndL fills a slot with an auxiliary set
    assert not res.surjective
    # the trace clause still holds for the points that do have preimages
    pr, enc, res = run("p & q => q")
    g = flow_graph(pr)
    assert all(g.has_edge(enc.point_occurrence[x], enc.point_occurrence[y]) for _, x, y in res.traces)
