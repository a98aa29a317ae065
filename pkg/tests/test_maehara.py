import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from craigset.calculus import axiom, check_proof, flow_graph, infer, iter_nodes, node_count
from craigset.logic import (
    BOTTOM, TOP, And, Atom, Implies, Not, OccurrencePath, Sequent, parse_formula, parse_sequent,
    size, vars_of,
)
from craigset.maehara import (
    InterpolationCertificate, LJRestrictionError, NoReplacementAvailable, Partition, PartitionError,
    TraceUnavailable, interpolate_lj, interpolate_lk, node_colors, normalize_constants, trace_atoms,
)
from craigset.prover import Verdict, prove_lj, prove_lk

from conftest import all_formulas, formulas
from oracle import tautology

p, q, r = Atom("p"), Atom("q"), Atom("r")
O = OccurrencePath


def lk(text):
    return prove_lk(parse_sequent(text))


def lj(text):
    return prove_lj(parse_sequent(text))


def test_axiom_split():
    c = interpolate_lk(lk("p => p"))
    assert c.interpolant == p
    assert [tuple(t) for t in c.traces] == [((), "p", O("ant", 0), O("suc", 0))]


def test_running_example_is_q():
    c = interpolate_lk(lk("p & q => q | r"))
    assert c.interpolant == q
    # brute force: no interpolant over the shared language {q} is smaller
    a, b = parse_formula("p & q"), parse_formula("q | r")
    found = [f for f in all_formulas([q], 2) if tautology([a], [f]) and tautology([f], [b])]
    assert min(map(size, found)) == size(q) == 1


def test_contradiction_gives_bottom():
    c = interpolate_lk(lk("p & ~p => q"))
    assert c.interpolant == BOTTOM
    assert tautology([parse_formula("p & ~p")], [BOTTOM]) and tautology([BOTTOM], [q])


def test_tautology_gives_top():
    assert interpolate_lk(lk("q => p | ~p")).interpolant == TOP


def test_axiom_table():
    # both principals A -> false, both B -> true, A left / B right -> C, B left / A right -> ~C
    pr = axiom(p, left=(q,), right=(q,))               # p, q => p, q
    col = lambda *a: Partition.from_a_part(pr.conclusion, a)
    assert interpolate_lk(pr, col(("ant", 0), ("suc", 0))).interpolant == BOTTOM
    assert interpolate_lk(pr, col(("ant", 1), ("suc", 1))).interpolant == TOP
    assert interpolate_lk(pr, col(("ant", 0))).interpolant == p
    assert interpolate_lk(pr, col(("suc", 0))).interpolant == Not(p)


def test_binary_combination():
    # AndR with the value in B: conjunction of the premise interpolants
    assert interpolate_lk(lk("p, q => p & q")).interpolant == And(p, q)
    # OrR on the A side reached through a split partition
    pr = lk("p | q => p, q")
    c = interpolate_lk(pr, Partition.from_a_part(pr.conclusion, {("ant", 0)}))
    assert tautology([parse_formula("p | q")], [c.interpolant])
    assert c.interpolant == parse_formula("p | q")


def test_partition_must_be_total():
    pr = lk("p => p")
    with pytest.raises(PartitionError):
        interpolate_lk(pr, Partition({("ant", 0): "A"}))


def test_lj_examples():
    assert interpolate_lj(lj("p & q => p"), [0]).interpolant == p
    assert interpolate_lj(lj("p, p -> q => q"), [0]).interpolant == p
    c = interpolate_lj(lj("p & q => p"), [])
    assert c.interpolant == TOP


def test_lj_halves_are_lj_proofs():
    c = interpolate_lj(lj("p -> q, q -> r => p -> r"), [0])
    assert c.interpolant == Implies(p, q)
    assert check_proof(c.proof_left, "LJ") == [] and check_proof(c.proof_right, "LJ") == []


def test_lj_rejects_classical_proofs():
    with pytest.raises(LJRestrictionError):
        interpolate_lj(lk("=> p | ~p"), [])


def test_lj_succedent_must_be_b():
    pr = lj("p => p")
    with pytest.raises(PartitionError):
        interpolate_lj(pr, Partition({("ant", 0): "A", ("suc", 0): "A"}))


def test_normalize_constants():
    c = interpolate_lk(lk("p & ~p => q"))
    n = normalize_constants(c, {"q"})
    assert n.interpolant == And(q, Not(q))
    assert check_proof(n.proof_left) == [] and check_proof(n.proof_right) == []
    top = interpolate_lk(lk("q => p | ~p"))
    assert normalize_constants(top, {"p", "q"}).interpolant == Implies(p, p)
    plain = interpolate_lk(lk("p => p"))
    assert normalize_constants(plain, {"z"}) is plain
    with pytest.raises(NoReplacementAvailable):
        normalize_constants(top, set())


def test_traces_on_weakening_free_proof():
    pr = lk("p & q => q & q")
    assert not any(n.rule.startswith("Weak") for _, n in iter_nodes(pr))
    c = interpolate_lk(pr)
    # AndR over two q-axioms: one conjunct per premise
    assert c.interpolant == And(q, q)
    g = flow_graph(pr)
    ts = trace_atoms(c, pr)
    assert len(ts) == 2
    for t in ts:
        assert t.atom == "q" and g.has_edge(t.a_occ, t.b_occ)


def test_traces_need_weakening_free_proof():
    pr = infer("WeakR", [axiom(p)], (), q)
    c = interpolate_lk(pr)
    with pytest.raises(TraceUnavailable):
        trace_atoms(c, pr)


def test_node_colors_follow_ancestry():
    pr = lk("p & q => q | r")
    cols = node_colors(pr, Partition.default(pr.conclusion))
    for path, node in iter_nodes(pr):
        if node.rule == "Axiom":
            assert cols[path] == {("ant", 0): "A", ("suc", 0): "B"}


def _check_triple(c: InterpolationCertificate, system="LK"):
    a, b = c.a_part, c.b_part
    I = c.interpolant
    assert vars_of(I) <= a.vars() & b.vars()
    assert tautology(a.antecedent, a.succedent + (I,))
    assert tautology((I,) + b.antecedent, b.succedent)
    assert check_proof(c.proof_left, system) == [] and check_proof(c.proof_right, system) == []


@settings(max_examples=150, deadline=None)
@given(formulas(max_leaves=8), formulas(max_leaves=8))
def test_lk_triple(a, b):
    assume(tautology([a], [b]))
    pr = prove_lk(Sequent((a,), (b,)))
    c = interpolate_lk(pr)
    _check_triple(c)
    assert size(c.interpolant) <= 2 * node_count(pr)
    assert interpolate_lk(pr) == c


@settings(max_examples=100, deadline=None)
@given(st.lists(formulas(max_leaves=5), min_size=1, max_size=3),
       st.lists(formulas(max_leaves=5), max_size=2), st.data())
def test_lk_triple_random_partitions(ant, suc, data):
    s = Sequent(tuple(ant), tuple(suc))
    assume(tautology(s.antecedent, s.succedent))
    pr = prove_lk(s)
    occ = [(side, i) for side, i, _ in pr.conclusion.occurrences()]
    chosen = data.draw(st.sets(st.sampled_from(occ)))
    _check_triple(interpolate_lk(pr, Partition.from_a_part(pr.conclusion, chosen)))


@settings(max_examples=80, deadline=None)
@given(st.lists(formulas(max_leaves=5, constants=False), min_size=1, max_size=3),
       formulas(max_leaves=5, constants=False), st.data())
def test_lj_triple(ant, goal, data):
    s = Sequent(tuple(ant), (goal,))
    pr = prove_lj(s)
    assume(not isinstance(pr, Verdict))
    split = data.draw(st.sets(st.sampled_from(range(len(ant)))))
    _check_triple(interpolate_lj(pr, split), "LJ")


def _crosses(pr, part):
    cols = node_colors(pr, part)
    for path, node in iter_nodes(pr):
        if node.rule == "Axiom" and min(node.principal) >= 0:
            i, j = node.principal
            if cols[path][("ant", i)] != cols[path][("suc", j)]:
                return True
    return False


@settings(max_examples=100, deadline=None)
@given(formulas(atoms=[p, q], max_leaves=6), formulas(atoms=[r, Atom("s")], max_leaves=6))
def test_empty_interpolant_clause(a, b):
    assume(tautology([a], [b]))
    pr = prove_lk(Sequent((a,), (b,)))
    part = Partition.default(pr.conclusion)
    c = interpolate_lk(pr, part)
    assert c.interpolant in (TOP, BOTTOM)
    assert not _crosses(pr, part)
    a_alone = prove_lk(Sequent((a,), ()))
    b_alone = prove_lk(Sequent((), (b,)))
    assert not isinstance(a_alone, Verdict) or not isinstance(b_alone, Verdict)
