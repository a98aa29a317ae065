import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from craigset.calculus import (
    Link, Proof, ProofFormatError, axiom, check_proof, descendant_map, flow_graph, flow_graph_dot,
    infer, iter_nodes, per_rule_links, proof_from_json, proof_to_json,
)
from craigset.logic import And, Atom, Not, OccurrencePath, Or, Sequent, is_valid_classical, parse_sequent
from craigset.prover import prove_lk

from conftest import formulas

p, q, r = Atom("p"), Atom("q"), Atom("r")
O = OccurrencePath


def test_axiom_with_context_checks():
    node = Proof("Axiom", parse_sequent("p, q => q, p"), (), (0, 1))
    assert check_proof(node, "LK") == []


def test_axiom_with_wrong_principal_pair():
    node = Proof("Axiom", parse_sequent("p, q => q, p"), (), (0, 0))
    assert check_proof(node, "LK")


def test_and_right_joins_contexts():
    pr = infer("AndR", [axiom(p), axiom(q)], (0, 0))
    assert pr.conclusion == parse_sequent("p, q => p & q")
    assert check_proof(pr, "LK") == []


def test_lj_rejects_two_distinct_succedent_formulas():
    pr = axiom(p, right=(q,))
    assert check_proof(pr, "LK") == []
    bad = check_proof(pr, "LJ")
    assert len(bad) == 1 and "LJ succedent" in bad[0].expected


def test_lj_allows_copies_of_one_formula():
    pr = infer("WeakR", [axiom(p)], (), p)
    assert check_proof(pr, "LJ") == []


def test_schema_mismatch_is_reported_with_path():
    good = infer("NotR", [axiom(p)], (0,))
    bad = Proof("NotR", parse_sequent("=> ~q, p"), good.premises, good.principal)
    vs = check_proof(Proof("WeakL", parse_sequent("r => ~q, p"), (bad,), (0,)))
    assert vs and vs[0].node == (0,)


def test_unknown_rule_rejected_from_json():
    with pytest.raises(ProofFormatError):
        proof_from_json('{"rule": "Cut", "conclusion": "p => p", "principal": [], "premises": []}')


def test_json_round_trip():
    pr = prove_lk(parse_sequent("p -> q, q -> r => p -> r"))
    assert proof_from_json(proof_to_json(pr)) == pr


def test_axiom_link():
    links = per_rule_links(axiom(p))
    assert links == {Link(None, O("ant", 0), O("suc", 0))}


def test_weakened_formula_has_no_premise_links():
    pr = infer("WeakR", [axiom(p)], (), q)
    lowers = {l.lower for l in per_rule_links(pr)}
    assert O("suc", 0) not in lowers          # q is first in the succedent
    assert lowers == {O("ant", 0), O("suc", 1)}


def test_contraction_links_two_to_one():
    one = infer("AndL-add-left", [axiom(p)], (0,), q)            # p & q => p
    two = infer("WeakL", [one], (), And(p, q))                     # p & q, p & q => p
    pr = infer("ContrL", [two], (0, 1))
    links = per_rule_links(pr)
    into = {}
    for l in links:
        into.setdefault(l.lower, set()).add(l.upper)
    assert into[O("ant", 0, ("left",))] == {O("ant", 0, ("left",)), O("ant", 1, ("left",))}
    assert into[O("ant", 0, ("right",))] == {O("ant", 0, ("right",)), O("ant", 1, ("right",))}


def _four_node_proof():
    a = axiom(q)                                           # q => q
    b = infer("AndL-add-right", [a], (0,), p)              # p & q => q
    c = infer("WeakR", [b], (), r)                         # p & q => r, q
    return infer("OrR-mult", [c], (1, 0))                  # p & q => q | r


def test_flow_graph_by_hand():
    pr = _four_node_proof()
    assert pr.conclusion == parse_sequent("p & q => q | r")
    assert check_proof(pr) == []
    g = flow_graph(pr)
    assert g.edges == {frozenset({O("ant", 0, ("right",)), O("suc", 0, ("left",))})}
    assert g.partners(O("suc", 0, ("right",))) == set()
    assert g.partners(O("ant", 0, ("left",))) == set()


def test_flow_graph_of_axiom():
    assert flow_graph(axiom(p)).edges == {frozenset({O("ant", 0), O("suc", 0)})}


def test_pseudomap_from_contraction():
    pr = prove_lk(parse_sequent("p | p => p"))
    assert any(n.rule.startswith("Contr") for _, n in iter_nodes(pr))
    g = flow_graph(pr)
    assert g.partners(O("suc", 0)) == {O("ant", 0, ("left",)), O("ant", 0, ("right",))}


def test_flow_graph_dot_labels():
    dot = flow_graph_dot(flow_graph(axiom(p)))
    assert 'label="ant:0:-:p"' in dot and "--" in dot


def _random_proof(rng: random.Random, steps: int) -> Proof:
    """Grow a proof bottom-up from axioms with random rule applications."""
    atoms = [p, q, r]
    pool = [axiom(rng.choice(atoms)) for _ in range(3)]
    for _ in range(steps):
        rule = rng.choice(["NotL", "NotR", "AndL-mult", "AndL-add-left", "AndR", "OrL", "OrR-mult",
                           "OrR-add-right", "ImpL", "ImpR", "WeakL", "WeakR", "ContrL", "ContrR"])
        x = pool.pop(rng.randrange(len(pool)))
        s = x.conclusion
        try:
            if rule in ("AndR", "OrL", "ImpL"):
                y = pool.pop(rng.randrange(len(pool))) if pool else axiom(rng.choice(atoms))
                sides = {"AndR": ("suc", "suc"), "OrL": ("ant", "ant"), "ImpL": ("suc", "ant")}[rule]
                i = rng.randrange(len(s.side(sides[0])))
                j = rng.randrange(len(y.conclusion.side(sides[1])))
                x = infer(rule, [x, y], (i, j))
            elif rule in ("NotL", "NotR", "AndL-add-left", "OrR-add-right"):
                side = {"NotL": "suc", "NotR": "ant", "AndL-add-left": "ant", "OrR-add-right": "suc"}[rule]
                x = infer(rule, [x], (rng.randrange(len(s.side(side))),), rng.choice(atoms))
            elif rule in ("WeakL", "WeakR"):
                x = infer(rule, [x], (), rng.choice(atoms))
            else:
                side = {"AndL-mult": "ant", "OrR-mult": "suc", "ImpR": None, "ContrL": "ant", "ContrR": "suc"}[rule]
                if rule == "ImpR":
                    x = infer(rule, [x], (rng.randrange(len(s.antecedent)), rng.randrange(len(s.succedent))))
                elif rule.startswith("Contr"):
                    f = rng.choice(s.side(side))
                    idx = [k for k, g in enumerate(s.side(side)) if g == f]
                    if len(idx) >= 2:
                        x = infer(rule, [x], tuple(idx[:2]))
                else:
                    i, j = rng.sample(range(len(s.side(side))), 2)
                    x = infer(rule, [x], (i, j))
        except (ValueError, IndexError):
            pass
        pool.append(x)
    return pool[-1]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 12))
def test_checked_proofs_are_sound(seed, steps):
    pr = _random_proof(random.Random(seed), steps)
    assert check_proof(pr) == []
    assert is_valid_classical(pr.conclusion)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 12))
def test_every_occurrence_reaches_the_end_sequent_or_is_weakened(seed, steps):
    pr = _random_proof(random.Random(seed), steps)
    desc = descendant_map(pr)
    weakened = any(n.rule in ("WeakL", "WeakR") for _, n in iter_nodes(pr))
    for path, node in iter_nodes(pr):
        for v, ends in desc[path].items():
            assert ends or weakened


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 12))
def test_flow_edges_join_equal_atoms(seed, steps):
    pr = _random_proof(random.Random(seed), steps)
    g = flow_graph(pr)
    for e in g.edges:
        x, y = tuple(e) if len(e) == 2 else (next(iter(e)),) * 2
        assert g.atoms[x] == g.atoms[y]


@settings(max_examples=60, deadline=None)
@given(formulas(max_leaves=5), formulas(max_leaves=5))
def test_lj_checked_succedents_have_one_formula(a, b):
    from craigset.prover import Verdict, prove_lj
    pr = prove_lj(Sequent((a,), (b,)))
    if not isinstance(pr, Verdict):
        assert check_proof(pr, "LJ") == []
        assert all(len(set(n.conclusion.succedent)) <= 1 for _, n in iter_nodes(pr))


def test_not_and_or_rules_build_expected_formulas():
    pr = infer("OrR-mult", [infer("NotR", [axiom(p)], (0,))], (0, 1))
    assert pr.conclusion == Sequent((), (Or(Not(p), p),))
