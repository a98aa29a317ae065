import pytest
from hypothesis import given, settings

from craigset.calculus import check_proof, node_count
from craigset.logic import Atom, Sequent, parse_sequent
from craigset.prover import (
    BudgetExceeded, NotProvable, SearchBudget, Verdict, prove, prove_lj, prove_lk, provable_lj,
    provable_lk,
)

from conftest import all_formulas, formulas
from oracle import tautology


def test_excluded_middle_lk():
    pr = prove_lk(parse_sequent("=> p | ~p"))
    assert not isinstance(pr, Verdict)
    assert check_proof(pr, "LK") == []


def test_invalid_sequent_not_provable():
    assert prove_lk(parse_sequent("p => q")) is NotProvable


def test_small_proof_of_running_example():
    pr = prove_lk(parse_sequent("p & q => q | r"))
    assert pr.conclusion == parse_sequent("p & q => q | r")
    assert node_count(pr) <= 6


def test_excluded_middle_not_intuitionistic():
    assert prove_lj(parse_sequent("=> p | ~p")) is NotProvable


@pytest.mark.parametrize("text", [
    "=> ~~(p | ~p)", "p & q => p", "p => ~~p", "~~~p => ~p", "p -> q => ~q -> ~p",
    "p | q, p -> r, q -> r => r", "=> (p -> q -> r) -> (p -> q) -> p -> r", "p, ~p => q",
    "~(p | q) => ~p & ~q", "=> ~~(~~p -> p)",
])
def test_intuitionistic_theorems(text):
    pr = prove_lj(parse_sequent(text))
    assert not isinstance(pr, Verdict), text
    assert check_proof(pr, "LJ") == []
    assert pr.conclusion == parse_sequent(text)


@pytest.mark.parametrize("text", [
    "~~p => p", "=> ((p -> q) -> p) -> p", "~(p & q) => ~p | ~q", "p -> q => ~p | q",
    "=> (p -> q) | (q -> p)",
])
def test_classical_only(text):
    s = parse_sequent(text)
    assert provable_lk(s)
    assert prove_lj(s) is NotProvable


def test_lj_rejects_multiple_succedent():
    with pytest.raises(ValueError):
        prove_lj(parse_sequent("p => p, q"))


def test_tiny_budget_is_indefinite():
    s = parse_sequent("(p -> q) -> r, (q -> r) -> p, (r -> p) -> q => p & q & r")
    assert prove_lj(s, SearchBudget(max_depth=2)) is BudgetExceeded


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        SearchBudget(0, 10)


def test_prove_dispatch():
    s = parse_sequent("p => p")
    assert prove(s, "LK") == prove(s, "LJ") == prove_lk(s)


def test_lk_agrees_with_oracle_on_one_atom():
    for f in all_formulas([Atom("p")], 3):
        assert provable_lk(Sequent((), (f,))) == tautology([], [f])


@settings(max_examples=120, deadline=None)
@given(formulas(max_leaves=7), formulas(max_leaves=7))
def test_lk_sound_and_complete(a, b):
    s = Sequent((a,), (b,))
    pr = prove_lk(s)
    assert (pr is not NotProvable) == tautology([a], [b])
    if pr is not NotProvable:
        assert check_proof(pr, "LK") == [] and pr.conclusion == s


@settings(max_examples=80, deadline=None)
@given(formulas(max_leaves=6), formulas(max_leaves=6))
def test_lj_provable_implies_lk_provable(a, b):
    s = Sequent((a,), (b,))
    pr = prove_lj(s)
    if not isinstance(pr, Verdict):
        assert check_proof(pr, "LJ") == [] and pr.conclusion == s
        assert provable_lk(s)


@settings(max_examples=40, deadline=None)
@given(formulas(max_leaves=6), formulas(max_leaves=6))
def test_determinism(a, b):
    s = Sequent((a,), (b,))
    assert prove_lk(s) == prove_lk(s)
    assert prove_lj(s) == prove_lj(s)
    assert provable_lj(s) == provable_lj(s)
