import itertools

from hypothesis import strategies as st

from craigset.logic import BOTTOM, TOP, And, Atom, Implies, Not, Or

ATOMS = [Atom(n) for n in "pqrs"]


def formulas(atoms=ATOMS, constants=True, max_leaves=12):
    leaves = st.sampled_from(list(atoms) + ([TOP, BOTTOM] if constants else []))
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            sub.map(Not),
            st.tuples(sub, sub).map(lambda t: And(*t)),
            st.tuples(sub, sub).map(lambda t: Or(*t)),
            st.tuples(sub, sub).map(lambda t: Implies(*t)),
        ),
        max_leaves=max_leaves,
    )


def all_formulas(atoms, max_depth):
    """Every formula over ``atoms`` (no constants) with depth <= max_depth; a leaf has depth 1."""
    levels = [list(atoms)]
    for _ in range(max_depth - 1):
        seen = [f for lvl in levels for f in lvl]
        new = [Not(f) for f in seen]
        for op in (And, Or, Implies):
            new += [op(a, b) for a, b in itertools.product(seen, seen)]
        levels = [list(dict.fromkeys(seen + new))]
    return levels[0]


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
