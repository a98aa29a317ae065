"""Seeded random formulas and provable implications."""

from __future__ import annotations

import random
from typing import Optional

from .logic import BOTTOM, TOP, And, Atom, Formula, Implies, Not, Or, Sequent, is_valid_classical

__all__ = ["random_formula", "random_implication", "atom_pool"]

_CONNECTIVES = (Not, And, Or, Implies)


def atom_pool(n: int) -> list[Atom]:
    if not 1 <= n <= 26:
        raise ValueError("atom pool size must be between 1 and 26")
    return [Atom(chr(ord("p") + i) if i < 10 else chr(ord("a") + i - 10)) for i in range(n)]


def random_formula(rng: random.Random, atoms: list, depth: int, constants: bool = False) -> Formula:
    """A formula of depth at most ``depth``; a lone atom has depth 1.

    Each node is a leaf or one of the four connectives, all equally likely.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    leaves = list(atoms) + ([TOP, BOTTOM] if constants else [])
    if depth == 1 or rng.randrange(len(_CONNECTIVES) + 1) == 0:
        return rng.choice(leaves)
    c = rng.choice(_CONNECTIVES)
    if c is Not:
        return Not(random_formula(rng, atoms, depth - 1, constants))
    return c(random_formula(rng, atoms, depth - 1, constants),
             random_formula(rng, atoms, depth - 1, constants))


def random_implication(rng: random.Random, max_atoms: int = 6, max_depth: int = 5,
                       constants: bool = False, tries: int = 10_000) -> Optional[tuple]:
    """(A, B) with A -> B classically valid, by rejection sampling."""
    for _ in range(tries):
        atoms = atom_pool(rng.randint(1, max_atoms))
        a = random_formula(rng, atoms, rng.randint(1, max_depth), constants)
        b = random_formula(rng, atoms, rng.randint(1, max_depth), constants)
        if is_valid_classical(Sequent((a,), (b,))):
            return a, b
    return None
