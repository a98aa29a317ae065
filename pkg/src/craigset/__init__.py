"""Cut-free LK/LJ proofs, Craig interpolants and their set-level counterpart."""

from .calculus import Proof, check_proof, flow_graph
from .logic import Formula, Sequent, parse_formula, parse_sequent, to_text
from .maehara import Partition, interpolate_lj, interpolate_lk
from .prover import SearchBudget, Verdict, prove, prove_lj, prove_lk

__all__ = [
    "Formula", "Sequent", "parse_formula", "parse_sequent", "to_text",
    "Proof", "check_proof", "flow_graph",
    "SearchBudget", "Verdict", "prove", "prove_lk", "prove_lj",
    "Partition", "interpolate_lk", "interpolate_lj",
]

__version__ = "0.1.0"
