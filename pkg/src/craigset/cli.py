"""Command-line front end.

Exit codes: 0 success, 1 not provable or a failed check, 2 search budget
exceeded, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .batch import run_batch
from .calculus import (
    ProofFormatError, check_proof, flow_graph, flow_graph_dot, proof_dot, proof_from_json, proof_to_dict,
    proof_to_json,
)
from .engine.core import EngineError, derivation_from_json, space_dot
from .engine.encode import NotEncodable, lk_as_operators
from .engine.interpolate import (
    engine_formula, interpolate_derivation, interpolate_restricted, interpolate_sets,
)
from .engine.operators import logic_op
from .logic import ParseError, Sequent, is_valid_classical, parse_sequent, to_text, vars_of
from .maehara import (
    InterpolationError, LJRestrictionError, NoReplacementAvailable, Partition, PartitionError,
    interpolate_lj, interpolate_lk, normalize_constants,
)
from .prover import SearchBudget, Verdict, prove

EXIT_OK, EXIT_FAIL, EXIT_BUDGET, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _out(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _err(text: str) -> None:
    sys.stderr.write(text + "\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(str(exc)) from None


def _budget(args) -> SearchBudget:
    try:
        return SearchBudget(args.max_depth, args.max_size)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _sequent(text: str) -> Sequent:
    try:
        return parse_sequent(text)
    except ParseError as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}") from None


def _proof_input(args, system: str):
    """(proof, None) or (None, exit code) from a sequent argument or --proof file."""
    if args.proof:
        if args.sequent:
            raise UsageError("give a sequent or --proof, not both")
        try:
            p = proof_from_json(_read(args.proof))
        except (ProofFormatError, ParseError, json.JSONDecodeError) as exc:
            raise UsageError(f"bad proof file: {exc}") from None
        problems = check_proof(p, system)
        if problems:
            _err(f"not an {system} proof: {problems[0]}")
            return None, EXIT_FAIL
        return p, None
    if not args.sequent:
        raise UsageError("a sequent or --proof is required")
    res = prove(_sequent(args.sequent), system, _budget(args))
    if isinstance(res, Verdict):
        _err(f"sequent not provable in {system}" if res is Verdict.NOT_PROVABLE else "search budget exceeded")
        return None, EXIT_FAIL if res is Verdict.NOT_PROVABLE else EXIT_BUDGET
    return res, None


def _partition(spec: Optional[str], s: Sequent) -> Partition:
    """Comma list of A-part occurrences: ``ant:i``, ``suc:j`` or a bare antecedent index."""
    if spec is None:
        return Partition.default(s)
    occ = set()
    for tok in filter(None, (t.strip() for t in spec.split(","))):
        side, _, idx = tok.rpartition(":")
        side = side or "ant"
        if side not in ("ant", "suc") or not idx.isdigit():
            raise UsageError(f"bad partition entry {tok!r}")
        occ.add((side, int(idx)))
    try:
        return Partition.from_a_part(s, occ)
    except PartitionError as exc:
        raise UsageError(str(exc)) from None


# -- subcommands ---------------------------------------------------------------

def cmd_prove(args) -> int:
    system = args.system.upper()
    res = prove(_sequent(args.sequent), system, _budget(args))
    if res is Verdict.NOT_PROVABLE:
        _out("not provable" if args.emit == "text" else json.dumps({"verdict": "not provable"}))
        return EXIT_FAIL
    if res is Verdict.BUDGET_EXCEEDED:
        _out("budget exceeded" if args.emit == "text" else json.dumps({"verdict": "budget exceeded"}))
        return EXIT_BUDGET
    if args.emit == "dot":
        _out(proof_dot(res))
    elif args.emit == "text":
        for path, node in _walk(res):
            _out("  " * len(path) + f"{node.conclusion}   [{node.rule}]")
    else:
        _out(proof_to_json(res))
    return EXIT_OK


def _walk(p, path=()):
    yield path, p
    for k, q in enumerate(p.premises):
        yield from _walk(q, path + (k,))


def cmd_check(args) -> int:
    try:
        p = proof_from_json(_read(args.file))
    except (ProofFormatError, ParseError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad proof file: {exc}") from None
    problems = check_proof(p, args.system.upper())
    if args.emit == "json":
        _out(json.dumps({"ok": not problems, "violations": [str(v) for v in problems]}))
    elif problems:
        for v in problems:
            _out(str(v))
    else:
        _out(f"ok: {p.conclusion}")
    return EXIT_FAIL if problems else EXIT_OK


def _verify(I, a_part: Sequent, b_part: Sequent) -> list[str]:
    """Classical oracle checks on an interpolant of a_part / b_part."""
    problems = []
    lang_a = set().union(*(vars_of(f) for _, _, f in a_part.occurrences()))
    lang_b = set().union(*(vars_of(f) for _, _, f in b_part.occurrences()))
    if not vars_of(I) <= lang_a & lang_b:
        problems.append("interpolant uses atoms outside the common language")
    if not is_valid_classical(Sequent(a_part.antecedent, a_part.succedent + (I,))):
        problems.append("A-part does not imply the interpolant")
    if not is_valid_classical(Sequent((I,) + b_part.antecedent, b_part.succedent)):
        problems.append("interpolant does not imply the B-part")
    return problems


def cmd_interpolate(args) -> int:
    system = args.system.upper()
    p, code = _proof_input(args, system)
    if p is None:
        return code
    part = _partition(args.partition, p.conclusion)
    a_part, b_part = part.parts(p.conclusion)
    report: dict = {"sequent": str(p.conclusion), "a_part": str(a_part), "b_part": str(b_part)}
    problems: list[str] = []
    cert = None
    if args.engine in ("maehara", "both"):
        try:
            cert = interpolate_lk(p, part) if system == "LK" else interpolate_lj(p, part, _budget(args))
            if args.normalize:
                lang = {v for _, _, f in a_part.occurrences() for v in vars_of(f)} & \
                       {v for _, _, f in b_part.occurrences() for v in vars_of(f)}
                cert = normalize_constants(cert, lang)
        except (PartitionError, LJRestrictionError) as exc:
            raise UsageError(str(exc)) from None
        except (InterpolationError, NoReplacementAvailable) as exc:
            _err(str(exc))
            return EXIT_FAIL
        report["interpolant"] = to_text(cert.interpolant)
        problems += _verify(cert.interpolant, a_part, b_part)
        for half in (cert.proof_left, cert.proof_right):
            problems += [f"half proof: {v}" for v in check_proof(half, system)]
    if args.engine in ("abstract", "both"):
        try:
            enc = lk_as_operators(p, part, system)
            if system == "LK":
                r = interpolate_derivation(enc.derivation, final_colors=enc.final_colors)
            else:
                r = interpolate_restricted(enc.derivation, final_colors=enc.final_colors)
        except (NotEncodable, EngineError, ValueError) as exc:
            _err(f"abstract engine: {exc}")
            return EXIT_FAIL
        I = engine_formula(r)
        report["abstract"] = {"interpolant": to_text(I), "shape": r.shape, "orderings": r.orderings}
        problems += [f"abstract: {m}" for m in _verify(I, a_part, b_part)]
        for name, half in (("A", r.left), ("B", r.right)):
            if half is not None:
                try:
                    half.replay(logic_op)
                except EngineError as exc:
                    problems.append(f"abstract {name}-half does not replay: {exc}")
        if cert is not None and not args.normalize:
            agree = I == cert.interpolant
            report["agreement"] = agree
            if not agree:
                problems.append("engines disagree")
        if args.emit == "dot" and cert is None:
            final = r.left.final if r.left is not None else r.right.final
            _out(space_dot(final, name="interpolant"))
    report["problems"] = problems
    if args.emit == "json":
        _out(json.dumps(report, indent=2))
    elif args.emit == "dot":
        if cert is not None:
            _out(proof_dot(cert.proof_left, "left"))
            _out(proof_dot(cert.proof_right, "right"))
    else:
        if "interpolant" in report:
            _out(report["interpolant"])
        if "abstract" in report and args.engine == "abstract":
            _out(report["abstract"]["interpolant"])
        if "agreement" in report:
            _out("engines agree" if report["agreement"] else "engines disagree")
        for m in problems:
            _err(m)
    return EXIT_FAIL if problems else EXIT_OK


def cmd_flow(args) -> int:
    p, code = _proof_input(args, args.system.upper())
    if p is None:
        return code
    g = flow_graph(p)
    if args.emit == "dot":
        _out(flow_graph_dot(g))
    elif args.emit == "json":
        _out(json.dumps({"proof": proof_to_dict(p),
                         "edges": sorted(sorted(str(v) for v in e) for e in g.edges)}, indent=2))
    else:
        for e in sorted(tuple(sorted(str(v) for v in e)) for e in g.edges):
            _out(" -- ".join(e))
    return EXIT_OK


def cmd_abstract(args) -> int:
    try:
        d = derivation_from_json(_read(args.file))
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad derivation file: {exc}") from None
    try:
        space, apps = d.replay(logic_op)
    except EngineError as exc:
        _err(f"derivation does not replay: {exc}")
        return EXIT_FAIL
    if not args.interpolate:
        if args.emit == "dot":
            _out(space_dot(space, [e for a in apps for e in a.embeddings]))
        elif args.emit == "json":
            _out(json.dumps({"replays": True, "final": [repr(S) for S in space]}))
        else:
            for S in space:
                _out(repr(S))
        return EXIT_OK
    colors = None
    if args.colors:
        try:
            colors = {int(k): v for k, v in json.loads(args.colors).items()}
        except (ValueError, AttributeError) as exc:
            raise UsageError(f"bad --colors: {exc}") from None
    mode = args.mode or ("sets" if d.plain else "lk")
    try:
        run = {"lk": interpolate_derivation, "lj": interpolate_restricted, "sets": interpolate_sets}[mode]
        r = run(d, final_colors=colors)
    except EngineError as exc:
        _err(str(exc))
        return EXIT_FAIL
    I = r.interpolant
    desc = "none" if I is None else (to_text(I.formula) if I.formula is not None else I.label())
    if args.emit == "json":
        _out(json.dumps({"interpolant": desc, "points": list(I.points) if I else [],
                         "shape": r.shape, "traces": [list(t) for t in r.traces]}, indent=2))
    elif args.emit == "dot":
        for name, half in (("left", r.left), ("right", r.right)):
            if half is not None:
                _out(space_dot(half.final, name=name))
    else:
        _out(f"{desc}   {r.shape}")
    return EXIT_OK


def cmd_batch(args) -> int:
    if args.count < 0:
        raise UsageError("--count must be non-negative")
    if not 1 <= args.max_atoms <= 26 or args.max_depth < 1:
        raise UsageError("size bounds out of range")
    report = run_batch(args.seed, args.count, args.max_atoms, args.max_depth)
    _out(report.to_json() if args.emit == "json" else report.to_text())
    return EXIT_OK if report.ok else EXIT_FAIL


# -- argument parsing --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="craigset", description="Cut-free proofs and Craig interpolants.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def budget(p):
        p.add_argument("--max-depth", type=int, default=64, help="LJ search depth bound")
        p.add_argument("--max-size", type=int, default=48, help="LJ sequent size bound")

    def system(p):
        p.add_argument("--system", choices=["lk", "lj"], default="lk")

    p = sub.add_parser("prove", help="search for a cut-free proof")
    p.add_argument("sequent")
    system(p)
    budget(p)
    p.add_argument("--emit", choices=["json", "text", "dot"], default="json")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("check", help="check a proof JSON file")
    p.add_argument("file")
    system(p)
    p.add_argument("--emit", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("interpolate", help="interpolant of a sequent or proof")
    p.add_argument("sequent", nargs="?")
    p.add_argument("--proof", help="proof JSON file instead of a sequent")
    system(p)
    budget(p)
    p.add_argument("--partition", help="A-part occurrences, e.g. 'ant:0,suc:1' (default: antecedent)")
    p.add_argument("--normalize", action="store_true", help="replace constants by formulas over a shared atom")
    p.add_argument("--engine", choices=["maehara", "abstract", "both"], default="maehara")
    p.add_argument("--emit", choices=["text", "json", "dot"], default="text")
    p.set_defaults(func=cmd_interpolate)

    p = sub.add_parser("flow", help="flow graph of a proof")
    p.add_argument("sequent", nargs="?")
    p.add_argument("--proof")
    system(p)
    budget(p)
    p.add_argument("--emit", choices=["text", "json", "dot"], default="text")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("abstract", help="replay or interpolate a derivation JSON file")
    p.add_argument("file")
    p.add_argument("--interpolate", action="store_true")
    p.add_argument("--mode", choices=["lk", "lj", "sets"])
    p.add_argument("--colors", help='JSON object from final set id to "A" or "B"')
    p.add_argument("--emit", choices=["text", "json", "dot"], default="text")
    p.set_defaults(func=cmd_abstract)

    p = sub.add_parser("batch", help="property run over random provable implications")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-atoms", type=int, default=6)
    p.add_argument("--max-depth", type=int, default=5)
    p.add_argument("--emit", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_batch)
    return ap


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        _err(f"craigset: error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
