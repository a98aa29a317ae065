"""Batch property runs over random provable implications."""

from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass, field

from .calculus import check_proof, flow_graph, node_count, uses_rule
from .engine.encode import lk_as_operators
from .engine.interpolate import engine_formula, interpolate_derivation
from .gen import random_implication
from .logic import Sequent, is_valid_classical, size, to_text, vars_of
from .maehara import interpolate_lk, trace_atoms
from .prover import Verdict, prove_lk

__all__ = ["PROPERTIES", "RunReport", "check_instance", "run_batch"]

PROPERTIES = ("proof", "language", "a_implies_i", "i_implies_b", "halves", "linear_size",
              "cross_engine", "traces")


@dataclass
class RunReport:
    seed: int
    instances: int = 0
    passed: dict = field(default_factory=lambda: {k: 0 for k in PROPERTIES})
    failed: dict = field(default_factory=lambda: {k: 0 for k in PROPERTIES})
    skipped: dict = field(default_factory=lambda: {k: 0 for k in PROPERTIES})
    max_ratio: float = 0.0
    wall_time: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(self.failed.values())

    def record(self, name: str, outcome) -> None:
        """``outcome`` is True, False or None for not applicable."""
        bucket = self.skipped if outcome is None else self.passed if outcome else self.failed
        bucket[name] += 1

    def to_json(self) -> str:
        d = asdict(self)
        d["ok"] = self.ok
        return json.dumps(d, indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"seed {self.seed}: {self.instances} instances in {self.wall_time:.2f}s"]
        for k in PROPERTIES:
            lines.append(f"  {k:<13} pass {self.passed[k]:>4}  fail {self.failed[k]:>4}  n/a {self.skipped[k]:>4}")
        lines.append(f"  max |I| / proof nodes = {self.max_ratio:.3f}")
        lines.append("OK" if self.ok else f"FAILED ({len(self.failures)} instances)")
        return "\n".join(lines)


def check_instance(a, b) -> tuple[dict, float]:
    """Outcome of every property on the implication a => b, plus the size ratio."""
    out: dict = {k: None for k in PROPERTIES}
    s = Sequent((a,), (b,))
    p = prove_lk(s)
    if isinstance(p, Verdict):
        out["proof"] = False
        return out, 0.0
    out["proof"] = not check_proof(p, "LK")
    cert = interpolate_lk(p)
    I = cert.interpolant
    out["language"] = vars_of(I) <= vars_of(a) & vars_of(b)
    out["a_implies_i"] = is_valid_classical(Sequent((a,), (I,)))
    out["i_implies_b"] = is_valid_classical(Sequent((I,), (b,)))
    out["halves"] = not check_proof(cert.proof_left, "LK") and not check_proof(cert.proof_right, "LK")
    ratio = size(I) / node_count(p)
    out["linear_size"] = ratio <= 2
    try:
        enc = lk_as_operators(p)
    except ValueError:
        enc = None
    if enc is not None:
        r = interpolate_derivation(enc.derivation, final_colors=enc.final_colors)
        out["cross_engine"] = engine_formula(r) == I
    if not uses_rule(p, {"WeakL", "WeakR"}):
        g = flow_graph(p)
        out["traces"] = all(g.has_edge(t.a_occ, t.b_occ) for t in trace_atoms(cert, p))
    return out, ratio


def run_batch(seed: int, count: int, max_atoms: int = 6, max_depth: int = 5) -> RunReport:
    rng = random.Random(seed)
    report = RunReport(seed)
    start = time.perf_counter()
    for _ in range(count):
        pair = random_implication(rng, max_atoms, max_depth)
        if pair is None:
            break
        out, ratio = check_instance(*pair)
        report.instances += 1
        report.max_ratio = max(report.max_ratio, ratio)
        for k, v in out.items():
            report.record(k, v)
        if any(v is False for v in out.values()):
            report.failures.append({"sequent": f"{to_text(pair[0])} => {to_text(pair[1])}",
                                    "failed": [k for k, v in out.items() if v is False]})
    report.wall_time = round(time.perf_counter() - start, 3)
    return report
