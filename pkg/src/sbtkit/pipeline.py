"""End-to-end run of the reduction with cross-checks at every stage."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .emit import check_emission, emit_permutation, is_three_permutation
from .errors import BudgetExhausted
from .perm import breakpoint_count
from .reduction import Assignment, CnfFormula, dpll, extract_assignment, guided_collapse, normalize, reduce
from .search import (
    SearchConfig,
    SearchStats,
    StepTrace,
    collapse_search,
    db3_sort_decision,
    replay_permutation,
    write_trace,
)
from .tdt import is_equivalent

YES, NO, BUDGET = "yes", "no", "budget-exhausted"


@dataclass
class PipelineReport:
    formula: dict
    normalized: dict
    instance: dict = field(default_factory=dict)
    permutation: str = ""
    satisfiable: Optional[bool] = None
    decisions: dict[str, str] = field(default_factory=dict)
    checks: dict[str, Optional[bool]] = field(default_factory=dict)
    assignments: dict[str, str] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    traces: dict[str, str] = field(default_factory=dict)

    @property
    def failed(self) -> list[str]:
        return [name for name, ok in self.checks.items() if ok is False]

    @property
    def inconclusive(self) -> bool:
        return BUDGET in self.decisions.values()

    def exit_code(self) -> int:
        if self.failed:
            return 1
        return 2 if self.inconclusive else 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def _decide(search, *args) -> tuple[str, Optional[StepTrace]]:
    try:
        trace = search(*args)
    except BudgetExhausted:
        return BUDGET, None
    return (YES, trace) if trace is not None else (NO, None)


def run_pipeline(
    f: CnfFormula,
    assignment: Optional[Assignment] = None,
    cfg: SearchConfig = SearchConfig(),
    trace_dir: Optional[Path] = None,
    search: bool = True,
) -> PipelineReport:
    """Reduce ``f`` and check every link between formula, instance and permutation.

    ``assignment`` ranges over the variables of ``f``; variables added by
    normalization are set false (they only occur in tautologies).
    """
    timings: dict[str, float] = {}

    @contextmanager
    def timed(stage: str):
        t0 = time.perf_counter()
        yield
        timings[stage] = round(time.perf_counter() - t0, 6)

    with timed("reduce"):
        g = normalize(f)
        out = reduce(g)
    asm = out.assembling
    n = asm.span
    report = PipelineReport(f.stats(), g.stats(), timings=timings)
    report.instance = {"n": n, "triples": len(asm.instance.triples), "blocks": len(asm.specs)}
    checks = report.checks

    with timed("emit"):
        emitted = emit_permutation(asm)
    pi = emitted.permutation
    report.permutation = str(pi)
    checks["emission-rules"] = not check_emission(asm, emitted)
    checks["equivalent"] = is_equivalent(asm.instance, pi)
    checks["three-permutation"] = is_three_permutation(pi)
    checks["breakpoints-equal-n"] = breakpoint_count(pi.images) == n

    with timed("dpll"):
        model = dpll(g)
    report.satisfiable = model is not None
    expected = YES if report.satisfiable else NO

    if search:
        stats = SearchStats()
        with timed("collapse-search"):
            outcome, found = _decide(collapse_search, asm.instance, cfg, stats)
        report.decisions["collapsible"] = outcome
        checks["collapse-matches-sat"] = None if outcome == BUDGET else outcome == expected
        if found is not None:
            a = extract_assignment(out, found)
            report.assignments["from-search"] = a.bits(g.m)
            checks["search-assignment-satisfies"] = a.satisfies(g)
            if trace_dir is not None:
                path = Path(trace_dir) / "collapse.jsonl"
                write_trace(path, found, asm.instance)
                report.traces["collapse"] = str(path)

        with timed("sort-decision"):
            outcome, found = _decide(db3_sort_decision, pi, cfg, SearchStats())
        report.decisions["sortable-in-n/3"] = outcome
        checks["sort-matches-sat"] = None if outcome == BUDGET else outcome == expected
        if found is not None:
            checks["sort-witness-length"] = len(found) * 3 == n
            checks["sort-witness-sorts"] = replay_permutation(pi, found)[-1].is_identity()
            if trace_dir is not None:
                path = Path(trace_dir) / "sort.jsonl"
                write_trace(path, found, pi)
                report.traces["sort"] = str(path)

    if report.satisfiable:
        if assignment is None:
            chosen = Assignment(model)
        else:
            chosen = Assignment(frozenset(i for i in assignment.true_vars if i <= g.m))
        report.assignments["guide"] = chosen.bits(g.m)
        with timed("guided-collapse"):
            trace = guided_collapse(out, chosen)
        checks["guided-length-n/3"] = len(trace) * 3 == n
        checks["guided-sorts-permutation"] = replay_permutation(pi, trace)[-1].is_identity()
        checks["guided-min-factor<=6"] = all(s.move.min_factor() <= 6 for s in trace)
        back = extract_assignment(out, trace)
        report.assignments["extracted"] = back.bits(g.m)
        checks["extracted-satisfies"] = back.satisfies(g) and back.satisfies(f)
        if trace_dir is not None:
            path = Path(trace_dir) / "guided.jsonl"
            write_trace(path, trace, asm.instance)
            report.traces["guided"] = str(path)
    return report
