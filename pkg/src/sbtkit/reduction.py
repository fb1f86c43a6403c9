"""CNF formulas and their compilation into assemblings of gadget blocks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import IncompleteTrace, NotNormalized, UnsatisfiedAssignment
from .gadgets import Assembling, BlockSpec, Context, VariableDecl, assemble, step_with_blocks
from .search import StepTrace, TraceStep, check_complete
from .tdt import Triple, apply_step, enabled_triples, is_well_ordered, step_transposition

Clause = tuple[int, ...]


@dataclass(frozen=True)
class CnfFormula:
    """Clauses of DIMACS-style signed literals over variables 1..m."""

    m: int
    clauses: tuple[Clause, ...]

    def __post_init__(self) -> None:
        clauses = tuple(tuple(c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        for c in clauses:
            for lit in c:
                if lit == 0 or abs(lit) > self.m:
                    raise ValueError(f"literal {lit} out of range for m={self.m}")

    @property
    def gamma(self) -> int:
        return len(self.clauses)

    def q(self, i: int) -> int:
        return sum(c.count(i) for c in self.clauses)

    def qbar(self, i: int) -> int:
        return sum(c.count(-i) for c in self.clauses)

    def k(self, c: int) -> int:
        """Size of clause c (1-based)."""
        return len(self.clauses[c - 1])

    def stats(self) -> dict:
        return {
            "m": self.m,
            "gamma": self.gamma,
            "q": [self.q(i) for i in range(1, self.m + 1)],
            "qbar": [self.qbar(i) for i in range(1, self.m + 1)],
            "k": [len(c) for c in self.clauses],
        }

    def is_normalized(self) -> bool:
        return (
            self.m >= 2
            and self.gamma >= 2
            and all(len(c) >= 2 for c in self.clauses)
            and all(self.q(i) >= 2 and self.qbar(i) >= 2 for i in range(1, self.m + 1))
        )

    def evaluate(self, true_vars: frozenset[int] | set[int]) -> bool:
        return all(any((lit > 0) == (abs(lit) in true_vars) for lit in c) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.m} {self.gamma}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        def lit(x: int) -> str:
            return f"x{x}" if x > 0 else f"~x{-x}"

        return " & ".join("(" + " | ".join(map(lit, c)) + ")" for c in self.clauses)


def normalize(f: CnfFormula) -> CnfFormula:
    """Make every clause, literal count and the variable count at least two.

    Singleton clauses get their literal duplicated, then tautologies
    (x_i | ~x_i) are appended until each literal occurs twice, then a fresh
    variable with two tautologies is added when m = 1.  Satisfiability is
    unchanged by each step.
    """
    if not f.clauses:
        raise ValueError("cannot normalize an empty formula")
    clauses = [c * 2 if len(c) == 1 else c for c in f.clauses]
    m = max(f.m, 1)
    for i in range(1, m + 1):
        q = sum(c.count(i) for c in clauses)
        qbar = sum(c.count(-i) for c in clauses)
        clauses += [(i, -i)] * max(2 - q, 2 - qbar, 0)
    if m == 1:
        m = 2
        clauses += [(2, -2)] * 2
    while len(clauses) < 2:
        clauses.append((1, -1))
    return CnfFormula(m, tuple(clauses))


def models(f: CnfFormula) -> Iterator[frozenset[int]]:
    """Every satisfying assignment, as the set of true variables (brute force)."""
    for bits in itertools.product((False, True), repeat=f.m):
        true_vars = frozenset(i + 1 for i, b in enumerate(bits) if b)
        if f.evaluate(true_vars):
            yield true_vars


def dpll(f: CnfFormula) -> Optional[frozenset[int]]:
    """A satisfying assignment by plain DPLL with unit propagation, or None."""

    def solve(clauses: list[frozenset[int]], assigned: dict[int, bool]) -> Optional[dict[int, bool]]:
        clauses = list(clauses)
        assigned = dict(assigned)
        while True:
            unit = next((c for c in clauses if len(c) == 1), None)
            if unit is None:
                break
            (lit,) = unit
            assigned[abs(lit)] = lit > 0
            clauses = _simplify(clauses, lit)
            if clauses is None:
                return None
        if not clauses:
            return assigned
        lit = next(iter(clauses[0]))
        for choice in (lit, -lit):
            reduced = _simplify(clauses, choice)
            if reduced is not None:
                found = solve(reduced, {**assigned, abs(choice): choice > 0})
                if found is not None:
                    return found
        return None

    result = solve([frozenset(c) for c in f.clauses], {})
    if result is None:
        return None
    return frozenset(i for i, v in result.items() if v)


def _simplify(clauses: list[frozenset[int]], lit: int) -> Optional[list[frozenset[int]]]:
    out = []
    for c in clauses:
        if lit in c:
            continue
        if -lit in c:
            c = c - {-lit}
            if not c:
                return None
        out.append(c)
    return out


@dataclass(frozen=True)
class Assignment:
    true_vars: frozenset[int]

    @classmethod
    def from_bits(cls, bits: str) -> Assignment:
        """'1010' sets x1 and x3 true."""
        if set(bits) - {"0", "1"}:
            raise ValueError(f"assignment bits must be 0/1, got {bits!r}")
        return cls(frozenset(i + 1 for i, b in enumerate(bits) if b == "1"))

    def satisfies(self, f: CnfFormula) -> bool:
        return f.evaluate(self.true_vars)

    def bits(self, m: int) -> str:
        return "".join("1" if i in self.true_vars else "0" for i in range(1, m + 1))


# variable names


def X(i: int, j: Optional[int] = None, neg: bool = False) -> str:
    base = f"Xbar_{i}" if neg else f"X_{i}"
    return base if j is None else f"{base}^{j}"


def U(i: int, j: int, neg: bool = False) -> str:
    return f"{'Ubar' if neg else 'U'}_{i}^{j}"


def V(c: int, p: int) -> str:
    return f"V_{c}^{p}"


def GAMMA(c: int) -> str:
    return f"Gamma_{c}"


def W(c: int) -> str:
    return f"W_{c}"


A_PHI = "A_phi"


def A(i: int) -> str:
    return f"A_phi^{i}"


def Y(i: int) -> str:
    return f"Y_{i}"


@dataclass(frozen=True)
class ReductionOutput:
    formula: CnfFormula
    assembling: Assembling
    groups: tuple[str, ...]
    literal_map: dict[tuple[int, int], str]
    notes: tuple[str, ...] = field(default=())

    @property
    def registry(self) -> dict[str, VariableDecl]:
        return self.assembling.registry

    def metadata(self) -> dict:
        meta = self.assembling.describe()
        for block, group in zip(meta["blocks"], self.groups):
            block["group"] = group
        meta["formula"] = {"m": self.formula.m, "clauses": [list(c) for c in self.formula.clauses]}
        meta["registry"] = {
            v.id: {"abc": list(v.abc), "xyz": list(v.xyz), "source": v.source, "target": v.target}
            for v in self.registry.values()
        }
        meta["literal_map"] = {f"{c},{p}": var for (c, p), var in self.literal_map.items()}
        meta["notes"] = list(self.notes)
        return meta


def _copy_chain(head: str, leaves: list[str], link) -> list[BlockSpec]:
    """Copies of ``head`` into ``leaves`` through intermediate links."""
    specs = []
    src = head
    for j, leaf in enumerate(leaves[:-1], start=1):
        nxt = leaves[-1] if j == len(leaves) - 1 else link(j + 1)
        specs.append(BlockSpec("copy", (src,), (leaf, nxt)))
        src = nxt
    return specs


def reduce(f: CnfFormula) -> ReductionOutput:
    """Compile a normalized formula into its assembling of blocks."""
    if not f.is_normalized():
        raise NotNormalized("formula must be normalized first (see normalize)")
    specs: list[BlockSpec] = []
    groups: list[str] = []

    def add(group: str, new: list[BlockSpec]) -> None:
        specs.extend(new)
        groups.extend([group] * len(new))

    for i in range(1, f.m + 1):
        add(f"variable x{i}", [BlockSpec("var", (A(i),), (X(i), X(i, neg=True)))])
        for neg, count in ((False, f.q(i)), (True, f.qbar(i))):
            leaves = [X(i, j, neg) for j in range(1, count + 1)]
            add(f"variable x{i}", _copy_chain(X(i, neg=neg), leaves, lambda j, i=i, neg=neg: U(i, j, neg)))

    # j-th occurrence of each literal, scanning clauses in order
    seen: dict[int, int] = {}
    literal_map = {}
    for c, clause in enumerate(f.clauses, start=1):
        lits = []
        for p, lit in enumerate(clause, start=1):
            seen[lit] = seen.get(lit, 0) + 1
            name = X(abs(lit), seen[lit], neg=lit < 0)
            literal_map[(c, p)] = name
            lits.append(name)
        k = len(lits)
        prev = lits[0]
        chain = []
        for p in range(2, k + 1):
            out = GAMMA(c) if p == k else V(c, p)
            chain.append(BlockSpec("or", (prev, lits[p - 1]), (out,)))
            prev = out
        add(f"clause C{c}", chain)

    prev = GAMMA(1)
    chain = []
    for c in range(2, f.gamma + 1):
        out = A_PHI if c == f.gamma else W(c)
        chain.append(BlockSpec("and", (prev, GAMMA(c)), (out,)))
        prev = out
    add("conjunction", chain)

    add("fan-out", _copy_chain(A_PHI, [A(i) for i in range(1, f.m + 1)], Y))

    notes = (
        "last and-block reads its second input as Gamma_gamma",
        "m = 1 is repaired by normalize() with a dummy variable",
    )
    return ReductionOutput(f, assemble(specs), tuple(groups), literal_map, notes)


# witnesses in both directions


def activation_plan(out: ReductionOutput, a: Assignment) -> list[str]:
    """Variable activation order for a satisfying assignment."""
    f = out.formula
    plan: list[str] = []

    def literal_side(i: int, neg: bool) -> list[str]:
        names = [X(i, neg=neg)]
        count = f.qbar(i) if neg else f.q(i)
        for j in range(1, count):
            names.append(X(i, j, neg))
            names.append(X(i, count, neg) if j == count - 1 else U(i, j + 1, neg))
        return names

    for i in range(1, f.m + 1):
        plan += literal_side(i, neg=i not in a.true_vars)
    first_or = {}
    for c, clause in enumerate(f.clauses, start=1):
        k = len(clause)
        p0 = next(p for p, lit in enumerate(clause, start=1) if (lit > 0) == (abs(lit) in a.true_vars))
        first_or[c] = max(p0, 2)
        plan += [GAMMA(c) if p == k else V(c, p) for p in range(first_or[c], k + 1)]
    plan += [A_PHI if c == f.gamma else W(c) for c in range(2, f.gamma + 1)]
    for i in range(1, f.m):
        plan.append(A(i))
        plan.append(A(f.m) if i == f.m - 1 else Y(i + 1))
    for i in range(1, f.m + 1):
        plan += literal_side(i, neg=i in a.true_vars)
    for c in range(1, f.gamma + 1):
        plan += [V(c, p) for p in range(2, first_or[c])]
    return plan


def _internal_moves(ctx: Context, h: int) -> list[Triple]:
    return [t for t in enabled_triples(ctx.inst) if ctx.block_of(t.a) == h and ctx.is_internal(t)]


def _local_paths(ctx: Context, h: int, goal) -> Iterator[tuple[Context, list[Triple]]]:
    """Sequences of steps internal to block h that reach a state satisfying ``goal``."""
    seen = set()
    frontier = [(ctx, [])]
    while frontier:
        nxt = []
        for state, path in frontier:
            if goal(state):
                yield state, path
            for t in _internal_moves(state, h):
                child = step_with_blocks(state, t)
                if child.key() not in seen:
                    seen.add(child.key())
                    nxt.append((child, path + [t]))
        frontier = nxt


def guided_collapse(out: ReductionOutput, a: Assignment) -> StepTrace:
    """A complete collapse trace following a satisfying assignment.

    Variables are activated in the order of :func:`activation_plan`; before
    each activation only the source block's internal triples are fired.
    Choices inside a block are backtracked if a later activation gets stuck.
    """
    if not a.satisfies(out.formula):
        raise UnsatisfiedAssignment(f"{sorted(a.true_vars)} does not satisfy the formula")
    asm = out.assembling
    plan = activation_plan(out, a)
    if sorted(plan) != sorted(asm.registry):
        raise AssertionError("activation plan does not cover every variable exactly once")

    def activate(ctx: Context, idx: int) -> Optional[list[Triple]]:
        if idx == len(plan):
            return _finish(ctx)
        var = asm.registry[plan[idx]]
        source = ctx.block_of(var.xyz.a)
        for state, path in _local_paths(ctx, source, lambda s: is_well_ordered(s.inst, var.xyz)):
            rest = activate(step_with_blocks(state, var.xyz), idx + 1)
            if rest is not None:
                return path + [var.xyz] + rest
        return None

    triples = activate(asm.context, 0)
    if triples is None:
        raise RuntimeError("no guided collapse found; the construction is inconsistent")
    steps = []
    inst = asm.instance
    for t in triples:
        steps.append(TraceStep(t, step_transposition(inst, t)))
        inst = apply_step(inst, t)
    return StepTrace(asm.instance.state_key(), tuple(steps))


def _finish(ctx: Context) -> Optional[list[Triple]]:
    """Collapse what remains once every variable is consumed, block by block."""
    path: list[Triple] = []
    for h in range(len(ctx.dec)):
        done = None
        for state, local in _local_paths(ctx, h, lambda s, h=h: not s.block(h)):
            done = (state, local)
            break
        if done is None:
            return None
        ctx, local = done
        path += local
    return path if ctx.inst.is_empty() else None


def activation_sequence(out: ReductionOutput, trace: StepTrace) -> list[str]:
    var_of = out.assembling.variable_of_activation()
    return [var_of[s.triple] for s in trace if s.triple in var_of]


def extract_assignment(out: ReductionOutput, trace: StepTrace) -> Assignment:
    """Read the truth assignment off a complete collapse trace.

    x_i is true iff X_i is activated before A_phi.
    """
    check_complete(out.assembling.instance, trace)
    order = activation_sequence(out, trace)
    if A_PHI not in order:
        raise IncompleteTrace("trace never activates A_phi")
    before = set(order[: order.index(A_PHI)])
    return Assignment(frozenset(i for i in range(1, out.formula.m + 1) if X(i) in before))
