"""Block decompositions, variables and the copy/and/or/var gadgets.

A variable ``A = [(a,b,c), (x,y,z)]`` links a source block (holding b, x, y)
to a target block (holding a, z, c).  Firing (x,y,z) is the activation of A:
it moves b into the target block, after which (a,b,c) is internal there.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Iterable, Optional, Protocol

from .errors import ArityError, AssemblyError, BudgetExhausted, DecompositionError
from .perm import Transposition
from .tdt import TdtInstance, Triple, apply_step, enabled_triples, step_transposition

# Template tokens are "role:slot" for variable symbols and bare names for
# internal symbols.
TEMPLATES: dict[str, str] = {
    "copy": "a:in y:out1 e z:in d y:out2 x:out1 b:out1 c:in x:out2 b:out2 f",
    "and": "a:in1 e z:in1 a:in2 c:in1 z:in2 d y:out c:in2 x:out b:out f",
    "or": "a:in1 b' z:in1 a:in2 d y:out a' x:out b:out f z:in2 c:in1 e c' c:in2",
    "var": "d1 y:out1 a:in d2 y:out2 e1 a' e2 x:out1 b:out1 f1 c' z:in b' c:in x:out2 b:out2 f2",
    # test-only harness blocks
    "driver": "x:out b:out y:out",
    "sink": "a:in z:in c:in",
}

INTERNAL_TRIPLES: dict[str, tuple[tuple[str, str, str], ...]] = {
    "copy": (("d", "e", "f"),),
    "and": (("d", "e", "f"),),
    "or": (("a'", "b'", "c'"), ("d", "e", "f")),
    "var": (("d1", "e1", "f1"), ("d2", "e2", "f2"), ("a'", "b'", "c'")),
    "driver": (),
    "sink": (),
}

SLOTS: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "copy": (("in",), ("out1", "out2")),
    "and": (("in1", "in2"), ("out",)),
    "or": (("in1", "in2"), ("out",)),
    "var": (("in",), ("out1", "out2")),
    "driver": ((), ("out",)),
    "sink": (("in",), ()),
}

BASIC_KINDS = ("copy", "and", "or", "var")
HARNESS_KINDS = ("driver", "sink")


class Namer(Protocol):
    def external(self, role: str, var_id: str, slot: str) -> str: ...

    def internal(self, role: str, block: int) -> str: ...


class DefaultNamer:
    """Globally unique names: ``x:X_1`` for variable symbols, ``d#3`` for internal ones."""

    def external(self, role: str, var_id: str, slot: str) -> str:
        return f"{role}:{var_id}"

    def internal(self, role: str, block: int) -> str:
        return f"{role}#{block}"


class PlainNamer:
    """Short names for a single block: ``y1``, ``b2``, ``a'``."""

    def external(self, role: str, var_id: str, slot: str) -> str:
        return role + slot.lstrip("inout")

    def internal(self, role: str, block: int) -> str:
        return role


@dataclass(frozen=True)
class BlockSpec:
    kind: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if self.kind not in SLOTS:
            raise ArityError(f"unknown block kind {self.kind!r}")
        n_in, n_out = (len(s) for s in SLOTS[self.kind])
        if len(self.inputs) != n_in or len(self.outputs) != n_out:
            raise ArityError(
                f"{self.kind} takes {n_in} inputs and {n_out} outputs, "
                f"got {len(self.inputs)} and {len(self.outputs)}"
            )

    def slot_map(self) -> dict[str, str]:
        ins, outs = SLOTS[self.kind]
        return {**dict(zip(ins, self.inputs)), **dict(zip(outs, self.outputs))}

    def __str__(self) -> str:
        lhs = ",".join(self.outputs)
        rhs = ",".join(self.inputs)
        return f"[{lhs}]={self.kind}({rhs})"


def instantiate_block(
    spec: BlockSpec, index: int = 0, namer: Namer = DefaultNamer()
) -> tuple[tuple[str, ...], tuple[Triple, ...]]:
    """Word and internal triples of one block."""
    slots = spec.slot_map()
    word = []
    for tok in TEMPLATES[spec.kind].split():
        role, _, slot = tok.partition(":")
        if slot:
            word.append(namer.external(role, slots[slot], slot))
        else:
            word.append(namer.internal(role, index))
    internal = tuple(
        Triple(*(namer.internal(r, index) for r in roles)) for roles in INTERNAL_TRIPLES[spec.kind]
    )
    return tuple(word), internal


@dataclass(frozen=True)
class BlockDecomposition:
    boundaries: tuple[int, ...]
    n: int

    def __post_init__(self) -> None:
        s = tuple(self.boundaries)
        object.__setattr__(self, "boundaries", s)
        if not s or s[0] != 0:
            raise DecompositionError(f"first boundary must be 0: {s}")
        if any(a >= b for a, b in zip(s, s[1:])) or s[-1] >= self.n:
            raise DecompositionError(f"boundaries must increase strictly below n={self.n}: {s}")

    def __len__(self) -> int:
        return len(self.boundaries)

    def start(self, h: int) -> int:
        return self.boundaries[h]

    def end(self, h: int) -> int:
        return self.boundaries[h + 1] if h + 1 < len(self.boundaries) else self.n

    def block_of_position(self, p: int) -> int:
        """0-based index h with start(h) < p <= end(h)."""
        return bisect_left(self.boundaries, p) - 1

    def remap(self, tau_inv: Transposition) -> BlockDecomposition:
        new = tuple(tau_inv(s) for s in self.boundaries)
        ends = tuple(tau_inv(self.end(h)) for h in range(len(self)))
        if any(a >= b for a, b in zip(new, ends)):
            raise DecompositionError(f"{tau_inv} does not preserve the decomposition {self.boundaries}")
        return BlockDecomposition(new, self.n)


@dataclass(frozen=True)
class VariableDecl:
    id: str
    abc: Triple
    xyz: Triple
    source: int
    target: int

    @property
    def triples(self) -> tuple[Triple, Triple]:
        return self.abc, self.xyz


@dataclass(frozen=True)
class Context:
    """A 3DT-instance together with a block decomposition."""

    inst: TdtInstance
    dec: BlockDecomposition

    def block_of(self, s: str) -> int:
        return self.dec.block_of_position(self.inst.psi[s])

    def full_block(self, h: int) -> tuple[Optional[str], ...]:
        return self.inst.word[self.dec.start(h) : self.dec.end(h)]

    def block(self, h: int) -> tuple[str, ...]:
        return tuple(s for s in self.full_block(h) if s is not None)

    def blocks(self) -> list[tuple[str, ...]]:
        return [self.block(h) for h in range(len(self.dec))]

    def is_internal(self, t: Triple) -> bool:
        return len({self.block_of(s) for s in t}) == 1

    def external_triples(self) -> set[Triple]:
        return {t for t in self.inst.triples if not self.is_internal(t)}

    def key(self) -> tuple:
        return self.inst.word, self.dec.boundaries

    def __str__(self) -> str:
        return " | ".join(" ".join(b) if b else "ε" for b in self.blocks())


def step_with_blocks(ctx: Context, t: Triple) -> Context:
    t = Triple(*t)
    tau = step_transposition(ctx.inst, t)
    homes = [ctx.block_of(s) for s in t]
    if len(set(homes)) == 3:
        raise DecompositionError(f"{t} spans three blocks; the decomposition would be undefined")
    return Context(apply_step(ctx.inst, t), ctx.dec.remap(tau.inverse()))


def variable_conditions(ctx: Context, var: VariableDecl) -> dict[str, bool]:
    """The four validity conditions of a variable whose triples are both present.

    ``source``: b, x, y share a block; ``target``: a, c, z share another one;
    ``consecutive``: x before y implies x, b, y consecutive; ``nested``: a < z < c.
    """
    (a, b, c), (x, y, z) = var.abc, var.xyz
    inst = ctx.inst
    h0 = {ctx.block_of(s) for s in (b, x, y)}
    h1 = {ctx.block_of(s) for s in (a, c, z)}
    return {
        "source": len(h0) == 1,
        "target": len(h1) == 1 and h1 != h0,
        "consecutive": not inst.precedes(x, y) or (inst.consecutive(x, b) and inst.consecutive(b, y)),
        "nested": inst.precedes(a, z) and inst.precedes(z, c),
    }


def live_variables(ctx: Context, registry: dict[str, VariableDecl]) -> list[VariableDecl]:
    present = ctx.inst._triple_set
    return [v for v in registry.values() if v.xyz in present]


def context_problems(ctx: Context, registry: dict[str, VariableDecl]) -> list[str]:
    """Why ``ctx`` is not a valid context for ``registry``; empty when it is."""
    problems = []
    live = live_variables(ctx, registry)
    expected = {t for v in live for t in v.triples}
    external = ctx.external_triples()
    if external != expected:
        problems.append(
            f"external triples {sorted(map(str, external ^ expected))} do not match the live variables"
        )
    for v in live:
        if v.abc not in ctx.inst._triple_set:
            problems.append(f"{v.id}: (a,b,c) removed before activation")
            continue
        for name, ok in variable_conditions(ctx, v).items():
            if not ok:
                problems.append(f"{v.id}: {name} condition fails")
    return problems


@dataclass(frozen=True)
class Assembling:
    specs: tuple[BlockSpec, ...]
    registry: dict[str, VariableDecl]
    instance: TdtInstance
    decomposition: BlockDecomposition
    focus: Optional[int] = field(default=None, compare=False)

    @property
    def context(self) -> Context:
        return Context(self.instance, self.decomposition)

    @property
    def span(self) -> int:
        return self.instance.span

    def variable_of_activation(self) -> dict[Triple, str]:
        return {v.xyz: v.id for v in self.registry.values()}

    def is_basic(self) -> bool:
        return all(s.kind in BASIC_KINDS for s in self.specs)

    def describe(self) -> dict:
        """Block list and boundaries, enough to rebuild the assembling."""
        dec = self.decomposition
        return {
            "span": self.span,
            "triples": len(self.instance.triples),
            "boundaries": list(dec.boundaries),
            "blocks": [
                {
                    "index": h,
                    "kind": spec.kind,
                    "inputs": list(spec.inputs),
                    "outputs": list(spec.outputs),
                    "s": dec.start(h),
                    "t": dec.end(h),
                }
                for h, spec in enumerate(self.specs)
            ],
        }


def assemble(specs: Iterable[BlockSpec], namer: Namer = DefaultNamer()) -> Assembling:
    specs = tuple(specs)
    sources: dict[str, list[int]] = {}
    targets: dict[str, list[int]] = {}
    for h, spec in enumerate(specs):
        for v in spec.outputs:
            sources.setdefault(v, []).append(h)
        for v in spec.inputs:
            targets.setdefault(v, []).append(h)
    for v in sorted(set(sources) | set(targets)):
        src, tgt = sources.get(v, []), targets.get(v, [])
        if len(src) != 1 or len(tgt) != 1:
            raise AssemblyError(
                f"variable {v} must be output of exactly one block and input of exactly one "
                f"(outputs: {src}, inputs: {tgt})"
            )
        if src == tgt:
            raise AssemblyError(f"variable {v} links block {src[0]} to itself")

    word: list[str] = []
    triples: list[Triple] = []
    boundaries = []
    for h, spec in enumerate(specs):
        boundaries.append(len(word))
        w, internal = instantiate_block(spec, h, namer)
        word.extend(w)
        triples.extend(internal)
    registry = {}
    for v in sorted(sources, key=lambda v: (sources[v][0], v)):
        src_slot = _slot_of(specs[sources[v][0]], v, output=True)
        tgt_slot = _slot_of(specs[targets[v][0]], v, output=False)
        abc = Triple(*(namer.external(r, v, tgt_slot if r != "b" else src_slot) for r in "abc"))
        xyz = Triple(*(namer.external(r, v, src_slot if r != "z" else tgt_slot) for r in "xyz"))
        registry[v] = VariableDecl(v, abc, xyz, sources[v][0], targets[v][0])
        triples.extend((abc, xyz))
    if not word:
        raise AssemblyError("no blocks")
    inst = TdtInstance(tuple(word), tuple(triples))
    asm = Assembling(specs, registry, inst, BlockDecomposition(tuple(boundaries), len(word)))
    problems = context_problems(asm.context, registry)
    if problems:
        raise AssemblyError("; ".join(problems))
    return asm


def _slot_of(spec: BlockSpec, var: str, output: bool) -> str:
    ins, outs = SLOTS[spec.kind]
    names, slots = (spec.outputs, outs) if output else (spec.inputs, ins)
    return slots[names.index(var)]


HARNESS_VARIABLES = {
    "copy": (("A",), ("A1", "A2")),
    "and": (("A1", "A2"), ("A",)),
    "or": (("A1", "A2"), ("A",)),
    "var": (("A",), ("A1", "A2")),
}


def make_harness(kind: str) -> Assembling:
    """The block under test between immediately activatable drivers and sinks.

    Drivers ``x b y`` feed each input; sinks ``a z c`` absorb each output.
    """
    if kind not in HARNESS_VARIABLES:
        raise ArityError(f"no harness for kind {kind!r}")
    ins, outs = HARNESS_VARIABLES[kind]
    specs = [BlockSpec("driver", (), (v,)) for v in ins]
    specs.append(BlockSpec(kind, ins, outs))
    specs += [BlockSpec("sink", (v,), ()) for v in outs]
    asm = assemble(specs)
    return Assembling(asm.specs, asm.registry, asm.instance, asm.decomposition, focus=len(ins))


def activation_orders(asm: Assembling, node_budget: int = 10**6) -> set[tuple[str, ...]]:
    """Orders in which variables get activated along step sequences reaching the empty instance."""
    var_of = asm.variable_of_activation()
    memo: dict[tuple, frozenset] = {}
    spent = 0

    def explore(ctx: Context) -> frozenset:
        nonlocal spent
        key = ctx.key()
        if key in memo:
            return memo[key]
        spent += 1
        if spent > node_budget:
            raise BudgetExhausted(f"activation-order exploration exceeded {node_budget} states", spent)
        if ctx.inst.is_empty():
            result = frozenset({()})
        else:
            found = set()
            for t in enabled_triples(ctx.inst):
                tails = explore(step_with_blocks(ctx, t))
                v = var_of.get(t)
                found |= {(v, *tail) if v else tail for tail in tails}
            result = frozenset(found)
        memo[key] = result
        return result

    return set(explore(asm.context))


@dataclass
class BehaviorGraph:
    """Projected words of one block across every reachable state of its context."""

    initial: tuple[str, ...]
    nodes: set[tuple[str, ...]] = field(default_factory=set)
    edges: set[tuple[tuple[str, ...], tuple[str, ...], str, str]] = field(default_factory=set)

    def successors(self, node: tuple[str, ...]) -> set[tuple[str, ...]]:
        return {dst for src, dst, _, _ in self.edges if src == node}

    def terminals(self) -> set[tuple[str, ...]]:
        return {n for n in self.nodes if not self.successors(n)}

    def is_acyclic(self) -> bool:
        indeg = {n: 0 for n in self.nodes}
        adj: dict = {n: set() for n in self.nodes}
        for src, dst, _, _ in self.edges:
            if dst not in adj[src]:
                adj[src].add(dst)
                indeg[dst] += 1
        ready = [n for n, d in indeg.items() if d == 0]
        seen = 0
        while ready:
            n = ready.pop()
            seen += 1
            for m in adj[n]:
                indeg[m] -= 1
                if indeg[m] == 0:
                    ready.append(m)
        return seen == len(self.nodes)

    def to_dot(self, name: str = "behavior") -> str:
        ids = {n: f"n{k}" for k, n in enumerate(sorted(self.nodes, key=lambda w: (-len(w), w)))}
        lines = [f"digraph {_quote(name)} {{", "  rankdir=TB;", "  node [shape=box];"]
        for n, nid in ids.items():
            label = " ".join(n) if n else "ε"
            extra = ", peripheries=2" if n == self.initial else ""
            lines.append(f"  {nid} [label={_quote(label)}{extra}];")
        styles = {
            "internal": "",
            "input": ", penwidth=3",
            "output": ', color="black:invis:black"',
        }
        for src, dst, kind, label in sorted(self.edges):
            lines.append(f"  {ids[src]} -> {ids[dst]} [label={_quote(label)}{styles[kind]}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def behavior_graph(asm: Assembling, block: Optional[int] = None, plain: bool = True) -> BehaviorGraph:
    """Explore every reachable state and project it onto one block.

    Edges are kept only when the projection changes; their kind says whether
    the step was internal to the block, an input activation or an output
    activation.
    """
    h = asm.focus if block is None else block
    if h is None:
        raise ValueError("no block selected")
    by_xyz = {v.xyz: v for v in asm.registry.values()}
    rename = _plain_names(asm, h) if plain else {}

    def project(ctx: Context) -> tuple[str, ...]:
        return tuple(rename.get(s, s) for s in ctx.block(h))

    start = asm.context
    graph = BehaviorGraph(project(start))
    graph.nodes.add(graph.initial)
    seen = {start.key()}
    stack = [start]
    while stack:
        ctx = stack.pop()
        here = project(ctx)
        for t in enabled_triples(ctx.inst):
            nxt = step_with_blocks(ctx, t)
            there = project(nxt)
            if there != here:
                var = by_xyz.get(t)
                if var is None:
                    kind, label = "internal", "(" + ",".join(rename.get(s, s) for s in t) + ")"
                elif var.target == h:
                    kind, label = "input", var.id
                else:
                    kind, label = "output", var.id
                graph.nodes.add(there)
                graph.edges.add((here, there, kind, label))
            if nxt.key() not in seen:
                seen.add(nxt.key())
                stack.append(nxt)
    return graph


def _plain_names(asm: Assembling, h: int) -> dict[str, str]:
    spec = asm.specs[h]
    word, internal = instantiate_block(spec, h)
    short, _ = instantiate_block(spec, h, PlainNamer())
    names = dict(zip(word, short))
    # b of an input variable arrives from its source block
    for v in spec.inputs:
        var = asm.registry[v]
        names[var.abc.b] = "b" + _slot_of(spec, v, output=False).lstrip("in")
    return names
