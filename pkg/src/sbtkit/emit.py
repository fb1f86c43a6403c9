"""The permutation equivalent to an assembling of basic blocks.

Each block h owns an interval of images ``p_h+1 .. q_h``.  Three values of
that interval per input variable are lent to the variable's source block,
which is what lets the activation triple straddle two blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import LayoutError
from .gadgets import BASIC_KINDS, SLOTS, Assembling
from .perm import Permutation
from .tdt import TdtInstance, succ_map

# alpha/beta offsets, keyed by the kind and input slot of the target block
ALPHA_BETA: dict[tuple[str, str], tuple[int, int]] = {
    ("copy", "in"): (0, 4),
    ("and", "in1"): (0, 7),
    ("and", "in2"): (3, 9),
    ("or", "in1"): (0, 13),
    ("or", "in2"): (3, 16),
    ("var", "in"): (5, 9),
}

# images of s+1 .. t for each block kind; "p+8" is relative to p_h,
# "alpha:out1+2" to alpha of the variable in slot out1
IMAGE_TABLE: dict[str, tuple[str, ...]] = {
    "copy": (
        "alpha:out1+2", "p+8", "p+4", "p+3", "alpha:out2+2", "p+7",
        "beta:out1+1", "alpha:out1+1", "p+6", "beta:out2+1", "alpha:out2+1", "p+9",
    ),
    "and": (
        "p+14", "p+7", "p+3", "p+13", "p+9", "p+6",
        "alpha:out+2", "p+12", "p+11", "beta:out+1", "alpha:out+1", "p+15",
    ),
    "or": (
        "p+7", "p+13", "p+3", "p+9", "alpha:out+2", "p+12", "p+11", "beta:out+1",
        "alpha:out+1", "p+16", "p+6", "p+15", "p+10", "p+8", "p+18",
    ),
    "var": (
        "alpha:out1+2", "p+5", "p+3", "alpha:out2+2", "p+12", "p+1", "p+14", "p+4", "beta:out1+1",
        "alpha:out1+1", "p+13", "p+9", "p+8", "p+2", "p+11", "beta:out2+1", "alpha:out2+1", "p+15",
    ),
}


@dataclass(frozen=True)
class Layout:
    p: tuple[int, ...]
    q: tuple[int, ...]
    alpha: dict[str, int]
    beta: dict[str, int]

    def lent(self, var: str) -> tuple[int, int, int]:
        """Images of the target interval taken by the source block of ``var``."""
        a, b = self.alpha[var], self.beta[var]
        return a + 1, a + 2, b + 1


def compute_layout(asm: Assembling) -> Layout:
    dec = asm.decomposition
    p, q = [], []
    alpha, beta = {}, {}
    nxt = 0
    for h, spec in enumerate(asm.specs):
        if spec.kind not in BASIC_KINDS:
            raise LayoutError(f"block {h} has kind {spec.kind!r}; only basic blocks can be emitted")
        p.append(nxt)
        nxt += dec.end(h) - dec.start(h) + 3 * (len(spec.inputs) - len(spec.outputs))
        q.append(nxt)
        for slot, var in zip(SLOTS[spec.kind][0], spec.inputs):
            da, db = ALPHA_BETA[(spec.kind, slot)]
            alpha[var], beta[var] = p[h] + da, p[h] + db
    if q and q[-1] != asm.span:
        raise LayoutError(f"layout ends at {q[-1]}, span is {asm.span}")
    return Layout(tuple(p), tuple(q), alpha, beta)


@dataclass(frozen=True)
class EmittedPermutation:
    permutation: Permutation
    layout: Layout

    def image_set(self, asm: Assembling, h: int) -> set[int]:
        """P_h: the images that block h is supposed to use."""
        spec = asm.specs[h]
        own = set(range(self.layout.p[h] + 1, self.layout.q[h] + 1))
        for v in spec.outputs:
            own |= set(self.layout.lent(v))
        for v in spec.inputs:
            own -= set(self.layout.lent(v))
        return own


def _image(token: str, p: int, slots: dict[str, str], layout: Layout) -> int:
    base, _, off = token.rpartition("+")
    if base == "p":
        return p + int(off)
    which, _, slot = base.partition(":")
    table = layout.alpha if which == "alpha" else layout.beta
    return table[slots[slot]] + int(off)


def emit_permutation(asm: Assembling) -> EmittedPermutation:
    layout = compute_layout(asm)
    dec = asm.decomposition
    images = [0] * (asm.span + 1)
    for h, spec in enumerate(asm.specs):
        slots = spec.slot_map()
        s = dec.start(h)
        table = IMAGE_TABLE[spec.kind]
        if dec.end(h) - s != len(table):
            raise LayoutError(f"block {h} has length {dec.end(h) - s}, a fresh {spec.kind} has {len(table)}")
        for r, token in enumerate(table, start=1):
            images[s + r] = _image(token, layout.p[h], slots, layout)
    return EmittedPermutation(Permutation(tuple(images)), layout)


def check_emission(asm: Assembling, emitted: EmittedPermutation) -> list[str]:
    """Per-block rules the emitted images must satisfy; empty when all hold.

    Checked directly from positions and the succ map, not from the image
    table, so a typo in the table shows up here.
    """
    inst = asm.instance
    pi = emitted.permutation
    layout = emitted.layout
    dec = asm.decomposition
    psi = inst.psi
    pred = {v: u for u, v in succ_map(inst).items()}
    problems = []

    def expect(label: str, got: int, want: int) -> None:
        if got != want:
            problems.append(f"{label}: got {got}, expected {want}")

    for v in asm.registry.values():
        (a, b, c), (x, y, z) = v.abc, v.xyz
        al, be = layout.alpha[v.id], layout.beta[v.id]
        expect(f"pi(z) = alpha+3 for {v.id}", pi[psi[z]], al + 3)
        expect(f"pi(c) = beta+2 for {v.id}", pi[psi[c]], be + 2)
        expect(f"pi(x) = beta+1 for {v.id}", pi[psi[x]], be + 1)
        expect(f"pi(b) = alpha+1 for {v.id}", pi[psi[b]], al + 1)
        expect(f"pi(a-1) = alpha for {v.id}", pi[psi[a] - 1], al)
        expect(f"pi(z-1) = beta for {v.id}", pi[psi[z] - 1], be)
        expect(f"pi(y-1) = alpha+2 for {v.id}", pi[psi[y] - 1], al + 2)
        expect(f"pi(b-1) = beta+1 for {v.id}", pi[psi[b] - 1], be + 1)

    special = {psi[s] for v in asm.registry.values() for s in (v.abc.b, v.abc.c, v.xyz.a, v.xyz.c)}
    for h in range(len(dec)):
        lo, hi = dec.start(h) + 1, dec.end(h)
        for u in range(lo, hi + 1):
            w = pred.get(u)
            in_block = w is not None and lo <= w <= hi
            if in_block:
                expect(f"pi(u) = pi(pred(u)-1)+1 at u={u}", pi[u], pi[w - 1] + 1)
            elif u not in special:
                problems.append(f"u={u} has its predecessor outside the block and holds no variable symbol")
        got = {pi[u] for u in range(lo, hi + 1)}
        if got != emitted.image_set(asm, h) or len(got) != hi - lo + 1:
            problems.append(f"block {h}: images are not a bijection onto its image set")
        expect(f"block {h} ends at q", pi[hi], layout.q[h])
    return problems


def is_three_permutation(p: Permutation) -> bool:
    """succ(u) = pi^-1(pi(u-1)+1) has no fixed point and succ^3 = id on 1..n."""
    inv = p.inverse_images()
    n = p.n

    def succ(u: int) -> int:
        return inv[p[u - 1] + 1]

    for u in range(1, n + 1):
        s1 = succ(u)
        if s1 == u or succ(succ(s1)) != u:
            return False
    return True


def instance_of_permutation(p: Permutation) -> TdtInstance:
    """The 3DT-instance equivalent to a 3-permutation (symbols are positions)."""
    if not is_three_permutation(p):
        raise ValueError("not a 3-permutation")
    inv = p.inverse_images()
    seen: set[int] = set()
    triples = []
    for u in range(1, p.n + 1):
        if u in seen:
            continue
        cyc = [u, inv[p[u - 1] + 1]]
        cyc.append(inv[p[cyc[1] - 1] + 1])
        seen.update(cyc)
        triples.append(tuple(f"u{w}" for w in cyc))
    return TdtInstance(tuple(f"u{w}" for w in range(1, p.n + 1)), tuple(triples))
