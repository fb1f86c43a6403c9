"""3DT-instances: a word of symbols and dots, partitioned into ordered triples."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional, Sequence

from .errors import FormatError, InvalidInstance, NotWellOrdered, SpanMismatch
from .perm import Permutation, Transposition, exchange

DOT = "."

Symbol = str


class Triple(NamedTuple):
    a: Symbol
    b: Symbol
    c: Symbol

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"


def _as_word(word: Sequence[Optional[str]]) -> tuple[Optional[str], ...]:
    return tuple(None if s is None or s == DOT else s for s in word)


@dataclass(frozen=True)
class TdtInstance:
    """A 3DT-instance of span ``len(word)``.

    ``word[p-1]`` holds the symbol placed at position p, or None for a dot;
    positions are therefore implicit and never stored separately.
    """

    word: tuple[Optional[Symbol], ...]
    triples: tuple[Triple, ...]

    def __post_init__(self) -> None:
        word = _as_word(self.word)
        triples = tuple(Triple(*t) for t in self.triples)
        object.__setattr__(self, "word", word)
        object.__setattr__(self, "triples", triples)
        placed = [s for s in word if s is not None]
        if len(set(placed)) != len(placed):
            dup = sorted({s for s in placed if placed.count(s) > 1})
            raise InvalidInstance(f"symbols placed twice: {dup}")
        covered: list[str] = [s for t in triples for s in t]
        if len(set(covered)) != len(covered):
            raise InvalidInstance("triples are not pairwise disjoint")
        if set(covered) != set(placed):
            missing = set(placed) - set(covered)
            extra = set(covered) - set(placed)
            raise InvalidInstance(
                f"triples must partition the placed symbols "
                f"(uncovered: {sorted(missing)}, unplaced: {sorted(extra)})"
            )

    @classmethod
    def from_words(cls, word: str, triples: Sequence[Sequence[str]]) -> TdtInstance:
        """Build from a whitespace-separated word (``.`` is a dot)."""
        return cls(tuple(word.split()), tuple(Triple(*t) for t in triples))

    @classmethod
    def empty(cls, span: int) -> TdtInstance:
        return cls((None,) * span, ())

    @property
    def span(self) -> int:
        return len(self.word)

    @cached_property
    def psi(self) -> dict[Symbol, int]:
        """Symbol -> 1-based position."""
        return {s: p for p, s in enumerate(self.word, start=1) if s is not None}

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(self.psi.values())

    @property
    def alphabet(self) -> frozenset[Symbol]:
        return frozenset(self.psi)

    def is_empty(self) -> bool:
        return not self.triples

    def positions(self, t: Triple) -> tuple[int, int, int]:
        psi = self.psi
        return psi[t.a], psi[t.b], psi[t.c]

    def precedes(self, s1: Symbol, s2: Symbol) -> bool:
        return self.psi[s1] < self.psi[s2]

    def consecutive(self, s1: Symbol, s2: Symbol) -> bool:
        """s1 comes before s2 with only dots in between."""
        p1, p2 = self.psi[s1], self.psi[s2]
        return p1 < p2 and all(s is None for s in self.word[p1 : p2 - 1])

    def triple_of(self, s: Symbol) -> Triple:
        return self._triple_index[s]

    @cached_property
    def _triple_set(self) -> frozenset[Triple]:
        return frozenset(self.triples)

    @cached_property
    def _triple_index(self) -> dict[Symbol, Triple]:
        return {s: t for t in self.triples for s in t}

    def ordered_triples(self) -> list[Triple]:
        """Triples sorted by the position of their leftmost symbol."""
        return sorted(self.triples, key=lambda t: min(self.positions(t)))

    def state_key(self) -> str:
        """Canonical key: each symbol replaced by (first-occurrence triple index, role)."""
        index = {t: n for n, t in enumerate(self.ordered_triples())}
        roles = {}
        for t, n in index.items():
            for role, s in zip("abc", t):
                roles[s] = f"{n}{role}"
        return " ".join(DOT if s is None else roles[s] for s in self.word)

    def word_string(self) -> str:
        return " ".join(DOT if s is None else s for s in self.word)

    def projected(self, lo: int = 1, hi: Optional[int] = None) -> tuple[Symbol, ...]:
        """Dot-free subword over positions lo..hi (inclusive, 1-based)."""
        hi = self.span if hi is None else hi
        return tuple(s for s in self.word[lo - 1 : hi] if s is not None)

    def __str__(self) -> str:
        return self.word_string()

    # text format

    def serialize(self) -> str:
        lines = [f"span {self.span}", f"word {self.word_string()}"]
        lines += [f"triple {t.a} {t.b} {t.c}" for t in self.ordered_triples()]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> TdtInstance:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if len(lines) < 2:
            raise FormatError("3DT file needs a span line and a word line")
        head = lines[0].split()
        if len(head) != 2 or head[0] != "span":
            raise FormatError(f"bad span line: {lines[0]!r}")
        try:
            span = int(head[1])
        except ValueError:
            raise FormatError(f"bad span: {head[1]!r}") from None
        if span < 1:
            raise FormatError(f"span must be positive, got {span}")
        tokens = lines[1].split()
        if not tokens or tokens[0] != "word":
            raise FormatError(f"bad word line: {lines[1]!r}")
        if len(tokens) - 1 != span:
            raise FormatError(f"word has {len(tokens) - 1} tokens, span is {span}")
        triples = []
        for ln in lines[2:]:
            parts = ln.split()
            if len(parts) != 4 or parts[0] != "triple":
                raise FormatError(f"bad triple line: {ln!r}")
            triples.append(Triple(*parts[1:]))
        try:
            return cls(tuple(tokens[1:]), tuple(triples))
        except InvalidInstance as exc:
            raise FormatError(str(exc)) from None


def succ_map(inst: TdtInstance) -> dict[int, int]:
    psi = inst.psi
    succ = {}
    for a, b, c in inst.triples:
        succ[psi[a]] = psi[b]
        succ[psi[b]] = psi[c]
        succ[psi[c]] = psi[a]
    return succ


def _well_ordered_positions(pa: int, pb: int, pc: int) -> Optional[tuple[int, int, int]]:
    if pa < pb < pc:
        return pa, pb, pc
    if pb < pc < pa:
        return pb, pc, pa
    if pc < pa < pb:
        return pc, pa, pb
    return None


def is_well_ordered(inst: TdtInstance, t: Triple) -> bool:
    return _well_ordered_positions(*inst.positions(t)) is not None


def enabled_triples(inst: TdtInstance) -> list[Triple]:
    """Well-ordered triples, sorted by their leftmost position."""
    found = []
    for t in inst.triples:
        ijk = _well_ordered_positions(*inst.positions(t))
        if ijk is not None:
            found.append((ijk[0], t))
    found.sort()
    return [t for _, t in found]


def step_transposition(inst: TdtInstance, t: Triple) -> Transposition:
    t = Triple(*t)
    if t not in inst._triple_set:
        raise NotWellOrdered(f"{t} is not a triple of this instance")
    ijk = _well_ordered_positions(*inst.positions(t))
    if ijk is None:
        raise NotWellOrdered(f"{t} is not well-ordered")
    return Transposition(*ijk)


def apply_step(inst: TdtInstance, t: Triple) -> TdtInstance:
    t = Triple(*t)
    tau = step_transposition(inst, t)
    # word[p-1] is position p; shifting by one keeps exchange() position-based
    moved = exchange((None, *inst.word), tau.i, tau.j, tau.k)[1:]
    gone = set(t)
    word = tuple(None if s in gone else s for s in moved)
    return TdtInstance(word, tuple(u for u in inst.triples if u != t))


def is_equivalent(inst: TdtInstance, p: Permutation) -> bool:
    if p.n != inst.span:
        raise SpanMismatch(f"permutation has n={p.n}, instance has span {inst.span}")
    if p[0] != 0:
        return False
    pred = {v: u for u, v in succ_map(inst).items()}
    for v in range(1, inst.span + 1):
        u = pred.get(v)
        expected = p[v - 1] + 1 if u is None else p[u - 1] + 1
        if p[v] != expected:
            return False
    return True

