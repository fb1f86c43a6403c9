"""Permutations of [0..n] with fixed endpoints, transpositions and breakpoints."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import FormatError, InvalidPermutation, InvalidTransposition


@dataclass(frozen=True)
class Transposition:
    """The move tau_{i,j,k}: exchange the factors [i..j-1] and [j..k-1].

    Only the ordering 0 < i < j < k is checked here; the upper bound k <= n
    depends on the permutation and is checked when the move is applied.
    """

    i: int
    j: int
    k: int

    def __post_init__(self) -> None:
        if not (0 < self.i < self.j < self.k):
            raise InvalidTransposition(
                f"need 0 < i < j < k, got ({self.i}, {self.j}, {self.k})"
            )

    @property
    def q(self) -> int:
        return self.k + self.i - self.j

    def __call__(self, x: int) -> int:
        """Image of position x under tau (as a map on [0..n])."""
        i, j, k = self.i, self.j, self.k
        if x < i or x >= k:
            return x
        if x < self.q:
            return x + j - i
        return x + j - k

    def inverse(self) -> Transposition:
        return Transposition(self.i, self.q, self.k)

    def min_factor(self) -> int:
        return min(self.j - self.i, self.k - self.j)

    def __str__(self) -> str:
        return f"tau({self.i},{self.j},{self.k})"


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        n = len(images) - 1
        if n < 0:
            raise InvalidPermutation("a permutation needs at least the image of 0")
        if sorted(images) != list(range(n + 1)):
            raise InvalidPermutation(f"not a bijection of [0..{n}]: {images}")
        if images[0] != 0 or images[n] != n:
            raise InvalidPermutation(f"0 and {n} must be fixed points: {images}")

    @property
    def n(self) -> int:
        return len(self.images) - 1

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n + 1)))

    @classmethod
    def parse(cls, text: str) -> Permutation:
        try:
            images = tuple(int(tok) for tok in text.split())
        except ValueError as exc:
            raise FormatError(f"permutation images must be integers: {exc}") from None
        if not images:
            raise FormatError("empty permutation")
        try:
            return cls(images)
        except InvalidPermutation as exc:
            raise FormatError(str(exc)) from None

    def __getitem__(self, x: int) -> int:
        return self.images[x]

    def __len__(self) -> int:
        return len(self.images)

    def __str__(self) -> str:
        return " ".join(map(str, self.images))

    def inverse_images(self) -> list[int]:
        inv = [0] * len(self.images)
        for x, v in enumerate(self.images):
            inv[v] = x
        return inv

    def is_identity(self) -> bool:
        return all(v == x for x, v in enumerate(self.images))


@dataclass(frozen=True)
class BreakpointSet:
    positions: frozenset[int]

    @property
    def count(self) -> int:
        return len(self.positions)

    def __contains__(self, x: object) -> bool:
        return x in self.positions

    def __len__(self) -> int:
        return len(self.positions)


def exchange(seq: Sequence, i: int, j: int, k: int) -> tuple:
    """Swap the factors seq[i:j] and seq[j:k] (seq indexed by position)."""
    return (*seq[:i], *seq[j:k], *seq[i:j], *seq[k:])


def apply_transposition(p: Permutation, t: Transposition) -> Permutation:
    """Return p o t."""
    if t.k > p.n:
        raise InvalidTransposition(f"{t} out of range for n={p.n}")
    return Permutation(exchange(p.images, t.i, t.j, t.k))


def invert_transposition(t: Transposition) -> Transposition:
    return t.inverse()


def breakpoint_positions(images: Sequence[int]) -> list[int]:
    return [x for x in range(1, len(images)) if images[x - 1] + 1 != images[x]]


def breakpoints(p: Permutation) -> BreakpointSet:
    return BreakpointSet(frozenset(breakpoint_positions(p.images)))


def breakpoint_count(images: Sequence[int]) -> int:
    return sum(1 for x in range(1, len(images)) if images[x - 1] + 1 != images[x])


def breakpoint_lower_bound(p: Permutation) -> int:
    """ceil(d_b / 3), the integer lower bound on the transposition distance."""
    return -(-breakpoints(p).count // 3)


def three_bp_moves_raw(images: Sequence[int], inv: Sequence[int] | None = None) -> list[tuple[int, int, int]]:
    """(i, j, k) triples of every transposition removing three breakpoints.

    For a candidate i the adjacency equations force j and k, so one pass over
    the breakpoints suffices.
    """
    n = len(images) - 1
    if inv is None:
        inv = [0] * (n + 1)
        for x, v in enumerate(images):
            inv[v] = x
    out = []
    for i in range(1, n):
        if images[i - 1] + 1 == images[i]:
            continue
        target = images[i - 1] + 1
        if target > n:
            continue
        j = inv[target]
        if j <= i:
            continue
        target = images[j - 1] + 1
        if target > n:
            continue
        k = inv[target]
        if k <= j or images[k - 1] + 1 != images[i]:
            continue
        if images[j - 1] + 1 == images[j] or images[k - 1] + 1 == images[k]:
            continue
        out.append((i, j, k))
    return out


def three_bp_moves(p: Permutation) -> list[Transposition]:
    """Transpositions t with d_b(p o t) = d_b(p) - 3, ordered by i."""
    return [Transposition(i, j, k) for i, j, k in three_bp_moves_raw(p.images)]


def all_transpositions(n: int) -> Iterable[Transposition]:
    for i in range(1, n - 1):
        for j in range(i + 1, n):
            for k in range(j + 1, n + 1):
                yield Transposition(i, j, k)
