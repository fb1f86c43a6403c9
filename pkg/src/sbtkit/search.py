"""Collapsibility search over 3DT-instances and transposition-distance solvers.

Both decision searches are depth-first with a shared set of dead states: a
state enters the set once every move out of it has been refuted.  Since each
move removes a triple (or three breakpoints), a path never revisits a state
and no cycle detection is needed.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, Hashable, Iterable, Iterator, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import BudgetExhausted, DepthExceeded, FormatError, IncompleteTrace, NotWellOrdered, SpanTooLarge
from .perm import Permutation, Transposition, apply_transposition, breakpoint_count, exchange, three_bp_moves_raw
from .tdt import TdtInstance, Triple, _well_ordered_positions, apply_step, step_transposition

ORDERS = ("leftmost", "rightmost")


@dataclass(frozen=True)
class SearchConfig:
    memo_capacity: int = 10**7
    order: str = "leftmost"
    workers: int = 1
    node_budget: Optional[int] = None
    prune: bool = False

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.memo_capacity < 1:
            raise ValueError("memo_capacity must be positive")
        if self.node_budget is not None and self.node_budget < 1:
            raise ValueError("node_budget must be positive")
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}")


class TraceStep(NamedTuple):
    triple: Optional[Triple]
    move: Transposition


@dataclass(frozen=True)
class StepTrace:
    """A replayable sequence of steps; ``triple`` is None for permutation-only traces."""

    initial_key: str
    steps: tuple[TraceStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[TraceStep]:
        return iter(self.steps)

    @property
    def transpositions(self) -> list[Transposition]:
        return [s.move for s in self.steps]

    @property
    def triples(self) -> list[Optional[Triple]]:
        return [s.triple for s in self.steps]


@dataclass
class SearchStats:
    expanded: int = 0
    dead: int = 0


class _DeadMemo:
    """Dead-state set with a capacity cap; thread-safe when shared."""

    def __init__(self, capacity: int, shared: bool = False):
        self.capacity = capacity
        self._set: set = set()
        self._lock = threading.Lock() if shared else None

    def __contains__(self, key: Hashable) -> bool:
        return key in self._set

    def add(self, key: Hashable) -> None:
        if len(self._set) >= self.capacity:
            return
        if self._lock is None:
            self._set.add(key)
        else:
            with self._lock:
                self._set.add(key)

    def __len__(self) -> int:
        return len(self._set)


class _Budget:
    def __init__(self, limit: Optional[int], shared: bool = False):
        self.limit = limit
        self.used = 0
        self._lock = threading.Lock() if shared else None

    def spend(self) -> None:
        if self._lock is None:
            self.used += 1
        else:
            with self._lock:
                self.used += 1
        if self.limit is not None and self.used > self.limit:
            raise BudgetExhausted(f"node budget of {self.limit} exhausted", self.used)


Children = Callable[[Hashable], Sequence[tuple[object, Hashable]]]


def _dfs(
    root: Hashable,
    children: Children,
    is_goal: Callable[[Hashable], bool],
    memo: _DeadMemo,
    budget: _Budget,
    stop: Optional[threading.Event] = None,
) -> Optional[list]:
    if is_goal(root):
        return []
    if root in memo:
        return None
    budget.spend()
    stack = [(root, iter(children(root)))]
    path: list = []
    while stack:
        if stop is not None and stop.is_set():
            return None
        state, it = stack[-1]
        for move, child in it:
            if is_goal(child):
                path.append(move)
                return path
            if child in memo:
                continue
            budget.spend()
            stack.append((child, iter(children(child))))
            path.append(move)
            break
        else:
            stack.pop()
            memo.add(state)
            if path:
                path.pop()
    return None


def _run(root, children, is_goal, cfg: SearchConfig, stats: Optional[SearchStats]) -> Optional[list]:
    shared = cfg.workers > 1
    memo = _DeadMemo(cfg.memo_capacity, shared)
    budget = _Budget(cfg.node_budget, shared)
    try:
        if not shared or is_goal(root):
            return _dfs(root, children, is_goal, memo, budget)
        return _parallel(root, children, is_goal, cfg.workers, memo, budget)
    finally:
        if stats is not None:
            stats.expanded = budget.used
            stats.dead = len(memo)


def _parallel(root, children, is_goal, workers, memo, budget) -> Optional[list]:
    budget.spend()
    branches = list(children(root))
    stop = threading.Event()
    results: list = [None] * len(branches)
    errors: list[BaseException] = []

    def work(indices: list[int]) -> None:
        for idx in indices:
            move, child = branches[idx]
            try:
                found = _dfs(child, children, is_goal, memo, budget, stop)
            except BaseException as exc:  # propagated to the caller below
                errors.append(exc)
                stop.set()
                return
            if found is not None:
                results[idx] = [move, *found]
                stop.set()
                return
            if stop.is_set():
                return

    threads = [
        threading.Thread(target=work, args=(list(range(w, len(branches), workers)),))
        for w in range(workers)
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for r in results:
        if r is not None:
            return r
    if errors:
        raise errors[0]
    memo.add(root)
    return None


# collapse search over 3DT-instances


class _Codec:
    """Integer encoding of instance states: 0 is a dot, 3*t + role + 1 a symbol."""

    def __init__(self, inst: TdtInstance):
        self.triples = list(inst.triples)
        self.span = inst.span
        code = {}
        for t, tr in enumerate(self.triples):
            for r, s in enumerate(tr):
                code[s] = 3 * t + r + 1
        self.code = code

    def encode(self, inst: TdtInstance) -> tuple[int, ...]:
        return (0, *(0 if s is None else self.code[s] for s in inst.word))

    def decode(self, state: Sequence[int]) -> TdtInstance:
        word = []
        alive = set()
        for c in state[1:]:
            if c == 0:
                word.append(None)
            else:
                t, r = divmod(c - 1, 3)
                word.append(self.triples[t][r])
                alive.add(t)
        return TdtInstance(tuple(word), tuple(self.triples[t] for t in sorted(alive)))


def _triple_positions(state: Sequence[int]) -> dict[int, list[int]]:
    pos: dict[int, list[int]] = {}
    for p in range(1, len(state)):
        c = state[p]
        if c:
            t, r = divmod(c - 1, 3)
            slot = pos.get(t)
            if slot is None:
                slot = pos[t] = [0, 0, 0]
            slot[r] = p
    return pos


def enabled_moves(state: Sequence[int]) -> list[tuple[int, int, int, int]]:
    """(i, j, k, triple index) for each well-ordered triple, sorted by i."""
    pos = _triple_positions(state)
    out = []
    for t, (pa, pb, pc) in pos.items():
        ijk = _well_ordered_positions(pa, pb, pc)
        if ijk is not None:
            out.append((*ijk, t))
    out.sort()
    return out


def _closed_segment(lo: int, hi: int, group_of: Sequence[int], bounds: Sequence[tuple[int, int]]) -> tuple[int, int]:
    """Smallest interval containing [lo, hi] and every group touching it."""
    seen_lo, seen_hi = lo, lo - 1
    while lo < seen_lo or hi > seen_hi:
        fresh = (*range(lo, seen_lo), *range(seen_hi + 1, hi + 1))
        seen_lo, seen_hi = lo, hi
        for p in fresh:
            g = group_of[p]
            if g >= 0:
                a, b = bounds[g]
                lo, hi = min(lo, a), max(hi, b)
    return lo, hi


def persistent_moves(moves: list, group_of: Sequence[int], bounds: Sequence[tuple[int, int]]) -> list:
    """A subset of ``moves`` that is persistent, hence safe to explore alone.

    Each move (i, j, k, ...) cuts only at the three positions of its own
    group.  If [lo, hi] contains every position of every group it touches,
    moves from outside either miss it or carry [lo-1, hi] along unchanged
    inside one factor.  So they commute with the moves inside and can
    neither enable nor disable them, and exploring only the inside moves
    still reaches every dead end, the sorted state included.
    """
    best = moves
    for m in moves:
        lo, hi = _closed_segment(m[0], m[2], group_of, bounds)
        inside = [x for x in moves if lo <= x[0] and x[2] <= hi]
        if len(inside) < len(best):
            best = inside
            if len(best) == 1:
                break
    return best


def _instance_groups(state: Sequence[int]) -> tuple[list[int], list[tuple[int, int]]]:
    group_of = [-1] * len(state)
    bounds = []
    for g, ps in enumerate(_triple_positions(state).values()):
        for p in ps:
            group_of[p] = g
        bounds.append((min(ps), max(ps)))
    return group_of, bounds


def _breakpoint_groups(images: Sequence[int], inv: Sequence[int]) -> tuple[list[int], list[tuple[int, int]]]:
    """Cycles of u -> inv[images[u-1]+1] over the breakpoints."""
    n = len(images) - 1
    group_of = [-1] * (n + 1)
    bounds = []
    for u in range(1, n + 1):
        if group_of[u] >= 0 or images[u - 1] + 1 == images[u]:
            continue
        g = len(bounds)
        lo = hi = v = u
        while group_of[v] < 0:
            group_of[v] = g
            lo, hi = min(lo, v), max(hi, v)
            v = inv[images[v - 1] + 1]
        bounds.append((lo, hi))
    return group_of, bounds


def step_state(state: Sequence[int], i: int, j: int, k: int) -> tuple[int, ...]:
    new = list(exchange(state, i, j, k))
    # old i lands at i + k - j, old j at i, old k stays at k
    new[i + k - j] = new[i] = new[k] = 0
    return tuple(new)


def collapse_search(
    inst: TdtInstance,
    cfg: SearchConfig = SearchConfig(),
    stats: Optional[SearchStats] = None,
) -> Optional[StepTrace]:
    """Find a sequence of 3DT-steps reducing ``inst`` to the empty instance.

    Returns None when the exhaustive search proves the instance is not
    collapsible; raises BudgetExhausted when the node budget runs out first.
    """
    codec = _Codec(inst)
    rightmost = cfg.order == "rightmost"

    def children(state):
        moves = enabled_moves(state)
        if cfg.prune and len(moves) > 1:
            moves = persistent_moves(moves, *_instance_groups(state))
        if rightmost:
            moves.reverse()
        return [((t, i, j, k), step_state(state, i, j, k)) for i, j, k, t in moves]

    def is_goal(state):
        return not any(state)

    path = _run(codec.encode(inst), children, is_goal, cfg, stats)
    if path is None:
        return None
    steps = tuple(TraceStep(codec.triples[t], Transposition(i, j, k)) for t, i, j, k in path)
    return StepTrace(inst.state_key(), steps)


# permutation searches


def db3_sort_decision(
    p: Permutation,
    cfg: SearchConfig = SearchConfig(),
    stats: Optional[SearchStats] = None,
) -> Optional[StepTrace]:
    """Decide d_t(p) = d_b(p)/3, returning a witness scenario when it holds.

    Only moves removing three breakpoints can appear in such a scenario, so
    the search is restricted to them and remains complete.
    """
    if breakpoint_count(p.images) % 3:
        return None
    rightmost = cfg.order == "rightmost"
    n = p.n

    def children(images):
        inv = [0] * (n + 1)
        for x, v in enumerate(images):
            inv[v] = x
        moves = three_bp_moves_raw(images, inv)
        if cfg.prune and len(moves) > 1:
            moves = persistent_moves(moves, *_breakpoint_groups(images, inv))
        if rightmost:
            moves.reverse()
        return [((i, j, k), exchange(images, i, j, k)) for i, j, k in moves]

    def is_goal(images):
        return all(images[x] == x for x in range(n + 1))

    path = _run(p.images, children, is_goal, cfg, stats)
    if path is None:
        return None
    return StepTrace(str(p), tuple(TraceStep(None, Transposition(*m)) for m in path))


def _cut_adjacencies(images: Sequence[int], i: int, j: int, k: int) -> int:
    """Number of adjacencies created at the three cut points of tau_{i,j,k}."""
    return (
        (images[i - 1] + 1 == images[j])
        + (images[k - 1] + 1 == images[i])
        + (images[j - 1] + 1 == images[k])
    )


def exact_distance(p: Permutation, max_depth: int) -> int:
    """Transposition distance by iterative deepening with the ceil(d_b/3) bound."""
    n = p.n
    start = p.images
    db0 = breakpoint_count(start)
    if db0 == 0:
        return 0
    cuts = [(i, j, k) for i in range(1, n - 1) for j in range(i + 1, n) for k in range(j + 1, n + 1)]
    # failed[state] = largest remaining depth proven insufficient
    failed: dict[tuple[int, ...], int] = {}

    def search(images, db, remaining) -> bool:
        if db == 0:
            return True
        if db > 3 * remaining or failed.get(images, -1) >= remaining:
            return False
        adj = [False] + [images[x - 1] + 1 == images[x] for x in range(1, n + 1)]
        limit = 3 * (remaining - 1)
        ranked = []
        for i, j, k in cuts:
            new_db = db + adj[i] + adj[j] + adj[k] - _cut_adjacencies(images, i, j, k)
            if new_db <= limit:
                ranked.append((new_db, i, j, k))
        ranked.sort()
        for new_db, i, j, k in ranked:
            if search(exchange(images, i, j, k), new_db, remaining - 1):
                return True
        failed[images] = remaining
        return False

    bound = -(-db0 // 3)
    while bound <= max_depth:
        if search(start, db0, bound):
            return bound
        bound += 1
    raise DepthExceeded(f"distance exceeds max depth {max_depth}")


ORACLE_MAX_N = 10


@lru_cache(maxsize=None)
def _distance_table(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Sorted state codes of every permutation of [0..n] and their distances.

    Breadth-first search from the identity over the Cayley graph generated
    by all transpositions (closed under inverse, so distances are symmetric).
    States are coded by their inner images in base n.
    """
    inner = n - 1
    if inner <= 1:
        return np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int8)
    weights = np.array([n**c for c in range(inner)], dtype=np.int64)
    moves = []
    for i in range(1, n - 1):
        for j in range(i + 1, n):
            for k in range(j + 1, n + 1):
                idx = exchange(range(n + 1), i, j, k)
                # new[:, x] = old[:, idx[x]], so old column c carries weight of x = idx^-1(c)
                w = np.zeros(inner, dtype=np.int64)
                for x in range(1, n):
                    w[idx[x] - 1] = weights[x - 1]
                moves.append(w)
    W = np.stack(moves, axis=1)

    def decode(codes: np.ndarray) -> np.ndarray:
        rows = np.empty((len(codes), inner), dtype=np.int64)
        rest = codes.copy()
        for c in range(inner):
            rows[:, c] = rest % n
            rest //= n
        return rows

    start = np.array([int(np.arange(1, n) @ weights)], dtype=np.int64)
    visited = [start]
    dists = [np.zeros(1, dtype=np.int8)]
    seen = start.copy()
    frontier = start
    d = 0
    while len(frontier):
        d += 1
        nxt = np.unique((decode(frontier) @ W).ravel())
        nxt = nxt[~np.isin(nxt, seen, assume_unique=True)]
        if not len(nxt):
            break
        visited.append(nxt)
        dists.append(np.full(len(nxt), d, dtype=np.int8))
        seen = np.union1d(seen, nxt)
        frontier = nxt
    codes = np.concatenate(visited)
    dist = np.concatenate(dists)
    order = np.argsort(codes)
    return codes[order], dist[order]


def bfs_distance_oracle(p: Permutation) -> int:
    """Exact distance by exhaustive breadth-first search (n <= 10)."""
    n = p.n
    if n > ORACLE_MAX_N:
        raise SpanTooLarge(f"oracle limited to n <= {ORACLE_MAX_N}, got {n}")
    if n <= 2:
        return 0
    codes, dist = _distance_table(n)
    code = sum(v * n**c for c, v in enumerate(p.images[1:n]))
    pos = int(np.searchsorted(codes, code))
    return int(dist[pos])


# replay and trace files


def replay_instance(inst: TdtInstance, trace: StepTrace | Iterable[TraceStep]) -> list[TdtInstance]:
    """All states visited by the trace, starting with ``inst``; checks every move."""
    states = [inst]
    for n, step in enumerate(trace):
        if step.triple is None:
            raise NotWellOrdered(f"step {n} has no triple")
        tau = step_transposition(states[-1], step.triple)
        if tau != step.move:
            raise NotWellOrdered(f"step {n}: recorded {step.move}, expected {tau}")
        states.append(apply_step(states[-1], step.triple))
    return states


def replay_permutation(p: Permutation, trace: StepTrace | Iterable[TraceStep]) -> list[Permutation]:
    states = [p]
    for step in trace:
        states.append(apply_transposition(states[-1], step.move))
    return states


Start = Union[TdtInstance, Permutation]


def trace_records(trace: StepTrace, start: Start) -> list[dict]:
    if isinstance(start, TdtInstance):
        states: list = replay_instance(start, trace)
        render = TdtInstance.word_string
    else:
        states = replay_permutation(start, trace)
        render = str
    records = []
    for n, (step, after) in enumerate(zip(trace, states[1:])):
        records.append(
            {
                "index": n,
                "triple": None if step.triple is None else list(step.triple),
                "i": step.move.i,
                "j": step.move.j,
                "k": step.move.k,
                "word-after": render(after),
            }
        )
    return records


def write_trace(path: Union[str, Path], trace: StepTrace, start: Start) -> None:
    lines = [json.dumps(r) for r in trace_records(trace, start)]
    Path(path).write_text("".join(line + "\n" for line in lines))


def read_trace(path: Union[str, Path], initial_key: str = "") -> StepTrace:
    steps = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            triple = None if rec["triple"] is None else Triple(*rec["triple"])
            move = Transposition(rec["i"], rec["j"], rec["k"])
        except (ValueError, KeyError, TypeError) as exc:
            raise FormatError(f"trace line {lineno}: {exc}") from None
        if rec.get("index", len(steps)) != len(steps):
            raise FormatError(f"trace line {lineno}: index out of sequence")
        steps.append(TraceStep(triple, move))
    return StepTrace(initial_key, tuple(steps))


def check_complete(inst: TdtInstance, trace: StepTrace) -> TdtInstance:
    final = replay_instance(inst, trace)[-1]
    if not final.is_empty():
        raise IncompleteTrace(f"trace stops with {len(final.triples)} triples left")
    return final
