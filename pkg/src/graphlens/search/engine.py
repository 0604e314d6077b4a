"""Parallel keyword search over a frozen graph.

Work unit: a (tree, edge) pair, meaning "grow this tree along this
root-incident edge". Pairs live in per-worker priority queues; an idle
worker steals a single pair from the longest queue. New trees register in a
shared history exactly once (check-and-insert), then enqueue their own grow
pairs and merge with every known tree sharing their root. Full-coverage
trees are terminal: they are tested as solutions and never re-enqueued.

The search stops on deadline, on reaching the solution cap, or when every
worker is idle and all queues stay empty across a double scan.
"""

from __future__ import annotations

import heapq
import itertools
import threading
import time
from dataclasses import dataclass, field

from ..store import FrozenGraph, is_pseudo_source
from .trees import (
    PartialTree,
    Query,
    QueryContext,
    grow,
    is_solution,
    iter_bits,
    make_seed,
    merge,
)

_SHARDS = 16


class _ShardedSet:
    """Set of tree signatures with atomic check-and-insert.

    Membership tests go through the shard dict without locking; insertion
    takes the shard lock so only one worker ever claims a signature.
    """

    __slots__ = ("_shards", "_locks")

    def __init__(self):
        self._shards = tuple({} for _ in range(_SHARDS))
        self._locks = tuple(threading.Lock() for _ in range(_SHARDS))

    def __contains__(self, signature) -> bool:
        return signature in self._shards[hash(signature) % _SHARDS]

    def add(self, signature) -> bool:
        """Insert; True when this call claimed the signature."""
        index = hash(signature) % _SHARDS
        shard = self._shards[index]
        if signature in shard:
            return False
        with self._locks[index]:
            if signature in shard:
                return False
            shard[signature] = None
            return True

    def __len__(self) -> int:
        return sum(len(s) for s in self._shards)


class _TreesByRoot:
    """Root -> registered partial trees, sharded by root id."""

    __slots__ = ("_shards", "_locks")

    def __init__(self):
        self._shards = tuple({} for _ in range(_SHARDS))
        self._locks = tuple(threading.Lock() for _ in range(_SHARDS))

    def append(self, tree: PartialTree) -> None:
        index = tree.root % _SHARDS
        with self._locks[index]:
            self._shards[index].setdefault(tree.root, []).append(tree)

    def partners(self, root: int) -> tuple[PartialTree, ...]:
        index = root % _SHARDS
        with self._locks[index]:
            bucket = self._shards[index].get(root)
            return tuple(bucket) if bucket else ()


class _PairQueue:
    """Priority queue of (tree, edge) pairs.

    Ordering: more keywords matched first, then smaller trees, then higher
    specificity of the candidate edge; the edge id and an insertion counter
    break the remaining ties deterministically.
    """

    __slots__ = ("_lock", "_heap", "_count")

    def __init__(self):
        self._lock = threading.Lock()
        self._heap: list = []
        self._count = itertools.count()

    def push(self, kw_matched: int, tree_size: int, specificity: float,
             tree: PartialTree, edge: int) -> None:
        entry = (-kw_matched, tree_size, -specificity, edge,
                 next(self._count), tree)
        with self._lock:
            heapq.heappush(self._heap, entry)

    def pop(self):
        with self._lock:
            if not self._heap:
                return None
            entry = heapq.heappop(self._heap)
            return entry[5], entry[3]

    def __len__(self) -> int:
        return len(self._heap)


@dataclass
class _WorkerCounters:
    trees_built: int = 0
    full_trees: int = 0
    grows: int = 0
    merges: int = 0
    steals: int = 0


@dataclass
class SearchStats:
    keywords: tuple[str, ...]
    workers: int
    seed_count: int
    total_ms: float = 0.0
    t_first_ms: float | None = None
    t_last_ms: float | None = None
    solutions: int = 0
    trees_built: int = 0
    full_trees: int = 0
    partial_trees: int = 0
    grows: int = 0
    merges: int = 0
    steals: int = 0
    timed_out: bool = False
    solution_sources: list[int] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "keywords": list(self.keywords),
            "workers": self.workers,
            "seed_count": self.seed_count,
            "total_ms": self.total_ms,
            "t_first_ms": self.t_first_ms,
            "t_last_ms": self.t_last_ms,
            "solutions": self.solutions,
            "trees_built": self.trees_built,
            "full_trees": self.full_trees,
            "partial_trees": self.partial_trees,
            "grows": self.grows,
            "merges": self.merges,
            "steals": self.steals,
            "timed_out": self.timed_out,
            "solution_sources": list(self.solution_sources),
        }


@dataclass
class SearchResult:
    solutions: list[PartialTree]
    stats: SearchStats


class _SearchState:
    def __init__(self, ctx: QueryContext, query: Query, on_solution, cancel):
        self.ctx = ctx
        self.nt = query.workers
        self.max_solutions = query.max_solutions
        self.on_solution = on_solution
        self.cancel = cancel
        self.history = _ShardedSet()
        self.by_root = _TreesByRoot()
        self.queues = tuple(_PairQueue() for _ in range(self.nt))
        self.counters = tuple(_WorkerCounters() for _ in range(self.nt))
        self.stop = threading.Event()
        self.solutions: list[PartialTree] = []
        self._candidate_keys = _ShardedSet()
        self._solution_lock = threading.Lock()
        self.idle_count = 0
        self.idle_lock = threading.Lock()
        self.started = time.monotonic()
        self.deadline = None if query.timeout is None else self.started + query.timeout
        self.t_first: float | None = None
        self.t_last: float | None = None
        self.timed_out = False

    def past_deadline(self) -> bool:
        if self.cancel is not None and self.cancel.is_set():
            self.stop.set()
            return True
        if self.deadline is not None and time.monotonic() >= self.deadline:
            self.timed_out = True
            self.stop.set()
            return True
        return False

    def consider_solution(self, tree: PartialTree) -> None:
        """Test a full-coverage tree. The (edges, nodes) key is claimed
        before the minimality test so each distinct candidate, which the
        search rebuilds once per rooting, is tested only once."""
        if not self._candidate_keys.add((tree.edges, tree.nodes)):
            return
        if not is_solution(self.ctx, tree):
            return
        with self._solution_lock:
            if self.stop.is_set():
                return
            if (self.max_solutions is not None
                    and len(self.solutions) >= self.max_solutions):
                return
            self.solutions.append(tree)
            now = time.monotonic()
            if self.t_first is None:
                self.t_first = now
            self.t_last = now
            if (self.max_solutions is not None
                    and len(self.solutions) >= self.max_solutions):
                self.stop.set()
            callback = self.on_solution
        if callback is not None:
            callback(tree)


def _push_grow_pairs(state: _SearchState, queue: _PairQueue, tree: PartialTree) -> None:
    graph = state.ctx.graph
    kw_matched = tree.coverage.bit_count()
    size = tree.size
    edges = graph.edges
    tree_edges = tree.edges
    tree_nodes = tree.nodes
    for edge in graph.incident_edges(tree.root):
        if tree_edges >> edge & 1:
            continue
        record = edges[edge]
        other = record.target if record.source == tree.root else record.source
        if tree_nodes >> other & 1:
            continue
        queue.push(kw_matched, size, record.specificity, tree, edge)


def _register_new(state: _SearchState, worker: int, tree: PartialTree) -> None:
    """Process a tree freshly claimed in the history: solution-test
    full-coverage trees, otherwise enqueue grows and merge to fixpoint."""
    ctx = state.ctx
    counters = state.counters[worker]
    queue = state.queues[worker]
    stack = [tree]
    while stack:
        current = stack.pop()
        if current.coverage == ctx.full_mask:
            counters.full_trees += 1
            state.consider_solution(current)
            continue
        state.by_root.append(current)
        _push_grow_pairs(state, queue, current)
        for partner in state.by_root.partners(current.root):
            if partner is current:
                continue
            counters.merges += 1
            merged = merge(ctx, current, partner)
            if merged is None:
                continue
            if not state.history.add(merged.signature):
                continue
            counters.trees_built += 1
            stack.append(merged)
        if state.stop.is_set():
            return


def _steal(state: _SearchState, worker: int):
    victim = None
    longest = 0
    for i, queue in enumerate(state.queues):
        if i == worker:
            continue
        size = len(queue)
        if size > longest:
            longest = size
            victim = queue
    if victim is None:
        return None
    return victim.pop()


def _wait_idle(state: _SearchState, worker: int) -> bool:
    """Park until work shows up somewhere. True means the search is over:
    every worker went idle and a double scan saw only empty queues."""
    with state.idle_lock:
        state.idle_count += 1
    try:
        while not state.stop.is_set():
            if state.past_deadline():
                return True
            if any(len(q) for q in state.queues):
                return False
            if state.idle_count == state.nt:
                time.sleep(0.0002)
                if (state.idle_count == state.nt
                        and not any(len(q) for q in state.queues)):
                    state.stop.set()
                    return True
            time.sleep(0.0002)
        return True
    finally:
        with state.idle_lock:
            state.idle_count -= 1


def _worker_loop(state: _SearchState, worker: int) -> None:
    queue = state.queues[worker]
    counters = state.counters[worker]
    ctx = state.ctx
    ticks = 0
    while not state.stop.is_set():
        ticks += 1
        if ticks % 64 == 0 and state.past_deadline():
            return
        pair = queue.pop()
        if pair is None:
            pair = _steal(state, worker)
            if pair is not None:
                counters.steals += 1
        if pair is None:
            if _wait_idle(state, worker):
                return
            continue
        tree, edge = pair
        counters.grows += 1
        grown = grow(ctx, tree, edge)
        if grown is None:
            continue
        if not state.history.add(grown.signature):
            continue
        counters.trees_built += 1
        _register_new(state, worker, grown)


def _seed(state: _SearchState) -> int:
    ctx = state.ctx
    pair_index = 0
    seeds = 0
    for node in ctx.seed_nodes():
        tree = make_seed(ctx, node)
        state.history.add(tree.signature)
        state.counters[0].trees_built += 1
        seeds += 1
        if tree.coverage == ctx.full_mask:
            state.counters[0].full_trees += 1
            state.consider_solution(tree)
            continue
        state.by_root.append(tree)
        graph = ctx.graph
        kw_matched = tree.coverage.bit_count()
        for edge in graph.incident_edges(node):
            record = graph.edges[edge]
            queue = state.queues[pair_index % state.nt]
            queue.push(kw_matched, 0, record.specificity, tree, edge)
            pair_index += 1
    return seeds


def run_search(graph: FrozenGraph, query: Query, on_solution=None,
               cancel: threading.Event | None = None) -> SearchResult:
    """Execute a keyword query; returns every minimal answer tree found
    (capped by the query's max_solutions) plus run statistics. Setting the
    cancel event stops the search at its next stop-condition check."""
    ctx = QueryContext(graph, query.keywords)
    state = _SearchState(ctx, query, on_solution, cancel)
    seeds = _seed(state)

    if not state.stop.is_set() and not state.past_deadline():
        if state.nt == 1:
            _worker_loop(state, 0)
        else:
            threads = [
                threading.Thread(target=_worker_loop, args=(state, i),
                                 name=f"search-{i}", daemon=True)
                for i in range(state.nt)
            ]
            for thread in threads:
                thread.start()
            for thread in threads:
                thread.join()

    finished = time.monotonic()
    stats = SearchStats(keywords=query.keywords, workers=state.nt, seed_count=seeds)
    stats.total_ms = (finished - state.started) * 1000.0
    if state.t_first is not None:
        stats.t_first_ms = (state.t_first - state.started) * 1000.0
        stats.t_last_ms = (state.t_last - state.started) * 1000.0
    stats.solutions = len(state.solutions)
    for counters in state.counters:
        stats.trees_built += counters.trees_built
        stats.full_trees += counters.full_trees
        stats.grows += counters.grows
        stats.merges += counters.merges
        stats.steals += counters.steals
    stats.partial_trees = stats.trees_built - stats.full_trees
    stats.timed_out = state.timed_out
    stats.solution_sources = [count_sources(graph, t) for t in state.solutions]
    return SearchResult(solutions=list(state.solutions), stats=stats)


def count_sources(graph: FrozenGraph, tree: PartialTree) -> int:
    """Distinct real data sources touched by the tree's nodes; derived
    pseudo-sources (entity pool) are not counted."""
    sources = set()
    for node in iter_bits(tree.nodes):
        source = graph.node_source(node)
        if not is_pseudo_source(source):
            sources.add(source)
    return len(sources)


def rank_solutions(graph: FrozenGraph, solutions, key=None) -> list[PartialTree]:
    """Order solutions for presentation: smaller trees first, higher total
    edge specificity next. Sort is stable; pass key to override."""
    if key is None:
        def key(tree: PartialTree):
            total = sum(graph.edges[e].specificity for e in iter_bits(tree.edges))
            return (tree.size, -total)
    return sorted(solutions, key=key)
