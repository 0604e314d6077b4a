"""Answer-tree construction: seeds, Grow, Merge and the solution test.

A partial tree is identified by (root, edge set). The same edge set rooted
elsewhere is a different tree for history purposes, while solutions
deduplicate on the (edge set, node set) pair alone.

Edge and node sets are stored as int bitmasks: graphs reach tens of
thousands of edges and exploration keeps hundreds of thousands of trees
alive, so per-tree cost must stay at a couple of machine-word buffers
rather than a hash table each.

Trees carry, per query keyword, the equivalence class of the nodes matched
so far (kw_class). Two matchers of one keyword may coexist in a tree only
when they belong to the same equivalence class; anything else can never
become a solution and is pruned at construction time.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..store import FrozenGraph, GraphError
from ..text import normalize_keyword

UNMATCHED = -1


def iter_bits(mask: int):
    """Yield the set bit positions of mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Query:
    """Normalized keyword query plus run limits.

    max_solutions None means exhaustive; timeout None means no deadline;
    timeout 0.0 stops right after seeding.
    """

    keywords: tuple[str, ...]
    max_solutions: int | None = None
    timeout: float | None = None
    workers: int = 1

    @staticmethod
    def build(words, max_solutions: int | None = None,
              timeout: float | None = None, workers: int = 1) -> "Query":
        normalized = []
        for word in words:
            token = normalize_keyword(word)
            if token not in normalized:
                normalized.append(token)
        if not normalized:
            raise ValueError("a query needs at least one keyword")
        if workers < 1:
            raise ValueError("workers must be >= 1")
        if max_solutions is not None and max_solutions < 1:
            raise ValueError("max_solutions must be >= 1 or None")
        if timeout is not None and timeout < 0:
            raise ValueError("timeout must be >= 0 or None")
        return Query(tuple(normalized), max_solutions, timeout, workers)


class QueryContext:
    """Immutable per-query view over a frozen graph: matcher masks and
    equivalence classes used by every tree operation."""

    __slots__ = ("graph", "keywords", "m", "full_mask", "match_nodes",
                 "match_masks", "node_mask")

    def __init__(self, graph: FrozenGraph, keywords: tuple[str, ...]):
        self.graph = graph
        self.keywords = keywords
        self.m = len(keywords)
        self.full_mask = (1 << self.m) - 1
        self.match_nodes = tuple(graph.lookup(word) for word in keywords)
        self.match_masks = tuple(sum(1 << n for n in nodes)
                                 for nodes in self.match_nodes)
        node_mask: dict[int, int] = {}
        for i, nodes in enumerate(self.match_nodes):
            bit = 1 << i
            for node in nodes:
                node_mask[node] = node_mask.get(node, 0) | bit
        self.node_mask = node_mask

    def seed_nodes(self) -> list[int]:
        return sorted(self.node_mask)


class PartialTree:
    __slots__ = ("root", "edges", "nodes", "coverage", "kw_class")

    def __init__(self, root: int, edges: int, nodes: int,
                 coverage: int, kw_class: tuple[int, ...]):
        self.root = root
        self.edges = edges
        self.nodes = nodes
        self.coverage = coverage
        self.kw_class = kw_class

    @classmethod
    def from_ids(cls, root: int, edges, nodes, coverage: int,
                 kw_class: tuple[int, ...]) -> "PartialTree":
        return cls(root, sum(1 << e for e in set(edges)),
                   sum(1 << n for n in set(nodes)), coverage, kw_class)

    @property
    def signature(self) -> tuple[int, int]:
        return (self.root, self.edges)

    @property
    def size(self) -> int:
        return self.edges.bit_count()

    def edge_set(self) -> frozenset[int]:
        return frozenset(iter_bits(self.edges))

    def node_set(self) -> frozenset[int]:
        return frozenset(iter_bits(self.nodes))

    def solution_key(self) -> tuple[frozenset[int], frozenset[int]]:
        # Root-independent identity; the node set only matters for
        # zero-edge trees, where the edge set alone is empty.
        return (self.edge_set(), self.node_set())

    def __repr__(self) -> str:  # debugging aid only
        return f"PartialTree(root={self.root}, edges={sorted(iter_bits(self.edges))})"


def make_seed(ctx: QueryContext, node: int) -> PartialTree:
    mask = ctx.node_mask.get(node, 0)
    if not mask:
        raise GraphError(f"node {node} matches no query keyword")
    rep = ctx.graph.nodes[node].representative
    kw_class = tuple(rep if mask >> i & 1 else UNMATCHED for i in range(ctx.m))
    return PartialTree(node, 0, 1 << node, mask, kw_class)


def grow(ctx: QueryContext, tree: PartialTree, edge: int,
         history=None) -> PartialTree | None:
    """Extend the tree with a root-incident edge and reroot at its other end.

    Returns None when the step closes a cycle, introduces a matcher from a
    conflicting equivalence class, or (when a history is given) rebuilds an
    already-known tree.
    """
    record = ctx.graph.edges[edge]
    root = tree.root
    if record.source == root:
        other = record.target
    elif record.target == root:
        other = record.source
    else:
        raise GraphError(f"edge {edge} is not incident to tree root {root}")
    if tree.nodes >> other & 1:
        return None

    mask = ctx.node_mask.get(other, 0)
    kw_class = tree.kw_class
    if mask:
        rep = ctx.graph.nodes[other].representative
        merged = list(kw_class)
        for i in range(ctx.m):
            if mask >> i & 1:
                existing = merged[i]
                if existing == UNMATCHED:
                    merged[i] = rep
                elif existing != rep:
                    return None
        kw_class = tuple(merged)

    grown = PartialTree(other, tree.edges | (1 << edge),
                        tree.nodes | (1 << other),
                        tree.coverage | mask, kw_class)
    if history is not None and grown.signature in history:
        return None
    return grown


def merge(ctx: QueryContext, left: PartialTree, right: PartialTree,
          history=None) -> PartialTree | None:
    """Combine two trees sharing only their root.

    Keyword coverage may overlap solely where both sides matched the same
    equivalence class; otherwise the merged tree could never satisfy the
    solution condition and is rejected.
    """
    if left.root != right.root:
        raise GraphError("merge partners must share their root")

    kw_class = list(left.kw_class)
    for i in range(ctx.m):
        other = right.kw_class[i]
        if other == UNMATCHED:
            continue
        if kw_class[i] == UNMATCHED:
            kw_class[i] = other
        elif kw_class[i] != other:
            return None

    if (left.nodes & right.nodes).bit_count() != 1:
        return None

    merged = PartialTree(left.root, left.edges | right.edges,
                         left.nodes | right.nodes,
                         left.coverage | right.coverage, tuple(kw_class))
    if history is not None and merged.signature in history:
        return None
    return merged


def is_solution(ctx: QueryContext, tree: PartialTree) -> bool:
    """Full coverage, one equivalence class per keyword, and no removable
    leaf: dropping any leaf edge must lose some keyword."""
    if tree.coverage != ctx.full_mask:
        return False

    counts = []
    for i in range(ctx.m):
        present = ctx.match_masks[i] & tree.nodes
        count = present.bit_count()
        if count > 1:
            reps = {ctx.graph.nodes[n].representative for n in iter_bits(present)}
            if len(reps) > 1:
                return False
        counts.append(count)

    if not tree.edges:
        return True

    degree: dict[int, int] = {}
    edges = ctx.graph.edges
    for e in iter_bits(tree.edges):
        record = edges[e]
        degree[record.source] = degree.get(record.source, 0) + 1
        degree[record.target] = degree.get(record.target, 0) + 1
    for node, deg in degree.items():
        if deg != 1:
            continue
        mask = ctx.node_mask.get(node, 0)
        needed = False
        for i in range(ctx.m):
            if mask >> i & 1 and counts[i] == 1:
                needed = True
                break
        if not needed:
            return False
    return True
