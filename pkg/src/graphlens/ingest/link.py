"""Similarity linking across leaf values and entity nodes.

Pairs are blocked on shared label tokens, compared with normalized
Levenshtein similarity on case-folded labels, and connected with sameAs
edges above the threshold. Identical labels (similarity 1.0) become
equivalence classes: the lowest node id is elected representative and the
class is compacted to p-1 equivalence edges incident to it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..store import ENTITY_KINDS, VALUE_KINDS, EdgeKind, GraphBuilder
from ..text import tokenize

DEFAULT_THRESHOLD = 0.8

_LINKABLE_KINDS = frozenset(VALUE_KINDS) | frozenset(ENTITY_KINDS)


class UnionFind:
    """Disjoint sets over node ids; the minimum id acts as the root."""

    def __init__(self) -> None:
        self.parent: dict[int, int] = {}

    def find(self, x: int) -> int:
        root = x
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while self.parent.get(x, x) != x:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        low, high = (rx, ry) if rx < ry else (ry, rx)
        self.parent[high] = low


def levenshtein(a: str, b: str) -> int:
    """Edit distance with the usual two-row dynamic program."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def similarity(a: str, b: str) -> float:
    """Normalized Levenshtein similarity on case-folded strings."""
    fa, fb = a.casefold(), b.casefold()
    if fa == fb:
        return 1.0
    longest = max(len(fa), len(fb))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(fa, fb) / longest


@dataclass
class LinkStats:
    candidates: int = 0
    pairs_compared: int = 0
    sameas_edges: int = 0
    equivalence_classes: int = 0
    equivalence_edges: int = 0
    classes: list[list[int]] = field(default_factory=list)


def link_similar_nodes(builder: GraphBuilder,
                       threshold: float = DEFAULT_THRESHOLD) -> LinkStats:
    """Add sameAs edges and compact equivalence classes on the builder."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside (0, 1]")
    stats = LinkStats()

    candidates = [
        node for node in range(builder.node_count)
        if builder.node_kind(node) in _LINKABLE_KINDS
    ]
    stats.candidates = len(candidates)

    blocks: dict[str, list[int]] = {}
    for node in candidates:
        for token in set(tokenize(builder.node_label(node))):
            blocks.setdefault(token, []).append(node)

    pairs = set()
    for block in blocks.values():
        for i, a in enumerate(block):
            for b in block[i + 1:]:
                pairs.add((a, b) if a < b else (b, a))

    union = UnionFind()
    for a, b in sorted(pairs):
        stats.pairs_compared += 1
        sim = similarity(builder.node_label(a), builder.node_label(b))
        if sim == 1.0:
            union.union(a, b)
        elif sim > threshold:
            builder.add_edge(a, b, EdgeKind.SAME_AS, f"{sim:.4f}", sim)
            stats.sameas_edges += 1

    classes: dict[int, list[int]] = {}
    for a, b in sorted(pairs):
        for node in (a, b):
            classes.setdefault(union.find(node), []).append(node)

    for root in sorted(classes):
        members = sorted(set(classes[root]))
        if len(members) < 2:
            continue
        representative = members[0]
        stats.equivalence_classes += 1
        stats.classes.append(members)
        for member in members[1:]:
            builder.set_representative(member, representative)
            builder.add_edge(representative, member, EdgeKind.EQUIVALENCE, "1.0000", 1.0)
            stats.equivalence_edges += 1
    return stats
