"""In-memory graph with a frozen, search-oriented physical layout.

Build phase: a single writer adds nodes and edges through GraphBuilder.
freeze() compacts everything into fixed-size row records (a static block of
K neighbor slots per node plus one shared overflow area), resolves
representative chains, computes per-edge specificity and builds the keyword
index. A FrozenGraph is immutable and safe for any number of concurrent
readers.
"""

from __future__ import annotations

import enum
import sys
from typing import Iterator, NamedTuple

from .text import normalize_keyword, tokenize

DEFAULT_STATIC_SLOTS = 5

# Marks an unused static neighbor slot / absent overflow segment.
EMPTY = -1

# Source ids starting with this prefix denote derived pools (for example
# the shared extracted-entity pool), not ingested data sources.
PSEUDO_SOURCE_PREFIX = "$"


def is_pseudo_source(source_id: str) -> bool:
    return source_id.startswith(PSEUDO_SOURCE_PREFIX)


class GraphError(Exception):
    """Invalid graph construction or access."""


class FrozenError(GraphError):
    """Mutation attempted on a frozen graph."""


class NodeKind(enum.Enum):
    XML_ELEMENT = "xml-element"
    XML_TEXT = "xml-text"
    JSON_OBJECT = "json-object"
    JSON_ARRAY = "json-array"
    JSON_VALUE = "json-value"
    HTML_ELEMENT = "html-element"
    RDF_RESOURCE = "rdf-resource"
    RDF_LITERAL = "rdf-literal"
    REL_ROW = "rel-row"
    REL_VALUE = "rel-value"
    ENTITY_PERSON = "entity-person"
    ENTITY_ORGANIZATION = "entity-organization"
    ENTITY_LOCATION = "entity-location"
    URI = "uri"


ENTITY_KINDS = (
    NodeKind.ENTITY_PERSON,
    NodeKind.ENTITY_ORGANIZATION,
    NodeKind.ENTITY_LOCATION,
)

# Node kinds whose labels are leaf values, eligible for similarity linking.
VALUE_KINDS = (
    NodeKind.XML_TEXT,
    NodeKind.JSON_VALUE,
    NodeKind.RDF_LITERAL,
    NodeKind.REL_VALUE,
)


class EdgeKind(enum.Enum):
    STRUCTURE = "structure"
    EXTRACTION = "extraction"
    SAME_AS = "sameAs"
    EQUIVALENCE = "equivalence"


class NodeRecord:
    """Fixed-shape node row: source, representative, K static neighbor slots,
    overflow segment reference and metadata reference."""

    __slots__ = ("source_ref", "representative", "static_slots", "overflow_ref", "metadata_ref")

    def __init__(self, source_ref: int, representative: int,
                 static_slots: tuple[int, ...], overflow_ref: int, metadata_ref: int):
        self.source_ref = source_ref
        self.representative = representative
        self.static_slots = static_slots
        self.overflow_ref = overflow_ref
        self.metadata_ref = metadata_ref


class NodeMeta:
    __slots__ = ("kind", "label")

    def __init__(self, kind: NodeKind, label: str):
        self.kind = kind
        self.label = label


class EdgeRecord:
    __slots__ = ("source", "target", "specificity", "metadata_ref")

    def __init__(self, source: int, target: int, specificity: float, metadata_ref: int):
        self.source = source
        self.target = target
        self.specificity = specificity
        self.metadata_ref = metadata_ref


class EdgeMeta:
    __slots__ = ("kind", "label", "confidence")

    def __init__(self, kind: EdgeKind, label: str, confidence: float):
        self.kind = kind
        self.label = label
        self.confidence = confidence


class Neighbor(NamedTuple):
    edge: int
    other: int
    forward: bool  # True when the reference node is the edge source


class GraphBuilder:
    """Single-writer accumulator for nodes and edges; freeze() seals it."""

    def __init__(self, static_slots: int = DEFAULT_STATIC_SLOTS):
        if static_slots < 1:
            raise ValueError("static_slots must be >= 1")
        self.static_slots = static_slots
        self._sources: list[str] = []
        self._source_index: dict[str, int] = {}
        self._node_source: list[int] = []
        self._node_kind: list[NodeKind] = []
        self._node_label: list[str] = []
        self._adjacency: list[list[int]] = []
        # Sparse representative parent pointers; absent means self.
        self._rep_parent: dict[int, int] = {}
        self._edge_source: list[int] = []
        self._edge_target: list[int] = []
        self._edge_kind: list[EdgeKind] = []
        self._edge_label: list[str] = []
        self._edge_confidence: list[float] = []
        self._frozen = False

    # -- introspection used by ingestion and tests ------------------------

    @property
    def node_count(self) -> int:
        return len(self._node_label)

    @property
    def edge_count(self) -> int:
        return len(self._edge_label)

    def node_label(self, node: int) -> str:
        return self._node_label[node]

    def node_kind(self, node: int) -> NodeKind:
        return self._node_kind[node]

    def node_source(self, node: int) -> str:
        return self._sources[self._node_source[node]]

    def incident_edges(self, node: int) -> tuple[int, ...]:
        return tuple(self._adjacency[node])

    # -- mutation ----------------------------------------------------------

    def _check_open(self) -> None:
        if self._frozen:
            raise FrozenError("graph is frozen; create a new builder to mutate")

    def _check_node(self, node: int) -> None:
        if not 0 <= node < len(self._node_label):
            raise GraphError(f"unknown node id {node}")

    def add_node(self, source_id: str, kind: NodeKind, label: str) -> int:
        self._check_open()
        if not isinstance(kind, NodeKind):
            raise GraphError(f"invalid node kind {kind!r}")
        ref = self._source_index.get(source_id)
        if ref is None:
            ref = len(self._sources)
            self._sources.append(sys.intern(source_id))
            self._source_index[source_id] = ref
        node = len(self._node_label)
        self._node_source.append(ref)
        self._node_kind.append(kind)
        self._node_label.append(label)
        self._adjacency.append([])
        return node

    def add_edge(self, source: int, target: int, kind: EdgeKind = EdgeKind.STRUCTURE,
                 label: str = "", confidence: float = 1.0) -> int:
        self._check_open()
        self._check_node(source)
        self._check_node(target)
        if not isinstance(kind, EdgeKind):
            raise GraphError(f"invalid edge kind {kind!r}")
        if source == target:
            raise GraphError(f"self-loop rejected on node {source}")
        if not 0.0 < confidence <= 1.0:
            raise GraphError(f"confidence {confidence} outside (0, 1]")
        if kind is EdgeKind.EQUIVALENCE and confidence != 1.0:
            raise GraphError("equivalence edges must carry confidence 1.0")
        edge = len(self._edge_label)
        self._edge_source.append(source)
        self._edge_target.append(target)
        self._edge_kind.append(kind)
        self._edge_label.append(sys.intern(label))
        self._edge_confidence.append(confidence)
        self._adjacency[source].append(edge)
        self._adjacency[target].append(edge)
        return edge

    def set_representative(self, member: int, representative: int) -> None:
        """Point member at its equivalence-class representative.

        Chains are allowed and resolved at freeze time; a cycle is rejected
        here by walking the existing pointers from the representative.
        """
        self._check_open()
        self._check_node(member)
        self._check_node(representative)
        if member == representative:
            return
        cursor = representative
        while True:
            parent = self._rep_parent.get(cursor)
            if parent is None or parent == cursor:
                break
            if parent == member:
                raise GraphError(
                    f"representative cycle: {member} -> {representative} -> ... -> {member}"
                )
            cursor = parent
        if cursor == member:
            raise GraphError(
                f"representative cycle: {member} -> {representative} -> ... -> {member}"
            )
        self._rep_parent[member] = representative

    # -- freeze ------------------------------------------------------------

    def _resolved_representatives(self) -> list[int]:
        resolved: dict[int, int] = {}

        def resolve(node: int) -> int:
            seen = []
            cursor = node
            while cursor not in resolved:
                parent = self._rep_parent.get(cursor, cursor)
                if parent == cursor:
                    resolved[cursor] = cursor
                    break
                seen.append(cursor)
                cursor = parent
            terminal = resolved[cursor] if cursor in resolved else cursor
            for waypoint in seen:
                resolved[waypoint] = terminal
            return resolved[node] if node in resolved else terminal

        return [resolve(n) for n in range(len(self._node_label))]

    def freeze(self) -> "FrozenGraph":
        self._check_open()
        self._frozen = True
        k = self.static_slots

        representatives = self._resolved_representatives()

        # Specificity: per endpoint, 1 / (number of incident edges sharing
        # the edge's label); the stored value is the minimum of both sides.
        label_counts: list[dict[str, int]] = [dict() for _ in range(len(self._node_label))]
        for edge in range(len(self._edge_label)):
            label = self._edge_label[edge]
            for endpoint in (self._edge_source[edge], self._edge_target[edge]):
                counts = label_counts[endpoint]
                counts[label] = counts.get(label, 0) + 1

        edges = []
        edge_meta = []
        for edge in range(len(self._edge_label)):
            src = self._edge_source[edge]
            dst = self._edge_target[edge]
            label = self._edge_label[edge]
            spec = min(1.0 / label_counts[src][label], 1.0 / label_counts[dst][label])
            edges.append(EdgeRecord(src, dst, spec, edge))
            edge_meta.append(EdgeMeta(self._edge_kind[edge], label, self._edge_confidence[edge]))

        overflow: list[int] = []
        nodes = []
        node_meta = []
        for n in range(len(self._node_label)):
            incident = self._adjacency[n]
            static = incident[:k] + [EMPTY] * (k - len(incident))
            if len(incident) > k:
                ref = len(overflow)
                rest = incident[k:]
                overflow.append(len(rest))
                overflow.extend(rest)
            else:
                ref = EMPTY
            nodes.append(NodeRecord(self._node_source[n], representatives[n],
                                    tuple(static), ref, n))
            node_meta.append(NodeMeta(self._node_kind[n], self._node_label[n]))

        index: dict[str, set[int]] = {}
        for n, label in enumerate(self._node_label):
            for token in set(tokenize(label)):
                index.setdefault(token, set()).add(n)
        frozen_index = {token: frozenset(ids) for token, ids in sorted(index.items())}

        return FrozenGraph(
            static_slots=k,
            sources=tuple(self._sources),
            nodes=tuple(nodes),
            node_meta=tuple(node_meta),
            edges=tuple(edges),
            edge_meta=tuple(edge_meta),
            overflow=tuple(overflow),
            index=frozen_index,
        )


class FrozenGraph:
    """Immutable node/edge tables plus the keyword index."""

    __slots__ = ("static_slots", "sources", "nodes", "node_meta",
                 "edges", "edge_meta", "overflow", "_index")

    def __init__(self, static_slots: int, sources: tuple[str, ...],
                 nodes: tuple[NodeRecord, ...], node_meta: tuple[NodeMeta, ...],
                 edges: tuple[EdgeRecord, ...], edge_meta: tuple[EdgeMeta, ...],
                 overflow: tuple[int, ...], index: dict[str, frozenset[int]]):
        self.static_slots = static_slots
        self.sources = sources
        self.nodes = nodes
        self.node_meta = node_meta
        self.edges = edges
        self.edge_meta = edge_meta
        self.overflow = overflow
        self._index = index

    # -- node accessors ------------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def node_label(self, node: int) -> str:
        return self.node_meta[node].label

    def node_kind(self, node: int) -> NodeKind:
        return self.node_meta[node].kind

    def node_source(self, node: int) -> str:
        return self.sources[self.nodes[node].source_ref]

    def representative(self, node: int) -> int:
        return self.nodes[node].representative

    # -- edge accessors --------------------------------------------------------

    def edge_source(self, edge: int) -> int:
        return self.edges[edge].source

    def edge_target(self, edge: int) -> int:
        return self.edges[edge].target

    def edge_kind(self, edge: int) -> EdgeKind:
        return self.edge_meta[edge].kind

    def edge_label(self, edge: int) -> str:
        return self.edge_meta[edge].label

    def edge_confidence(self, edge: int) -> float:
        return self.edge_meta[edge].confidence

    def edge_specificity(self, edge: int) -> float:
        return self.edges[edge].specificity

    def edge_other(self, edge: int, node: int) -> int:
        record = self.edges[edge]
        return record.target if record.source == node else record.source

    # -- adjacency ---------------------------------------------------------

    def incident_edges(self, node: int) -> Iterator[int]:
        """Yield incident edge ids: static slots first, then overflow."""
        record = self.nodes[node]
        for edge in record.static_slots:
            if edge == EMPTY:
                return
            yield edge
        ref = record.overflow_ref
        if ref == EMPTY:
            return
        count = self.overflow[ref]
        for i in range(ref + 1, ref + 1 + count):
            yield self.overflow[i]

    def degree(self, node: int) -> int:
        record = self.nodes[node]
        used = sum(1 for slot in record.static_slots if slot != EMPTY)
        if record.overflow_ref != EMPTY:
            used += self.overflow[record.overflow_ref]
        return used

    def neighbors(self, node: int) -> Iterator[Neighbor]:
        """Iterate (edge, other endpoint, direction) for every incident edge."""
        if not 0 <= node < len(self.nodes):
            raise GraphError(f"unknown node id {node}")
        for edge in self.incident_edges(node):
            record = self.edges[edge]
            if record.source == node:
                yield Neighbor(edge, record.target, True)
            else:
                yield Neighbor(edge, record.source, False)

    # -- keyword index -------------------------------------------------------

    def lookup(self, word: str) -> frozenset[int]:
        """Nodes whose normalized label contains the normalized token."""
        token = normalize_keyword(word)
        return self._index.get(token, frozenset())

    def index_tokens(self) -> Iterator[str]:
        return iter(self._index)
