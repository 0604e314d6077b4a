"""Ingestion orchestration: map sources, apply policy, extract entities."""

from __future__ import annotations

import pathlib
from dataclasses import dataclass, field

from ..policy import DEFAULT, EMPTY_POLICY, FORCE, ExtractionPolicy
from ..store import EdgeKind, GraphBuilder, NodeKind
from ..text import normalize_key
from .extract import Extractor
from .link import LinkStats, link_similar_nodes
from .sources import (
    IngestError,
    MappedSource,
    map_html,
    map_json,
    map_rdf,
    map_rel,
    map_xml,
)

# Entity nodes are shared across sources and carry this pseudo source id.
ENTITY_SOURCE = "$entities"

_ENTITY_NODE_KINDS = {
    "Person": NodeKind.ENTITY_PERSON,
    "Organization": NodeKind.ENTITY_ORGANIZATION,
    "Location": NodeKind.ENTITY_LOCATION,
}

_SUFFIX_FORMATS = {
    ".xml": "xml",
    ".json": "json",
    ".html": "html",
    ".htm": "html",
    ".nt": "rdf",
    ".csv": "rel",
}


@dataclass
class IngestStats:
    sources: list[str] = field(default_factory=list)
    texts_seen: int = 0
    extractor_calls: int = 0
    skipped_texts: int = 0
    forced_entities: int = 0
    entities_created: int = 0
    extraction_edges: int = 0
    extraction_errors: list[tuple[int, str]] = field(default_factory=list)
    link: LinkStats | None = None

    def as_dict(self) -> dict:
        return {
            "sources": list(self.sources),
            "texts_seen": self.texts_seen,
            "extractor_calls": self.extractor_calls,
            "skipped_texts": self.skipped_texts,
            "forced_entities": self.forced_entities,
            "entities_created": self.entities_created,
            "extraction_edges": self.extraction_edges,
            "extraction_errors": len(self.extraction_errors),
            "sameas_edges": self.link.sameas_edges if self.link else None,
            "equivalence_classes": self.link.equivalence_classes if self.link else None,
        }


class GraphIngestor:
    """Builds one graph out of many sources.

    Entity nodes are shared per (type, normalized surface) across all
    sources handled by this ingestor. Extraction failures are recorded and
    skipped; parse failures abort the source before the graph is touched.
    """

    def __init__(self, builder: GraphBuilder | None = None,
                 extractor: Extractor | None = None,
                 policy: ExtractionPolicy = EMPTY_POLICY):
        self.builder = builder if builder is not None else GraphBuilder()
        self.extractor = extractor
        self.policy = policy
        self.stats = IngestStats()
        self._entities: dict[tuple[str, str], int] = {}

    # -- entry points -----------------------------------------------------

    def ingest_file(self, path: str | pathlib.Path, source_id: str | None = None,
                    fmt: str | None = None) -> MappedSource:
        path = pathlib.Path(path)
        if fmt is None:
            fmt = _SUFFIX_FORMATS.get(path.suffix.lower())
            if fmt is None:
                raise IngestError(f"{path}: cannot infer format from suffix")
        try:
            content = path.read_text(encoding="utf-8")
        except OSError as err:
            raise IngestError(f"cannot read {path}: {err}") from None
        if source_id is None:
            source_id = path.name
        return self.ingest_text(content, source_id, fmt, table=path.stem)

    def ingest_text(self, content: str, source_id: str, fmt: str,
                    table: str | None = None) -> MappedSource:
        if fmt == "xml":
            mapped = map_xml(self.builder, source_id, content)
        elif fmt == "json":
            mapped = map_json(self.builder, source_id, content)
        elif fmt == "html":
            mapped = map_html(self.builder, source_id, content)
        elif fmt == "rdf":
            mapped = map_rdf(self.builder, source_id, content)
        elif fmt == "rel":
            mapped = map_rel(self.builder, source_id, content, table or source_id)
        else:
            raise IngestError(f"unknown source format {fmt!r}")
        self.stats.sources.append(source_id)
        self._extract(mapped)
        return mapped

    def link(self, threshold: float | None = None) -> LinkStats:
        stats = (link_similar_nodes(self.builder, threshold)
                 if threshold is not None else link_similar_nodes(self.builder))
        self.stats.link = stats
        return stats

    # -- extraction --------------------------------------------------------

    def _entity_node(self, entity_type: str, surface: str) -> int:
        kind = _ENTITY_NODE_KINDS[entity_type]
        key = (entity_type, normalize_key(surface))
        node = self._entities.get(key)
        if node is None:
            node = self.builder.add_node(ENTITY_SOURCE, kind, surface)
            self._entities[key] = node
            self.stats.entities_created += 1
        return node

    def _extract(self, mapped: MappedSource) -> None:
        for occurrence in mapped.texts:
            self.stats.texts_seen += 1
            resolution = self.policy.resolve(occurrence.path, occurrence.model)
            if resolution.action == FORCE:
                # The whole label is one entity; the extractor is not called.
                self.stats.forced_entities += 1
                results = [(resolution.entity_type, occurrence.text, 1.0)]
            elif resolution.action == DEFAULT:
                if self.extractor is None:
                    continue
                self.stats.extractor_calls += 1
                try:
                    found = self.extractor(occurrence.text)
                except Exception as err:
                    self.stats.extraction_errors.append((occurrence.node, str(err)))
                    continue
                results = [
                    (e.entity_type, e.surface, e.confidence)
                    for e in found
                    if e.entity_type in _ENTITY_NODE_KINDS
                ]
            else:
                self.stats.skipped_texts += 1
                continue

            linked: set[tuple[str, str]] = set()
            for entity_type, surface, confidence in results:
                key = (entity_type, normalize_key(surface))
                if not key[1] or key in linked:
                    continue
                linked.add(key)
                entity = self._entity_node(entity_type, surface)
                self.builder.add_edge(occurrence.node, entity,
                                      EdgeKind.EXTRACTION, "", confidence)
                self.stats.extraction_edges += 1
