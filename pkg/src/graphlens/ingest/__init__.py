"""Heterogeneous source ingestion: mapping, entity extraction, linking."""

from .extract import (
    ExtractedEntity,
    ExtractionError,
    GazetteerExtractor,
    load_gazetteers,
)
from .link import LinkStats, levenshtein, link_similar_nodes, similarity
from .pipeline import ENTITY_SOURCE, GraphIngestor, IngestStats
from .sources import (
    IngestError,
    MappedSource,
    TextOccurrence,
    map_html,
    map_json,
    map_rdf,
    map_rel,
    map_xml,
)

__all__ = [
    "ENTITY_SOURCE",
    "ExtractedEntity",
    "ExtractionError",
    "GazetteerExtractor",
    "GraphIngestor",
    "IngestError",
    "IngestStats",
    "LinkStats",
    "MappedSource",
    "TextOccurrence",
    "levenshtein",
    "link_similar_nodes",
    "load_gazetteers",
    "map_html",
    "map_json",
    "map_rdf",
    "map_rel",
    "map_xml",
    "similarity",
]
