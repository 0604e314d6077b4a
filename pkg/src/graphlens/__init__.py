"""graphlens: heterogeneous graph construction and keyword tree search.

Build a graph from mixed-format sources (XML, JSON, HTML, RDF triples,
relational CSV), extract and link entities, freeze it, then search it:
a query is a set of keywords, an answer is a minimal tree connecting
nodes that match all of them.
"""

from .ingest import GraphIngestor, IngestError, IngestStats
from .policy import ExtractionPolicy, parse_policy_file, parse_policy_text
from .search import (
    PartialTree,
    Query,
    SearchResult,
    SearchStats,
    count_sources,
    rank_solutions,
    run_search,
)
from .server import create_app
from .snapshot import SnapshotError, load_snapshot, save_snapshot
from .store import (
    EdgeKind,
    FrozenGraph,
    GraphBuilder,
    GraphError,
    NodeKind,
)

__version__ = "0.1.0"

__all__ = [
    "EdgeKind",
    "ExtractionPolicy",
    "FrozenGraph",
    "GraphBuilder",
    "GraphError",
    "GraphIngestor",
    "IngestError",
    "IngestStats",
    "NodeKind",
    "PartialTree",
    "Query",
    "SearchResult",
    "SearchStats",
    "SnapshotError",
    "count_sources",
    "create_app",
    "load_snapshot",
    "parse_policy_file",
    "parse_policy_text",
    "rank_solutions",
    "run_search",
    "save_snapshot",
    "__version__",
]
