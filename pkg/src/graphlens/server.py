"""HTTP front end for the search engine.

One frozen graph is shared read-only across requests. POST /query streams
newline-delimited JSON: one "solution" line per answer tree in discovery
order, then a single "summary" line with run statistics. A client that
disconnects mid-stream cancels its search at the next stop-condition check.
"""

from __future__ import annotations

import json
import queue
import threading

import anyio
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict, Field

from .search import Query, SearchResult, count_sources, run_search
from .search.trees import iter_bits
from .store import FrozenGraph, NodeKind, is_pseudo_source

ENTITY_KINDS = (NodeKind.ENTITY_PERSON, NodeKind.ENTITY_ORGANIZATION,
                NodeKind.ENTITY_LOCATION)


class _WorkerBudget:
    """Global cap on search worker threads across concurrent queries.

    acquire() blocks until at least one slot is free, then grants up to the
    requested count; every grant must be released.
    """

    def __init__(self, cap: int):
        self._cap = max(1, cap)
        self._used = 0
        self._cond = threading.Condition()

    def acquire(self, want: int) -> int:
        with self._cond:
            while self._cap - self._used < 1:
                self._cond.wait()
            grant = min(max(1, want), self._cap - self._used)
            self._used += grant
            return grant

    def release(self, count: int) -> None:
        with self._cond:
            self._used -= count
            self._cond.notify_all()


class QueryRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    keywords: list[str]
    max_solutions: int | None = Field(default=None, ge=1, alias="maxSolutions")
    timeout_ms: float | None = Field(default=None, ge=0, alias="timeoutMs")
    workers: int = Field(default=1, ge=1)


def node_payload(graph: FrozenGraph, node: int) -> dict:
    return {
        "id": node,
        "label": graph.node_label(node),
        "kind": graph.node_kind(node).value,
        "source": graph.node_source(node),
    }


def edge_payload(graph: FrozenGraph, edge: int) -> dict:
    return {
        "id": edge,
        "source": graph.edge_source(edge),
        "target": graph.edge_target(edge),
        "kind": graph.edge_kind(edge).value,
        "label": graph.edge_label(edge),
        "confidence": graph.edge_confidence(edge),
        "specificity": graph.edge_specificity(edge),
    }


def tree_payload(graph: FrozenGraph, tree) -> dict:
    """Answer tree as a wire object: root, node and edge details, and the
    number of distinct real data sources the tree spans."""
    return {
        "root": tree.root,
        "size": tree.size,
        "sources": count_sources(graph, tree),
        "nodes": [node_payload(graph, n) for n in iter_bits(tree.nodes)],
        "edges": [edge_payload(graph, e) for e in iter_bits(tree.edges)],
    }


def _line(obj: dict) -> bytes:
    return json.dumps(obj, separators=(",", ":")).encode("utf-8") + b"\n"


def _graph_stats(graph: FrozenGraph) -> dict:
    kind_counts: dict[str, int] = {}
    for node in range(graph.node_count):
        kind = graph.node_kind(node).value
        kind_counts[kind] = kind_counts.get(kind, 0) + 1
    real_sources = {
        graph.node_source(node)
        for node in range(graph.node_count)
        if not is_pseudo_source(graph.node_source(node))
    }
    return {
        "nodes": graph.node_count,
        "edges": graph.edge_count,
        "sources": len(real_sources),
        "entities": {k.value: kind_counts.get(k.value, 0) for k in ENTITY_KINDS},
        "nodeKinds": kind_counts,
    }


def create_app(graph: FrozenGraph | None = None, *, worker_cap: int = 8,
               ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="graphlens", docs_url=None, redoc_url=None)
    app.state.graph = graph
    app.state.budget = _WorkerBudget(worker_cap)
    app.state.stats_cache = None

    # a browser UI served from elsewhere still needs to reach the API
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["GET", "POST"], allow_headers=["*"])

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        where = ".".join(str(p) for p in first.get("loc", ()))
        message = first.get("msg", "invalid request")
        return JSONResponse(status_code=400,
                            content={"detail": f"{where}: {message}".lstrip(": ")})

    def require_graph() -> FrozenGraph:
        loaded = app.state.graph
        if loaded is None:
            raise _NoGraph()
        return loaded

    class _NoGraph(Exception):
        pass

    @app.exception_handler(_NoGraph)
    async def no_graph(request: Request, exc: _NoGraph):
        return JSONResponse(status_code=409, content={"detail": "no graph loaded"})

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok", "graphLoaded": app.state.graph is not None}

    @app.get("/stats")
    async def stats():
        loaded = require_graph()
        if app.state.stats_cache is None:
            app.state.stats_cache = _graph_stats(loaded)
        return app.state.stats_cache

    @app.get("/nodes/{node_id}/neighbors")
    async def neighbors(node_id: int, limit: int = 50):
        loaded = require_graph()
        if not 0 <= node_id < loaded.node_count:
            return JSONResponse(status_code=404,
                                content={"detail": f"unknown node {node_id}"})
        if limit < 1:
            return JSONResponse(status_code=400,
                                content={"detail": "limit must be >= 1"})
        rows = []
        truncated = False
        for edge in loaded.incident_edges(node_id):
            if len(rows) == limit:
                truncated = True
                break
            other = loaded.edge_other(edge, node_id)
            rows.append({"edge": edge_payload(loaded, edge),
                         "node": node_payload(loaded, other)})
        center = node_payload(loaded, node_id)
        center["representative"] = loaded.representative(node_id)
        return {"node": center, "neighbors": rows,
                "degree": loaded.degree(node_id), "truncated": truncated}

    @app.post("/query")
    async def query(request: Request, body: QueryRequest):
        loaded = require_graph()
        try:
            built = Query.build(
                body.keywords,
                max_solutions=body.max_solutions,
                timeout=None if body.timeout_ms is None else body.timeout_ms / 1000.0,
                workers=body.workers,
            )
        except ValueError as err:
            return JSONResponse(status_code=400, content={"detail": str(err)})

        granted = app.state.budget.acquire(built.workers)
        built = Query(keywords=built.keywords, max_solutions=built.max_solutions,
                      timeout=built.timeout, workers=granted)
        out: queue.Queue = queue.Queue()
        cancel = threading.Event()

        def runner():
            try:
                result = run_search(loaded, built,
                                    on_solution=lambda t: out.put(t), cancel=cancel)
                out.put(result)
            except BaseException as err:  # surfaced as an error line, not a hang
                out.put(err)
            finally:
                app.state.budget.release(granted)

        thread = threading.Thread(target=runner, name="query-runner", daemon=True)

        def _poll():
            try:
                return out.get(timeout=0.2)
            except queue.Empty:
                return None

        async def stream():
            thread.start()
            try:
                while True:
                    if await request.is_disconnected():
                        return
                    item = await anyio.to_thread.run_sync(_poll)
                    if item is None:
                        continue
                    if isinstance(item, SearchResult):
                        yield _line({"kind": "summary", "stats": item.stats.as_dict()})
                        return
                    if isinstance(item, BaseException):
                        yield _line({"kind": "error", "detail": str(item)})
                        return
                    yield _line({"kind": "solution", **tree_payload(loaded, item)})
            finally:
                # Runs on normal completion, client disconnect and server
                # shutdown alike; the search stops at its next check.
                cancel.set()

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    if ui_dir is not None:
        # API routes above match first; everything else falls through to
        # the built browser client
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
