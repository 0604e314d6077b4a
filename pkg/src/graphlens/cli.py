"""Command line interface.

Graph construction is staged through a pickled state file so each step can
run as its own invocation: ingest sources, link equivalent nodes, freeze,
then save a snapshot. Frozen snapshots feed query, bench and serve.
"""

from __future__ import annotations

import argparse
import json
import os
import pathlib
import pickle
import sys

from .bench import parse_graph_spec, run_bench, write_csv
from .ingest import GraphIngestor, IngestError
from .ingest.extract import GazetteerExtractor, load_gazetteers
from .policy import PolicyParseError, parse_policy_file
from .search import Query, rank_solutions, run_search
from .server import create_app, tree_payload
from .snapshot import SnapshotError, load_snapshot, save_snapshot
from .store import GraphError
from .synth import chain_keywords, star_keywords


class CliError(Exception):
    """Runtime failure with a message fit for stderr."""


# -- state file ---------------------------------------------------------


def _read_state(path: str) -> dict:
    state_path = pathlib.Path(path)
    if not state_path.exists():
        raise CliError(f"state file not found: {path}")
    with open(state_path, "rb") as fh:
        return pickle.load(fh)


def _write_state(path: str, state: dict) -> None:
    with open(path, "wb") as fh:
        pickle.dump(state, fh)


def _state_graph(state: dict, path: str):
    graph = state.get("graph")
    if graph is None:
        raise CliError(f"{path}: graph not frozen yet, run the freeze step first")
    return graph


# -- argument helpers ----------------------------------------------------


def _parse_keywords(text: str) -> list[str]:
    words = [w for w in (part.strip() for part in text.split(",")) if w]
    if not words:
        raise CliError("no keywords given")
    return words


def _parse_nt_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise CliError(f"bad worker list {text!r}, expected e.g. 1,2,4") from None
    if not values or any(v < 1 for v in values):
        raise CliError(f"bad worker list {text!r}, workers must be >= 1")
    return values


def _parse_timeout(text: str | None) -> float | None:
    if text is None:
        return None
    raw = text[:-1] if text.endswith("s") else text
    try:
        value = float(raw)
    except ValueError:
        raise CliError(f"bad timeout {text!r}") from None
    if value < 0:
        raise CliError("timeout must be >= 0")
    return value


def _parse_max(value: int | None) -> int | None:
    # 0 means unlimited.
    if value is None or value == 0:
        return None
    if value < 0:
        raise CliError("max solutions must be >= 0")
    return value


def _load_graph_arg(args) -> tuple:
    if getattr(args, "snapshot", None):
        return pathlib.Path(args.snapshot).name, load_snapshot(args.snapshot)
    if getattr(args, "graph", None):
        return parse_graph_spec(args.graph)
    raise CliError("give --snapshot FILE or --graph SPEC")


def _default_keywords(spec: str) -> list[str] | None:
    parts = spec.split(":")
    if parts[0] == "chain":
        return chain_keywords()
    if parts[0] == "star":
        return star_keywords(int(parts[1]))
    return None


# -- subcommands ---------------------------------------------------------


def _cmd_ingest(args) -> int:
    state_path = pathlib.Path(args.state)
    if state_path.exists():
        state = _read_state(args.state)
    else:
        state = {"ingestor": GraphIngestor(), "graph": None}
    ingestor: GraphIngestor = state["ingestor"]
    if state.get("graph") is not None:
        raise CliError(f"{args.state}: graph already frozen, cannot ingest more")

    if args.policy:
        try:
            ingestor.policy = parse_policy_file(args.policy)
        except OSError as err:
            raise CliError(f"cannot read policy file {args.policy}: {err}") from None
    gazetteers = {}
    for item in args.gazetteer or ():
        entity_type, sep, path = item.partition("=")
        if not sep or not entity_type or not path:
            raise CliError(f"bad --gazetteer {item!r}, expected TYPE=PATH")
        gazetteers[entity_type] = path
    if gazetteers or ingestor.extractor is None:
        try:
            loaded = load_gazetteers(gazetteers) if gazetteers else None
        except OSError as err:
            raise CliError(f"cannot read gazetteer file: {err}") from None
        ingestor.extractor = GazetteerExtractor(loaded,
                                                heuristics=not args.no_heuristics)

    for source in args.files:
        ingestor.ingest_file(source, fmt=args.format)
    _write_state(args.state, state)
    print(json.dumps(ingestor.stats.as_dict(), indent=2))
    return 0


def _cmd_link(args) -> int:
    state = _read_state(args.state)
    ingestor: GraphIngestor = state["ingestor"]
    if state.get("graph") is not None:
        raise CliError(f"{args.state}: graph already frozen, cannot link again")
    stats = ingestor.link(args.threshold)
    _write_state(args.state, state)
    print(json.dumps({"sameas_edges": stats.sameas_edges,
                      "equivalence_classes": stats.equivalence_classes,
                      "pairs_compared": stats.pairs_compared}, indent=2))
    return 0


def _cmd_freeze(args) -> int:
    state = _read_state(args.state)
    if state.get("graph") is not None:
        raise CliError(f"{args.state}: graph already frozen")
    graph = state["ingestor"].builder.freeze()
    state["graph"] = graph
    _write_state(args.state, state)
    print(f"frozen: {graph.node_count} nodes, {graph.edge_count} edges")
    return 0


def _cmd_save(args) -> int:
    state = _read_state(args.state)
    graph = _state_graph(state, args.state)
    save_snapshot(graph, args.out)
    size = pathlib.Path(args.out).stat().st_size
    print(f"wrote {args.out} ({size} bytes)")
    return 0


def _cmd_load(args) -> int:
    graph = load_snapshot(args.snapshot)
    tokens = sum(1 for _ in graph.index_tokens())
    print(json.dumps({
        "snapshot": args.snapshot,
        "nodes": graph.node_count,
        "edges": graph.edge_count,
        "sources": len(graph.sources),
        "indexed_tokens": tokens,
    }, indent=2))
    return 0


def _cmd_synth(args) -> int:
    name, graph = parse_graph_spec(args.graph)
    save_snapshot(graph, args.out)
    keywords = _default_keywords(args.graph)
    hint = f", query keywords: {','.join(keywords)}" if keywords else ""
    print(f"wrote {name} to {args.out} "
          f"({graph.node_count} nodes, {graph.edge_count} edges){hint}")
    return 0


def _cmd_query(args) -> int:
    _, graph = _load_graph_arg(args)
    query = Query.build(
        _parse_keywords(args.kw),
        max_solutions=_parse_max(args.max),
        timeout=_parse_timeout(args.timeout),
        workers=args.nt,
    )
    result = run_search(graph, query)
    ranked = rank_solutions(graph, result.solutions)
    if args.json:
        print(json.dumps({
            "solutions": [tree_payload(graph, tree) for tree in ranked],
            "stats": result.stats.as_dict(),
        }, indent=2))
        return 0
    stats = result.stats
    print(f"solutions: {stats.solutions}")
    if stats.t_first_ms is not None:
        print(f"first at {stats.t_first_ms:.1f} ms, "
              f"last at {stats.t_last_ms:.1f} ms")
    print(f"total {stats.total_ms / 1000.0:.2f} s, "
          f"trees built {stats.trees_built}, "
          f"timed out: {'yes' if stats.timed_out else 'no'}")
    sources_by_tree = {id(t): n for t, n in
                       zip(result.solutions, stats.solution_sources)}
    shown = ranked if args.max_print == 0 else ranked[:args.max_print]
    for i, tree in enumerate(shown, start=1):
        print(f"{i:4d}. root={graph.node_label(tree.root)!r} "
              f"edges={tree.size} sources={sources_by_tree[id(tree)]}")
    if len(ranked) > len(shown):
        print(f"... {len(ranked) - len(shown)} more (use --max-print 0 for all)")
    return 0


def _cmd_bench(args) -> int:
    name, graph = _load_graph_arg(args)
    keywords = (_parse_keywords(args.query) if args.query
                else _default_keywords(args.graph or ""))
    if not keywords:
        raise CliError("give --query kw1,kw2 for this graph")
    rows = run_bench(
        name, graph, keywords,
        nt_list=_parse_nt_list(args.nt),
        timeout=_parse_timeout(args.timeout),
        max_solutions=_parse_max(args.max_solutions),
        reps=args.reps,
    )
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(rows, fh)
        print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    else:
        write_csv(rows, sys.stdout)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    graph = None
    if args.snapshot:
        graph = load_snapshot(args.snapshot)
    if args.ui and not os.path.isdir(args.ui):
        raise CliError(f"--ui {args.ui}: not a directory")
    app = create_app(graph, worker_cap=args.worker_cap, ui_dir=args.ui)
    port = args.port
    env_port = os.environ.get("GRAPHLENS_PORT")
    if env_port:
        try:
            port = int(env_port)
        except ValueError:
            raise CliError(f"bad GRAPHLENS_PORT value {env_port!r}") from None
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphlens",
        description="Heterogeneous graph construction and keyword tree search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="map source files into the working graph")
    p.add_argument("files", nargs="+", help="source files (xml/json/html/nt/csv)")
    p.add_argument("--state", required=True, help="pickled working state")
    p.add_argument("--policy", help="extraction policy file")
    p.add_argument("--gazetteer", action="append", metavar="TYPE=PATH",
                   help="gazetteer list for an entity type, repeatable")
    p.add_argument("--no-heuristics", action="store_true",
                   help="disable capitalized-sequence fallback extraction")
    p.add_argument("--format", help="force source format instead of inferring")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("link", help="add equivalence edges between similar nodes")
    p.add_argument("--state", required=True)
    p.add_argument("--threshold", type=float, default=None)
    p.set_defaults(func=_cmd_link)

    p = sub.add_parser("freeze", help="finalize the working graph")
    p.add_argument("--state", required=True)
    p.set_defaults(func=_cmd_freeze)

    p = sub.add_parser("save", help="write the frozen graph to a snapshot file")
    p.add_argument("--state", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_save)

    p = sub.add_parser("load", help="open a snapshot and print a summary")
    p.add_argument("snapshot")
    p.set_defaults(func=_cmd_load)

    p = sub.add_parser("synth", help="write a synthetic benchmark graph snapshot")
    p.add_argument("--graph", required=True, help="chain:K or star:P:K")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("query", help="run a keyword search")
    p.add_argument("--snapshot", help="snapshot file to search")
    p.add_argument("--graph", help="synthetic graph spec instead of a snapshot")
    p.add_argument("--kw", required=True, help="comma separated keywords")
    p.add_argument("--nt", type=int, default=1, help="worker threads")
    p.add_argument("--max", type=int, default=None,
                   help="stop after this many solutions (0 = unlimited)")
    p.add_argument("--timeout", help="seconds, e.g. 60 or 60s")
    p.add_argument("--json", action="store_true", help="full JSON output")
    p.add_argument("--max-print", type=int, default=20,
                   help="solution lines to print (0 = all)")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("bench", help="benchmark a query, CSV output")
    p.add_argument("--graph", help="chain:K or star:P:K")
    p.add_argument("--snapshot", help="snapshot file instead of a synthetic graph")
    p.add_argument("--query", help="comma separated keywords")
    p.add_argument("--nt", default="1", help="worker counts, e.g. 1,2,4,8")
    p.add_argument("--timeout", help="per-run timeout in seconds")
    p.add_argument("--max-solutions", type=int, default=0,
                   help="per-run solution cap (0 = unlimited)")
    p.add_argument("--reps", type=int, default=3, help="repetitions per row")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("serve", help="serve the HTTP API")
    p.add_argument("--snapshot", help="snapshot to load at startup")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000,
                   help="listen port (GRAPHLENS_PORT overrides)")
    p.add_argument("--worker-cap", type=int, default=8,
                   help="total search workers across concurrent queries")
    p.add_argument("--ui", help="directory with a built browser client to host at /")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, IngestError, SnapshotError, PolicyParseError,
            GraphError, ValueError) as err:
        print(f"graphlens: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"graphlens: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
