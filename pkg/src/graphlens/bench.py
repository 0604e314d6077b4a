"""Benchmark harness: repeated searches over synthetic graphs, reported as
medians in a fixed, versioned CSV schema."""

from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass

from .search import Query, run_search
from .store import FrozenGraph
from .synth import gen_chain, gen_star

SCHEMA_VERSION = 1

CSV_COLUMNS = ("schema_version", "graph", "query", "nt", "reps", "t1_ms",
               "tlast_ms", "total_s", "solutions", "trees_built", "steals")


@dataclass
class BenchRow:
    graph: str
    query: str
    nt: int
    reps: int
    t1_ms: float | None
    tlast_ms: float | None
    total_s: float
    solutions: int
    trees_built: int
    steals: int

    def as_csv(self) -> list:
        def fmt(value):
            if value is None:
                return ""
            if isinstance(value, float):
                return f"{value:.3f}"
            return value
        return [SCHEMA_VERSION, self.graph, self.query, self.nt, self.reps,
                fmt(self.t1_ms), fmt(self.tlast_ms), fmt(self.total_s),
                self.solutions, self.trees_built, self.steals]


def parse_graph_spec(spec: str) -> tuple[str, FrozenGraph]:
    """Build a synthetic graph from a compact name: chain:K or star:P:K."""
    parts = spec.split(":")
    try:
        if parts[0] == "chain" and len(parts) == 2:
            k = int(parts[1])
            return f"chain_{k}", gen_chain(k)
        if parts[0] == "star" and len(parts) == 3:
            p, k = int(parts[1]), int(parts[2])
            return f"star_{p}_{k}", gen_star(p, k)
    except ValueError as err:
        raise ValueError(f"bad graph spec {spec!r}: {err}") from None
    raise ValueError(f"bad graph spec {spec!r}: expected chain:K or star:P:K")


def _median_optional(values):
    present = [v for v in values if v is not None]
    if not present:
        return None
    return statistics.median(present)


def run_bench(graph_name: str, graph: FrozenGraph, keywords,
              nt_list, timeout: float | None = None,
              max_solutions: int | None = None, reps: int = 3) -> list[BenchRow]:
    """One row per worker count; times are medians over reps runs."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    query_label = ",".join(keywords)
    rows = []
    for nt in nt_list:
        t1, tlast, total, solutions, trees, steals = [], [], [], [], [], []
        for _ in range(reps):
            query = Query.build(keywords, max_solutions=max_solutions,
                                timeout=timeout, workers=nt)
            result = run_search(graph, query)
            stats = result.stats
            t1.append(stats.t_first_ms)
            tlast.append(stats.t_last_ms)
            total.append(stats.total_ms / 1000.0)
            solutions.append(stats.solutions)
            trees.append(stats.trees_built)
            steals.append(stats.steals)
        rows.append(BenchRow(
            graph=graph_name,
            query=query_label,
            nt=nt,
            reps=reps,
            t1_ms=_median_optional(t1),
            tlast_ms=_median_optional(tlast),
            total_s=statistics.median(total),
            solutions=int(statistics.median(solutions)),
            trees_built=int(statistics.median(trees)),
            steals=int(statistics.median(steals)),
        ))
    return rows


def write_csv(rows, fh) -> None:
    writer = csv.writer(fh)
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.as_csv())
