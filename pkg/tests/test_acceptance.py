"""Acceptance gate: one test per shipping criterion.

Run with -v to get one pass/fail line per criterion. These tests favor
exact counts and set equality over loose bounds; the parallel speedup
check is hardware-gated and reports a skip on small machines.
"""

import os
import statistics
import time

import pytest

from graphlens.ingest import GraphIngestor
from graphlens.ingest.extract import GazetteerExtractor, load_gazetteers
from graphlens.policy import parse_policy_text
from graphlens.search import Query, run_search
from graphlens.snapshot import SnapshotError, load_snapshot, save_snapshot
from graphlens.store import EdgeKind, NodeKind
from graphlens.synth import (
    brute_force_answer_trees,
    chain_keywords,
    gen_chain,
    gen_random,
    gen_star,
    star_keywords,
)

DATA = os.path.join(os.path.dirname(__file__), "data", "fig1")


def _solution_keys(result):
    return {tree.solution_key() for tree in result.solutions}


def _physical_cores() -> int:
    """Unique (physical id, core id) pairs; logical count as fallback."""
    pairs = set()
    current = {}
    try:
        with open("/proc/cpuinfo", encoding="utf-8") as fh:
            blocks = fh.read().split("\n\n")
        for block in blocks:
            current = {}
            for line in block.splitlines():
                if ":" in line:
                    key, _, value = line.partition(":")
                    current[key.strip()] = value.strip()
            if "core id" in current:
                pairs.add((current.get("physical id", "0"), current["core id"]))
    except OSError:
        pass
    if pairs:
        return len(pairs)
    return os.cpu_count() or 1


def test_chain_solution_counts_are_exact():
    started = time.monotonic()
    for k in (3, 8, 12):
        result = run_search(gen_chain(k), Query.build(chain_keywords()))
        assert len(result.solutions) == 2 ** k, f"chain_{k}"
        assert not result.stats.timed_out
    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"exhaustive chains took {elapsed:.1f}s"
    print(f"chains 3/8/12 exact (2^k each) in {elapsed:.1f}s")


def test_star_single_solution_matches_oracle():
    graph = gen_star(4, 2)
    result = run_search(graph, Query.build(star_keywords(4)))
    assert len(result.solutions) == 1
    oracle = brute_force_answer_trees(graph, star_keywords(4))
    assert _solution_keys(result) == oracle
    edges, _ = next(iter(oracle))
    line_edges = {e for e in range(graph.edge_count)
                  if graph.edge_kind(e) == EdgeKind.STRUCTURE}
    equivalence_edges = {e for e in range(graph.edge_count)
                         if graph.edge_kind(e) == EdgeKind.EQUIVALENCE}
    assert line_edges <= edges
    assert equivalence_edges <= edges
    print("star(4,2) single solution equals oracle answer")


@pytest.mark.parametrize("k", [100, 1000])
def test_star_long_branches_single_solution(k):
    graph = gen_star(4, k)
    result = run_search(graph, Query.build(star_keywords(4)))
    assert len(result.solutions) == 1
    tree = result.solutions[0]
    # The only answer is the whole graph: all 4*k line edges plus the
    # 3 equivalence edges.
    assert tree.size == graph.edge_count == 4 * k + 3
    assert tree.nodes.bit_count() == graph.node_count
    print(f"star(4,{k}) returns exactly the full-graph solution")


def test_random_graphs_match_brute_force_oracle():
    started = time.monotonic()
    for seed in range(100):
        graph, keywords = gen_random(seed)
        expected = brute_force_answer_trees(graph, keywords)
        result = run_search(graph, Query.build(keywords))
        assert _solution_keys(result) == expected, f"seed {seed}"
    elapsed = time.monotonic() - started
    assert elapsed < 300.0, f"oracle sweep took {elapsed:.1f}s"
    print(f"100 random graphs equal oracle sets in {elapsed:.1f}s")


def test_solution_set_invariant_across_worker_counts():
    graph = gen_chain(10)
    baseline = None
    for nt in (1, 2, 4, 8):
        result = run_search(graph, Query.build(chain_keywords(), workers=nt))
        keys = _solution_keys(result)
        assert len(keys) == 1024
        if baseline is None:
            baseline = keys
        else:
            assert keys == baseline, f"nt={nt} diverged"
    print("chain_10 solution set identical for nt in {1,2,4,8}")


def test_parallel_speedup_on_wide_machines():
    cores = _physical_cores()
    if cores < 8:
        pytest.skip(
            f"needs >= 8 physical cores, machine has {cores}; "
            "speedup target is hardware-bound, correctness covered elsewhere"
        )
    graph = gen_chain(14)
    medians = {}
    for nt in (1, 8):
        times = []
        for _ in range(5):
            result = run_search(graph, Query.build(chain_keywords(), workers=nt))
            assert len(result.solutions) == 2 ** 14
            times.append(result.stats.total_ms)
        medians[nt] = statistics.median(times)
    assert medians[8] <= 0.6 * medians[1], medians
    print(f"chain_14 medians ms: nt1={medians[1]:.0f} nt8={medians[8]:.0f}")


def test_first_solution_under_a_second_with_cap():
    result = run_search(
        gen_chain(15),
        Query.build(chain_keywords(), max_solutions=1000, timeout=60.0),
    )
    assert len(result.solutions) == 1000
    assert result.stats.t_first_ms is not None
    assert result.stats.t_first_ms < 1000.0
    print(f"chain_15 capped run: T1={result.stats.t_first_ms:.1f}ms, S=1000")


POLICY_TEXT = """
notice.author.name force Person
notice.pmid skip
notice.abstract skip
"""


class _SpyExtractor:
    def __init__(self, inner):
        self.inner = inner
        self.texts = []

    def __call__(self, text):
        self.texts.append(text)
        return self.inner(text)


def _notice_doc(i: int) -> str:
    high, low = divmod(i, 26)
    surname = chr(65 + high) + chr(97 + low) + "son"
    return (
        "<notice>"
        f"<pmid>PM{1000 + i}</pmid>"
        f"<author><name>Ann {surname}</name></author>"
        "<abstract>Follow up cohort analysis with staged enrollment.</abstract>"
        f"<coi>Supported by Vendor Corp under grant {i}.</coi>"
        "</notice>"
    )


def test_policy_suppresses_extraction_on_covered_nodes():
    spy = _SpyExtractor(GazetteerExtractor())
    ingestor = GraphIngestor(extractor=spy, policy=parse_policy_text(POLICY_TEXT))
    for i in range(100):
        ingestor.ingest_text(_notice_doc(i), f"notice{i}.xml", "xml")
    stats = ingestor.stats
    assert stats.texts_seen == 400
    assert stats.skipped_texts == 200
    assert stats.forced_entities == 100
    assert stats.extractor_calls == 100 == len(spy.texts)
    assert all(text.startswith("Supported by") for text in spy.texts)

    graph = ingestor.builder.freeze()
    person_nodes = [n for n in range(graph.node_count)
                    if graph.node_kind(n) == NodeKind.ENTITY_PERSON]
    assert len(person_nodes) == 100
    name_nodes = [n for n in graph.lookup("ann")
                  if graph.node_kind(n) == NodeKind.XML_TEXT]
    assert len(name_nodes) == 100
    for node in name_nodes:
        extractions = [e for e in graph.incident_edges(node)
                       if graph.edge_kind(e) == EdgeKind.EXTRACTION]
        assert len(extractions) == 1
        entity = graph.edge_other(extractions[0], node)
        assert graph.node_kind(entity) == NodeKind.ENTITY_PERSON
        assert graph.node_label(entity) == graph.node_label(node)

    unrestricted = GraphIngestor(extractor=_SpyExtractor(GazetteerExtractor()))
    for i in range(100):
        unrestricted.ingest_text(_notice_doc(i), f"notice{i}.xml", "xml")
    assert unrestricted.stats.extractor_calls == 400
    assert stats.extractor_calls < unrestricted.stats.extractor_calls
    print("policy run: 100 extractor calls vs 400 without, 100 forced Persons")


def test_snapshot_roundtrip_preserves_query_results(tmp_path):
    graph = gen_chain(12)
    path = tmp_path / "chain12.snap"
    save_snapshot(graph, str(path))

    loaded = load_snapshot(str(path))
    before = _solution_keys(run_search(graph, Query.build(chain_keywords())))
    after = _solution_keys(run_search(loaded, Query.build(chain_keywords())))
    assert len(before) == 4096
    assert before == after

    raw = bytearray(path.read_bytes())
    raw[len(raw) // 2] ^= 0xFF
    corrupt = tmp_path / "corrupt.snap"
    corrupt.write_bytes(bytes(raw))
    with pytest.raises(SnapshotError):
        load_snapshot(str(corrupt))
    print("chain_12 snapshot round-trip query-identical; corruption rejected")


def test_mixed_corpus_queries_span_multiple_sources():
    gazetteers = load_gazetteers({
        "Person": os.path.join(DATA, "people.txt"),
        "Organization": os.path.join(DATA, "orgs.txt"),
    })
    ingestor = GraphIngestor(extractor=GazetteerExtractor(gazetteers))
    for name in ("notice.xml", "paper.json", "kb.nt", "pharmaleaks.html"):
        ingestor.ingest_file(os.path.join(DATA, name))
    ingestor.link()
    graph = ingestor.builder.freeze()

    for keywords in (["alice", "abcpharma"], ["alice", "healthstar"]):
        result = run_search(graph, Query.build(keywords))
        assert result.solutions, f"{keywords}: no answers"
        assert max(result.stats.solution_sources) >= 2, (
            f"{keywords}: no answer spans two data sources"
        )
    print("mixed corpus: both queries have answers spanning >= 2 sources")
