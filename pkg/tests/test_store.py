"""Graph store: construction, freezing, physical layout, keyword index."""

from __future__ import annotations

import random

import pytest

from graphlens.store import (
    EMPTY,
    EdgeKind,
    FrozenError,
    GraphBuilder,
    GraphError,
    NodeKind,
)
from graphlens.text import normalize_keyword, tokenize


def _builder_with_nodes(count: int, static_slots: int = 5) -> GraphBuilder:
    b = GraphBuilder(static_slots=static_slots)
    for i in range(count):
        b.add_node("src", NodeKind.XML_ELEMENT, f"node{i}")
    return b


# -- tokenization -----------------------------------------------------------


def test_tokenize_splits_on_nonalnum_runs():
    assert tokenize("Alice & Bob, Inc.") == ["alice", "bob", "inc"]


def test_tokenize_casefolds():
    assert tokenize("HealthStar") == ["healthstar"]
    assert tokenize("STRASSE Straße") == ["strasse", "strasse"]


def test_tokenize_nfc_unifies_representations():
    composed = "Réseau"
    decomposed = "Réseau"
    assert tokenize(composed) == tokenize(decomposed) == ["réseau"]


def test_tokenize_digits_and_underscore():
    assert tokenize("kwd_0 a1_b2") == ["kwd", "0", "a1", "b2"]


def test_normalize_keyword_rejects_phrases():
    with pytest.raises(ValueError):
        normalize_keyword("Health Star")
    with pytest.raises(ValueError):
        normalize_keyword("...")
    assert normalize_keyword("  Alice ") == "alice"


# -- construction and validation ---------------------------------------------


def test_add_node_and_edge_ids_are_dense():
    b = _builder_with_nodes(3)
    assert [b.node_label(i) for i in range(3)] == ["node0", "node1", "node2"]
    e0 = b.add_edge(0, 1, EdgeKind.STRUCTURE, "a")
    e1 = b.add_edge(1, 2, EdgeKind.STRUCTURE, "b")
    assert (e0, e1) == (0, 1)


def test_self_loop_rejected():
    b = _builder_with_nodes(1)
    with pytest.raises(GraphError):
        b.add_edge(0, 0)


def test_unknown_endpoint_rejected():
    b = _builder_with_nodes(2)
    with pytest.raises(GraphError):
        b.add_edge(0, 5)


def test_confidence_validation():
    b = _builder_with_nodes(2)
    with pytest.raises(GraphError):
        b.add_edge(0, 1, EdgeKind.EXTRACTION, "", 0.0)
    with pytest.raises(GraphError):
        b.add_edge(0, 1, EdgeKind.EXTRACTION, "", 1.5)
    b.add_edge(0, 1, EdgeKind.EXTRACTION, "", 0.6)


def test_default_confidence_is_one():
    b = _builder_with_nodes(2)
    e = b.add_edge(0, 1)
    g = b.freeze()
    assert g.edge_confidence(e) == 1.0


def test_equivalence_edges_require_full_confidence():
    b = _builder_with_nodes(2)
    with pytest.raises(GraphError):
        b.add_edge(0, 1, EdgeKind.EQUIVALENCE, "1.0000", 0.9)


def test_mutation_after_freeze_fails():
    b = _builder_with_nodes(2)
    b.freeze()
    with pytest.raises(FrozenError):
        b.add_node("src", NodeKind.XML_TEXT, "late")
    with pytest.raises(FrozenError):
        b.add_edge(0, 1)
    with pytest.raises(FrozenError):
        b.set_representative(0, 1)
    with pytest.raises(FrozenError):
        b.freeze()


# -- static slots and overflow ----------------------------------------------


def test_static_slots_without_overflow():
    b = _builder_with_nodes(6)
    for i in range(1, 6):
        b.add_edge(0, i, EdgeKind.STRUCTURE, f"e{i}")
    g = b.freeze()
    record = g.nodes[0]
    assert record.overflow_ref == EMPTY
    assert list(record.static_slots) == [0, 1, 2, 3, 4]
    assert g.degree(0) == 5


def test_sixth_edge_spills_into_overflow():
    b = _builder_with_nodes(8)
    for i in range(1, 8):
        b.add_edge(0, i, EdgeKind.STRUCTURE, f"e{i}")
    g = b.freeze()
    record = g.nodes[0]
    assert record.overflow_ref != EMPTY
    assert g.overflow[record.overflow_ref] == 2
    assert list(g.incident_edges(0)) == list(range(7))
    assert g.degree(0) == 7


def test_static_slot_count_is_configurable():
    b = _builder_with_nodes(4, static_slots=2)
    for i in range(1, 4):
        b.add_edge(0, i)
    g = b.freeze()
    assert g.static_slots == 2
    assert g.nodes[0].overflow_ref != EMPTY
    assert list(g.incident_edges(0)) == [0, 1, 2]


def test_neighbors_reports_direction_and_order():
    b = _builder_with_nodes(3)
    b.add_edge(0, 1, EdgeKind.STRUCTURE, "out")
    b.add_edge(2, 0, EdgeKind.STRUCTURE, "in")
    g = b.freeze()
    got = list(g.neighbors(0))
    assert [(n.edge, n.other, n.forward) for n in got] == [(0, 1, True), (1, 2, False)]


def test_neighbors_isolated_and_unknown():
    b = _builder_with_nodes(1)
    g = b.freeze()
    assert list(g.neighbors(0)) == []
    with pytest.raises(GraphError):
        list(g.neighbors(7))


def test_neighbors_complete_on_random_graph():
    rng = random.Random(11)
    b = _builder_with_nodes(9)
    expected: dict[int, list[int]] = {n: [] for n in range(9)}
    for e in range(30):
        u, v = rng.sample(range(9), 2)
        b.add_edge(u, v, EdgeKind.STRUCTURE, f"l{e % 4}")
        expected[u].append(e)
        expected[v].append(e)
    g = b.freeze()
    for n in range(9):
        assert [nb.edge for nb in g.neighbors(n)] == expected[n]


# -- representatives ----------------------------------------------------------


def test_representative_defaults_to_self():
    g = _builder_with_nodes(2).freeze()
    assert g.representative(0) == 0
    assert g.representative(1) == 1


def test_representative_chain_compression():
    b = _builder_with_nodes(3)
    b.set_representative(0, 1)
    b.set_representative(1, 2)
    g = b.freeze()
    assert g.representative(0) == 2
    assert g.representative(1) == 2
    # idempotence after compression
    for n in range(3):
        assert g.representative(g.representative(n)) == g.representative(n)


def test_representative_cycle_rejected():
    b = _builder_with_nodes(3)
    b.set_representative(1, 0)
    b.set_representative(2, 1)
    with pytest.raises(GraphError):
        b.set_representative(0, 2)
    b.set_representative(0, 0)  # self-assignment is a no-op


# -- specificity ----------------------------------------------------------------


def _side_specificity(builder_edges, node, label):
    same = sum(1 for (u, v, lab) in builder_edges if lab == label and node in (u, v))
    return 1.0 / same


def test_specificity_spouse_friend_example():
    # One spouse edge and ten friend edges at node 0; each partner node has
    # only its single incident edge, so the minimum is taken at node 0.
    b = _builder_with_nodes(12)
    b.add_edge(0, 1, EdgeKind.STRUCTURE, "spouse")
    for i in range(2, 12):
        b.add_edge(0, i, EdgeKind.STRUCTURE, "friend")
    g = b.freeze()
    assert g.edge_specificity(0) == 1.0
    for e in range(1, 11):
        assert g.edge_specificity(e) == pytest.approx(0.1)


def test_specificity_is_min_of_both_sides():
    rng = random.Random(23)
    b = _builder_with_nodes(8)
    edges = []
    for _ in range(26):
        u, v = rng.sample(range(8), 2)
        label = rng.choice(["a", "b", ""])
        edges.append((u, v, label))
        b.add_edge(u, v, EdgeKind.STRUCTURE, label)
    g = b.freeze()
    for e, (u, v, label) in enumerate(edges):
        expected = min(_side_specificity(edges, u, label),
                       _side_specificity(edges, v, label))
        assert g.edge_specificity(e) == pytest.approx(expected)
        assert 0.0 < g.edge_specificity(e) <= 1.0


def test_specificity_all_distinct_labels():
    b = _builder_with_nodes(4)
    b.add_edge(0, 1, EdgeKind.STRUCTURE, "x")
    b.add_edge(0, 2, EdgeKind.STRUCTURE, "y")
    b.add_edge(0, 3, EdgeKind.STRUCTURE, "z")
    g = b.freeze()
    assert [g.edge_specificity(e) for e in range(3)] == [1.0, 1.0, 1.0]


def test_unlabeled_edges_share_one_class():
    b = _builder_with_nodes(3)
    b.add_edge(0, 1)
    b.add_edge(0, 2)
    g = b.freeze()
    assert g.edge_specificity(0) == pytest.approx(0.5)


def test_equivalence_edges_count_toward_specificity():
    b = _builder_with_nodes(3)
    b.add_edge(0, 1, EdgeKind.EQUIVALENCE, "1.0000")
    b.add_edge(0, 2, EdgeKind.EQUIVALENCE, "1.0000")
    g = b.freeze()
    assert g.edge_specificity(0) == pytest.approx(0.5)


# -- keyword index ---------------------------------------------------------------


def test_lookup_matches_token_within_label():
    b = GraphBuilder()
    b.add_node("s", NodeKind.XML_TEXT, "HealthStar Inc")
    b.add_node("s", NodeKind.XML_TEXT, "HealthStar")
    b.add_node("s", NodeKind.XML_TEXT, "Star of Health")
    g = b.freeze()
    assert g.lookup("healthstar") == frozenset({0, 1})
    assert g.lookup("HEALTHSTAR") == frozenset({0, 1})
    assert g.lookup("inc") == frozenset({0})
    assert g.lookup("star") == frozenset({2})


def test_lookup_unknown_token_returns_empty_set():
    g = GraphBuilder().freeze()
    assert g.lookup("nothing") == frozenset()


def test_lookup_rejects_phrases():
    g = GraphBuilder().freeze()
    with pytest.raises(ValueError):
        g.lookup("two words")


def test_index_agrees_with_naive_scan():
    rng = random.Random(7)
    vocabulary = ["alpha", "beta", "Gamma", "delta-4", "kwd0", "Alice"]
    b = GraphBuilder()
    labels = []
    for _ in range(40):
        label = " ".join(rng.sample(vocabulary, rng.randint(1, 3)))
        labels.append(label)
        b.add_node("s", NodeKind.JSON_VALUE, label)
    g = b.freeze()
    for probe in ["alpha", "gamma", "delta", "4", "alice", "kwd0", "missing"]:
        expected = frozenset(
            n for n, label in enumerate(labels) if probe in tokenize(label)
        )
        assert g.lookup(probe) == expected, probe


def test_structural_node_labels_are_indexed():
    b = GraphBuilder()
    b.add_node("s", NodeKind.XML_ELEMENT, "CoIStatement")
    g = b.freeze()
    assert g.lookup("coistatement") == frozenset({0})
