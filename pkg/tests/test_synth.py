"""Generator shapes and the brute-force oracle on hand-checkable graphs."""

import pytest

from graphlens.store import EdgeKind, GraphBuilder, NodeKind
from graphlens.synth import (
    ORACLE_EDGE_LIMIT,
    brute_force_answer_trees,
    chain_keywords,
    gen_chain,
    gen_random,
    gen_star,
    star_keywords,
)


def test_chain_shape():
    g = gen_chain(3)
    assert len(g.nodes) == 4
    assert len(g.edges) == 6
    assert g.lookup("kwd0") == frozenset({0})
    assert g.lookup("kwd1") == frozenset({3})
    # Parallel edges carry distinct labels, so every edge is fully specific.
    assert all(g.edges[e].specificity == 1.0 for e in range(6))


def test_star_shape():
    g = gen_star(3, 2)
    assert len(g.nodes) == 9
    assert len(g.edges) == 3 * 2 + 2
    assert len(g.lookup("kwd0")) == 3
    inners = sorted(g.lookup("kwd0"))
    rep = inners[0]
    assert all(g.nodes[n].representative == rep for n in inners)
    eq_edges = [e for e in range(len(g.edges))
                if g.edge_kind(e) == EdgeKind.EQUIVALENCE]
    assert len(eq_edges) == 2
    for i in range(1, 4):
        assert len(g.lookup(f"kwd{i}")) == 1


def test_star_k1_has_no_intermediates():
    g = gen_star(2, 1)
    assert len(g.nodes) == 4
    assert len(g.edges) == 2 + 1


def test_oracle_chain3_counts_and_shape():
    g = gen_chain(3)
    answers = brute_force_answer_trees(g, chain_keywords())
    assert len(answers) == 8
    for edges, nodes in answers:
        assert len(edges) == 3
        assert nodes == frozenset({0, 1, 2, 3})


def test_oracle_single_node_answer_beats_superset():
    b = GraphBuilder()
    both = b.add_node("s", NodeKind.REL_VALUE, "alpha beta")
    extra = b.add_node("s", NodeKind.REL_VALUE, "alpha")
    b.add_edge(both, extra)
    g = b.freeze()
    answers = brute_force_answer_trees(g, ["alpha", "beta"])
    assert answers == {(frozenset(), frozenset({both}))}


def _two_matcher_path(equivalent: bool):
    # beta -- alpha -- alpha -- gamma; both alpha nodes are interior, so the
    # whole path is the only full-coverage tree without a removable leaf.
    b = GraphBuilder()
    n_beta = b.add_node("s", NodeKind.REL_VALUE, "beta")
    a1 = b.add_node("s", NodeKind.REL_VALUE, "alpha")
    a2 = b.add_node("s", NodeKind.REL_VALUE, "alpha")
    n_gamma = b.add_node("s", NodeKind.REL_VALUE, "gamma")
    b.add_edge(n_beta, a1, label="x1")
    b.add_edge(a1, a2, label="x2")
    b.add_edge(a2, n_gamma, label="x3")
    if equivalent:
        b.set_representative(a2, a1)
    return b.freeze()


def test_oracle_requires_one_class_per_keyword():
    keywords = ["alpha", "beta", "gamma"]
    linked = brute_force_answer_trees(_two_matcher_path(True), keywords)
    assert len(linked) == 1
    (edges, nodes), = linked
    assert len(edges) == 3

    unlinked = brute_force_answer_trees(_two_matcher_path(False), keywords)
    assert unlinked == set()


def test_oracle_star_4_2_single_answer():
    g = gen_star(4, 2)
    answers = brute_force_answer_trees(g, star_keywords(4))
    assert len(answers) == 1
    (edges, nodes), = answers
    assert len(edges) == 4 * 2 + 3
    assert len(nodes) == 12


def test_oracle_refuses_large_graphs():
    g = gen_chain(13)  # 26 parallel-pair edges
    assert len(g.edges) > ORACLE_EDGE_LIMIT
    with pytest.raises(ValueError):
        brute_force_answer_trees(g, chain_keywords())


def test_random_generator_is_deterministic_and_bounded():
    for seed in range(12):
        g1, kw1 = gen_random(seed)
        g2, kw2 = gen_random(seed)
        assert kw1 == kw2
        assert len(g1.nodes) == len(g2.nodes)
        assert len(g1.edges) == len(g2.edges)
        assert [g1.node_label(n) for n in range(len(g1.nodes))] == \
            [g2.node_label(n) for n in range(len(g2.nodes))]
        assert len(g1.edges) <= len(g1.nodes) + 6
        assert len(g1.edges) <= ORACLE_EDGE_LIMIT
