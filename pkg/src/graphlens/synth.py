"""Synthetic graphs for tests and benchmarks, plus a brute-force oracle.

The oracle enumerates every connected acyclic edge subset outright, so it
stays honest but only works on small graphs; it refuses anything larger
than its edge budget.
"""

from __future__ import annotations

import random

from .store import EdgeKind, FrozenGraph, GraphBuilder, NodeKind

_SYNTH_KIND = NodeKind.REL_VALUE

ORACLE_EDGE_LIMIT = 24


def gen_chain(k: int, static_slots: int | None = None) -> FrozenGraph:
    """Path of k+1 nodes with two parallel, distinctly labeled edges between
    each consecutive pair. Endpoints are labeled kwd0 and kwd1; the query
    {kwd0, kwd1} has exactly 2**k solutions (one parallel choice per hop).
    """
    if k < 1:
        raise ValueError("chain length must be >= 1")
    kwargs = {} if static_slots is None else {"static_slots": static_slots}
    builder = GraphBuilder(**kwargs)
    source = f"chain{k}"
    nodes = [builder.add_node(source, _SYNTH_KIND, "kwd0")]
    for i in range(1, k):
        nodes.append(builder.add_node(source, _SYNTH_KIND, f"v{i}"))
    nodes.append(builder.add_node(source, _SYNTH_KIND, "kwd1"))
    for i in range(1, k + 1):
        builder.add_edge(nodes[i - 1], nodes[i], EdgeKind.STRUCTURE, f"a{i}")
        builder.add_edge(nodes[i - 1], nodes[i], EdgeKind.STRUCTURE, f"b{i}")
    return builder.freeze()


def chain_keywords() -> list[str]:
    return ["kwd0", "kwd1"]


def gen_star(p: int, k: int, static_slots: int | None = None) -> FrozenGraph:
    """p branch lines of k edges each. Every branch starts at an inner node
    labeled kwd0 and ends at an extremity labeled kwd1..kwdp; the inner
    nodes form one equivalence class around the first of them, wired with
    p-1 equivalence edges. The query {kwd0,...,kwdp} has exactly one
    solution: the whole graph (p*k + p - 1 edges)."""
    if p < 2:
        raise ValueError("star needs at least 2 branches")
    if k < 1:
        raise ValueError("branch length must be >= 1")
    kwargs = {} if static_slots is None else {"static_slots": static_slots}
    builder = GraphBuilder(**kwargs)
    source = f"star{p}x{k}"
    inners = []
    for i in range(1, p + 1):
        inner = builder.add_node(source, _SYNTH_KIND, "kwd0")
        inners.append(inner)
        prev = inner
        for j in range(1, k):
            mid = builder.add_node(source, _SYNTH_KIND, f"w{i}_{j}")
            builder.add_edge(prev, mid, EdgeKind.STRUCTURE, f"e{i}_{j}")
            prev = mid
        extremity = builder.add_node(source, _SYNTH_KIND, f"kwd{i}")
        builder.add_edge(prev, extremity, EdgeKind.STRUCTURE, f"e{i}_{k}")
    representative = inners[0]
    for inner in inners[1:]:
        builder.set_representative(inner, representative)
        builder.add_edge(representative, inner, EdgeKind.EQUIVALENCE, "1.0000", 1.0)
    return builder.freeze()


def star_keywords(p: int) -> list[str]:
    return [f"kwd{i}" for i in range(p + 1)]


def gen_random(seed: int, static_slots: int | None = None):
    """Small random multigraph with planted keyword labels and a few
    equivalence classes; sized for the brute-force oracle. Returns
    (graph, keywords)."""
    rng = random.Random(seed)
    kwargs = {} if static_slots is None else {"static_slots": static_slots}
    builder = GraphBuilder(**kwargs)
    n_nodes = rng.randint(4, 12)
    keywords = ["alpha", "beta", "gamma"][: rng.randint(2, 3)]
    sources = [f"src{i}" for i in range(rng.randint(1, 3))]

    filler = ["blue", "door", "pine", "seven", "mint"]
    labels = []
    for i in range(n_nodes):
        if rng.random() < 0.45:
            word = rng.choice(keywords)
            label = word if rng.random() < 0.5 else f"{rng.choice(filler)} {word}"
        else:
            label = f"{rng.choice(filler)}{i}"
        labels.append(label)
    nodes = [builder.add_node(rng.choice(sources), _SYNTH_KIND, labels[i])
             for i in range(n_nodes)]

    # Leave room for the equivalence and sameAs edges below so the total
    # stays within the oracle-friendly bound of n_nodes + 6.
    n_edges = rng.randint(n_nodes - 1, n_nodes + 3)
    edge_labels = ["links", "cites", "near", ""]
    for _ in range(n_edges):
        a, b = rng.sample(nodes, 2)
        builder.add_edge(a, b, EdgeKind.STRUCTURE, rng.choice(edge_labels))

    # Occasional sameAs edge: traversable like any other, but without the
    # representative union an equivalence edge implies.
    for _ in range(rng.randint(0, 1)):
        a, b = rng.sample(nodes, 2)
        builder.add_edge(a, b, EdgeKind.SAME_AS, "0.9000", 0.9)

    # A couple of equivalence pairs; members keep distinct labels so the
    # class condition actually gets exercised.
    pool = list(nodes)
    rng.shuffle(pool)
    for _ in range(rng.randint(0, 2)):
        if len(pool) < 2:
            break
        a, b = pool.pop(), pool.pop()
        rep, member = (a, b) if a < b else (b, a)
        builder.set_representative(member, rep)
        builder.add_edge(rep, member, EdgeKind.EQUIVALENCE, "1.0000", 1.0)
    return builder.freeze(), keywords


def brute_force_answer_trees(graph: FrozenGraph, keywords) -> set:
    """Every minimal answer tree, as (edge frozenset, node frozenset) pairs.

    Enumerates all connected acyclic edge subsets plus single nodes, keeps
    those with full coverage and one equivalence class per keyword, then
    drops any tree with a removable leaf (a strict sub-tree would still be
    an answer). Refuses graphs with more than ORACLE_EDGE_LIMIT edges.
    """
    if len(graph.edges) > ORACLE_EDGE_LIMIT:
        raise ValueError(
            f"oracle refuses graphs with more than {ORACLE_EDGE_LIMIT} edges "
            f"(got {len(graph.edges)})")

    match_sets = [graph.lookup(word) for word in keywords]
    m = len(match_sets)

    def coverage_ok(nodes) -> bool:
        return all(match & nodes for match in match_sets)

    def classes_ok(nodes) -> bool:
        for match in match_sets:
            present = match & nodes
            if len(present) > 1:
                reps = {graph.nodes[n].representative for n in present}
                if len(reps) > 1:
                    return False
        return True

    answers = set()

    # Zero-edge candidates: one node covering everything.
    for node in range(len(graph.nodes)):
        node_set = frozenset((node,))
        if coverage_ok(node_set):
            answers.add((frozenset(), node_set))

    seen: set[frozenset[int]] = set()
    stack = []
    for edge in range(len(graph.edges)):
        record = graph.edges[edge]
        start = frozenset((edge,))
        if start not in seen:
            seen.add(start)
            stack.append((start, frozenset((record.source, record.target))))

    trees = []
    while stack:
        edges, nodes = stack.pop()
        trees.append((edges, nodes))
        for node in nodes:
            for edge in graph.incident_edges(node):
                if edge in edges:
                    continue
                other = graph.edge_other(edge, node)
                if other in nodes:
                    continue  # keeps the subset acyclic
                grown = edges | {edge}
                if grown in seen:
                    continue
                seen.add(grown)
                stack.append((grown, nodes | {other}))

    for edges, nodes in trees:
        if not coverage_ok(nodes) or not classes_ok(nodes):
            continue
        minimal = True
        degree: dict[int, int] = {}
        for e in edges:
            record = graph.edges[e]
            degree[record.source] = degree.get(record.source, 0) + 1
            degree[record.target] = degree.get(record.target, 0) + 1
        for node, deg in degree.items():
            if deg == 1 and coverage_ok(nodes - {node}):
                minimal = False
                break
        if minimal:
            answers.add((edges, nodes))
    return answers
