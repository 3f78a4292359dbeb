import random

import networkx as nx
import pytest

from posetturan.lattice import Family
from posetturan.poset import Poset


def chain(length, prefix="c"):
    return Poset.chain([f"{prefix}{i}" for i in range(length)])


V = Poset.from_relation("abc", [("a", "b"), ("a", "c")])
LAMBDA = Poset.from_relation("abc", [("b", "a"), ("c", "a")])
N_POSET = Poset.from_relation("abcd", [("a", "c"), ("b", "c"), ("b", "d")])
FORK = Poset.from_relation("abcd", [("a", "b"), ("b", "c"), ("b", "d")])
CORPUS = {
    "chain2": chain(2),
    "chain3": chain(3),
    "V": V,
    "Lambda": LAMBDA,
    "N": N_POSET,
}


def oriented_tree(edges, nodes, bits):
    rel = [(f"p{a}", f"p{b}") if bits >> i & 1 else (f"p{b}", f"p{a}") for i, (a, b) in enumerate(edges)]
    return Poset.from_relation(sorted(f"p{v}" for v in nodes), rel), rel


def tree_posets(size):
    """All posets on ``size`` elements with tree Hasse diagram, one per
    isomorphism class (orientations of every unlabeled tree, deduplicated)."""
    trees = [nx.empty_graph(1)] if size == 1 else list(nx.nonisomorphic_trees(size))
    out = []
    for T in trees:
        edges = sorted(T.edges())
        classes: dict[str, list] = {}
        for bits in range(1 << len(edges)):
            P, rel = oriented_tree(edges, T.nodes, bits)
            D = nx.DiGraph(rel)
            D.add_nodes_from(P.elements)
            key = nx.weisfeiler_lehman_graph_hash(D)
            bucket = classes.setdefault(key, [])
            if any(nx.is_isomorphic(D, E) for E in bucket):
                continue
            bucket.append(D)
            out.append(P)
    return out


def random_tree_poset(rng, size):
    """Random labelled tree (random attachment) with random edge directions."""
    names = [f"v{i}" for i in range(size)]
    rel = []
    for i in range(1, size):
        j = rng.randrange(i)
        rel.append((names[j], names[i]) if rng.random() < 0.5 else (names[i], names[j]))
    return Poset.from_relation(names, rel)


def random_family(rng, n, p=0.5):
    return Family.of(n, [s for s in range(1 << n) if rng.random() < p])


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
