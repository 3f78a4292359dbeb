import itertools
import random
from fractions import Fraction
from math import factorial

import pytest

from conftest import FORK, LAMBDA, N_POSET, V, chain, random_family, tree_posets
from posetturan.errors import PreconditionError
from posetturan.lattice import (
    Family,
    compact_marked_chains,
    enumerate_marked_chains,
    longest_chain,
    mask_from_elements,
    middle_levels,
    trim_middle,
)
from posetturan.embed import (
    ChainPrefix,
    SimpleGraph,
    bad_chain_weight,
    bad_marker_tuples,
    bottleneck_witness,
    certificate_violations,
    comparability_graph,
    degenerate_core,
    embed_height2,
    embed_poset,
    embed_saturated,
    embed_tree_in_graph,
    format_certificate,
    grow_embedding,
    min_hitting_set,
    tree_threshold,
)
from posetturan.poset import Poset, check_embedding, find_subposet
from posetturan.trees import saturate

M = mask_from_elements


def graph(n_vertices, edges):
    return SimpleGraph.build(range(n_vertices), edges)


TRIANGLE = graph(3, [(0, 1), (1, 2), (0, 2)])
STAR3 = graph(4, [(0, 1), (0, 2), (0, 3)])
PATH3 = graph(3, [(0, 1), (1, 2)])


def is_tree_embedding(T, G, pi):
    return (len(set(pi.values())) == len(T.vertices)
            and all(frozenset((pi[a], pi[b])) in G.edges for a, b in map(tuple, T.edges)))


# --- graphs --------------------------------------------------------------

def test_simple_graph_validation():
    with pytest.raises(ValueError):
        SimpleGraph.build([0], [(0, 0)])
    with pytest.raises(ValueError):
        SimpleGraph.build([0], [(0, 1)])


def test_degenerate_core_triangle():
    assert degenerate_core(TRIANGLE, 2) == TRIANGLE


def test_degenerate_core_star():
    # peeling by hand: threshold 0.75, every star vertex has degree >= 1
    assert degenerate_core(STAR3, Fraction(3, 2)) == STAR3


def test_degenerate_core_edgeless():
    assert degenerate_core(graph(4, []), 1).vertices == ()


def test_degenerate_core_min_degree_random():
    rng = random.Random(2)
    for _ in range(100):
        n = rng.randint(1, 25)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < rng.random()]
        G = graph(n, edges)
        d = G.average_degree()
        core = degenerate_core(G, d)
        if G.edges:
            assert core.vertices, "average degree d must leave a nonempty core"
        assert all(core.degree(v) >= d / 2 for v in core.vertices)


def test_tree_threshold_recursion():
    assert tree_threshold(1) == 0
    assert tree_threshold(2) == 4
    assert tree_threshold(4) == tree_threshold(3) + 8 == 18


def test_embed_single_edge():
    pi = embed_tree_in_graph(graph(2, [(0, 1)]), graph(5, [(3, 4)]))
    assert pi is not None and {pi[0], pi[1]} == {3, 4}


def test_embed_path_into_k5():
    K5 = graph(5, itertools.combinations(range(5), 2))
    pi = embed_tree_in_graph(PATH3, K5)
    assert is_tree_embedding(PATH3, K5, pi)


def test_embed_star_above_threshold():
    rng = random.Random(4)
    d0 = tree_threshold(4)
    hits = 0
    for _ in range(30):
        n = rng.randint(20, 40)
        G = graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.75])
        if G.average_degree() >= d0:
            hits += 1
            pi = embed_tree_in_graph(STAR3, G)
            assert pi is not None and is_tree_embedding(STAR3, G, pi)
    assert hits >= 10


def test_embed_tree_below_threshold_is_sound_or_absent():
    rng = random.Random(8)
    for _ in range(200):
        n = rng.randint(1, 12)
        G = graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4])
        for T in (PATH3, STAR3, graph(1, [])):
            pi = embed_tree_in_graph(T, G)
            if pi is not None:
                assert is_tree_embedding(T, G, pi)


def test_embed_tree_requires_tree():
    with pytest.raises(PreconditionError):
        embed_tree_in_graph(TRIANGLE, TRIANGLE)


# --- height two ----------------------------------------------------------

def test_embed_height2_v_direct():
    F = Family.from_element_sets(3, [[], [1, 2], [1, 3]])
    emb = embed_height2(V, F)
    assert emb.mapping["a"] == 0
    assert {emb.mapping["b"], emb.mapping["c"]} == {M([1, 2]), M([1, 3])}


def test_embed_height2_antichain_absent():
    assert embed_height2(chain(2), middle_levels(4, 1)) is None


def test_embed_height2_lambda_middle_levels():
    F = middle_levels(6, 2)
    emb = embed_height2(LAMBDA, F)
    assert emb is not None and check_embedding(LAMBDA, F, emb.mapping)
    assert find_subposet(LAMBDA, F) is not None


def test_embed_height2_chain_fallback():
    # a long chain plus nothing else forces the walk down the chain
    F = Family.of(5, [0, 1, 3, 7, 15, 31])
    P = Poset.from_relation("abcd", [("a", "b"), ("a", "c"), ("a", "d")])
    emb = embed_height2(P, F)
    assert emb is not None and check_embedding(P, F, emb.mapping)


def test_embed_height2_above_threshold():
    # |F| >= (1 + 20|P|/n) C(n, n/2) cannot be met at desk scale for n <= 8,
    # so only soundness is checked across random families
    rng = random.Random(12)
    for _ in range(300):
        F = random_family(rng, 5, rng.random())
        for P in (V, LAMBDA, N_POSET, chain(2)):
            emb = embed_height2(P, F)
            if emb is not None:
                assert check_embedding(P, F, emb.mapping)


def test_embed_height2_precondition():
    with pytest.raises(PreconditionError):
        embed_height2(chain(3), middle_levels(4, 2))


# --- hitting sets and bottlenecks ---------------------------------------

def brute_min_hitting(groups, limit):
    universe = sorted(set().union(*groups), key=lambda s: (s.bit_count(), s)) if groups else []
    for size in range(limit):
        for combo in itertools.combinations(universe, size):
            if all(set(combo) & set(g) for g in groups):
                return combo
    return None


def test_min_hitting_set_matches_brute_force():
    rng = random.Random(21)
    for _ in range(300):
        universe = list(range(1, 9))
        groups = [tuple(rng.sample(universe, rng.randint(1, 3))) for _ in range(rng.randint(0, 6))]
        for limit in (1, 2, 3, 5):
            assert min_hitting_set(groups, limit) == brute_min_hitting(groups, limit)


def test_bottleneck_single_extension():
    F = Family.from_element_sets(3, [[1], [1, 2]])
    L = enumerate_marked_chains(F, 2)
    w = bottleneck_witness(ChainPrefix((M([1, 2]),)), L, 3)
    assert w is not None and w.sets == (M([1]),)


def test_bottleneck_no_extension():
    F = Family.from_element_sets(3, [[1], [1, 2]])
    L = enumerate_marked_chains(F, 2)
    w = bottleneck_witness(ChainPrefix((M([1, 3]),)), L, 3)
    assert w is not None and w.sets == ()


def test_bottleneck_absent_with_disjoint_lower_markers():
    top = M([1, 2, 3, 4])
    lows = [M([1]), M([2]), M([3])]
    L = [(top, low) for low in lows]
    assert bottleneck_witness((top,), L, 3) is None
    assert brute_min_hitting([(low,) for low in lows], 4) == tuple(lows)
    assert bottleneck_witness((top,), L, 4).sets == tuple(lows)


def test_chain_prefix_validation():
    with pytest.raises(ValueError):
        ChainPrefix((M([1]), M([1, 2])))


def test_bad_chain_fraction_exact():
    """Bad marked chains (with multiplicity) stay below |P| 4^(K+1) / n * n!."""
    for n in (4, 6, 8):
        for count in (2, 3):
            F = trim_middle(middle_levels(n, count))
            K = longest_chain(F)
            k = min(count, K)
            if k < 2:
                continue
            classes = compact_marked_chains(F, k)
            for size in (3, 4, 5):
                for s in range(1, k):
                    bad = bad_chain_weight(classes, s, size)
                    assert bad * n <= size * 4 ** (K + 1) * factorial(n)


def test_bad_marker_tuples_subset():
    F = middle_levels(5, 2)
    tuples = [c.markers for c in compact_marked_chains(F, 2)]
    bad = bad_marker_tuples(tuples, 1, 3)
    assert set(bad) <= set(tuples)


# --- saturated embedding -------------------------------------------------

def test_embed_saturated_base_case():
    F = middle_levels(6, 2)
    L = compact_marked_chains(F, 2)
    emb = embed_saturated(chain(2), F, L, 2)
    top, bottom = L[0].markers
    assert emb.mapping == {"c0": bottom, "c1": top}


def test_embed_saturated_v_like_middle_levels_8():
    F = middle_levels(8, 2)
    L = compact_marked_chains(F, 2)
    for P in (V, LAMBDA, N_POSET):
        emb = embed_saturated(P, F, L, 2)
        assert emb is not None
        assert check_embedding(P, F, emb.mapping)
        assert certificate_violations(P, emb) == []


def test_embed_saturated_fork_middle_levels_9():
    F = middle_levels(9, 3)
    L = compact_marked_chains(F, 3)
    emb = embed_saturated(FORK, F, L, 3)
    assert emb is not None and check_embedding(FORK, F, emb.mapping)
    assert certificate_violations(FORK, emb) == []
    assert find_subposet(FORK, F) is not None
    assert "->" in format_certificate(emb)


def test_embed_saturated_accepts_enumerated_chains():
    F = middle_levels(6, 2)
    L = enumerate_marked_chains(F, 2)
    emb = embed_saturated(N_POSET, F, L, 2)
    assert emb is not None and certificate_violations(N_POSET, emb) == []


def test_embed_saturated_preconditions():
    F = middle_levels(8, 2)
    L = compact_marked_chains(F, 2)
    unsat = Poset.from_relation("abcd", [("a", "b"), ("b", "c"), ("d", "c")])
    with pytest.raises(PreconditionError):
        embed_saturated(unsat, F, L, 2)
    with pytest.raises(PreconditionError):
        embed_saturated(V, F, L, 1)  # F has 2-chains
    with pytest.raises(PreconditionError):
        embed_saturated(V, middle_levels(4, 4), compact_marked_chains(middle_levels(4, 4), 2), 4)
    with pytest.raises(PreconditionError):
        embed_saturated(chain(3), F, L, 2)  # wrong marker count


def test_embed_saturated_complete_for_saturated_posets():
    """With every marked chain available the marked-chain route alone finds
    an embedding exactly when brute force does."""
    rng = random.Random(33)
    sats = [P for size in range(2, 6) for P in tree_posets(size)
            if P.is_saturated and P.height >= 2]
    window = [s for s in range(16) if 4 <= 4 * s.bit_count() <= 12]
    for _ in range(150):
        F = Family.of(4, [s for s in window if rng.random() < 0.6])
        if not F.sets:
            continue
        K = longest_chain(F)
        for P in sats:
            if P.height > K:
                continue
            emb = embed_saturated(P, F, compact_marked_chains(F, P.height), K)
            assert (emb is None) == (find_subposet(P, F) is None)
            if emb is not None:
                assert certificate_violations(P, emb) == []


# --- full pipeline -------------------------------------------------------

def test_embed_poset_chain_fallback():
    sets = [M([]), M([1]), M([1, 2])] + [M([1, 2, 3, 4, 5, 6, 7, 8][:j]) for j in (3, 4, 5)]
    F = Family.of(8, sets + [M([3, 4, 5]), M([5, 6, 7, 8])])
    emb = embed_poset(chain(3), F)
    assert emb.route == "chain" and check_embedding(chain(3), F, emb.mapping)


def test_embed_poset_v_into_one_level():
    assert embed_poset(V, middle_levels(8, 1)) is None


def test_embed_poset_n_middle_levels():
    F = middle_levels(8, 2)
    emb = embed_poset(N_POSET, F)
    assert emb is not None and emb.route.startswith("marked-chains")
    assert check_embedding(N_POSET, F, emb.mapping)
    assert find_subposet(N_POSET, F) is not None


def test_embed_poset_unsaturated_restricts_embedding():
    P = Poset.from_relation("abcd", [("a", "b"), ("b", "c"), ("d", "c")])
    F = middle_levels(9, 3)
    emb = embed_poset(P, F)
    assert set(emb.mapping) == set(P.elements)
    assert check_embedding(P, F, emb.mapping)
    assert set(saturate(P).elements) > set(emb.mapping)


def test_embed_poset_tree_growth_route():
    # only the empty set sits below {1}; trimming would drop it
    F = Family.from_element_sets(3, [[], [1]])
    emb = embed_poset(chain(2), F)
    assert emb.route == "tree-growth" and check_embedding(chain(2), F, emb.mapping)


def test_grow_embedding_exhaustive_n3():
    posets = [P for size in range(1, 5) for P in tree_posets(size)]
    for bits in range(256):
        F = Family.of(3, [s for s in range(8) if bits >> s & 1])
        for P in posets:
            g = grow_embedding(P, F)
            assert (g is None) == (find_subposet(P, F) is None)
            if g is not None:
                assert check_embedding(P, F, g)


def test_embed_poset_requires_tree():
    P = Poset.from_relation("abcd", [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])
    with pytest.raises(PreconditionError):
        embed_poset(P, middle_levels(4, 2))


def test_comparability_graph_edges():
    G = comparability_graph(Family.from_element_sets(2, [[], [1], [2]]))
    assert len(G.edges) == 2
