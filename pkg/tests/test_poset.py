import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import LAMBDA, N_POSET, V, chain
from posetturan.errors import CycleError, PosetFormatError, PreconditionError
from posetturan.lattice import Family, mask_from_elements
from posetturan.poset import (
    Poset,
    analyze,
    check_embedding,
    find_subposet,
    format_poset,
    interval,
    linear_extension,
    maximal_chains,
    opposite,
    parse_poset,
    reduce_and_close,
)

DIAMOND = Poset.from_relation("abcd", [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])


# --- parsing -------------------------------------------------------------

def test_parse_two_chain():
    P = parse_poset("elems a b\ncover a b")
    assert P.elements == ("a", "b")
    assert P.closure == {("a", "b")}
    assert P.covers == {("a", "b")}


def test_parse_single_element():
    P = parse_poset("elems a\n")
    assert P.elements == ("a",)
    assert not P.closure


def test_parse_cycle_rejected():
    with pytest.raises(PosetFormatError, match="cycl"):
        parse_poset("elems a b\ncover a b\ncover b a")


@pytest.mark.parametrize("text, msg", [
    ("elems a a", "duplicate"),
    ("elems a\ncover a b", "unknown"),
    ("elems a b\nrelate a b", "directive"),
    ("elems a-b", "bad element id"),
    ("elems a b\ncover a", "exactly two"),
])
def test_parse_errors(text, msg):
    with pytest.raises(PosetFormatError, match=msg):
        parse_poset(text)


def test_parse_comments_multiline_and_redundant_covers():
    P = parse_poset("# a chain\nelems a b\nelems c  # more\ncover a b\ncover b c\ncover a c\n")
    assert P.elements == ("a", "b", "c")
    assert P.covers == {("a", "b"), ("b", "c")}
    assert parse_poset(format_poset(P)) == P


# --- reduction and closure -----------------------------------------------

def test_reduce_and_close_chain():
    covers, closure = reduce_and_close({("a", "b"), ("b", "c")})
    assert closure == {("a", "b"), ("b", "c"), ("a", "c")}
    assert covers == {("a", "b"), ("b", "c")}


def test_reduce_drops_implied_pair():
    covers, _ = reduce_and_close({("a", "b"), ("b", "c"), ("a", "c")})
    assert covers == {("a", "b"), ("b", "c")}


def test_reduce_empty():
    assert reduce_and_close(set()) == (frozenset(), frozenset())


def test_reduce_cycle():
    with pytest.raises(CycleError):
        reduce_and_close({("a", "b"), ("b", "c"), ("c", "a")})


# --- analysis ------------------------------------------------------------

def test_analyze_chain():
    r = analyze(chain(3))
    assert (r.height, r.is_saturated, r.hasse_is_tree, r.num_maximal_chains) == (3, True, True, 1)


def test_analyze_v():
    r = analyze(V)
    assert (r.height, r.is_saturated, r.hasse_is_tree, r.num_maximal_chains) == (2, True, True, 2)


def test_analyze_unsaturated():
    P = Poset.from_relation("abcd", [("a", "b"), ("b", "c"), ("d", "c")])
    r = analyze(P)
    assert r.height == 3 and not r.is_saturated and r.hasse_is_tree


def test_analyze_diamond_not_tree():
    assert not analyze(DIAMOND).hasse_is_tree


def test_analyze_empty():
    with pytest.raises(PreconditionError):
        analyze(Poset(()))


def test_maximal_chains():
    assert maximal_chains(V) == [["a", "b"], ["a", "c"]]
    assert maximal_chains(Poset.chain("abc")) == [["a", "b", "c"]]
    assert maximal_chains(DIAMOND) == [["a", "b", "d"], ["a", "c", "d"]]


def test_interval():
    C = Poset.chain("abc")
    assert interval(C, "a", "c") == {"a", "b", "c"}
    assert interval(V, "b", "c") == set()
    for P in (C, V, N_POSET):
        for x in P.elements:
            assert interval(P, x, x) == {x}
    with pytest.raises(PreconditionError):
        interval(V, "a", "z")


def test_linear_extension():
    assert linear_extension(V) == ["a", "b", "c"]
    assert linear_extension(Poset.antichain("ba")) == ["a", "b"]
    assert linear_extension(Poset.chain("abc")) == ["a", "b", "c"]


def test_opposite():
    P = Poset.chain("ab")
    assert opposite(P).closure == {("b", "a")}
    A = Poset.antichain("xyz")
    assert opposite(A) == A
    assert opposite(V).closure == LAMBDA.closure


# --- subposet search -----------------------------------------------------

def test_v_in_chain_weak_not_induced():
    C = Poset.chain("xyz")
    emb = find_subposet(V, C)
    assert emb is not None and check_embedding(V, C, emb.mapping)
    assert find_subposet(V, C, induced=True) is None


def test_two_chain_into_family():
    F = Family.of(1, [0, 1])
    emb = find_subposet(chain(2), F)
    assert emb.mapping == {"c0": 0, "c1": 1}


def test_induced_search_respects_incomparability():
    # V is an induced subposet of the Boolean lattice 2^[2]
    F = Family.of(2, [0, 1, 2, 3])
    emb = find_subposet(V, F, induced=True)
    assert emb is not None and check_embedding(V, F, emb.mapping, induced=True)
    assert emb.mapping["a"] == 0


def test_find_subposet_absent_for_antichain_target():
    F = Family.of(4, [mask_from_elements(s) for s in ([1, 2], [1, 3], [2, 3])])
    assert find_subposet(chain(2), F) is None


def test_check_embedding_rejects_bad_maps():
    F = Family.of(2, [0, 1, 2, 3])
    assert not check_embedding(V, F, {"a": 1, "b": 1, "c": 3})  # not injective
    assert not check_embedding(V, F, {"a": 3, "b": 1, "c": 2})  # order reversed
    assert not check_embedding(V, F, {"a": 0, "b": 1})  # partial


# --- properties ----------------------------------------------------------

@st.composite
def dags(draw, max_size=7):
    n = draw(st.integers(1, max_size))
    names = [f"e{i}" for i in range(n)]
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=12))
    rel = [(names[i], names[j]) for i, j in pairs if i < j]
    return Poset.from_relation(names, rel)


@settings(max_examples=150, deadline=None)
@given(dags())
def test_round_trip_reduction(P):
    covers, closure = reduce_and_close(P.closure)
    assert covers == P.covers and closure == P.closure


@settings(max_examples=150, deadline=None)
@given(dags())
def test_closure_invariants(P):
    assert all(x != y for x, y in P.closure)
    for x, y in P.closure:
        for y2, z in P.closure:
            if y == y2:
                assert (x, z) in P.closure
    for x, y in P.covers:
        assert not any(P.less(x, z) and P.less(z, y) for z in P.elements)


@settings(max_examples=100, deadline=None)
@given(dags(max_size=6))
def test_embeds_into_own_linear_extension(P):
    ext = linear_extension(P)
    assert all(not P.less(b, a) for i, a in enumerate(ext) for b in ext[i + 1:])
    C = Poset.chain(ext)
    emb = find_subposet(P, C)
    assert emb is not None and check_embedding(P, C, emb.mapping)


@settings(max_examples=100, deadline=None)
@given(dags())
def test_height_is_longest_maximal_chain(P):
    chains = maximal_chains(P)
    assert P.height == max(len(c) for c in chains)
    assert len({tuple(c) for c in chains}) == len(chains)
    for c in chains:
        assert all(P.less(a, b) for a, b in zip(c, c[1:]))


@settings(max_examples=100, deadline=None)
@given(dags())
def test_opposite_involution_and_analysis(P):
    Q = opposite(P)
    assert opposite(Q) == P
    a, b = analyze(P), analyze(Q)
    assert a == b
    assert sorted(tuple(reversed(c)) for c in maximal_chains(Q)) == sorted(map(tuple, maximal_chains(P)))


@settings(max_examples=60, deadline=None)
@given(dags(max_size=4), dags(max_size=6), st.booleans())
def test_found_embeddings_verify(Q, T, induced):
    emb = find_subposet(Q, T, induced)
    if emb is not None:
        assert check_embedding(Q, T, emb.mapping, induced)
