"""Constructive embeddings.

* trees into graphs of large average degree (peel low-degree vertices,
  embed the tree minus a leaf, hang the leaf on a spare neighbour);
* height-2 tree posets into families via the comparability graph and a
  chain walk;
* saturated tree posets into families along marked chains, removing one
  leaf interval at a time, with bottleneck filtering of the chain list;
* ``embed_poset``, the full pipeline for arbitrary tree posets.
"""
from __future__ import annotations

from collections import defaultdict, deque
from collections.abc import Hashable, Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

from .errors import PreconditionError
from .lattice import (
    Family,
    MarkedChain,
    MarkerClass,
    brace,
    compact_marked_chains,
    full_set,
    longest_chain,
    longest_chain_sets,
    set_key,
    trim_middle,
)
from .poset import Embedding, Poset, check_embedding, linear_extension, maximal_chains, opposite
from .trees import OPPOSITE, leaf_interval, saturate

# --- graphs --------------------------------------------------------------


@dataclass(frozen=True)
class SimpleGraph:
    vertices: tuple[Hashable, ...]
    edges: frozenset[frozenset]

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValueError("duplicate vertex")
        for e in self.edges:
            if len(e) != 2:
                raise ValueError(f"bad edge {set(e)} (loops are not allowed)")
            if not e <= vs:
                raise ValueError(f"edge {set(e)} mentions an unknown vertex")

    @classmethod
    def build(cls, vertices: Iterable[Hashable], edges: Iterable[tuple[Hashable, Hashable]]) -> SimpleGraph:
        return cls(tuple(vertices), frozenset(frozenset(e) for e in edges))

    @cached_property
    def adj(self) -> dict[Hashable, list[Hashable]]:
        pos = {v: i for i, v in enumerate(self.vertices)}
        out: dict[Hashable, list] = {v: [] for v in self.vertices}
        for e in self.edges:
            a, b = tuple(e)
            out[a].append(b)
            out[b].append(a)
        for v in out:
            out[v].sort(key=pos.__getitem__)
        return out

    def degree(self, v: Hashable) -> int:
        return len(self.adj[v])

    def average_degree(self) -> Fraction:
        if not self.vertices:
            return Fraction(0)
        return Fraction(2 * len(self.edges), len(self.vertices))

    def induced(self, keep: Iterable[Hashable]) -> SimpleGraph:
        keep = set(keep)
        return SimpleGraph(
            tuple(v for v in self.vertices if v in keep),
            frozenset(e for e in self.edges if e <= keep),
        )

    def is_tree(self) -> bool:
        n = len(self.vertices)
        if n == 0 or len(self.edges) != n - 1:
            return False
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            for y in self.adj[stack.pop()]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == n


def comparability_graph(F: Family) -> SimpleGraph:
    sets = F.ordered()
    edges = [(a, b) for i, a in enumerate(sets) for b in sets[i + 1:] if a & ~b == 0]
    return SimpleGraph.build(sets, edges)


def hasse_graph(P: Poset) -> SimpleGraph:
    return SimpleGraph.build(P.elements, P.covers)


def degenerate_core(G: SimpleGraph, d: Fraction | int | float) -> SimpleGraph:
    """Repeatedly delete vertices of degree < d/2 and return what is left."""
    half = Fraction(d) / 2
    alive = set(G.vertices)
    deg = {v: G.degree(v) for v in G.vertices}
    queue = deque(v for v in G.vertices if deg[v] < half)
    while queue:
        v = queue.popleft()
        if v not in alive:
            continue
        alive.discard(v)
        for w in G.adj[v]:
            if w in alive:
                deg[w] -= 1
                if deg[w] < half and deg[w] + 1 >= half:
                    queue.append(w)
    return G.induced(alive)


def tree_threshold(size: int) -> int:
    """d_0 for a tree on ``size`` vertices: d_0(1) = 0, d_0(T) = d_0(T - leaf) + 2|T|."""
    return sum(2 * j for j in range(2, size + 1))


def embed_tree_in_graph(T: SimpleGraph, G: SimpleGraph) -> dict | None:
    """Injective homomorphism of the tree T into G, or None.

    Guaranteed to succeed when G has average degree at least
    ``tree_threshold(len(T.vertices))``.  Below the threshold the peeling
    argument may give up, in which case a plain backtracking search decides.
    """
    if not T.is_tree():
        raise PreconditionError("embed_tree_in_graph: T is not a tree")
    result = _tree_into(T, G)
    if result is None:
        result = _tree_backtrack(T, G)
    if result is not None:
        assert len(set(result.values())) == len(result)
        assert all(frozenset((result[a], result[b])) in G.edges for a, b in map(tuple, T.edges))
    return result


def _tree_into(T: SimpleGraph, G: SimpleGraph) -> dict | None:
    if not G.vertices:
        return None
    if len(T.vertices) == 1:
        return {T.vertices[0]: G.vertices[0]}
    size = len(T.vertices)
    v = next(x for x in T.vertices if T.degree(x) == 1)
    (u,) = T.adj[v]
    rest = T.induced(x for x in T.vertices if x != v)
    core = G.induced(x for x in G.vertices if G.degree(x) > size)
    pi = _tree_into(rest, core)
    if pi is None:
        return None
    used = set(pi.values())
    spare = next((w for w in G.adj[pi[u]] if w not in used), None)
    if spare is None:
        return None
    pi[v] = spare
    return pi


def _tree_backtrack(T: SimpleGraph, G: SimpleGraph) -> dict | None:
    order = []
    parent = {}
    for root in T.vertices[:1]:
        order.append(root)
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in T.adj[x]:
                if y not in parent and y != root:
                    parent[y] = x
                    order.append(y)
                    queue.append(y)
    pi: dict = {}
    used: set = set()

    def go(i):
        if i == len(order):
            return True
        x = order[i]
        cands = G.vertices if x not in parent else G.adj[pi[parent[x]]]
        for w in cands:
            if w in used or G.degree(w) < T.degree(x):
                continue
            pi[x] = w
            used.add(w)
            if go(i + 1):
                return True
            used.discard(w)
            del pi[x]
        return False

    return dict(pi) if go(0) else None


# --- height two ----------------------------------------------------------


def _tree_order(P: Poset) -> list[str]:
    """BFS over the Hasse tree from the smallest id."""
    start = min(P.elements)
    order = [start]
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in P.hasse_neighbors(x):
            if y not in seen:
                seen.add(y)
                order.append(y)
                queue.append(y)
    return order


def _onto_chain(P: Poset, chain: Sequence[int]) -> dict[str, int]:
    asc = sorted(chain, key=set_key)
    return dict(zip(linear_extension(P), asc))


def _chain_walk(P: Poset, G: SimpleGraph) -> dict[str, int] | None:
    if not G.vertices:
        return None
    order = _tree_order(P)
    img = {order[0]: G.vertices[0]}
    for v in order[1:]:
        (u,) = [p for p in P.hasse_neighbors(v) if p in img]
        upward = P.less(u, v)
        walk = [img[u]]
        while True:
            cur = img[u]
            used = set(img.values())
            free = [w for w in G.adj[cur] if w not in used]
            good = [w for w in free if (cur & ~w == 0) == upward]
            if good:
                img[v] = good[0]
                break
            back = [w for w in free if w not in walk]
            if not back:
                return None
            # move u one step further down (or up) and keep walking
            img[u] = back[0]
            walk.append(back[0])
            if len(walk) >= len(P):
                return _onto_chain(P, walk)
    return img


def embed_height2(P: Poset, F: Family) -> Embedding | None:
    if P.height != 2 or not P.hasse_is_tree:
        raise PreconditionError("embed_height2 needs a height-2 poset with tree Hasse diagram")
    G = comparability_graph(F)
    core = degenerate_core(G, 4 * len(P))
    for graph, route in ((core, "height2-core"), (G, "height2-graph")):
        img = _chain_walk(P, graph)
        if img is not None:
            assert check_embedding(P, F, img), "height-2 chain walk produced an invalid map"
            return Embedding(img, route=route)
    return None


# --- bottlenecks ---------------------------------------------------------


@dataclass(frozen=True)
class ChainPrefix:
    markers: tuple[int, ...]

    def __post_init__(self):
        for a, b in zip(self.markers, self.markers[1:]):
            if not (b != a and b & ~a == 0):
                raise ValueError("prefix markers must be strictly nested, largest first")


@dataclass(frozen=True)
class Witness:
    sets: tuple[int, ...]


def min_hitting_set(groups: Iterable[Iterable[int]], limit: int) -> tuple[int, ...] | None:
    """Lexicographically least minimum hitting set if it has fewer than
    ``limit`` members, else None.  Sizes are tried in increasing order."""
    groups = [frozenset(g) for g in groups]
    if any(not g for g in groups):
        return None
    universe = sorted(set().union(*groups), key=set_key) if groups else []
    idx = {x: i for i, x in enumerate(universe)}
    gs = [frozenset(idx[x] for x in g) for g in groups]

    def dfs(start, chosen, remaining, budget):
        if not remaining:
            return chosen
        if budget == 0:
            return None
        if any(max(g) < start for g in remaining):
            return None
        # pairwise disjoint groups each need their own element
        disjoint, covered = 0, set()
        for g in sorted(remaining, key=len):
            if not g & covered:
                disjoint += 1
                covered |= g
        if disjoint > budget:
            return None
        for i in range(start, len(universe)):
            left = [g for g in remaining if i not in g]
            if len(left) == len(remaining):
                continue
            found = dfs(i + 1, chosen + [i], left, budget - 1)
            if found is not None:
                return found
        return None

    for size in range(limit):
        found = dfs(0, [], gs, size)
        if found is not None:
            return tuple(universe[i] for i in found)
    return None


def _markers(entry) -> tuple[int, ...]:
    if isinstance(entry, (MarkedChain, MarkerClass)):
        return entry.markers
    return tuple(entry)


def marker_tuples(L: Iterable) -> list[tuple[int, ...]]:
    """Distinct marker tuples of a chain list, first-occurrence order."""
    seen = {}
    for entry in L:
        seen.setdefault(_markers(entry), None)
    return list(seen)


def bottleneck_witness(prefix: ChainPrefix | Sequence[int], L: Iterable, bound: int) -> Witness | None:
    """A witness that ``prefix`` is a bottleneck of ``L``, or None.

    The witness is the lexicographically least minimum hitting set of the
    lower markers of every chain in ``L`` whose top markers equal the
    prefix; it only counts if it has fewer than ``bound`` members.
    """
    top = prefix.markers if isinstance(prefix, ChainPrefix) else tuple(prefix)
    s = len(top)
    groups = [m[s:] for m in marker_tuples(L) if m[:s] == top]
    hit = min_hitting_set(groups, bound)
    return None if hit is None else Witness(hit)


def bottlenecks(tuples: Sequence[tuple[int, ...]], s: int, bound: int) -> dict[tuple[int, ...], Witness]:
    groups: dict[tuple[int, ...], list] = defaultdict(list)
    for m in tuples:
        groups[m[:s]].append(m[s:])
    out = {}
    for prefix, lows in groups.items():
        hit = min_hitting_set(lows, bound)
        if hit is not None:
            out[prefix] = Witness(hit)
    return out


def bad_marker_tuples(tuples: Sequence[tuple[int, ...]], s: int, bound: int) -> list[tuple[int, ...]]:
    """Marker tuples whose top ``s`` markers form a bottleneck."""
    bad = bottlenecks(tuples, s, bound)
    return [m for m in tuples if m[:s] in bad]


# --- saturated embedding -------------------------------------------------


@lru_cache(maxsize=4096)
def _plan(P: Poset):
    lr = leaf_interval(P)
    Q = opposite(P) if lr.orientation == OPPOSITE else P
    v = lr.interval[0]
    through = [c for c in maximal_chains(Q) if c[0] == v]
    return lr, Q, through


def _flip(t: tuple[int, ...], top: int) -> tuple[int, ...]:
    return tuple(top ^ x for x in reversed(t))


def _saturated_embeddings(P: Poset, tuples: Sequence[tuple[int, ...]], n: int,
                          filtered: bool) -> Iterator[tuple[dict, dict]]:
    """Yield (mapping, certificate) pairs for saturated tree poset P where
    every maximal chain goes onto the markers of one tuple."""
    k = P.height
    if P.is_chain:
        asc = linear_extension(P)
        for m in tuples:
            yield {x: m[k - 1 - i] for i, x in enumerate(asc)}, {tuple(asc): m}
        return

    lr, Q, through = _plan(P)
    flip = lr.orientation == OPPOSITE
    top = full_set(n)
    qt = [_flip(m, top) for m in tuples] if flip else list(tuples)
    I = lr.interval
    s = k - len(I)

    if filtered:
        bad = bottlenecks(qt, s, len(P))
        rec_q = [m for m in qt if m[:s] not in bad]
        rec = [_flip(m, top) for m in rec_q] if flip else rec_q
    else:
        rec = tuples

    by_prefix: dict[tuple[int, ...], list] = defaultdict(list)
    for m in qt:
        by_prefix[m[:s]].append(m)
    known = set(qt)
    C = through[0]

    for mapping, certs in _saturated_embeddings(lr.remainder, rec, n, filtered):
        qimg = {x: top ^ y for x, y in mapping.items()} if flip else dict(mapping)
        used = set(qimg.values())
        prefix = tuple(qimg[x] for x in reversed(C[len(I):]))
        for m in by_prefix.get(prefix, ()):
            low = m[s:]
            if any(x in used for x in low):
                continue
            ext = dict(qimg)
            for j, x in enumerate(I):
                ext[x] = low[len(I) - 1 - j]
            new = {}
            for c in through:
                t = tuple(ext[x] for x in reversed(c))
                if t not in known:
                    break
                new[tuple(c)] = t
            else:
                if flip:
                    out_map = {x: top ^ y for x, y in ext.items()}
                    new = {tuple(reversed(c)): _flip(t, top) for c, t in new.items()}
                else:
                    out_map = ext
                yield out_map, {**certs, **new}


def embed_saturated(P: Poset, F: Family, L: Iterable, K: int,
                    check_window: bool = True) -> Embedding | None:
    """Embed a saturated tree poset so that each maximal chain lands on the
    markers of a chain in ``L``.

    The bottleneck-filtered recursion runs first; if it finds nothing, the
    same recursion is repeated over the unfiltered list with full
    backtracking.
    """
    k = P.height
    if not P.hasse_is_tree or not P.is_saturated:
        raise PreconditionError("embed_saturated needs a saturated poset with tree Hasse diagram")
    if k < 2:
        raise PreconditionError("embed_saturated needs height at least 2")
    tuples = marker_tuples(L)
    for m in tuples:
        if len(m) != k:
            raise PreconditionError(f"marked chain has {len(m)} markers, expected {k}")
        if any(x not in F.sets for x in m):
            raise PreconditionError("a marker lies outside the family")
    if F.sets and longest_chain(F) > K:
        raise PreconditionError(f"the family has a chain longer than K={K}")
    if check_window:
        n = F.n
        if any(not n <= 4 * s.bit_count() <= 3 * n for s in F.sets):
            raise PreconditionError("family has sets outside [n/4, 3n/4]")

    for filtered in (True, False):
        for mapping, certs in _saturated_embeddings(P, tuples, F.n, filtered):
            assert check_embedding(P, F, mapping), "saturated embedding failed re-verification"
            assert set(certs) == {tuple(c) for c in maximal_chains(P)}
            route = "marked-chains" if filtered else "marked-chains-backtrack"
            return Embedding(mapping, certificate=certs, route=route)
    return None


def certificate_violations(P: Poset, emb: Embedding) -> list[str]:
    """Check each certified chain is mapped onto its nested marker tuple."""
    out = []
    if emb.certificate is None:
        return ["no certificate"]
    chains = {tuple(c) for c in maximal_chains(P)}
    if set(emb.certificate) != chains:
        out.append("certificate does not cover exactly the maximal chains")
    for c, markers in emb.certificate.items():
        if tuple(emb.mapping[x] for x in reversed(c)) != tuple(markers):
            out.append(f"chain {c} is not mapped onto its markers")
        for a, b in zip(markers, markers[1:]):
            if not (a != b and b & ~a == 0):
                out.append(f"markers of {c} are not nested")
    return out


def format_certificate(emb: Embedding) -> str:
    """One line per maximal chain: ``a < b -> {1} {1,2}`` (ascending)."""
    if not emb.certificate:
        return ""
    lines = []
    for c in sorted(emb.certificate):
        markers = emb.certificate[c]
        lines.append(" < ".join(c) + " -> " + " ".join(brace(m) for m in reversed(markers)))
    return "\n".join(lines) + "\n"


# --- full pipeline -------------------------------------------------------


def grow_embedding(P: Poset, F: Family) -> dict[str, int] | None:
    """Exhaustive search growing the image along the Hasse tree.

    Each new element is attached to one already placed Hasse neighbour and
    only that cover relation is checked; order preservation everywhere
    follows because the unique tree path between comparable elements is a
    monotone cover path.
    """
    if not P.hasse_is_tree:
        raise PreconditionError("grow_embedding needs a tree Hasse diagram")
    order = _tree_order(P)
    sets = F.ordered()
    n_sub = {a: sum(1 for b in sets if b != a and b & ~a == 0) for a in sets}
    n_sup = {a: sum(1 for b in sets if b != a and a & ~b == 0) for a in sets}
    fits = {
        x: [a for a in sets if n_sup[a] >= len(P.above(x)) and n_sub[a] >= len(P.below(x))]
        for x in order
    }
    parent = {}
    for i, x in enumerate(order[1:], 1):
        parent[x] = next(p for p in P.hasse_neighbors(x) if p in order[:i])
    img: dict[str, int] = {}
    used: set[int] = set()

    def go(i):
        if i == len(order):
            return True
        x = order[i]
        p = parent.get(x)
        for a in fits[x]:
            if a in used:
                continue
            if p is not None:
                b = img[p]
                if P.less(p, x) and not (a != b and b & ~a == 0):
                    continue
                if P.less(x, p) and not (a != b and a & ~b == 0):
                    continue
            img[x] = a
            used.add(a)
            if go(i + 1):
                return True
            del img[x]
            used.discard(a)
        return False

    return dict(img) if go(0) else None


def embed_poset(P: Poset, F: Family) -> Embedding | None:
    """Embed a tree poset into F.

    Routes, in order: a long chain in the trimmed family (linear extension);
    the saturated marked-chain embedding on the trimmed family; and, for
    the small families where the asymptotic machinery does not apply, an
    exhaustive growth along the Hasse tree over the untrimmed family.
    The route taken is recorded on the result.
    """
    if not P.elements:
        return Embedding({}, route="empty")
    if not P.hasse_is_tree:
        raise PreconditionError("embed_poset needs a tree Hasse diagram")
    trimmed = trim_middle(F)
    if trimmed.sets:
        chain = longest_chain_sets(trimmed)
        if len(chain) >= len(P):
            mapping = _onto_chain(P, chain[: len(P)])
            assert check_embedding(P, F, mapping)
            return Embedding(mapping, route="chain")
        k = P.height
        if k >= 2 and len(chain) >= k:
            sat = saturate(P)
            L = compact_marked_chains(trimmed, k)
            emb = embed_saturated(sat, trimmed, L, len(chain))
            if emb is not None:
                mapping = {x: emb.mapping[x] for x in P.elements}
                assert check_embedding(P, F, mapping)
                return Embedding(mapping, certificate=emb.certificate, route=emb.route)
    mapping = grow_embedding(P, F)
    if mapping is None:
        return None
    assert check_embedding(P, F, mapping)
    return Embedding(mapping, route="tree-growth")


def bad_chain_weight(tuples_with_mult: Iterable[MarkerClass], s: int, bound: int) -> int:
    """Number of bad marked chains (with multiplicity) for prefix length s."""
    classes = list(tuples_with_mult)
    bad = set(bad_marker_tuples([c.markers for c in classes], s, bound))
    return sum(c.multiplicity for c in classes if c.markers in bad)

