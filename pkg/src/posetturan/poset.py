"""Finite posets, Hasse diagrams, and subposet search.

Chain length always counts elements: the chain ``a < b < c`` has length 3.
Element ids are opaque strings; every choice the algorithms make is broken
lexicographically so results are reproducible.
"""
from __future__ import annotations

import heapq
import re
from collections.abc import Hashable, Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property

from .errors import CycleError, PosetFormatError, PreconditionError
from .lattice import Family

ID_RE = re.compile(r"[A-Za-z0-9_]+")

Pair = tuple[str, str]


def reduce_and_close(relation: Iterable[Pair]) -> tuple[frozenset[Pair], frozenset[Pair]]:
    """Transitive reduction and transitive closure of an acyclic relation."""
    succ: dict[str, set[str]] = {}
    for x, y in relation:
        if x == y:
            raise CycleError(f"reflexive pair {x} < {x}")
        succ.setdefault(x, set()).add(y)
        succ.setdefault(y, set())

    reach: dict[str, frozenset[str]] = {}
    state: dict[str, int] = {}

    def visit(root):
        # iterative DFS; state 1 = on stack, 2 = done
        stack = [(root, iter(sorted(succ[root])))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                acc = set()
                for s in succ[node]:
                    acc.add(s)
                    acc |= reach[s]
                reach[node] = frozenset(acc)
                state[node] = 2
                stack.pop()
            elif state.get(nxt) == 1:
                raise CycleError(f"relation has a cycle through {nxt}")
            elif nxt not in state:
                state[nxt] = 1
                stack.append((nxt, iter(sorted(succ[nxt]))))

    for x in sorted(succ):
        if x not in state:
            visit(x)

    closure = frozenset((x, y) for x in reach for y in reach[x])
    covers = frozenset(
        (x, y) for x, y in closure
        if not any(y in reach[z] for z in reach[x] if z != y)
    )
    return covers, closure


@dataclass(frozen=True)
class Poset:
    elements: tuple[str, ...]
    covers: frozenset[Pair] = frozenset()
    closure: frozenset[Pair] = frozenset()

    @classmethod
    def from_relation(cls, elements: Iterable[str], relation: Iterable[Pair] = ()) -> Poset:
        elements = tuple(elements)
        if len(set(elements)) != len(elements):
            raise PreconditionError("duplicate element id")
        known = set(elements)
        relation = list(relation)
        for x, y in relation:
            for e in (x, y):
                if e not in known:
                    raise PreconditionError(f"relation mentions unknown element {e!r}")
        covers, closure = reduce_and_close(relation)
        return cls(elements, covers, closure)

    @classmethod
    def chain(cls, ids: Iterable[str]) -> Poset:
        ids = list(ids)
        return cls.from_relation(ids, zip(ids, ids[1:]))

    @classmethod
    def antichain(cls, ids: Iterable[str]) -> Poset:
        return cls.from_relation(ids)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x: object) -> bool:
        return x in self._index

    @cached_property
    def _index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.elements)}

    @cached_property
    def _up(self) -> dict[str, frozenset[str]]:
        up: dict[str, set[str]] = {e: set() for e in self.elements}
        for x, y in self.closure:
            up[x].add(y)
        return {e: frozenset(s) for e, s in up.items()}

    @cached_property
    def _down(self) -> dict[str, frozenset[str]]:
        down: dict[str, set[str]] = {e: set() for e in self.elements}
        for x, y in self.closure:
            down[y].add(x)
        return {e: frozenset(s) for e, s in down.items()}

    @cached_property
    def _hasse(self) -> dict[str, tuple[str, ...]]:
        adj: dict[str, set[str]] = {e: set() for e in self.elements}
        for x, y in self.covers:
            adj[x].add(y)
            adj[y].add(x)
        return {e: tuple(sorted(s)) for e, s in adj.items()}

    def check(self, x: str) -> None:
        if x not in self._index:
            raise PreconditionError(f"unknown element {x!r}")

    def less(self, x: str, y: str) -> bool:
        return (x, y) in self.closure

    def leq(self, x: str, y: str) -> bool:
        return x == y or (x, y) in self.closure

    def comparable(self, x: str, y: str) -> bool:
        return x == y or (x, y) in self.closure or (y, x) in self.closure

    def above(self, x: str) -> frozenset[str]:
        return self._up[x]

    def below(self, x: str) -> frozenset[str]:
        return self._down[x]

    def upper_covers(self, x: str) -> list[str]:
        return sorted(y for y in self._hasse[x] if (x, y) in self.covers)

    def lower_covers(self, x: str) -> list[str]:
        return sorted(y for y in self._hasse[x] if (y, x) in self.covers)

    def hasse_neighbors(self, x: str) -> tuple[str, ...]:
        return self._hasse[x]

    def hasse_degree(self, x: str) -> int:
        return len(self._hasse[x])

    def minimal(self) -> list[str]:
        return sorted(e for e in self.elements if not self._down[e])

    def maximal(self) -> list[str]:
        return sorted(e for e in self.elements if not self._up[e])

    def restrict(self, keep: Iterable[str]) -> Poset:
        """Induced subposet on ``keep``, preserving element order."""
        keep = set(keep)
        for e in keep:
            self.check(e)
        elements = tuple(e for e in self.elements if e in keep)
        closure = frozenset((x, y) for x, y in self.closure if x in keep and y in keep)
        covers, closure2 = reduce_and_close(closure)
        return Poset(elements, covers, closure2)

    def remove(self, drop: Iterable[str]) -> Poset:
        drop = set(drop)
        return self.restrict(e for e in self.elements if e not in drop)

    @cached_property
    def height(self) -> int:
        if not self.elements:
            return 0
        depth: dict[str, int] = {}
        for x in linear_extension(self):
            depth[x] = 1 + max((depth[y] for y in self._down[x]), default=0)
        return max(depth.values())

    @cached_property
    def hasse_is_tree(self) -> bool:
        n = len(self.elements)
        if n == 0 or len(self.covers) != n - 1:
            return False
        seen = {self.elements[0]}
        stack = [self.elements[0]]
        while stack:
            x = stack.pop()
            for y in self._hasse[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == n

    @cached_property
    def is_chain(self) -> bool:
        n = len(self.elements)
        return len(self.closure) == n * (n - 1) // 2

    @cached_property
    def is_saturated(self) -> bool:
        h = self.height
        return all(len(c) == h for c in maximal_chains(self))


# --- text format ---------------------------------------------------------


def parse_poset(text: str) -> Poset:
    """Parse ``elems``/``cover`` lines; ``#`` starts a comment."""
    elements: list[str] = []
    seen: set[str] = set()
    pairs: list[Pair] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        for tok in rest:
            if not ID_RE.fullmatch(tok):
                raise PosetFormatError(f"line {lineno}: bad element id {tok!r}")
        if head == "elems":
            if pairs:
                raise PosetFormatError(f"line {lineno}: 'elems' after 'cover'")
            for tok in rest:
                if tok in seen:
                    raise PosetFormatError(f"line {lineno}: duplicate element id {tok!r}")
                seen.add(tok)
                elements.append(tok)
        elif head == "cover":
            if len(rest) != 2:
                raise PosetFormatError(f"line {lineno}: 'cover' takes exactly two ids")
            x, y = rest
            for e in (x, y):
                if e not in seen:
                    raise PosetFormatError(f"line {lineno}: unknown element {e!r}")
            pairs.append((x, y))
        else:
            raise PosetFormatError(f"line {lineno}: unknown directive {head!r}")
    try:
        return Poset.from_relation(elements, pairs)
    except CycleError as exc:
        raise PosetFormatError(f"cyclic relation: {exc}") from exc


def format_poset(P: Poset) -> str:
    lines = ["elems " + " ".join(P.elements)] if P.elements else []
    lines += [f"cover {x} {y}" for x, y in sorted(P.covers)]
    return "\n".join(lines) + "\n"


# --- analysis ------------------------------------------------------------


@dataclass(frozen=True)
class PosetReport:
    height: int
    is_saturated: bool
    hasse_is_tree: bool
    num_maximal_chains: int


def analyze(P: Poset) -> PosetReport:
    if not P.elements:
        raise PreconditionError("analyze needs a nonempty poset")
    return PosetReport(P.height, P.is_saturated, P.hasse_is_tree, len(maximal_chains(P)))


def maximal_chains(P: Poset) -> list[list[str]]:
    """Every maximal chain, ascending, sorted lexicographically.

    Maximal chains are exactly the cover paths from a minimal to a maximal
    element.
    """
    out: list[list[str]] = []

    def walk(path):
        ups = P.upper_covers(path[-1])
        if not ups:
            out.append(list(path))
            return
        for y in ups:
            path.append(y)
            walk(path)
            path.pop()

    for m in P.minimal():
        walk([m])
    out.sort()
    return out


def interval(P: Poset, x: str, y: str) -> set[str]:
    P.check(x)
    P.check(y)
    if not P.leq(x, y):
        return set()
    return {z for z in P.elements if P.leq(x, z) and P.leq(z, y)}


def linear_extension(P: Poset) -> list[str]:
    """Kahn's algorithm, always emitting the smallest available id."""
    indeg = {e: len(P.lower_covers(e)) for e in P.elements}
    heap = [e for e, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        x = heapq.heappop(heap)
        out.append(x)
        for y in P.upper_covers(x):
            indeg[y] -= 1
            if indeg[y] == 0:
                heapq.heappush(heap, y)
    return out


def opposite(P: Poset) -> Poset:
    return Poset(
        P.elements,
        frozenset((y, x) for x, y in P.covers),
        frozenset((y, x) for x, y in P.closure),
    )


# --- embeddings ----------------------------------------------------------


@dataclass(frozen=True)
class Embedding:
    """Injective order-preserving map from a source poset into a target.

    Targets are element ids of a poset or bitmask sets of a family.
    ``certificate`` maps maximal chains of the source (ascending tuples) to
    the marker tuples that realize them, when an algorithm produces one.
    """

    mapping: Mapping[str, Hashable]
    induced: bool = False
    certificate: Mapping[tuple[str, ...], tuple[int, ...]] | None = field(default=None, compare=False)
    route: str | None = field(default=None, compare=False)


class _Order:
    """Target order flattened to indices with strict up/down sets."""

    def __init__(self, items, up, down):
        self.items = items
        self.up = up
        self.down = down
        self.index = {t: i for i, t in enumerate(items)}

    @classmethod
    def of(cls, target: Poset | Family) -> _Order:
        if isinstance(target, Family):
            items = target.ordered()
            up = [set() for _ in items]
            down = [set() for _ in items]
            for i, a in enumerate(items):
                for j in range(i + 1, len(items)):
                    b = items[j]
                    if a & ~b == 0:
                        up[i].add(j)
                        down[j].add(i)
            return cls(items, up, down)
        items = list(target.elements)
        idx = {e: i for i, e in enumerate(items)}
        up = [{idx[y] for y in target.above(e)} for e in items]
        down = [{idx[y] for y in target.below(e)} for e in items]
        return cls(items, up, down)


def _search_order(Q: Poset) -> list[str]:
    """Most constrained first: each step picks the element related to the most
    already-placed elements, then highest comparability degree, then id."""
    remaining = set(Q.elements)
    placed: list[str] = []
    while remaining:
        def key(q):
            rel = sum(1 for p in placed if Q.comparable(p, q))
            return (-rel, -(len(Q.above(q)) + len(Q.below(q))), q)
        q = min(remaining, key=key)
        placed.append(q)
        remaining.remove(q)
    return placed


def find_subposet(Q: Poset, target: Poset | Family, induced: bool = False) -> Embedding | None:
    """Exhaustive backtracking search for a copy of ``Q`` inside ``target``.

    Returns the first embedding in a fixed search order, or ``None`` when no
    (weak or, with ``induced``, induced) copy exists.
    """
    if not Q.elements:
        return Embedding({}, induced)
    T = _Order.of(target)
    if len(T.items) < len(Q):
        return None
    order = _search_order(Q)
    need_up = {q: len(Q.above(q)) for q in order}
    need_down = {q: len(Q.below(q)) for q in order}
    fits = {
        q: [t for t in range(len(T.items))
            if len(T.up[t]) >= need_up[q] and len(T.down[t]) >= need_down[q]]
        for q in order
    }
    img: dict[str, int] = {}
    used: set[int] = set()

    def candidates(q):
        pool = None
        for p, t in img.items():
            if Q.less(p, q):
                pool = T.up[t] if pool is None else pool & T.up[t]
            elif Q.less(q, p):
                pool = T.down[t] if pool is None else pool & T.down[t]
        if pool is None:
            return [t for t in fits[q] if t not in used]
        return sorted(t for t in pool if t not in used and t in fits_set[q])

    fits_set = {q: set(v) for q, v in fits.items()}

    def ok_induced(q, t):
        for p, s in img.items():
            if not Q.comparable(p, q) and (s in T.up[t] or s in T.down[t]):
                return False
        return True

    def place(i):
        if i == len(order):
            return True
        q = order[i]
        for t in candidates(q):
            if induced and not ok_induced(q, t):
                continue
            img[q] = t
            used.add(t)
            if place(i + 1):
                return True
            del img[q]
            used.discard(t)
        return False

    if not place(0):
        return None
    return Embedding({q: T.items[img[q]] for q in Q.elements}, induced)


def _target_leq(target: Poset | Family, a, b) -> bool:
    if isinstance(target, Family):
        return a & ~b == 0
    return target.leq(a, b)


def check_embedding(Q: Poset, target: Poset | Family, mapping: Mapping[str, Hashable],
                    induced: bool = False) -> bool:
    """Pairwise re-verification of injectivity and order preservation."""
    if set(mapping) != set(Q.elements):
        return False
    images = list(mapping.values())
    if len(set(images)) != len(images):
        return False
    members = target.sets if isinstance(target, Family) else set(target.elements)
    if any(t not in members for t in images):
        return False
    for a in Q.elements:
        for b in Q.elements:
            if a == b:
                continue
            img_le = _target_leq(target, mapping[a], mapping[b])
            if Q.leq(a, b) and not img_le:
                return False
            if induced and img_le and not Q.leq(a, b):
                return False
    return True
