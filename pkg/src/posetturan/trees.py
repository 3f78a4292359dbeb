"""Structural operations on posets whose Hasse diagram is a tree.

``saturate`` pads short maximal chains until every maximal chain has the
full height; ``leaf_interval`` finds a removable leaf interval so that
saturated tree posets can be built up (or taken apart) one interval at a
time.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import PreconditionError, SaturationError
from .poset import Poset, interval, maximal_chains, opposite

AS_GIVEN = "as-given"
OPPOSITE = "opposite"


def pdist(P: Poset, u: str, v: str) -> int:
    """Shortest path length between u and v in the comparability graph."""
    P.check(u)
    P.check(v)
    if u == v:
        return 0
    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y in sorted(P.above(x) | P.below(x)):
            if y not in dist:
                dist[y] = dist[x] + 1
                if y == v:
                    return dist[y]
                queue.append(y)
    raise PreconditionError(f"{u!r} and {v!r} are not connected")


def leaves(P: Poset) -> list[str]:
    return sorted(e for e in P.elements if P.hasse_degree(e) == 1)


@dataclass(frozen=True)
class LeafRemoval:
    """A Hasse leaf ``leaf`` and an interval ``interval`` (ascending, leaf
    first) of the poset in ``orientation``; ``remainder`` is the poset with
    the interval removed, in the original orientation."""

    leaf: str
    interval: tuple[str, ...]
    orientation: str
    remainder: Poset


def _require_tree_saturated(P: Poset, what: str) -> None:
    if not P.elements:
        raise PreconditionError(f"{what}: empty poset")
    if not P.hasse_is_tree:
        raise PreconditionError(f"{what}: Hasse diagram is not a tree")
    if not P.is_saturated:
        raise PreconditionError(f"{what}: poset is not saturated")


def leaf_interval(P: Poset) -> LeafRemoval:
    _require_tree_saturated(P, "leaf_interval")
    h = P.height
    if h < 2:
        raise PreconditionError("leaf_interval: height must be at least 2")
    if P.is_chain:
        raise PreconditionError("leaf_interval: poset is a chain")

    ls = leaves(P)
    best = None
    for v in ls:
        for u in ls:
            if u != v:
                d = pdist(P, v, u)
                if best is None or d > best[0]:
                    best = (d, v, u)
    _, v, _ = best

    # a leaf is either minimal (its neighbour is above) or maximal
    (nbr,) = P.hasse_neighbors(v)
    if P.less(v, nbr):
        Q, orientation = P, AS_GIVEN
    else:
        Q, orientation = opposite(P), OPPOSITE

    # v is minimal in Q, so every interval containing v is [v, y]
    i0: list[str] = [v]
    for y in sorted(Q.above(v)):
        cand = interval(Q, v, y)
        if all(Q.hasse_degree(z) <= 2 for z in cand) and len(cand) > len(i0):
            i0 = sorted(cand, key=lambda z: len(Q.below(z)))
    I = i0[:-1] if len(i0) == h else i0

    result = LeafRemoval(v, tuple(I), orientation, P.remove(I))
    problems = leaf_removal_violations(P, result)
    if problems:
        raise AssertionError(f"leaf interval invariants violated: {problems}")
    return result


def leaf_removal_violations(P: Poset, lr: LeafRemoval) -> list[str]:
    """Direct check of everything a LeafRemoval promises."""
    out = []
    Q = P if lr.orientation == AS_GIVEN else opposite(P)
    h = P.height
    I = list(lr.interval)
    if P.hasse_degree(lr.leaf) != 1:
        out.append("not a leaf")
    if not I or I[0] != lr.leaf:
        out.append("interval does not start at the leaf")
    if len(I) > h - 1:
        out.append("interval too long")
    if I and set(I) != interval(Q, I[0], I[-1]):
        out.append("not an interval")
    if I and any(Q.less(x, lr.leaf) for x in Q.elements):
        out.append("leaf is not the minimum")
    R = lr.remainder
    if set(R.elements) != set(P.elements) - set(I):
        out.append("remainder has the wrong elements")
    elif not R.hasse_is_tree:
        out.append("remainder Hasse diagram is not a tree")
    elif R.height != h:
        out.append("remainder height changed")
    elif not R.is_saturated:
        out.append("remainder not saturated")
    return out


def saturate(P: Poset) -> Poset:
    """Extend P to a saturated tree poset of the same height containing P as
    an induced subposet.

    A short maximal chain ``v_1 < ... < v_t`` is padded with a fresh element
    placed below ``v_1`` (position 0) or between ``v_i`` and ``v_{i+1}``;
    positions are tried in order and the first one that keeps the height is
    taken.
    """
    if not P.elements:
        raise PreconditionError("saturate: empty poset")
    if not P.hasse_is_tree:
        raise PreconditionError("saturate: Hasse diagram is not a tree")
    h = P.height
    s = len(maximal_chains(P))
    bound = s * h
    fresh = 0
    cur = P
    while True:
        short = next((c for c in maximal_chains(cur) if len(c) < h), None)
        if short is None:
            return cur
        if len(cur) >= bound:
            raise SaturationError(f"|P| reached s(P)*h(P) = {bound} with a short chain left")
        while f"_s{fresh}" in cur:
            fresh += 1
        x = f"_s{fresh}"
        fresh += 1
        for i in range(len(short)):
            if i == 0:
                extra = [(x, short[0])]
            else:
                extra = [(short[i - 1], x), (x, short[i])]
            cand = Poset.from_relation(cur.elements + (x,), list(cur.covers) + extra)
            if cand.height == h:
                break
        else:
            raise SaturationError(
                f"no height-preserving insertion along {short}; a tree poset should always admit one"
            )
        if len(maximal_chains(cand)) != s:
            raise SaturationError("insertion changed the number of maximal chains")
        cur = cand
