"""Brute-force ex(P, n), the truncated Mon(Z) level model, and reports
comparing both against the (h(P) - 1) * C(n, n/2) leading term.

A window of half-width ``m`` models the functions in Mon(Z) that are 0
below position -m and 1 from position m on.  Such a function is a bit
string of length 2m (character j is position j - m), i.e. a subset of
``[2m]``, and pointwise order is inclusion.  Levels are weight classes.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .errors import PreconditionError, SearchBudgetExceeded, WindowTooSmall
from .lattice import Family, all_subsets, level, level_ranking, middle_levels
from .poset import Embedding, Poset, find_subposet, linear_extension, opposite
from .trees import OPPOSITE, leaf_interval, saturate

EX_LIMIT = 5


@dataclass(frozen=True)
class ExResult:
    value: int
    witness: Family
    nodes_explored: int = field(compare=False)


def _branch_order(n: int) -> list[int]:
    rank = {size: i for i, size in enumerate(level_ranking(n))}
    return sorted(range(1 << n), key=lambda s: (rank[s.bit_count()], s))


def ex_bruteforce(P: Poset, n: int, time_budget: float | None = None) -> ExResult:
    """Largest P-free family in 2^[n] by branch and bound.

    Subsets are branched on from the largest binomial level outward
    (include before exclude); a branch is cut when the sets still
    available cannot beat the best family found so far.
    """
    if n < 0 or n > EX_LIMIT:
        raise PreconditionError(f"ex_bruteforce supports 0 <= n <= {EX_LIMIT}, got {n}")
    if n == EX_LIMIT and time_budget is None:
        raise PreconditionError(f"n={EX_LIMIT} needs an explicit time budget")
    if not P.elements:
        raise PreconditionError("ex of the empty poset is undefined")
    deadline = None if time_budget is None else time.monotonic() + time_budget
    order = _branch_order(n)
    total = len(order)
    best: list[int] = []
    chosen: list[int] = []
    nodes = 0

    def contains_with(sets):
        return find_subposet(P, Family.of(n, sets)) is not None

    def dfs(i):
        nonlocal best, nodes
        nodes += 1
        if deadline is not None and nodes % 256 == 0 and time.monotonic() > deadline:
            raise SearchBudgetExceeded(f"time budget of {time_budget}s exhausted after {nodes} nodes")
        if len(chosen) + (total - i) <= len(best):
            return
        if i == total:
            best = list(chosen)
            return
        a = order[i]
        chosen.append(a)
        if not contains_with(chosen):
            dfs(i + 1)
        chosen.pop()
        dfs(i + 1)

    dfs(0)
    witness = Family.of(n, best)
    assert find_subposet(P, witness) is None
    return ExResult(len(best), witness, nodes)


def ex_exhaustive(P: Poset, n: int) -> int:
    """ex(P, n) by checking every family of 2^[n]; no pruning (n <= 4)."""
    if n > 4:
        raise PreconditionError("ex_exhaustive is limited to n <= 4")
    subsets = all_subsets(n)
    best = 0
    for bits in range(1 << len(subsets)):
        size = bits.bit_count()
        if size <= best:
            continue
        fam = Family.of(n, (s for j, s in enumerate(subsets) if bits >> j & 1))
        if find_subposet(P, fam) is None:
            best = size
    return best


# --- Mon(Z) window -------------------------------------------------------


@dataclass(frozen=True)
class LevelWindow:
    """Window of half-width ``m``: bit strings of length 2m."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("window half-width must be positive")

    @property
    def width(self) -> int:
        return 2 * self.m

    def weight_range(self) -> range:
        return range(self.width + 1)

    def consecutive(self, count: int) -> list[int]:
        """``count`` consecutive weights centred in the window."""
        if not 0 <= count <= self.width + 1:
            raise WindowTooSmall(f"a window of width {self.width} has no {count} levels")
        lo = self.m - count // 2
        return list(range(lo, lo + count))


def levels_union(w: LevelWindow | int, weights) -> Family:
    if not isinstance(w, LevelWindow):
        w = LevelWindow(w)
    weights = set(weights)
    for x in weights:
        if x not in w.weight_range():
            raise PreconditionError(f"weight {x} outside 0..{w.width}")
    return Family.of(w.width, (s for x in sorted(weights) for s in level(w.width, x)))


def _flip(mask: int, width: int) -> int:
    """Order-reversing involution: complement, then mirror the positions."""
    out = 0
    for j in range(width):
        if not mask >> j & 1:
            out |= 1 << (width - 1 - j)
    return out


def _tail_start(images, width: int) -> int:
    """First position from which every image is all ones to the window end."""
    n0 = 0
    for f in images:
        j = width
        while j > 0 and f >> (j - 1) & 1:
            j -= 1
        n0 = max(n0, j)
    return n0


def _level_embed(P: Poset, weights: list[int], width: int) -> dict[str, int]:
    h = P.height
    if P.is_chain:
        asc = linear_extension(P)
        return {x: ((1 << weights[i]) - 1) << (width - weights[i]) for i, x in enumerate(asc)}
    lr = leaf_interval(P)
    rest = _level_embed(lr.remainder, weights, width)
    flip = lr.orientation == OPPOSITE
    Q = opposite(P) if flip else P
    img = {x: _flip(f, width) for x, f in rest.items()} if flip else dict(rest)
    I = lr.interval
    (u,) = Q.upper_covers(I[-1])
    n0 = _tail_start(img.values(), width)
    if n0 + len(I) > width:
        raise WindowTooSmall(f"needs {n0 + len(I)} positions, window has {width}")
    # f_i: the image of u with positions n0 .. n0+i-1 cleared
    for j, x in enumerate(I):
        i = len(I) - j
        run = ((1 << i) - 1) << n0
        img[x] = img[u] & ~run
    if flip:
        img = {x: _flip(f, width) for x, f in img.items()}
    assert len(img) == len(P) and h == len(weights)
    return img


def embed_into_levels(P: Poset, h: int, w: LevelWindow | int) -> Embedding:
    """Embed a tree poset into h consecutive levels of the window.

    Raises WindowTooSmall when the window cannot host the construction.
    """
    if not isinstance(w, LevelWindow):
        w = LevelWindow(w)
    if h != P.height:
        raise PreconditionError(f"h={h} but the poset has height {P.height}")
    weights = w.consecutive(h)
    if h == 1:
        # an antichain of any size: distinct strings of a single level
        row = sorted(level(w.width, weights[0]))
        if len(row) < len(P):
            raise WindowTooSmall(f"a level of width {w.width} has only {len(row)} strings")
        mapping = dict(zip(sorted(P.elements), row))
        return Embedding(mapping, route="levels")
    if not P.hasse_is_tree:
        raise PreconditionError("embed_into_levels needs a tree Hasse diagram")
    sat = saturate(P)
    img = _level_embed(sat, weights, w.width)
    mapping = {x: img[x] for x in P.elements}
    if not in_levels(P, mapping, w, weights):
        raise AssertionError("level embedding failed re-verification")
    return Embedding(mapping, route="levels")


def in_levels(P: Poset, mapping: dict[str, int], w: LevelWindow, weights) -> bool:
    """check_embedding against levels_union(w, weights), without building it."""
    weights = set(weights)
    if set(mapping) != set(P.elements) or len(set(mapping.values())) != len(mapping):
        return False
    if any(f >> w.width or f.bit_count() not in weights for f in mapping.values()):
        return False
    return all(mapping[x] & ~mapping[y] == 0 for x, y in P.closure)


def embed_with_growth(P: Poset, m: int, tries: int = 4) -> tuple[Embedding, int]:
    """embed_into_levels, doubling the window on WindowTooSmall."""
    for _ in range(tries):
        try:
            return embed_into_levels(P, P.height, m), m
        except WindowTooSmall:
            m *= 2
    raise WindowTooSmall(f"gave up at half-width {m}")


def default_window(P: Poset) -> LevelWindow:
    return LevelWindow(len(P) + P.height)


@dataclass(frozen=True)
class LReport:
    lower_ok: bool
    upper_ok: bool
    levels: int
    window: int


def verify_l(P: Poset, w: LevelWindow | int | None = None) -> LReport:
    """Check l(P) = h(P) - 1 in the window: h-1 levels avoid P, h levels host it."""
    if w is None:
        w = default_window(P)
    elif not isinstance(w, LevelWindow):
        w = LevelWindow(w)
    h = P.height
    lower = levels_union(w, w.consecutive(h - 1))
    lower_ok = find_subposet(P, lower) is None
    emb = embed_into_levels(P, h, w)
    upper_ok = in_levels(P, emb.mapping, w, w.consecutive(h))
    return LReport(lower_ok, upper_ok, h - 1, w.m)


@dataclass(frozen=True)
class TheoremReport:
    ex: int
    leading_term: int
    ratio: Fraction | None  # None when the leading term is 0
    lower_bound_free: bool
    witness: Family
    nodes_explored: int


def verify_theorem(P: Poset, n: int, time_budget: float | None = None) -> TheoremReport:
    if not P.hasse_is_tree:
        raise PreconditionError("verify_theorem needs a tree Hasse diagram")
    res = ex_bruteforce(P, n, time_budget)
    h = P.height
    leading = (h - 1) * comb(n, n // 2)
    if h == 1:
        lower = Family.of(n, ())
    else:
        lower = middle_levels(n, min(h - 1, n + 1))
    free = find_subposet(P, lower) is None
    ratio = Fraction(res.value, leading) if leading else None
    return TheoremReport(res.value, leading, ratio, free, res.witness, res.nodes_explored)
