"""Subsets of [n] as bitmasks, set families, and marked-chain counting.

A subset of ``[n] = {1..n}`` is an ``int`` whose bit ``i`` is set iff
``i + 1`` belongs to the set.  Its bit-string form has character ``i`` equal
to bit ``i``, so ``{1}`` in ``n = 4`` is ``"1000"``.
"""
from __future__ import annotations

import itertools
import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .errors import FamilyFormatError, PreconditionError

ENUMERATION_LIMIT = 8


def popcount(mask: int) -> int:
    return mask.bit_count()


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


def is_proper_subset(a: int, b: int) -> bool:
    return a != b and a & ~b == 0


def full_set(n: int) -> int:
    return (1 << n) - 1


def mask_from_elements(elements: Iterable[int]) -> int:
    mask = 0
    for e in elements:
        mask |= 1 << (e - 1)
    return mask


def elements_of(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i + 1)
        mask >>= 1
        i += 1
    return out


def to_bits(mask: int, n: int) -> str:
    return "".join("1" if mask >> i & 1 else "0" for i in range(n))


def from_bits(bits: str) -> int:
    return sum(1 << i for i, c in enumerate(bits) if c == "1")


def brace(mask: int) -> str:
    return "{" + ",".join(map(str, elements_of(mask))) + "}"


def set_key(mask: int) -> tuple[int, int]:
    """Canonical sort key: by size, then by bitmask."""
    return (mask.bit_count(), mask)


@dataclass(frozen=True)
class Family:
    """A deduplicated family of subsets of ``[n]``."""

    n: int
    sets: frozenset[int]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        top = full_set(self.n)
        for s in self.sets:
            if s < 0 or s & ~top:
                raise ValueError(f"set {s:#x} is not a subset of [{self.n}]")

    @classmethod
    def of(cls, n: int, sets: Iterable[int]) -> Family:
        return cls(n, frozenset(sets))

    @classmethod
    def from_element_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> Family:
        return cls(n, frozenset(mask_from_elements(s) for s in sets))

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self) -> Iterator[int]:
        return iter(self.ordered())

    def __contains__(self, mask: object) -> bool:
        return mask in self.sets

    def ordered(self) -> list[int]:
        return sorted(self.sets, key=set_key)

    def with_sets(self, sets: Iterable[int]) -> Family:
        return Family(self.n, frozenset(sets))


def parse_family(text: str) -> Family:
    """Parse the ``.fam`` format: a ``family n=<n>`` header, then one set per
    line as a bit string (``0110``) or a brace set (``{2,3}``)."""
    n = None
    sets: list[int] = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            m = re.fullmatch(r"family\s+n\s*=\s*(\d+)", line)
            if not m:
                raise FamilyFormatError(f"line {lineno}: expected 'family n=<n>' header")
            n = int(m.group(1))
            continue
        if re.fullmatch(r"[01]+", line):
            if len(line) != n:
                raise FamilyFormatError(f"line {lineno}: bit string length {len(line)} != n={n}")
            mask = from_bits(line)
        elif re.fullmatch(r"\{\s*(\d+\s*(,\s*\d+\s*)*)?\}", line):
            body = line[1:-1].strip()
            elems = [int(x) for x in body.split(",")] if body else []
            for e in elems:
                if not 1 <= e <= n:
                    raise FamilyFormatError(f"line {lineno}: element {e} outside [1,{n}]")
            if len(set(elems)) != len(elems):
                raise FamilyFormatError(f"line {lineno}: repeated element in {line}")
            mask = mask_from_elements(elems)
        else:
            raise FamilyFormatError(f"line {lineno}: cannot parse {line!r}")
        if mask in seen:
            raise FamilyFormatError(f"line {lineno}: duplicate set {brace(mask)}")
        seen.add(mask)
        sets.append(mask)
    if n is None:
        raise FamilyFormatError("missing 'family n=<n>' header")
    return Family.of(n, sets)


def format_family(F: Family, style: str = "bits") -> str:
    lines = [f"family n={F.n}"]
    for s in F.ordered():
        lines.append(to_bits(s, F.n) if style == "bits" else brace(s))
    return "\n".join(lines) + "\n"


def all_subsets(n: int) -> list[int]:
    return sorted(range(1 << n), key=set_key)


def level(n: int, size: int) -> list[int]:
    return [mask_from_elements(c) for c in itertools.combinations(range(1, n + 1), size)]


def level_ranking(n: int) -> list[int]:
    """Set sizes from the largest binomial level down; ties go to the larger size."""
    return sorted(range(n + 1), key=lambda s: (-comb(n, s), -s))


def middle_levels(n: int, count: int) -> Family:
    if not 1 <= count <= n + 1:
        raise PreconditionError(f"count must lie in [1, {n + 1}], got {count}")
    sizes = level_ranking(n)[:count]
    return Family.of(n, (s for size in sizes for s in level(n, size)))


def comparable_pairs(F: Family) -> int:
    sets = F.ordered()
    total = 0
    for i, a in enumerate(sets):
        for b in sets[i + 1:]:
            if a & ~b == 0:
                total += 1
    return total


def longest_chain_sets(F: Family) -> list[int]:
    """A longest chain of members of F, ascending; deterministic."""
    if not F.sets:
        raise PreconditionError("longest_chain of an empty family")
    sets = F.ordered()
    best: dict[int, int] = {}
    prev: dict[int, int | None] = {}
    for b in sets:
        best[b], prev[b] = 1, None
        for a in sets:
            if a.bit_count() >= b.bit_count():
                break
            if a & ~b == 0 and best[a] + 1 > best[b]:
                best[b], prev[b] = best[a] + 1, a
    longest = max(best.values())
    top = next(s for s in sets if best[s] == longest)
    chain = [top]
    while prev[chain[-1]] is not None:
        chain.append(prev[chain[-1]])
    return chain[::-1]


def longest_chain(F: Family) -> int:
    return len(longest_chain_sets(F))


def trim_middle(F: Family) -> Family:
    """Keep the sets with n/4 <= |A| <= 3n/4, both bounds inclusive."""
    n = F.n
    return F.with_sets(s for s in F.sets if n <= 4 * s.bit_count() <= 3 * n)


def complement(mask: int, n: int) -> int:
    return full_set(n) ^ mask


def complement_family(F: Family) -> Family:
    top = full_set(F.n)
    return F.with_sets(top ^ s for s in F.sets)


# --- marked chains -------------------------------------------------------


@dataclass(frozen=True)
class MarkedChain:
    """A maximal chain of ``2^[n]`` with ``k`` nested markers on it.

    ``chain`` is the permutation of ``[n]`` in which elements are added
    going up from the empty set; ``markers`` are descending (largest first).
    """

    n: int
    chain: tuple[int, ...]
    markers: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.chain) != list(range(1, self.n + 1)):
            raise ValueError("chain must be a permutation of [n]")
        on_chain = set(self.chain_sets())
        for m in self.markers:
            if m not in on_chain:
                raise ValueError(f"marker {brace(m)} is not on the chain")
        for a, b in zip(self.markers, self.markers[1:]):
            if not is_proper_subset(b, a):
                raise ValueError("markers must be strictly nested, largest first")

    def chain_sets(self) -> list[int]:
        sets = [0]
        for e in self.chain:
            sets.append(sets[-1] | 1 << (e - 1))
        return sets


@dataclass(frozen=True)
class MarkerClass:
    """All marked chains sharing one marker tuple, stored once.

    ``multiplicity`` is the number of maximal chains through the markers.
    """

    markers: tuple[int, ...]
    multiplicity: int


def chains_through(markers: tuple[int, ...], n: int) -> int:
    """Number of maximal chains of ``2^[n]`` passing through nested sets
    given largest first."""
    if not markers:
        return factorial(n)
    total = factorial(n - markers[0].bit_count()) * factorial(markers[-1].bit_count())
    for a, b in zip(markers, markers[1:]):
        total *= factorial(a.bit_count() - b.bit_count())
    return total


def nested_tuples(F: Family, k: int) -> Iterator[tuple[int, ...]]:
    """All strictly nested k-tuples of members of F, largest first."""
    sets = sorted(F.sets, key=lambda s: (-s.bit_count(), s))
    below = {a: [b for b in sets if b != a and b & ~a == 0] for a in sets}

    def extend(prefix):
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for b in below[prefix[-1]]:
            prefix.append(b)
            yield from extend(prefix)
            prefix.pop()

    if k < 1:
        return
    for a in sets:
        yield from extend([a])


def compact_marked_chains(F: Family, k: int) -> list[MarkerClass]:
    return [MarkerClass(t, chains_through(t, F.n)) for t in nested_tuples(F, k)]


def count_marked_chains(F: Family, k: int) -> int:
    """Exact number of k-marked chains whose markers all lie in F."""
    if k < 1:
        raise PreconditionError("k must be positive")
    n = F.n
    fact = [factorial(i) for i in range(n + 1)]
    sets = sorted(F.sets, key=lambda s: (-s.bit_count(), s))
    # weight[A]: sum over nested j-tuples whose smallest member is A of
    # (n-|top|)! * prod of gap factorials
    weight = {a: fact[n - a.bit_count()] for a in sets}
    for _ in range(k - 1):
        nxt = {}
        for b in sets:
            sb = b.bit_count()
            acc = 0
            for a in sets:
                sa = a.bit_count()
                if sa <= sb:
                    break
                if b & ~a == 0:
                    acc += weight[a] * fact[sa - sb]
            nxt[b] = acc
        weight = nxt
    return sum(w * fact[b.bit_count()] for b, w in weight.items())


def enumerate_marked_chains(F: Family, k: int) -> list[MarkedChain]:
    """Every k-marked chain with markers in F, by walking all n! chains."""
    n = F.n
    if n > ENUMERATION_LIMIT:
        raise PreconditionError(f"n={n} exceeds the enumeration limit {ENUMERATION_LIMIT}")
    if k < 1:
        raise PreconditionError("k must be positive")
    out = []
    for perm in itertools.permutations(range(1, n + 1)):
        hits = []
        mask = 0
        if mask in F.sets:
            hits.append(mask)
        for e in perm:
            mask |= 1 << (e - 1)
            if mask in F.sets:
                hits.append(mask)
        hits.reverse()
        for combo in itertools.combinations(hits, k):
            out.append(MarkedChain(n, perm, combo))
    return out


def chain_hit_counts(F: Family) -> list[int]:
    """``C_i`` = number of maximal chains containing exactly i members of F."""
    n = F.n
    if n > ENUMERATION_LIMIT:
        raise PreconditionError(f"n={n} exceeds the enumeration limit {ENUMERATION_LIMIT}")
    counts = [0] * (n + 2)
    for perm in itertools.permutations(range(1, n + 1)):
        mask = 0
        hits = 1 if 0 in F.sets else 0
        for e in perm:
            mask |= 1 << (e - 1)
            hits += mask in F.sets
        counts[hits] += 1
    return counts


def sperner_bound(F: Family, k: int) -> Fraction:
    """(eps/k) n! with eps the largest value allowed by |F| >= (k-1+eps) C(n, n/2)."""
    mid = comb(F.n, F.n // 2)
    eps = Fraction(len(F), mid) - (k - 1)
    return eps / k * factorial(F.n)
