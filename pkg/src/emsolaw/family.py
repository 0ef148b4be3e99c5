"""Checker for the clique-family property used at edge probabilities other than 1/2.

For coprime ``u > v >= 1`` and ``h >= 1`` put ``a = 2uh`` and ``t = h(2u - v)``.
A graph has the property when there are non-empty cliques ``X_1..X_a`` and a
vertex ``x`` such that

1. the cliques are pairwise disjoint with no edges between them;
2. ``x`` lies outside them and is complete to exactly ``a/2`` of them;
3. there is no rotation ``i`` for which the outside vertices (those not in any
   clique and different from ``x``) are complete to the ``a - t`` cyclically
   consecutive cliques ``X_{i+1}, ..., X_{i+a-t}`` (indices mod ``a``) and have a
   non-neighbour in every other clique.

Readings adopted where the wording leaves room:

* "non-trivial" clique means non-empty;
* condition 3 is read literally, ``not exists i . forall w . pattern(w) == I_i``
  (``reading="literal"``).  The alternative ``forall w . not exists i``
  (``reading="per_vertex"``) is available for comparison;
* the clique indices are existentially quantified, so any cyclic arrangement of
  the cliques may be used to satisfy condition 3.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Iterator

from .graph import Graph, VertexSet, bits

READINGS = ("literal", "per_vertex")
MAX_N = 24
MAX_A_PER_VERTEX = 10


class FamilyGuardError(ValueError):
    pass


@dataclass(frozen=True)
class FamilyParams:
    u: int
    v: int
    h: int

    def __post_init__(self):
        if self.v < 1 or self.h < 1:
            raise ValueError("v and h must be positive integers")
        if self.u <= self.v:
            raise ValueError(f"need u/v > 1, got {self.u}/{self.v}")
        if gcd(self.u, self.v) != 1:
            raise ValueError(f"{self.u}/{self.v} is not in lowest terms")

    @property
    def a(self) -> int:
        return 2 * self.u * self.h

    @property
    def t(self) -> int:
        return self.h * (2 * self.u - self.v)

    @property
    def run(self) -> int:
        """Number of consecutive cliques an outside vertex is complete to in condition 3."""
        return self.a - self.t


@dataclass(frozen=True)
class FamilyWitness:
    cliques: tuple[VertexSet, ...]  # in the cyclic order that satisfies condition 3
    x: int
    complete_to: tuple[int, ...]  # 0-based indices of the cliques x is complete to
    patterns: tuple[tuple[int, ...], ...]  # per outside vertex, indices it is complete to
    reading: str


def intervals(a: int, run: int) -> list[frozenset[int]]:
    """The ``a`` cyclic windows of ``run`` consecutive 0-based clique positions."""
    return [frozenset((i + s) % a for s in range(run)) for i in range(a)]


def _cluster_families(g: Graph, a: int) -> Iterator[list[int]]:
    """Unordered families of ``a`` non-empty, pairwise disjoint, pairwise non-adjacent
    cliques, each listed once (cliques sorted by least vertex)."""
    rows = g.rows
    n = g.n

    def cliques_from(root: int, allowed: int) -> Iterator[int]:
        # cliques whose least vertex is root, other vertices drawn from allowed above root
        def grow(mask: int, cand: int):
            yield mask
            for v in bits(cand):
                yield from grow(mask | 1 << v, cand & rows[v] & ~((1 << (v + 1)) - 1))
        yield from grow(1 << root, allowed & rows[root] & ~((1 << (root + 1)) - 1))

    def rec(chosen: list[int], blocked: int, start: int):
        if len(chosen) == a:
            yield list(chosen)
            return
        need = a - len(chosen)
        for root in range(start, n):
            if blocked >> root & 1:
                continue
            free_above = bin(~blocked & ((1 << n) - 1) >> root << root).count("1")
            if free_above < need:
                return
            for q in cliques_from(root, ~blocked):
                reach = q
                for v in bits(q):
                    reach |= rows[v]
                chosen.append(q)
                yield from rec(chosen, blocked | reach, root + 1)
                chosen.pop()

    yield from rec([], 0, 0)


def _arrangement(patterns: set[frozenset[int]], a: int, run: int, reading: str) -> tuple[int, ...] | None:
    """A cyclic order (tuple of clique indices by position) under which condition 3
    holds for the given outside-vertex patterns, or ``None`` if none exists."""
    if reading == "literal" and not patterns:
        return None  # no outside vertex: the universal statement holds for every i
    relevant = {p for p in patterns if len(p) == run}
    if reading == "literal" and (len(patterns) > 1 or not relevant):
        return tuple(range(a))
    if reading == "per_vertex" and not relevant:
        return tuple(range(a))
    windows = intervals(a, run)
    for rest in itertools.permutations(range(1, a)):
        order = (0,) + rest
        position_sets = {frozenset(order[i] for i in w) for w in windows}
        if not relevant & position_sets:
            return order
    return None


def find_family_witness(g: Graph, params: FamilyParams, reading: str = "literal") -> FamilyWitness | None:
    if reading not in READINGS:
        raise ValueError(f"reading must be one of {READINGS}")
    a, run = params.a, params.run
    if g.n <= a:
        raise ValueError(f"{a} cliques plus a common neighbour need n > {a}, got n={g.n}")
    if g.n > MAX_N:
        raise FamilyGuardError(f"clique-family search is limited to n <= {MAX_N} (got n={g.n})")
    if reading == "per_vertex" and a > MAX_A_PER_VERTEX:
        raise FamilyGuardError(f"per-vertex reading searches cyclic orders; limited to a <= {MAX_A_PER_VERTEX}")
    rows = g.rows
    half = a // 2
    for fam in _cluster_families(g, a):
        union = 0
        for q in fam:
            union |= q
        complete = []
        for w in range(g.n):
            complete.append(frozenset(i for i, q in enumerate(fam) if rows[w] & q == q))
        for x in bits(g.full & ~union):
            if len(complete[x]) != half:
                continue
            outside = g.full & ~union & ~(1 << x)
            patterns = {complete[w] for w in bits(outside)}
            order = _arrangement(patterns, a, run, reading)
            if order is None:
                continue
            cliques = tuple(VertexSet(fam[i]) for i in order)
            pos = {idx: p for p, idx in enumerate(order)}
            return FamilyWitness(
                cliques=cliques,
                x=x + 1,
                complete_to=tuple(sorted(pos[i] for i in complete[x])),
                patterns=tuple(tuple(sorted(pos[i] for i in complete[w])) for w in bits(outside)),
                reading=reading,
            )
    return None


def check_phi_h(g: Graph, u: int, v: int, h: int, reading: str = "literal") -> bool:
    return find_family_witness(g, FamilyParams(u, v, h), reading) is not None


def validate_family_witness(g: Graph, params: FamilyParams, w: FamilyWitness) -> list[str]:
    """Re-check conditions 1-3 for the ordered cliques of ``w`` straight from the graph."""
    problems = []
    a, run = params.a, params.run
    cl = [set(q) for q in w.cliques]
    if len(cl) != a:
        return [f"expected {a} cliques, got {len(cl)}"]
    if any(not q for q in cl):
        problems.append("empty clique")
    for i, q in enumerate(cl):
        if any(not g.adjacent(p, r) for p in q for r in q if p != r):
            problems.append(f"set {i + 1} is not a clique")
        for j in range(i + 1, a):
            if q & cl[j]:
                problems.append(f"sets {i + 1} and {j + 1} overlap")
            if any(g.adjacent(p, r) for p in q for r in cl[j]):
                problems.append(f"edge between sets {i + 1} and {j + 1}")
    union = set().union(*cl)
    if w.x in union or not 1 <= w.x <= g.n:
        problems.append("x must be a vertex outside the cliques")
    full_count = sum(all(g.adjacent(w.x, p) for p in q) for q in cl)
    if full_count != a // 2:
        problems.append(f"x is complete to {full_count} cliques, expected {a // 2}")
    outside = [z for z in range(1, g.n + 1) if z not in union and z != w.x]

    def fits(z: int, i: int) -> bool:
        window = {(i + s) % a for s in range(run)}
        for j, q in enumerate(cl):
            complete = all(g.adjacent(z, p) for p in q)
            if (j in window) != complete:
                return False
        return True

    if w.reading == "literal":
        bad = [i for i in range(a) if all(fits(z, i) for z in outside)]
        if bad:
            problems.append(f"condition 3 fails: rotation {bad[0] + 1} fits every outside vertex")
    else:
        for z in outside:
            if any(fits(z, i) for i in range(a)):
                problems.append(f"condition 3 fails at outside vertex {z}")
                break
    return problems
