"""Specialized decision and counting procedures for the two-clique property.

A witness is a triple ``(c1, c2, x)``: disjoint non-empty cliques with no edges
between them, a common neighbour ``x`` of ``c1 | c2``, and every vertex outside
``c1 | c2`` adjacent to something in ``c1`` and to something in ``c2``.

The search rests on one observation: the vertices outside ``c1`` with no
neighbour in ``c1`` cannot lie outside both cliques (they would be undominated
by ``c1``), and cannot lie in ``c1``, so they are exactly ``c2``.  Hence ``c2``
is a function of ``c1`` and only ``c1`` is enumerated, as a clique grown
vertex by vertex in increasing label order (preorder, hence lexicographic).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterator

from .graph import Graph, VertexSet, bits, common_neighbors, is_clique, no_cross_edges

MAX_N = 200


class SearchGuardError(ValueError):
    pass


@dataclass(frozen=True)
class Witness:
    c1: VertexSet
    c2: VertexSet
    x: int

    def key(self) -> tuple:
        return (self.c1.sorted(), self.c2.sorted(), self.x)

    def to_json(self) -> str:
        return json.dumps({"c1": self.c1.sorted(), "c2": self.c2.sorted(), "x": self.x})

    @classmethod
    def from_json(cls, text: str) -> "Witness":
        d = json.loads(text)
        return cls(VertexSet.of(d["c1"]), VertexSet.of(d["c2"]), int(d["x"]))


def validate_witness(g: Graph, w: Witness) -> list[str]:
    """Every violated witness condition, checked from the graph alone (empty list = valid)."""
    problems = []
    c1, c2 = set(w.c1), set(w.c2)
    if not c1 or not c2:
        problems.append("both cliques must be non-empty")
    if c1 & c2:
        problems.append("cliques overlap")
    if not 1 <= w.x <= g.n:
        problems.append("x is not a vertex")
        return problems
    if w.x in c1 | c2:
        problems.append("x lies in a clique")
    if not is_clique(g, w.c1) or not is_clique(g, w.c2):
        problems.append("a set is not a clique")
    if not no_cross_edges(g, w.c1, w.c2):
        problems.append("edge between the cliques")
    if any(not g.adjacent(w.x, v) for v in c1 | c2):
        problems.append("x is not a common neighbour")
    for v in range(1, g.n + 1):
        if v in c1 or v in c2:
            continue
        if not any(g.adjacent(v, a) for a in c1) or not any(g.adjacent(v, b) for b in c2):
            problems.append(f"vertex {v} lacks a neighbour in one of the cliques")
            break
    return problems


def _guard(g: Graph) -> None:
    if g.n > MAX_N:
        raise SearchGuardError(
            f"two-clique search is limited to n <= {MAX_N} (got n={g.n}); clique enumeration "
            f"time grows like n^(log2 n) and is not usefully bounded beyond that")


def _witness_nodes(g: Graph, size: int | None = None) -> Iterator[tuple[int, int, int]]:
    """Yield ``(c1, c2, xs)`` masks for every clique ``c1`` (of ``size`` vertices, if
    given) that extends to witnesses; ``xs`` is the set of admissible ``x``."""
    rows = g.rows
    full = g.full

    def reach(mask: int) -> int:
        out = 0
        for v in bits(mask):
            out |= rows[v]
        return out

    def common(mask: int) -> int:
        out = full
        for v in bits(mask):
            out &= rows[v]
        return out

    def clique(mask: int) -> bool:
        return all((rows[v] | 1 << v) & mask == mask for v in bits(mask))

    def visit(c1: int, depth: int, cn: int, r: int, last: int):
        # cn: common neighbours of c1; r: vertices outside c1 with no neighbour in c1.
        if not r or not cn:
            return
        ext = cn >> (last + 1) << (last + 1) if (size is None or depth < size) else 0
        reach_r = reach(r)
        if full & ~c1 & ~r & ~reach_r & ~ext:
            return
        fixed = r & ~reach(ext)
        if fixed:
            if not clique(fixed) or not cn & common(fixed):
                return
        if size is None or depth == size:
            c2 = r
            if clique(c2) and not (full & ~c1 & ~c2 & ~reach_r):
                xs = cn & common(c2)
                if xs:
                    yield c1, c2, xs
        for v in bits(ext):
            yield from visit(c1 | 1 << v, depth + 1, cn & rows[v], r & ~rows[v], v)

    for v in range(g.n):
        yield from visit(1 << v, 1, rows[v], full & ~rows[v] & ~(1 << v), v)


def check_phi(g: Graph) -> Witness | None:
    """Lexicographically least witness (by sorted c1, then c2, then x), or ``None``."""
    _guard(g)
    for c1, c2, xs in _witness_nodes(g):
        w = Witness(VertexSet(c1), VertexSet(c2), (xs & -xs).bit_length())
        problems = validate_witness(g, w)
        if problems:
            raise AssertionError(f"search produced an invalid witness {w}: {problems}")
        return w
    return None


def satisfies_phi(g: Graph) -> bool:
    return check_phi(g) is not None


def count_witnesses(g: Graph, k: int, l: int) -> int:
    """Number of ordered triples (c1, c2, x) with |c1| = k and |c2| = l."""
    if k < 1 or l < 1:
        raise ValueError("clique sizes must be at least 1")
    if k + l >= g.n:
        raise ValueError(f"need k + l < n (got k={k}, l={l}, n={g.n})")
    _guard(g)
    total = 0
    for _, c2, xs in _witness_nodes(g, size=k):
        if bin(c2).count("1") == l:
            total += bin(xs).count("1")
    return total


def witness_size_profile(g: Graph) -> dict[tuple[int, int], int]:
    """``{(k, l): count_witnesses(g, k, l)}`` over all sizes with a non-zero count."""
    _guard(g)
    out: dict[tuple[int, int], int] = {}
    for c1, c2, xs in _witness_nodes(g):
        key = (bin(c1).count("1"), bin(c2).count("1"))
        out[key] = out.get(key, 0) + bin(xs).count("1")
    return out


Checker = Callable[[Graph], bool]
