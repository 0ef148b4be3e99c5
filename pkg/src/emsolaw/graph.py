"""Labeled simple undirected graphs on vertices 1..n.

Adjacency is stored row-wise as Python integers used as bitsets: bit ``i`` of
``rows[v]`` is set iff vertices ``v + 1`` and ``i + 1`` are adjacent.  The
0-based layout is internal; every public function speaks 1-based labels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import rng

MAX_ENUMERATE_N = 6


class EnumerationGuardError(ValueError):
    pass


class GraphFormatError(ValueError):
    """Malformed edge-list text; ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def bits(mask: int) -> Iterator[int]:
    """0-based indices of the set bits of ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class VertexSet:
    """A set of 1-based vertex labels packed into an integer (bit v-1 for vertex v)."""

    mask: int = 0

    @classmethod
    def of(cls, vertices: Iterable[int]) -> "VertexSet":
        mask = 0
        for v in vertices:
            if v < 1:
                raise ValueError(f"vertex labels start at 1, got {v}")
            mask |= 1 << (v - 1)
        return cls(mask)

    def __iter__(self) -> Iterator[int]:
        return (i + 1 for i in bits(self.mask))

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __contains__(self, v: object) -> bool:
        return isinstance(v, int) and v >= 1 and bool(self.mask >> (v - 1) & 1)

    def __bool__(self) -> bool:
        return self.mask != 0

    def sorted(self) -> list[int]:
        return list(self)

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self)) + "}"


def as_mask(s: VertexSet | Iterable[int] | int) -> int:
    if isinstance(s, VertexSet):
        return s.mask
    if isinstance(s, int):
        return s
    return VertexSet.of(s).mask


class Graph:
    """Immutable simple graph; build with :meth:`from_edges` or the samplers."""

    __slots__ = ("n", "rows", "_edges")

    def __init__(self, n: int, rows: Sequence[int]):
        if n < 1:
            raise ValueError("a graph needs at least one vertex")
        if len(rows) != n:
            raise ValueError("one adjacency row per vertex required")
        rows = tuple(rows)
        full = (1 << n) - 1
        for v, row in enumerate(rows):
            if row & ~full:
                raise ValueError(f"row {v + 1} references a vertex outside 1..{n}")
            if row >> v & 1:
                raise ValueError(f"self-loop at vertex {v + 1}")
            for w in bits(row):
                if not rows[w] >> v & 1:
                    raise ValueError(f"asymmetric adjacency between {v + 1} and {w + 1}")
        self.n = n
        self.rows = rows
        self._edges: tuple[tuple[int, int], ...] | None = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if not (1 <= u <= n and 1 <= v <= n):
                raise ValueError(f"edge ({u}, {v}) outside 1..{n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            rows[u - 1] |= 1 << (v - 1)
            rows[v - 1] |= 1 << (u - 1)
        return cls(n, rows)

    @classmethod
    def from_code(cls, n: int, code: int) -> "Graph":
        """Graph whose edge indicators, in lexicographic pair order, are the bits of
        ``code`` read most-significant first (so codes enumerate graphs lexicographically)."""
        pairs = n * (n - 1) // 2
        rows = [0] * n
        for idx, (u, v) in enumerate(itertools.combinations(range(n), 2)):
            if code >> (pairs - 1 - idx) & 1:
                rows[u] |= 1 << v
                rows[v] |= 1 << u
        return cls(n, rows)

    @property
    def code(self) -> int:
        """Inverse of :meth:`from_code`."""
        out = 0
        for u, v in itertools.combinations(range(self.n), 2):
            out = out << 1 | (self.rows[u] >> v & 1)
        return out

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self.rows[u - 1] >> (v - 1) & 1)

    def neighbors(self, v: int) -> VertexSet:
        return VertexSet(self.rows[v - 1])

    def edges(self) -> tuple[tuple[int, int], ...]:
        if self._edges is None:
            self._edges = tuple(
                (u + 1, w + 1) for u in range(self.n) for w in bits(self.rows[u] >> (u + 1) << (u + 1))
            )
        return self._edges

    @property
    def m(self) -> int:
        return len(self.edges())

    def complement(self) -> "Graph":
        full = self.full
        return Graph(self.n, [full & ~row & ~(1 << v) for v, row in enumerate(self.rows)])

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph in which vertex ``v`` becomes ``perm[v - 1]`` (a permutation of 1..n)."""
        if sorted(perm) != list(range(1, self.n + 1)):
            raise ValueError("perm must be a permutation of 1..n")
        return Graph.from_edges(self.n, ((perm[u - 1], perm[v - 1]) for u, v in self.edges()))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.n, self.rows))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={list(self.edges())})"


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(1, n + 1), 2))


def empty_graph(n: int) -> Graph:
    return Graph(n, [0] * n)


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((v, v + 1) for v in range(1, n)))


def _check_seed(seed: int) -> int:
    if not 0 <= seed < 1 << 64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _rows_from_indicators(n: int, present: np.ndarray) -> list[int]:
    rows = [0] * n
    iu, iv = np.triu_indices(n, k=1)
    for u, v in zip(iu[present].tolist(), iv[present].tolist()):
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return rows


def sample_gnp(n: int, p: float, seed: int, stream: int = 0) -> Graph:
    """Draw from G(n, p).

    Pair ``(u, v)`` in lexicographic order consumes the next uniform of the
    Philox stream keyed by ``(seed, stream)`` and is an edge iff that uniform is
    below ``p``.  See :data:`emsolaw.rng.ALGORITHM`.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    _check_seed(seed)
    pairs = n * (n - 1) // 2
    if pairs == 0:
        return empty_graph(n)
    u = rng.uniforms(seed, [stream], pairs)[0]
    return Graph(n, _rows_from_indicators(n, u < p))


def sample_gnp_codes(n: int, p: float, seed: int, streams: Sequence[int]) -> list[int]:
    """Edge-indicator codes (see :meth:`Graph.from_code`) of ``sample_gnp(n, p, seed, s)``
    for every ``s`` in ``streams``, computed in one vectorized pass."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    _check_seed(seed)
    pairs = n * (n - 1) // 2
    if pairs == 0:
        return [0] * len(streams)
    present = rng.uniforms(seed, streams, pairs) < p
    if pairs <= 62:
        weights = np.left_shift(np.uint64(1), np.arange(pairs - 1, -1, -1, dtype=np.uint64))
        return [int(c) for c in (present.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)]
    return [int("".join("1" if b else "0" for b in row), 2) for row in present]


def enumerate_graphs(n: int) -> Iterator[Graph]:
    """All 2^C(n,2) labeled graphs on 1..n in lexicographic edge-indicator order."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > MAX_ENUMERATE_N:
        raise EnumerationGuardError(
            f"exhaustive enumeration is limited to n <= {MAX_ENUMERATE_N} "
            f"(n={n} would yield 2^{n * (n - 1) // 2} graphs)"
        )
    for code in range(1 << (n * (n - 1) // 2)):
        yield Graph.from_code(n, code)


def is_clique(g: Graph, s: VertexSet | Iterable[int]) -> bool:
    mask = as_mask(s)
    return all((g.rows[v] | 1 << v) & mask == mask for v in bits(mask))


def no_cross_edges(g: Graph, s: VertexSet | Iterable[int], t: VertexSet | Iterable[int]) -> bool:
    tm = as_mask(t)
    return all(not g.rows[v] & tm for v in bits(as_mask(s)))


def common_neighbors(g: Graph, s: VertexSet | Iterable[int]) -> VertexSet:
    """Vertices outside ``s`` adjacent to every member of ``s``."""
    mask = as_mask(s)
    out = g.full & ~mask
    for v in bits(mask):
        out &= g.rows[v]
    return VertexSet(out)


def write_graph(g: Graph) -> str:
    edges = g.edges()
    lines = [f"{g.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    return "\n".join(lines) + "\n"


def read_graph(text: str) -> Graph:
    """Parse the edge-list format: header ``n m`` then ``m`` sorted lines ``u v`` with u < v."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    else:
        raise GraphFormatError("text must be newline-terminated", max(len(lines), 1))
    if not lines:
        raise GraphFormatError("missing header 'n m'", 1)
    header = lines[0].split()
    if len(header) != 2 or not all(tok.isdigit() for tok in header):
        raise GraphFormatError(f"malformed header {lines[0]!r}, expected 'n m'", 1)
    n, m = map(int, header)
    if n < 1:
        raise GraphFormatError("vertex count must be positive", 1)
    if len(lines) - 1 != m:
        raise GraphFormatError(f"header announces {m} edges but {len(lines) - 1} edge lines follow", 1)
    rows = [0] * n
    prev: tuple[int, int] | None = None
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 2 or not all(tok.isdigit() for tok in parts) or line != f"{parts[0]} {parts[1]}":
            raise GraphFormatError(f"malformed edge line {line!r}", lineno)
        u, v = map(int, parts)
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphFormatError(f"vertex out of range 1..{n} in {line!r}", lineno)
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", lineno)
        if rows[u - 1] >> (v - 1) & 1:
            raise GraphFormatError(f"duplicate edge {min(u, v)} {max(u, v)}", lineno)
        if u > v:
            raise GraphFormatError(f"edge must be written with u < v, got {line!r}", lineno)
        if prev is not None and (u, v) < prev:
            raise GraphFormatError(f"edges out of lexicographic order at {line!r}", lineno)
        prev = (u, v)
        rows[u - 1] |= 1 << (v - 1)
        rows[v - 1] |= 1 << (u - 1)
    return Graph(n, rows)
