"""Immutable graphs with bitset adjacency rows and seeded G(n,p) sampling.

Vertices are 0-indexed. A vertex set is a plain Python int used as a
bitmask over 0..n-1, so subset queries are word-parallel.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Tuple

MAX_VERTICES = 4096

VertexSet = int  # bitmask over 0..n-1


class GraphError(ValueError):
    """Invalid graph parameters or malformed graph input."""


@dataclass(frozen=True)
class GnpParams:
    """Parameters of a seeded binomial random graph draw."""

    n: int
    p: float
    seed: int

    def __post_init__(self) -> None:
        if not (1 <= self.n <= MAX_VERTICES):
            raise GraphError(f"n must be in [1, {MAX_VERTICES}], got {self.n}")
        if not (0.0 < self.p < 1.0):
            raise GraphError(f"p must be in (0, 1), got {self.p}")


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph; adj[v] is the bitmask of v's neighbours."""

    n: int
    adj: Tuple[int, ...]

    def __post_init__(self) -> None:
        if not (1 <= self.n <= MAX_VERTICES):
            raise GraphError(f"n must be in [1, {MAX_VERTICES}], got {self.n}")
        if len(self.adj) != self.n:
            raise GraphError("adjacency row count must equal n")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.adj):
            if row & ~full:
                raise GraphError(f"row {v} has bits >= n set")
            if row >> v & 1:
                raise GraphError(f"self-loop at vertex {v}")
        for v, row in enumerate(self.adj):
            for u in iter_bits(row):
                if not (self.adj[u] >> v & 1):
                    raise GraphError(f"asymmetric adjacency at ({v}, {u})")

    @property
    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def edges(self) -> Iterator[Tuple[int, int]]:
        for u in range(self.n):
            for v in iter_bits(self.adj[u] >> (u + 1) << (u + 1)):
                yield (u, v)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def from_edges(n: int, edges: Iterable[Tuple[int, int]]) -> Graph:
    adj = [0] * n
    for u, v in edges:
        if u == v:
            raise GraphError(f"self-loop ({u}, {v})")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return Graph(n, tuple(adj))


def sample_gnp(params: GnpParams) -> Graph:
    """Draw G(n, p) deterministically from the seed.

    The RNG is Python's Mersenne Twister seeded with params.seed; one
    uniform draw is consumed per unordered pair in lexicographic order
    over (u, v) with u < v, and the edge is present iff draw < p. This
    fixed stream makes samples reproducible across platforms.
    """
    rng = random.Random(params.seed)
    n, p = params.n, params.p
    adj = [0] * n
    for u in range(n):
        row = 0
        for v in range(u + 1, n):
            if rng.random() < p:
                row |= 1 << v
                adj[v] |= 1 << u
        adj[u] |= row
    return Graph(n, tuple(adj))


def _check_subset(g: Graph, s: VertexSet) -> None:
    if s < 0 or s >> g.n:
        raise GraphError(f"vertex set {bin(s)} out of range for n={g.n}")


def induced_edge_count(g: Graph, s: VertexSet) -> int:
    """Number of edges of g with both endpoints in s."""
    _check_subset(g, s)
    return sum((g.adj[v] & s).bit_count() for v in iter_bits(s)) // 2


def component_count(g: Graph, s: VertexSet) -> int:
    """Number of connected components of the subgraph induced by s."""
    _check_subset(g, s)
    remaining = s
    count = 0
    while remaining:
        count += 1
        low = remaining & -remaining
        comp = low
        frontier = low
        while frontier:
            grow = 0
            for v in iter_bits(frontier):
                grow |= g.adj[v] & remaining
            frontier = grow & ~comp
            comp |= frontier
        remaining &= ~comp
    return count


def is_induced_forest(g: Graph, s: VertexSet) -> bool:
    """True iff the subgraph induced by s is acyclic (empty set included)."""
    return induced_edge_count(g, s) == s.bit_count() - component_count(g, s)


def is_induced_tree(g: Graph, s: VertexSet) -> bool:
    """True iff s induces a connected acyclic subgraph with >= 1 vertex."""
    if s == 0:
        return False
    return component_count(g, s) == 1 and is_induced_forest(g, s)


# -- text I/O ----------------------------------------------------------------
#
# Format: first line "n m", then m lines "u v" with 0 <= u < v < n.


def parse_graph_text(text: str) -> Graph:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln and not ln.startswith("#")]
    if not lines:
        raise GraphError("empty graph file")
    try:
        n, m = map(int, lines[0].split())
    except ValueError as exc:
        raise GraphError(f"bad header line {lines[0]!r}") from exc
    if len(lines) - 1 != m:
        raise GraphError(f"header declares {m} edges, found {len(lines) - 1}")
    seen = set()
    edges = []
    for ln in lines[1:]:
        try:
            u, v = map(int, ln.split())
        except ValueError as exc:
            raise GraphError(f"bad edge line {ln!r}") from exc
        if not (0 <= u < v < n):
            raise GraphError(f"edge ({u}, {v}) violates 0 <= u < v < n={n}")
        if (u, v) in seen:
            raise GraphError(f"duplicate edge ({u}, {v})")
        seen.add((u, v))
        edges.append((u, v))
    return from_edges(n, edges)


def format_graph_text(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"
