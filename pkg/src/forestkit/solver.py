"""Exact maximum induced forest / tree solvers.

brute_force_max enumerates vertex subsets by descending size and is the
independent oracle for small graphs. solve_max is the branch-and-bound
engine used for real experiments: vertices are branched in degree-descending
order (ties by index), incremental cycle detection runs on a rollback
union-find, and tree mode adds a connectivity-feasibility prune. Both are
deterministic: the same graph always yields the same witness.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations
from typing import List, Tuple

import numpy as np

from forestkit.graph import (
    Graph,
    VertexSet,
    component_count,
    induced_edge_count,
    is_induced_forest,
    is_induced_tree,
    iter_bits,
)

BRUTE_FORCE_MAX_N = 22
SOLVER_MAX_N = 1024
DEFAULT_BUDGET = 10**8

_GREEDY_SEED = 0x5EED
_GREEDY_TRIES = 48

MODES = ("forest", "tree")


class SolverError(ValueError):
    """Bad solver inputs (unknown mode, size over cap)."""


@dataclass(frozen=True)
class SolveResult:
    size: int
    witness: VertexSet
    nodes_explored: int
    mode: str
    complete: bool


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise SolverError(f"mode must be one of {MODES}, got {mode!r}")


def _accepts(mode: str, g: Graph, s: VertexSet) -> bool:
    return is_induced_forest(g, s) if mode == "forest" else is_induced_tree(g, s)


def brute_force_max(mode: str, g: Graph) -> SolveResult:
    """Exhaustive oracle: largest subset first, stop at the first hit."""
    _check_mode(mode)
    if g.n > BRUTE_FORCE_MAX_N:
        raise SolverError(f"brute force is capped at n={BRUTE_FORCE_MAX_N}, got {g.n}")
    checked = 0
    for size in range(g.n, 0, -1):
        for combo in combinations(range(g.n), size):
            checked += 1
            s = 0
            for v in combo:
                s |= 1 << v
            if _accepts(mode, g, s):
                return SolveResult(size, s, checked, mode, True)
    # only reachable for mode=tree on a 0-vertex graph, which Graph forbids
    return SolveResult(0, 0, checked, mode, True)


# -- greedy incumbent ---------------------------------------------------------


def _greedy_forest(g: Graph, rng: random.Random) -> VertexSet:
    order = list(range(g.n))
    rng.shuffle(order)
    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    s = 0
    for v in order:
        roots = set()
        ok = True
        for u in iter_bits(g.adj[v] & s):
            r = find(u)
            if r in roots:
                ok = False
                break
            roots.add(r)
        if ok:
            s |= 1 << v
            for r in roots:
                parent[r] = v
    return s


def _greedy_tree(g: Graph, rng: random.Random) -> VertexSet:
    start = rng.randrange(g.n)
    s = 1 << start
    while True:
        candidates = [
            u for u in range(g.n)
            if not (s >> u & 1) and (g.adj[u] & s).bit_count() == 1
        ]
        if not candidates:
            return s
        s |= 1 << rng.choice(candidates)


def _greedy_incumbent(mode: str, g: Graph) -> VertexSet:
    rng = random.Random(_GREEDY_SEED)
    grow = _greedy_forest if mode == "forest" else _greedy_tree
    best = 0
    for _ in range(_GREEDY_TRIES):
        s = grow(g, rng)
        if s.bit_count() > best.bit_count():
            best = s
    return best


# -- branch and bound ---------------------------------------------------------


def _pack_permuted(g: Graph, order: List[int]) -> np.ndarray:
    n = g.n
    w = (n + 63) // 64
    pos = [0] * n
    for i, v in enumerate(order):
        pos[v] = i
    adjw = np.zeros((n, w), dtype=np.uint64)
    for v in range(n):
        i = pos[v]
        for u in iter_bits(g.adj[v]):
            j = pos[u]
            adjw[i, j >> 6] |= np.uint64(1) << np.uint64(j & 63)
    return adjw


def solve_max(mode: str, g: Graph, budget: int = DEFAULT_BUDGET) -> SolveResult:
    """Exact optimum via branch and bound; incomplete status if the node
    budget runs out before the search space is exhausted."""
    from forestkit._bb import bb_search

    _check_mode(mode)
    if g.n > SOLVER_MAX_N:
        raise SolverError(f"solver is capped at n={SOLVER_MAX_N}, got {g.n}")
    if budget < 1:
        raise SolverError(f"budget must be >= 1, got {budget}")

    incumbent = _greedy_incumbent(mode, g)
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    adjw = _pack_permuted(g, order)
    w = adjw.shape[1]

    best, wit_words, nodes, complete = bb_search(
        adjw, g.n, w, 0 if mode == "forest" else 1,
        np.int64(budget), np.int64(incumbent.bit_count()),
    )

    if best > incumbent.bit_count():
        witness = 0
        for i in range(w):
            word = int(wit_words[i])
            while word:
                low = word & -word
                j = (i << 6) + low.bit_length() - 1
                witness |= 1 << order[j]
                word ^= low
    else:
        best = incumbent.bit_count()
        witness = incumbent

    result = SolveResult(int(best), witness, int(nodes), mode, bool(complete))
    _validate_witness(g, result)
    return result


def _validate_witness(g: Graph, res: SolveResult) -> None:
    """Post-hoc re-check through the graph predicates; cheap insurance
    against any solver bug silently corrupting experiment data."""
    if res.witness.bit_count() != res.size:
        raise AssertionError("witness size mismatch")
    if not _accepts(res.mode, g, res.witness):
        raise AssertionError(f"witness does not induce a {res.mode}")
