"""Agent networks and the graph-valued matrices derived from them.

Vertices are numbered ``1..n`` at every public interface. Matrices are plain
``numpy`` arrays indexed from zero, so vertex ``i`` is row ``i - 1``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .errors import InvalidEdgeError, InvalidSizeError

Edge = tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``1..n``.

    ``edges`` holds normalized pairs ``(i, j)`` with ``i < j``. Construct
    through :func:`from_edges` or one of the family builders rather than
    directly, so that validation runs.
    """

    n: int
    edges: frozenset[Edge]

    @property
    def degrees(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=int)
        for i, j in self.edges:
            d[i - 1] += 1
            d[j - 1] += 1
        return d

    def neighbours(self, i: int) -> list[int]:
        return sorted(
            b if a == i else a for a, b in self.edges if i in (a, b)
        )

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def is_complete(self) -> bool:
        return len(self.edges) == self.n * (self.n - 1) // 2

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)


def _check_size(n, minimum: int = 2, what: str = "n") -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < minimum:
        raise InvalidSizeError(f"{what} must be an integer >= {minimum}, got {n!r}")
    return int(n)


def from_edges(n: int, pairs: Iterable[Iterable[int]]) -> Graph:
    """Graph on ``1..n`` with exactly the given edges.

    Pairs are normalized to ``(min, max)`` and deduplicated, so ``(2, 1)`` and
    ``(1, 2)`` denote the same edge.
    """
    n = _check_size(n)
    edges = set()
    for pair in pairs:
        pair = tuple(pair)
        if len(pair) != 2:
            raise InvalidEdgeError(f"edge must have two endpoints, got {pair!r}")
        if not all(isinstance(v, (int, np.integer)) and not isinstance(v, bool) for v in pair):
            raise InvalidEdgeError(f"edge endpoints must be integers, got {pair!r}")
        i, j = (int(v) for v in pair)
        if i == j:
            raise InvalidEdgeError(f"self-loop at vertex {i}")
        if not (1 <= i <= n and 1 <= j <= n):
            raise InvalidEdgeError(f"edge {pair!r} has an endpoint outside 1..{n}")
        edges.add((min(i, j), max(i, j)))
    return Graph(int(n), frozenset(edges))


def make_complete(n: int) -> Graph:
    n = _check_size(n)
    return Graph(n, frozenset(combinations(range(1, n + 1), 2)))


def make_path(n: int) -> Graph:
    n = _check_size(n)
    return Graph(n, frozenset((i, i + 1) for i in range(1, n)))


def make_star(n: int) -> Graph:
    """Star with centre vertex 1 and leaves ``2..n``."""
    n = _check_size(n)
    return Graph(n, frozenset((1, j) for j in range(2, n + 1)))


def make_barbell(clique_size: int) -> Graph:
    """Two ``k``-cliques on ``1..k`` and ``k+1..2k`` joined by the bridge ``{k, k+1}``."""
    k = _check_size(clique_size, what="clique_size")
    left = combinations(range(1, k + 1), 2)
    right = combinations(range(k + 1, 2 * k + 1), 2)
    return Graph(2 * k, frozenset([*left, *right, (k, k + 1)]))


def adjacency(g: Graph) -> np.ndarray:
    w = np.zeros((g.n, g.n))
    for i, j in g.edges:
        w[i - 1, j - 1] = w[j - 1, i - 1] = 1.0
    return w


def laplacian(g: Graph) -> np.ndarray:
    w = adjacency(g)
    return np.diag(w.sum(axis=1)) - w


def no_edge_indicator(g: Graph) -> np.ndarray:
    """``Z = 11^T - W - I``: ones exactly where two distinct agents are not friends."""
    return np.ones((g.n, g.n)) - adjacency(g) - np.eye(g.n)


def is_connected(g: Graph) -> bool:
    nbrs: dict[int, list[int]] = {v: [] for v in range(1, g.n + 1)}
    for i, j in g.edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    seen = {1}
    queue = deque([1])
    while queue:
        v = queue.popleft()
        for u in nbrs[v]:
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return len(seen) == g.n


def vec_index(i: int, j: int, n: int) -> int:
    """Zero-based column-major position of the 1-based entry ``(i, j)``."""
    return (i - 1) + n * (j - 1)


def off_edge_pairs(g: Graph) -> list[Edge]:
    """Ordered pairs ``(i, j)``, ``i != j``, that are not edges.

    Both orientations of every missing edge appear. The list is sorted by
    column-major vectorization index, i.e. by ``j`` first and then ``i``, so
    position ``p`` lines up with the ``p``-th nonzero of ``vec(Z)``.
    """
    return [
        (i, j)
        for j in range(1, g.n + 1)
        for i in range(1, g.n + 1)
        if i != j and not g.has_edge(i, j)
    ]


def graph_from_json(doc: dict) -> Graph:
    """Build a graph from its JSON fragment (see README for the schema)."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InvalidEdgeError("graph must be an object with a 'kind' field")
    kind = doc["kind"]
    try:
        if kind == "complete":
            return make_complete(doc["n"])
        if kind == "path":
            return make_path(doc["n"])
        if kind == "star":
            return make_star(doc["n"])
        if kind == "barbell":
            return make_barbell(doc["clique_size"])
        if kind == "edges":
            return from_edges(doc["n"], doc["edges"])
    except KeyError as exc:
        raise InvalidEdgeError(f"graph of kind {kind!r} is missing field {exc}") from None
    except TypeError as exc:
        raise InvalidEdgeError(f"malformed graph fragment: {exc}") from None
    raise InvalidEdgeError(f"unknown graph kind {kind!r}")


def graph_to_json(g: Graph) -> dict:
    return {"kind": "edges", "n": g.n, "edges": [list(e) for e in g.sorted_edges()]}
