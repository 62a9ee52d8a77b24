"""Simple undirected graphs on dense integer vertices, plus the test families."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, TextIO

CLIQUE_NODE_LIMIT = 10**8


class GraphFormatError(ValueError):
    """Raised for malformed edge-list input; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class BudgetExceeded(RuntimeError):
    """An exact search visited more nodes than it was allowed to."""


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices ``0..n-1``.

    ``adj[u]`` is the frozenset of neighbours of ``u``.  Construct through
    :meth:`from_edges` unless the adjacency is already known to be symmetric.
    """

    n: int
    adj: tuple[frozenset[int], ...] = field(repr=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(frozenset(s) for s in nbrs))

    def __len__(self) -> int:
        return self.n

    def neighbors(self, u: int) -> frozenset[int]:
        return self.adj[u]

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    @cached_property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Adjacency as bit masks, for the exact routines."""
        return tuple(sum(1 << v for v in a) for a in self.adj)

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in sorted(self.adj[u]):
                if u < v:
                    yield u, v

    @cached_property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self.n and v in self.adj[u]

    def induced(self, vertices: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
        """Induced subgraph relabelled to ``0..m-1``; also returns new->old map."""
        keep = tuple(sorted(set(vertices)))
        index = {v: i for i, v in enumerate(keep)}
        edges = [(index[u], index[v]) for u in keep for v in self.adj[u] if v in index and u < v]
        return Graph.from_edges(len(keep), edges), keep

    def to_text(self) -> str:
        edges = list(self.edges())
        lines = [f"p {self.n} {len(edges)}"]
        lines.extend(f"e {u} {v}" for u, v in edges)
        return "\n".join(lines) + "\n"


def parse_graph(text: str | TextIO) -> Graph:
    """Parse the ``p n m`` / ``e u v`` edge-list format (0-based, ``#`` comments)."""
    if not isinstance(text, str):
        text = text.read()
    n = m = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "p":
            if n is not None:
                raise GraphFormatError("duplicate header", lineno)
            if len(parts) != 3:
                raise GraphFormatError("header must be 'p <n> <m>'", lineno)
            n, m = _ints(parts[1:], lineno)
            if n < 0 or m < 0:
                raise GraphFormatError("negative counts in header", lineno)
        elif tag == "e":
            if n is None:
                raise GraphFormatError("edge before header", lineno)
            if len(parts) != 3:
                raise GraphFormatError("edge must be 'e <u> <v>'", lineno)
            u, v = _ints(parts[1:], lineno)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"vertex out of range 0..{n - 1}", lineno)
            if u == v:
                raise GraphFormatError(f"self-loop at {u}", lineno)
            edges.append((u, v))
        else:
            raise GraphFormatError(f"unknown line type {tag!r}", lineno)
    if n is None:
        raise GraphFormatError("missing 'p <n> <m>' header")
    if len(edges) != m:
        raise GraphFormatError(f"header declares {m} edge lines, found {len(edges)}")
    return Graph.from_edges(n, edges)


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise GraphFormatError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def ball(g: Graph, u: int, d: int) -> set[int]:
    """All vertices at distance at most ``d`` from ``u``."""
    if not 0 <= u < g.n:
        raise IndexError(f"vertex {u} out of range")
    if d < 0:
        raise ValueError("radius must be non-negative")
    seen = {u}
    frontier = [u]
    for _ in range(d):
        nxt = []
        for x in frontier:
            for y in g.adj[x]:
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if not nxt:
            break
        frontier = nxt
    return seen


def is_triangle_free(g: Graph) -> bool:
    for u in range(g.n):
        nu = g.adj[u]
        for v in nu:
            if v > u and not nu.isdisjoint(g.adj[v]):
                return False
    return True


def find_clique(g: Graph, r: int, max_nodes: int = CLIQUE_NODE_LIMIT) -> list[int] | None:
    """Return some clique on ``r`` vertices, or None if there is none.

    Branch and bound over bit-set candidate sets: a branch is cut as soon as
    the clique plus the remaining candidates cannot reach ``r`` vertices.
    Raises :class:`BudgetExceeded` after ``max_nodes`` search nodes.
    """
    if r < 1:
        raise ValueError("clique size must be positive")
    if r == 1:
        return [0] if g.n else None
    masks = g.masks
    visited = 0

    def extend(clique: list[int], cand: int) -> list[int] | None:
        nonlocal visited
        need = r - len(clique)
        if need == 0:
            return clique
        while cand:
            if cand.bit_count() < need:
                return None
            visited += 1
            if visited > max_nodes:
                raise BudgetExceeded(f"clique search exceeded {max_nodes} nodes")
            v = cand.bit_length() - 1
            cand &= ~(1 << v)
            # only lower-numbered neighbours, so each clique is found once
            found = extend(clique + [v], cand & masks[v])
            if found is not None:
                return found
        return None

    for v in range(g.n):
        if len(g.adj[v]) >= r - 1:
            lower = masks[v] & ((1 << v) - 1)
            if lower.bit_count() >= r - 1:
                found = extend([v], lower)
                if found is not None:
                    return sorted(found)
    return None


def is_kr_free(g: Graph, r: int, max_nodes: int = CLIQUE_NODE_LIMIT) -> bool:
    if r < 2:
        raise ValueError("r must be at least 2")
    return find_clique(g, r, max_nodes) is None


def is_connected(g: Graph) -> bool:
    return g.n == 0 or len(ball(g, 0, g.n)) == g.n


# --- generators -------------------------------------------------------------


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    if n < 1:
        raise ValueError("n must be positive")
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def empty(n: int) -> Graph:
    return Graph.from_edges(n, [])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_multipartite(*parts: int) -> Graph:
    owner = [i for i, size in enumerate(parts) for _ in range(size)]
    n = len(owner)
    return Graph.from_edges(
        n, [(u, v) for u, v in itertools.combinations(range(n), 2) if owner[u] != owner[v]]
    )


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def gnp(n: int, p: float, rng: random.Random) -> Graph:
    if n < 0 or not 0.0 <= p <= 1.0:
        raise ValueError("need n >= 0 and 0 <= p <= 1")
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


def random_bipartite(n: int, m: int, p: float, seed: int) -> Graph:
    """Random bipartite graph: parts ``0..n-1`` and ``n..n+m-1``."""
    if n < 1 or m < 1 or not 0.0 <= p <= 1.0:
        raise ValueError("need positive part sizes and 0 <= p <= 1")
    rng = random.Random(seed)
    edges = [(u, n + v) for u in range(n) for v in range(m) if rng.random() < p]
    return Graph.from_edges(n + m, edges)


def _cliques_of(g: Graph, r: int) -> list[tuple[int, ...]]:
    masks = g.masks
    out: list[tuple[int, ...]] = []

    def grow(clique: tuple[int, ...], cand: int) -> None:
        if len(clique) == r:
            out.append(clique)
            return
        while cand:
            v = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            grow(clique + (v,), cand & masks[v])

    for v in range(g.n):
        grow((v,), masks[v] & ~((1 << (v + 1)) - 1))
    return out


def _destroy_cliques(g: Graph, r: int, rng: random.Random) -> Graph:
    """Delete a random edge of a random remaining K_r until none is left."""
    alive = _cliques_of(g, r)
    edges = set(g.edges())
    while alive:
        clique = alive[rng.randrange(len(alive))]
        u, v = rng.choice(list(itertools.combinations(clique, 2)))
        edges.discard((u, v))
        alive = [c for c in alive if not (u in c and v in c)]
    return Graph.from_edges(g.n, sorted(edges))


def random_kr_free(n: int, d: float, r: int, seed: int) -> Graph:
    """Sample G(n, d/n), then break every K_r by deleting one of its edges."""
    if n < 1 or d < 0 or r < 2:
        raise ValueError("need n >= 1, d >= 0, r >= 2")
    rng = random.Random(seed)
    g = gnp(n, min(1.0, d / n), rng)
    return _destroy_cliques(g, r, rng)


def random_triangle_free(n: int, d: float, seed: int) -> Graph:
    return random_kr_free(n, d, 3, seed)


FAMILIES = ("cycle", "complete", "random_bipartite", "random_triangle_free", "random_kr_free")


def generate(family: str, **params) -> Graph:
    """Dispatch by family name; see :data:`FAMILIES` for the accepted names."""
    if family == "cycle":
        return cycle(params["n"])
    if family == "complete":
        return complete(params["n"])
    if family == "random_bipartite":
        return random_bipartite(params["n"], params["m"], params["p"], params.get("seed", 0))
    if family == "random_triangle_free":
        return random_triangle_free(params["n"], params["d"], params.get("seed", 0))
    if family == "random_kr_free":
        return random_kr_free(params["n"], params["d"], params["r"], params.get("seed", 0))
    raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")

