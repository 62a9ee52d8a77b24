"""DP-covers: construction, validation, colourings and residual covers.

A cover vertex is a pair ``(u, i)`` with ``0 <= i < sizes[u]``.  The clique on
each list is implicit; only the cross matchings between lists of adjacent
base vertices are stored, as ``(u, i, v, j)`` tuples.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence, TextIO

from .graph import Graph

Pair = tuple[int, int, int, int]
CoverVertex = tuple[int, int]
# base vertex -> chosen slot; vertices without a pick are uncoloured
PartialColoring = dict[int, int]


class CoverFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


def _normalize(pair: Pair) -> Pair:
    u, i, v, j = pair
    return (u, i, v, j) if (u, i) <= (v, j) else (v, j, u, i)


@dataclass(frozen=True)
class Cover:
    """A cover ``(L, H)`` of ``base``.

    No axiom is enforced at construction time so that faulty covers can be
    represented and reported by :func:`validate`.
    """

    base: Graph
    sizes: tuple[int, ...]
    pairs: frozenset[Pair] = frozenset()
    labels: tuple[tuple[Hashable, ...], ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(self.sizes))
        object.__setattr__(self, "pairs", frozenset(_normalize(p) for p in self.pairs))

    @property
    def n(self) -> int:
        return self.base.n

    @cached_property
    def fold(self) -> int | None:
        """``k`` if every list has size ``k``, else None."""
        distinct = set(self.sizes)
        return distinct.pop() if len(distinct) == 1 else None

    def is_cover_vertex(self, u: int, i: int) -> bool:
        return 0 <= u < len(self.sizes) and 0 <= i < self.sizes[u]

    def vertices(self) -> Iterable[CoverVertex]:
        for u, size in enumerate(self.sizes):
            for i in range(size):
                yield u, i

    @cached_property
    def partners(self) -> tuple[tuple[tuple[CoverVertex, ...], ...], ...]:
        """``partners[u][i]``: cross neighbours of ``(u, i)``, sorted."""
        acc: list[list[list[CoverVertex]]] = [[[] for _ in range(max(s, 0))] for s in self.sizes]
        for u, i, v, j in self.pairs:
            if u != v and self.is_cover_vertex(u, i) and self.is_cover_vertex(v, j):
                acc[u][i].append((v, j))
                acc[v][j].append((u, i))
        return tuple(tuple(tuple(sorted(p)) for p in row) for row in acc)

    def matching(self, u: int, v: int) -> set[tuple[int, int]]:
        """Cross pairs between ``L(u)`` and ``L(v)`` as ``(slot in u, slot in v)``."""
        out = set()
        for a, i, b, j in self.pairs:
            if (a, b) == (u, v):
                out.add((i, j))
            elif (a, b) == (v, u):
                out.add((j, i))
        return out

    def to_text(self) -> str:
        k = self.fold
        lines = [f"c {self.n} {k if k is not None else '*'}"]
        lines.extend(f"L {u} {s}" for u, s in enumerate(self.sizes))
        lines.extend("m {} {} {} {}".format(*p) for p in sorted(self.pairs))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Violation:
    axiom: str
    message: str
    witness: tuple

    def __str__(self) -> str:
        return f"{self.axiom}: {self.message} {self.witness}"


def validate(c: Cover) -> list[Violation]:
    """Check the cover axioms; an empty list means the cover is valid.

    C2 cannot fail for the implicit cliques themselves, so it is reported
    when a pair inside a single list is stored, since that would describe
    the list's internal structure outside the clique model.
    """
    out: list[Violation] = []
    g = c.base
    if len(c.sizes) != g.n:
        out.append(Violation("C1", "list count differs from base vertex count", (len(c.sizes), g.n)))
    for u, s in enumerate(c.sizes):
        if s < 0:
            out.append(Violation("C1", "negative list size", (u, s)))
    seen: dict[tuple[CoverVertex, int], CoverVertex] = {}
    for pair in sorted(c.pairs):
        u, i, v, j = pair
        bad = [(a, b) for a, b in ((u, i), (v, j)) if not c.is_cover_vertex(a, b)]
        if bad:
            out.append(Violation("C1", "pair endpoint lies in no list", (pair, bad[0])))
            continue
        if u == v:
            what = "self-loop on a cover vertex" if i == j else "stored edge inside a list"
            out.append(Violation("C2", what, (pair,)))
            continue
        if not g.has_edge(u, v):
            out.append(Violation("C3", "cross edge between non-adjacent base vertices", (pair, (u, v))))
            continue
        for x, other in (((u, i), v), ((v, j), u)):
            key = (x, other)
            if key in seen:
                out.append(
                    Violation("C4", "cover vertex matched twice on one edge", (x, (min(u, v), max(u, v))))
                )
            else:
                seen[key] = x
    return out


def cover_from_lists(g: Graph, lists: Sequence[Iterable[Hashable]]) -> Cover:
    """The canonical cover of a list assignment: ``(u,c)~(v,c)`` on every edge.

    Slot ``i`` of ``u`` stands for the ``i``-th colour of ``sorted(lists[u])``,
    recorded in ``cover.labels``.
    """
    if len(lists) != g.n:
        raise ValueError("need one list per vertex")
    ordered = []
    for u, lst in enumerate(lists):
        colours = tuple(sorted(set(lst)))
        if not colours:
            raise ValueError(f"empty list at vertex {u}")
        ordered.append(colours)
    pairs = []
    for u, v in g.edges():
        index_v = {col: j for j, col in enumerate(ordered[v])}
        for i, col in enumerate(ordered[u]):
            if col in index_v:
                pairs.append((u, i, v, index_v[col]))
    return Cover(g, tuple(len(o) for o in ordered), frozenset(pairs), labels=tuple(ordered))


def random_cover(g: Graph, k: int, seed: int, mode: str = "perfect", p: float = 1.0) -> Cover:
    """Random ``k``-fold cover: a uniform perfect matching per edge.

    With ``mode="density"`` each matched pair is then kept with probability ``p``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if mode not in ("perfect", "density"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "density" and not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = random.Random(seed)
    pairs = []
    for u, v in g.edges():
        perm = list(range(k))
        rng.shuffle(perm)
        for i, j in enumerate(perm):
            if mode == "perfect" or rng.random() < p:
                pairs.append((u, i, v, j))
    return Cover(g, (k,) * g.n, frozenset(pairs))


def parse_cover(text: str | TextIO, base: Graph) -> Cover:
    """Parse the ``c``/``L``/``m`` cover format against a base graph.

    Syntax errors raise :class:`CoverFormatError`; axiom violations are kept
    in the returned cover for :func:`validate` to report.
    """
    if not isinstance(text, str):
        text = text.read()
    header = None
    sizes: dict[int, int] = {}
    pairs: list[Pair] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag, args = parts[0], parts[1:]
        if tag == "c":
            if header is not None or len(args) != 2:
                raise CoverFormatError("expected a single 'c <n> <k-or-*>' header", lineno)
            n = _int(args[0], lineno)
            k = None if args[1] == "*" else _int(args[1], lineno)
            header = (n, k)
        elif header is None:
            raise CoverFormatError("record before header", lineno)
        elif tag == "L":
            if len(args) != 2:
                raise CoverFormatError("expected 'L <u> <size>'", lineno)
            u, size = (_int(a, lineno) for a in args)
            if u in sizes:
                raise CoverFormatError(f"second list for vertex {u}", lineno)
            if not 0 <= u < header[0]:
                raise CoverFormatError(f"vertex {u} out of range", lineno)
            if size < 0:
                raise CoverFormatError("negative list size", lineno)
            sizes[u] = size
        elif tag == "m":
            if len(args) != 4:
                raise CoverFormatError("expected 'm <u> <i> <v> <j>'", lineno)
            pairs.append(tuple(_int(a, lineno) for a in args))
        else:
            raise CoverFormatError(f"unknown record {tag!r}", lineno)
    if header is None:
        raise CoverFormatError("missing header")
    n, k = header
    if n != base.n:
        raise CoverFormatError(f"cover is for {n} vertices, graph has {base.n}")
    missing = [u for u in range(n) if u not in sizes]
    if missing:
        raise CoverFormatError(f"no list declared for vertex {missing[0]}")
    if k is not None and any(s != k for s in sizes.values()):
        raise CoverFormatError(f"header declares a {k}-fold cover but list sizes differ")
    return Cover(base, tuple(sizes[u] for u in range(n)), frozenset(pairs))


def _int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise CoverFormatError(f"expected an integer, got {token!r}", lineno) from None


def _check_picks(c: Cover, picks: Mapping[int, int]) -> None:
    for u, i in picks.items():
        if not c.is_cover_vertex(u, i):
            raise ValueError(f"pick ({u}, {i}) is not in L({u})")


def conflicts(c: Cover, picks: Mapping[int, int]) -> list[tuple[CoverVertex, CoverVertex]]:
    """Cross edges with both endpoints picked."""
    _check_picks(c, picks)
    out = []
    for u, i in picks.items():
        for v, j in c.partners[u][i]:
            if (u, i) < (v, j) and picks.get(v) == j:
                out.append(((u, i), (v, j)))
    return sorted(out)


def is_independent(c: Cover, picks: Mapping[int, int]) -> bool:
    return not conflicts(c, picks)


def is_coloring(c: Cover, picks: Mapping[int, int]) -> bool:
    """True iff ``picks`` hits every list once and no cross edge joins two picks."""
    _check_picks(c, picks)
    return len(picks) == c.n and is_independent(c, picks)


def cross_degree(c: Cover, x: CoverVertex) -> int:
    u, i = x
    if not c.is_cover_vertex(u, i):
        raise KeyError(f"unknown cover vertex {x}")
    return len(c.partners[u][i])


@dataclass(frozen=True)
class ResidualCover:
    """A cover of an induced subgraph whose lists are subsets of the parent's.

    ``vertices[a]`` is the parent vertex of residual vertex ``a`` and
    ``slots[a][s]`` the parent slot of residual slot ``s``.
    """

    cover: Cover
    vertices: tuple[int, ...]
    slots: tuple[tuple[int, ...], ...]

    @property
    def graph(self) -> Graph:
        return self.cover.base

    def lists(self) -> dict[int, tuple[int, ...]]:
        """Residual lists keyed by parent vertex, in parent slot numbers."""
        return dict(zip(self.vertices, self.slots))

    def lift(self, picks: Mapping[int, int]) -> PartialColoring:
        return {self.vertices[a]: self.slots[a][s] for a, s in picks.items()}


def restrict(c: Cover, keep: Mapping[int, Iterable[int]]) -> ResidualCover:
    """Sub-cover on the vertices of ``keep`` with lists cut down to ``keep[u]``."""
    vertices = tuple(sorted(keep))
    graph, _ = c.base.induced(vertices)
    slots = tuple(tuple(sorted(set(keep[u]))) for u in vertices)
    index = {u: a for a, u in enumerate(vertices)}
    slot_index = [{s: t for t, s in enumerate(row)} for row in slots]
    pairs = []
    for u, i, v, j in c.pairs:
        a, b = index.get(u), index.get(v)
        if a is None or b is None:
            continue
        s, t = slot_index[a].get(i), slot_index[b].get(j)
        if s is not None and t is not None:
            pairs.append((a, s, b, t))
    return ResidualCover(Cover(graph, tuple(len(r) for r in slots), frozenset(pairs)), vertices, slots)


def blocked_slots(c: Cover, picks: Mapping[int, int]) -> dict[int, set[int]]:
    """For each base vertex, the slots matched to some pick (``N_H(I)`` by list)."""
    out: dict[int, set[int]] = {}
    for u, i in picks.items():
        for v, j in c.partners[u][i]:
            out.setdefault(v, set()).add(j)
    return out


def residual(c: Cover, picks: Mapping[int, int]) -> ResidualCover:
    """``(G_I, L_I, H_I)``: drop coloured vertices and every slot matched to a pick."""
    bad = conflicts(c, picks)
    if bad:
        raise ValueError(f"picks are not independent: {bad[0]}")
    blocked = blocked_slots(c, picks)
    keep = {
        u: [i for i in range(c.sizes[u]) if i not in blocked.get(u, ())]
        for u in range(c.n)
        if u not in picks
    }
    return restrict(c, keep)


class PickState:
    """Mutable one-pick-per-vertex state with counts of picked partners.

    ``blocked[v][j]`` is the number of current picks cross-matched to
    ``(v, j)``; a slot is available at ``v`` when that count is zero.
    """

    def __init__(self, cover: Cover, picks: Mapping[int, int] | None = None):
        self.cover = cover
        self.partners = cover.partners
        self.pick: list[int | None] = [None] * cover.n
        self.blocked = [[0] * s for s in cover.sizes]
        for v, i in (picks or {}).items():
            self.set_pick(v, i)

    def set_pick(self, v: int, slot: int | None) -> None:
        old = self.pick[v]
        if old == slot:
            return
        if old is not None:
            for w, j in self.partners[v][old]:
                self.blocked[w][j] -= 1
        if slot is not None:
            for w, j in self.partners[v][slot]:
                self.blocked[w][j] += 1
        self.pick[v] = slot

    def available(self, v: int) -> list[int]:
        return [i for i, b in enumerate(self.blocked[v]) if b == 0]

    def coloring(self) -> PartialColoring:
        return {v: i for v, i in enumerate(self.pick) if i is not None}
