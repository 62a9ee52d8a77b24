"""Exact computations for small instances.

Cover colouring search, DP-colourability by enumerating covers, and
independent-set counting (``ind``) and median size over bit-mask graphs.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass

from .cover import Cover, PartialColoring
from .graph import BudgetExceeded, Graph

ENUMERATION_LIMIT = 30


@dataclass
class SearchBudget:
    """Node allowance shared by one or more searches."""

    max_nodes: int = 10**7
    nodes: int = 0
    timed_out: bool = False

    def __post_init__(self):
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be at least 1")

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.max_nodes:
            self.timed_out = True
            raise BudgetExceeded(f"search exceeded {self.max_nodes} nodes")


def find_coloring(c: Cover, budget: SearchBudget | None = None) -> PartialColoring | None:
    """Backtracking search for a cover colouring.

    Fail-first: always branch on the uncoloured vertex with the fewest
    remaining slots (ties to the lowest index); slots matched to a pick are
    pruned from neighbouring lists as soon as the pick is made.  Returns None
    only after the search space is exhausted.
    """
    budget = budget if budget is not None else SearchBudget()
    partners = c.partners
    avail = [set(range(s)) for s in c.sizes]
    picks: PartialColoring = {}
    todo = set(range(c.n))

    def search() -> bool:
        if not todo:
            return True
        u = min(todo, key=lambda v: (len(avail[v]), v))
        todo.discard(u)
        for i in sorted(avail[u]):
            budget.tick()
            removed = []
            dead = False
            for v, j in partners[u][i]:
                if v in todo and j in avail[v]:
                    avail[v].discard(j)
                    removed.append((v, j))
                    dead = dead or not avail[v]
            picks[u] = i
            if not dead and search():
                return True
            del picks[u]
            for v, j in removed:
                avail[v].add(j)
        todo.add(u)
        return False

    return dict(sorted(picks.items())) if search() else None


def _spanning_forest(g: Graph) -> set[tuple[int, int]]:
    tree = set()
    seen = [False] * g.n
    for root in range(g.n):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in sorted(g.adj[x]):
                if not seen[y]:
                    seen[y] = True
                    tree.add((min(x, y), max(x, y)))
                    queue.append(y)
    return tree


def perfect_covers(g: Graph, k: int):
    """Every ``k``-fold cover with perfect matchings, up to relabelling lists.

    Relabelling the slots of one list permutes the matchings on its edges,
    so the matchings along a spanning forest can all be taken to be the
    identity; the remaining edges range over all ``k!`` permutations.
    """
    tree = _spanning_forest(g)
    free = [e for e in g.edges() if e not in tree]
    base = [(u, i, v, i) for u, v in sorted(tree) for i in range(k)]
    perms = list(itertools.permutations(range(k)))
    for choice in itertools.product(perms, repeat=len(free)):
        pairs = list(base)
        for (u, v), perm in zip(free, choice):
            pairs.extend((u, i, v, j) for i, j in enumerate(perm))
        yield Cover(g, (k,) * g.n, frozenset(pairs))


def uncolorable_cover(g: Graph, k: int, budget: SearchBudget | None = None) -> Cover | None:
    """A ``k``-fold cover of ``g`` admitting no colouring, or None if none exists.

    Only perfect-matching covers are searched: deleting cross edges can only
    add colourings, so if every perfect cover is colourable then so is every
    ``k``-fold cover.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    budget = budget if budget is not None else SearchBudget()
    for cover in perfect_covers(g, k):
        budget.tick()
        if find_coloring(cover, budget) is None:
            return cover
    return None


def is_k_dp_colorable(g: Graph, k: int, budget: SearchBudget | None = None) -> bool:
    return uncolorable_cover(g, k, budget) is None


def chi_dp(g: Graph, k_max: int, budget: SearchBudget | None = None) -> int | None:
    """Smallest ``k <= k_max`` with every ``k``-fold cover colourable, else None."""
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    budget = budget if budget is not None else SearchBudget()
    for k in range(1, k_max + 1):
        if is_k_dp_colorable(g, k, budget):
            return k
    return None


# --- independent sets over bit masks ----------------------------------------


def count_independent(masks: tuple[int, ...] | list[int], mask: int, memo: dict[int, int]) -> int:
    """Number of independent subsets (including the empty set) of ``mask``."""
    if mask == 0:
        return 1
    hit = memo.get(mask)
    if hit is not None:
        return hit
    v = mask.bit_length() - 1
    rest = mask & ~(1 << v)
    if masks[v] & rest:
        total = count_independent(masks, rest, memo) + count_independent(masks, rest & ~masks[v], memo)
    else:
        total = 2 * count_independent(masks, rest, memo)
    memo[mask] = total
    return total


def independence_polynomial(masks, mask: int, memo: dict[int, tuple[int, ...]]) -> tuple[int, ...]:
    """Coefficient ``s`` is the number of independent sets of size ``s``."""
    if mask == 0:
        return (1,)
    hit = memo.get(mask)
    if hit is not None:
        return hit
    v = mask.bit_length() - 1
    rest = mask & ~(1 << v)
    without = independence_polynomial(masks, rest, memo)
    with_v = independence_polynomial(masks, rest & ~masks[v], memo)
    size = max(len(without), len(with_v) + 1)
    poly = [0] * size
    for s, c in enumerate(without):
        poly[s] += c
    for s, c in enumerate(with_v):
        poly[s + 1] += c
    result = tuple(poly)
    memo[mask] = result
    return result


def sample_independent(masks, mask: int, rng: random.Random, memo: dict[int, int]) -> int:
    """Exactly uniform independent subset of ``mask``, returned as a bit mask."""
    chosen = 0
    while mask:
        v = mask.bit_length() - 1
        rest = mask & ~(1 << v)
        inside = rest & ~masks[v]
        c_in = count_independent(masks, inside, memo)
        c_out = count_independent(masks, rest, memo)
        if rng.randrange(c_in + c_out) < c_in:
            chosen |= 1 << v
            mask = inside
        else:
            mask = rest
    return chosen


def _check_size(f: Graph, limit: int) -> None:
    if f.n > limit:
        raise ValueError(f"graph has {f.n} vertices, enumeration limit is {limit}")


def ind_count(f: Graph, limit: int = ENUMERATION_LIMIT) -> int:
    _check_size(f, limit)
    return count_independent(f.masks, (1 << f.n) - 1, {})


def independent_set_sizes(f: Graph, limit: int = ENUMERATION_LIMIT) -> tuple[int, ...]:
    _check_size(f, limit)
    return independence_polynomial(f.masks, (1 << f.n) - 1, {})


def median_alpha(f: Graph, limit: int = ENUMERATION_LIMIT) -> int:
    """Largest ``a`` such that at least half of all independent sets have size >= ``a``.

    The count of sets of size at least ``a`` only drops at integers, so the
    supremum over real ``a`` is attained at an integer.
    """
    poly = independent_set_sizes(f, limit)
    total = sum(poly)
    tail = 0
    for size in range(len(poly) - 1, -1, -1):
        tail += poly[size]
        if 2 * tail >= total:
            return size
    return 0
