"""Uniform samplers for independent subsets of a neighbourhood's residual lists.

Throughout, ``u`` is a focus vertex, ``J`` a fixed independent set of picks
outside ``N[u]``, and ``L_J(v)`` the slots of ``v`` in ``N(u)`` not matched to
a pick of ``J``.  A sample is a dict ``v -> slot`` over ``N(u)``; a missing
key is the blank outcome.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .cover import Cover, PartialColoring, PickState, conflicts
from .exact import count_independent, sample_independent

ENUM_LIMIT = 200
LAYER_LIMIT = 64


class EnumerationLimitExceeded(ValueError):
    pass


class LayerTooLarge(ValueError):
    pass


class NotTriangleFreeAt(ValueError):
    """The neighbourhood contains a cross edge, so the star procedure is not uniform."""


@dataclass(frozen=True)
class NeighborhoodInstance:
    cover: Cover
    u: int
    fixed: Mapping[int, int] = field(repr=False)
    lists: Mapping[int, tuple[int, ...]]

    @classmethod
    def from_partial(cls, cover: Cover, u: int, fixed: Mapping[int, int] | None = None):
        fixed = dict(fixed or {})
        closed = cover.base.adj[u] | {u}
        clash = sorted(set(fixed) & closed)
        if clash:
            raise ValueError(f"fixed picks must avoid N[u]; vertex {clash[0]} is inside")
        bad = conflicts(cover, fixed)
        if bad:
            raise ValueError(f"fixed picks are not independent: {bad[0]}")
        lists = {}
        for v in sorted(cover.base.adj[u]):
            lists[v] = tuple(
                j
                for j in range(cover.sizes[v])
                if not any(fixed.get(w) == jj for w, jj in cover.partners[v][j])
            )
        return cls(cover, u, fixed, lists)

    @property
    def neighbors(self) -> list[int]:
        return sorted(self.lists)

    def elements(self) -> list[tuple[int, int]]:
        return [(v, j) for v in self.neighbors for j in self.lists[v]]

    def internal_edges(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        """Cross edges with both ends in ``L_J(N(u))``."""
        live = {(v, j) for v, js in self.lists.items() for j in js}
        partners = self.cover.partners
        return sorted(
            (x, y) for x in sorted(live) for y in partners[x[0]][x[1]] if x < y and y in live
        )

    def state_weight_star(self) -> float:
        """Probability the star procedure assigns to each single outcome."""
        return math.prod(1.0 / (len(js) + 1) for js in self.lists.values())


def _key(sample: Mapping[int, int]) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(sample.items()))


def enumerate_states(inst: NeighborhoodInstance, limit: int = ENUM_LIMIT) -> list[PartialColoring]:
    """All independent subsets of ``L_J(N(u))``, the empty set first."""
    nbrs = inst.neighbors
    partners = inst.cover.partners
    out: list[PartialColoring] = []
    current: PartialColoring = {}

    def walk(pos: int) -> None:
        if pos == len(nbrs):
            out.append(dict(current))
            if len(out) > limit:
                raise EnumerationLimitExceeded(f"more than {limit} independent subsets")
            return
        v = nbrs[pos]
        walk(pos + 1)
        for j in inst.lists[v]:
            if all(current.get(w) != jj for w, jj in partners[v][j]):
                current[v] = j
                walk(pos + 1)
                del current[v]

    walk(0)
    return out


class EnumSampler:
    """Exact uniform sampling by listing every state; the reference oracle."""

    def __init__(self, inst: NeighborhoodInstance, limit: int = ENUM_LIMIT):
        self.inst = inst
        self.states = enumerate_states(inst, limit)

    def distribution(self) -> dict[tuple, float]:
        p = 1.0 / len(self.states)
        return {_key(s): p for s in self.states}

    def sample(self, rng: random.Random) -> PartialColoring:
        return dict(self.states[rng.randrange(len(self.states))])


def enum_uniform(inst: NeighborhoodInstance, rng: random.Random, limit: int = ENUM_LIMIT) -> PartialColoring:
    return EnumSampler(inst, limit).sample(rng)


class StarSampler:
    """One independent draw from ``L_J(v)`` plus a blank for every neighbour."""

    def __init__(self, inst: NeighborhoodInstance):
        edge = inst.internal_edges()
        if edge:
            raise NotTriangleFreeAt(f"cross edge {edge[0]} inside the neighbourhood of {inst.u}")
        self.inst = inst
        self.choices = [(v, inst.lists[v]) for v in inst.neighbors]

    def sample(self, rng: random.Random) -> PartialColoring:
        out = {}
        for v, js in self.choices:
            r = rng.randrange(len(js) + 1)
            if r < len(js):
                out[v] = js[r]
        return out


def star_sample(inst: NeighborhoodInstance, rng: random.Random) -> PartialColoring:
    return StarSampler(inst).sample(rng)


def star_probability(inst: NeighborhoodInstance, sample: Mapping[int, int]) -> float:
    """Closed-form probability of ``sample`` under the star procedure."""
    for v, j in sample.items():
        if j not in inst.lists.get(v, ()):
            return 0.0
    if conflicts(inst.cover, sample):
        return 0.0
    return inst.state_weight_star()


# --- Glauber dynamics ----------------------------------------------------------


def default_burn_in(c: Cover, region: Iterable[int]) -> int:
    return 50 * sum(c.sizes[v] for v in region)


def glauber_sample(
    c: Cover,
    region: Iterable[int],
    steps: int | None,
    rng: random.Random,
    fixed: Mapping[int, int] | None = None,
    init: Mapping[int, int] | None = None,
) -> PartialColoring:
    """Single-site heat-bath chain on independent subsets of ``L(region)``.

    Each step picks a vertex of ``region`` uniformly and redraws its pick
    uniformly from the blank plus the slots not matched to any other current
    pick (including those of ``fixed``).  The uniform distribution is
    stationary; ``steps=None`` uses a burn-in of 50 per list element, which is
    a heuristic, not a mixing guarantee.
    """
    region = sorted(set(region))
    if steps is None:
        steps = default_burn_in(c, region)
    if steps < 0:
        raise ValueError("steps must be non-negative")
    fixed = dict(fixed or {})
    if set(fixed) & set(region):
        raise ValueError("fixed picks must lie outside the region")
    state = PickState(c, {**fixed, **(init or {})})
    inside = set(region)
    for _ in range(steps):
        v = region[rng.randrange(len(region))]
        state.set_pick(v, None)
        avail = state.available(v)
        r = rng.randrange(len(avail) + 1)
        if r < len(avail):
            state.set_pick(v, avail[r])
    return {v: i for v, i in state.coloring().items() if v in inside}


def neighborhood_glauber(inst: NeighborhoodInstance, rng: random.Random, steps: int | None = None) -> PartialColoring:
    """Glauber restricted to ``N(u)`` with ``J`` held fixed; slots outside ``L_J`` never open."""
    return glauber_sample(inst.cover, inst.neighbors, steps, rng, fixed=inst.fixed)


def uniform_start(inst: NeighborhoodInstance, rng: random.Random, limit: int = ENUM_LIMIT) -> PartialColoring:
    """Exact uniform draw when the instance is enumerable, Glauber otherwise."""
    try:
        states = enumerate_states(inst, limit)
    except EnumerationLimitExceeded:
        return neighborhood_glauber(inst, rng)
    return dict(states[rng.randrange(len(states))])


# --- layered resampling -------------------------------------------------------


@dataclass(frozen=True)
class LayerStep:
    i: int
    ind: int
    size: int
    s: int
    t: int


@dataclass
class LayeredTrace:
    steps: list[LayerStep] = field(default_factory=list)

    @property
    def s(self) -> int:
        return self.steps[-1].s if self.steps else 0

    @property
    def t(self) -> int:
        return self.steps[-1].t if self.steps else 0


def default_threshold(delta: int) -> int:
    return max(1, math.ceil(delta ** (1 / 20) - 1e-12))


class LayeredSampler:
    """Resample the layers of ``L(u)`` one after another.

    The layer of slot ``x`` of ``u`` is the set of elements of ``L_J(N(u))``
    matched to ``x``.  Given the current set, the part inside a layer is
    replaced by a uniform independent set of the layer elements that have no
    neighbour in the rest, so a uniform input stays uniform.
    """

    def __init__(self, inst: NeighborhoodInstance, threshold: int | None = None):
        self.inst = inst
        cover = inst.cover
        self.threshold = default_threshold(cover.base.max_degree) if threshold is None else threshold
        live = {(v, j) for v, js in inst.lists.items() for j in js}
        self.layers = [
            sorted(y for y in cover.partners[inst.u][x] if y in live) for x in range(cover.sizes[inst.u])
        ]
        for layer in self.layers:
            if len(layer) > LAYER_LIMIT:
                raise LayerTooLarge(f"layer of {len(layer)} elements exceeds {LAYER_LIMIT}")
        self.cross = {y: [z for z in cover.partners[y[0]][y[1]] if z in live] for y in live}

    def run(self, start: Mapping[int, int], rng: random.Random) -> tuple[PartialColoring, LayeredTrace]:
        current = dict(start)
        trace = LayeredTrace()
        s = t = 0
        for i, layer in enumerate(self.layers, start=1):
            in_layer = set(layer)
            for v, j in layer:
                if current.get(v) == j:
                    del current[v]
            # F_i: layer elements with no neighbour among the remaining picks
            verts = [
                (v, j)
                for v, j in layer
                if v not in current and all(current.get(w) != jj for w, jj in self.cross[(v, j)])
            ]
            index = {y: a for a, y in enumerate(verts)}
            masks = [0] * len(verts)
            for a, y in enumerate(verts):
                for z in self.cross[y]:
                    b = index.get(z)
                    if b is not None and z in in_layer:
                        masks[a] |= 1 << b
            memo: dict[int, int] = {}
            full = (1 << len(verts)) - 1
            ind = count_independent(masks, full, memo)
            if ind > self.threshold:
                s += 1
            else:
                t += 1
            chosen = sample_independent(masks, full, rng, memo)
            size = 0
            for a, (v, j) in enumerate(verts):
                if chosen >> a & 1:
                    current[v] = j
                    size += 1
            trace.steps.append(LayerStep(i, ind, size, s, t))
        return current, trace


def layered_sample(
    inst: NeighborhoodInstance,
    threshold: int | None,
    rng: random.Random,
    start: Mapping[int, int] | None = None,
) -> tuple[PartialColoring, LayeredTrace]:
    """Layered resampling from ``start`` (default: :func:`uniform_start`)."""
    sampler = LayeredSampler(inst, threshold)
    if start is None:
        start = uniform_start(inst, rng)
    return sampler.run(start, rng)


# --- parameter formulas -------------------------------------------------------


def _ceil(x: float) -> int:
    return math.ceil(x - 1e-9)


def params_triangle_free(delta: int, eps: float) -> tuple[int, int]:
    """List size ``k = ceil((1+eps) D / ln D)`` and survival threshold ``ceil(D^(eps/2))``."""
    if delta < 2:
        raise ValueError("need maximum degree at least 2")
    if not 0 < eps < 1:
        raise ValueError("eps must lie strictly between 0 and 1")
    return _ceil((1 + eps) * delta / math.log(delta)), _ceil(delta ** (eps / 2))


def params_kr(delta: int, r: int) -> tuple[int, int]:
    """``k = ceil(200 r D log2log2 D / log2 D)`` and ``ceil(D^(9/10))``."""
    if delta < 5:
        raise ValueError("need maximum degree at least 5")
    if r < 4:
        raise ValueError("r must be at least 4")
    lg = math.log2(delta)
    return _ceil(200 * r * delta * math.log2(lg) / lg), _ceil(delta ** 0.9)


def f_lambda(lam: float, r: int) -> float:
    """``log2(lam) / (2 r log2 log2 lam)``, defined for ``lam > 2``."""
    if lam <= 2:
        raise ValueError("lambda must exceed 2")
    if r < 4:
        raise ValueError("r must be at least 4")
    lg = math.log2(lam)
    return lg / (2 * r * math.log2(lg))
