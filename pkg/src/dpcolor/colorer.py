"""Randomized two-phase cover colouring.

Phase 1 is a Moser-Tardos loop: while some uncoloured vertex ``u`` has a bad
residual list, the picks on ``N(u)`` are redrawn uniformly among the
independent subsets compatible with everything outside ``N(u)``.  Phase 2
colours what is left, either by a Moser-Tardos version of the local-lemma
completion or greedily.
"""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .cover import Cover, PartialColoring, ResidualCover, is_coloring, random_cover, residual, restrict
from .graph import Graph, find_clique, is_triangle_free
from .sampler import (
    LayeredSampler,
    NeighborhoodInstance,
    StarSampler,
    glauber_sample,
    params_kr,
    params_triangle_free,
    uniform_start,
)
from .seeding import derive_seed

log = logging.getLogger(__name__)

MODES = ("tf", "kr")


class CompletionFailed(RuntimeError):
    def __init__(self, vertex: int):
        self.vertex = vertex
        super().__init__(f"no free slot left at residual vertex {vertex}")


@dataclass
class Phase1Config:
    """Targets for phase 1.

    ``mode="tf"``: every uncoloured ``u`` keeps ``ell`` slots, each with at most
    ``degree_cap`` live cross neighbours.  With ``trim`` the slots above the
    cap are dropped from the residual list instead of failing the vertex.
    ``mode="kr"``: every uncoloured ``u`` keeps ``ell`` slots and has fewer
    than ``ell`` uncoloured neighbours.
    """

    ell: int
    degree_cap: int | None = None
    max_rounds: int | None = None
    seed: int = 0
    mode: str = "tf"
    trim: bool = False
    threshold: int | None = None
    init_steps: int | None = None

    def __post_init__(self):
        if self.ell < 1:
            raise ValueError("ell must be at least 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.degree_cap is None:
            self.degree_cap = self.ell // 8
        if self.degree_cap < 0:
            raise ValueError("degree_cap must be non-negative")

    def rounds_cap(self, n: int) -> int:
        return self.max_rounds if self.max_rounds is not None else 100 * max(n, 1)


@dataclass
class RunReport:
    outcome: str
    rounds: int = 0
    phase2_rounds: int = 0
    k: int | None = None
    ell: int | None = None
    degree_cap: int | None = None
    uncolored_after_phase1: int | None = None
    coloring: PartialColoring | None = None
    timings: dict[str, float] = field(default_factory=dict, compare=False)

    @property
    def success(self) -> bool:
        return self.outcome == "success"

    def lines(self) -> list[str]:
        keys = ("outcome", "rounds", "phase2_rounds", "k", "ell", "degree_cap", "uncolored_after_phase1")
        return [f"{key}={getattr(self, key)}" for key in keys]


class _EventState:
    """Picks plus the counters needed to re-evaluate the events locally.

    Cover vertices are flattened to integers.  An element is live when its
    base vertex is uncoloured and no pick is matched to it; ``rdeg`` counts
    live cross neighbours and ``nbad[v]`` the live elements of ``L(v)`` whose
    ``rdeg`` exceeds the cap.
    """

    def __init__(self, cover: Cover, cfg: Phase1Config, picks: Mapping[int, int]):
        self.cover = cover
        self.cfg = cfg
        g = cover.base
        self.adj = g.adj
        self.off = [0] * (cover.n + 1)
        for v, s in enumerate(cover.sizes):
            self.off[v + 1] = self.off[v] + s
        self.owner = [v for v, s in enumerate(cover.sizes) for _ in range(s)]
        off = self.off
        self.part = [
            [off[w] + j for w, j in cover.partners[v][i]] for v, s in enumerate(cover.sizes) for i in range(s)
        ]
        self.pick: list[int | None] = [None] * cover.n
        for v, i in picks.items():
            self.pick[v] = i
        m = off[-1]
        self.blocked = [0] * m
        for v, i in picks.items():
            for e in self.part[off[v] + i]:
                self.blocked[e] += 1
        self.live = [self.pick[self.owner[e]] is None and self.blocked[e] == 0 for e in range(m)]
        self.rdeg = [sum(self.live[f] for f in self.part[e]) for e in range(m)]
        cap = cfg.degree_cap
        self.nfree = [sum(1 for e in range(off[v], off[v + 1]) if self.blocked[e] == 0) for v in range(cover.n)]
        self.nbad = [
            sum(1 for e in range(off[v], off[v + 1]) if self.live[e] and self.rdeg[e] > cap) for v in range(cover.n)
        ]
        self.ures = [sum(1 for w in self.adj[v] if self.pick[w] is None) for v in range(cover.n)]
        self.violated = {v for v in range(cover.n) if self._bad(v)}

    def _bad(self, v: int) -> bool:
        if self.pick[v] is not None:
            return False
        ell = self.cfg.ell
        if self.cfg.mode == "kr":
            return self.nfree[v] < ell or self.ures[v] >= ell
        if self.cfg.trim:
            return self.nfree[v] - self.nbad[v] < ell
        return self.nfree[v] < ell or self.nbad[v] > 0

    def _flip(self, e: int, now: bool, dirty: set[int]) -> None:
        cap = self.cfg.degree_cap
        live, rdeg, nbad, owner = self.live, self.rdeg, self.nbad, self.owner
        live[e] = now
        step = 1 if now else -1
        if rdeg[e] > cap:
            nbad[owner[e]] += step
        dirty.add(owner[e])
        for f in self.part[e]:
            if live[f]:
                before = rdeg[f] > cap
                rdeg[f] += step
                after = rdeg[f] > cap
                if before != after:
                    nbad[owner[f]] += 1 if after else -1
                    dirty.add(owner[f])
            else:
                rdeg[f] += step

    def set_pick(self, w: int, slot: int | None) -> None:
        old = self.pick[w]
        if old == slot:
            return
        off, part, blocked, nfree, owner = self.off, self.part, self.blocked, self.nfree, self.owner
        dirty = {w}
        touched: list[int] = []
        flips_status = (old is None) != (slot is None)
        if flips_status:
            touched.extend(range(off[w], off[w + 1]))
        if old is not None:
            for e in part[off[w] + old]:
                blocked[e] -= 1
                if blocked[e] == 0:
                    nfree[owner[e]] += 1
                touched.append(e)
        if slot is not None:
            for e in part[off[w] + slot]:
                if blocked[e] == 0:
                    nfree[owner[e]] -= 1
                blocked[e] += 1
                touched.append(e)
        self.pick[w] = slot
        if flips_status:
            step = 1 if slot is None else -1
            for y in self.adj[w]:
                self.ures[y] += step
                dirty.add(y)
        pick = self.pick
        for e in touched:
            now = pick[owner[e]] is None and blocked[e] == 0
            if now != self.live[e]:
                self._flip(e, now, dirty)
        for v in dirty:
            if self._bad(v):
                self.violated.add(v)
            else:
                self.violated.discard(v)

    def free_slots(self, v: int) -> tuple[int, ...]:
        base = self.off[v]
        return tuple(j for j in range(self.cover.sizes[v]) if self.blocked[base + j] == 0)

    def kept_slots(self, v: int) -> tuple[int, ...]:
        """Live slots of ``v`` whose live cross degree is within the cap."""
        base, cap = self.off[v], self.cfg.degree_cap
        return tuple(
            j for j in range(self.cover.sizes[v]) if self.live[base + j] and self.rdeg[base + j] <= cap
        )

    def coloring(self) -> PartialColoring:
        return {v: i for v, i in enumerate(self.pick) if i is not None}


def _events(state: _EventState) -> list[int]:
    return sorted(state.violated)


def violated_events(c: Cover, picks: Mapping[int, int], cfg: Phase1Config) -> list[int]:
    """Uncoloured vertices whose event fails under ``picks``, in increasing order."""
    return _events(_EventState(c, cfg, picks))


def _resample(state: _EventState, u: int, rng: random.Random, cfg: Phase1Config) -> None:
    cover = state.cover
    nbrs = sorted(cover.base.adj[u])
    for v in nbrs:
        state.set_pick(v, None)
    lists = {v: state.free_slots(v) for v in nbrs}
    triangle_free_at = all(cover.base.adj[v].isdisjoint(lists) for v in nbrs)
    if triangle_free_at and cfg.mode == "tf":
        inst = NeighborhoodInstance(cover, u, {}, lists)
        new = StarSampler(inst).sample(rng)
    else:
        inst = NeighborhoodInstance(cover, u, state.coloring(), lists)
        sampler = LayeredSampler(inst, cfg.threshold)
        new, _ = sampler.run(uniform_start(inst, rng), rng)
    for v, j in new.items():
        state.set_pick(v, j)


def _phase1(c: Cover, cfg: Phase1Config) -> tuple[_EventState, RunReport]:
    t0 = time.perf_counter()
    rng = random.Random(cfg.seed)
    n = c.n
    steps = cfg.init_steps if cfg.init_steps is not None else 10 * n
    init = glauber_sample(c, range(n), steps, rng) if n else {}
    state = _EventState(c, cfg, init)
    cap = cfg.rounds_cap(n)
    rounds = 0
    while state.violated and rounds < cap:
        _resample(state, min(state.violated), rng, cfg)
        rounds += 1
    report = RunReport(
        "phase1_cap" if state.violated else "success",
        rounds=rounds,
        ell=cfg.ell,
        degree_cap=cfg.degree_cap,
        uncolored_after_phase1=sum(p is None for p in state.pick),
        timings={"phase1": time.perf_counter() - t0},
    )
    return state, report


def mt_phase1(c: Cover, cfg: Phase1Config) -> tuple[PartialColoring, RunReport]:
    """Resample neighbourhoods of the lowest violated vertex until none is left.

    Starts from a Glauber state over all of ``V(G)``.  Returns the final
    picks and a report whose outcome is ``success`` or ``phase1_cap``.
    """
    state, report = _phase1(c, cfg)
    return state.coloring(), report


def lll_boundary(ell: int) -> tuple[Fraction, Fraction, Fraction]:
    """``(p, d, 4pd)`` for the completion, as exact rationals.

    ``p = ell^-2`` is the chance that a fixed cross edge has both ends
    picked; ``d = 2 * ell * ell/8`` bounds the events sharing a list with it.
    """
    if ell < 1:
        raise ValueError("ell must be at least 1")
    p = Fraction(1, ell * ell)
    d = 2 * ell * Fraction(ell, 8)
    return p, d, 4 * p * d


def complete_lll(
    rc: ResidualCover | Cover,
    ell: int,
    max_rounds: int,
    rng: random.Random,
    check: bool = True,
) -> tuple[PartialColoring | None, int]:
    """Colour a residual cover whose lists are long and whose cross degrees are small.

    One slot per list, uniformly and independently; while a cross edge joins
    two picks, both of its base vertices are redrawn (lowest edge first).
    Returns ``(colouring, rounds)``, with None in place of the colouring when
    ``max_rounds`` is reached.
    """
    c = rc.cover if isinstance(rc, ResidualCover) else rc
    if check:
        cap = ell // 8
        for u, s in enumerate(c.sizes):
            if s < ell:
                raise ValueError(f"list of vertex {u} has {s} < {ell} slots")
            for i in range(s):
                if len(c.partners[u][i]) > cap:
                    raise ValueError(f"cross degree of {(u, i)} exceeds {cap}")
    if any(s == 0 for s in c.sizes):
        return None, 0
    partners = c.partners
    pick = [rng.randrange(s) for s in c.sizes]
    bad = set()
    for u in range(c.n):
        for v, j in partners[u][pick[u]]:
            if pick[v] == j and u < v:
                bad.add((u, v))
    rounds = 0
    while bad:
        if rounds >= max_rounds:
            return None, rounds
        rounds += 1
        for w in min(bad):
            for v, j in partners[w][pick[w]]:
                bad.discard((min(w, v), max(w, v)))
            pick[w] = rng.randrange(c.sizes[w])
            for v, j in partners[w][pick[w]]:
                if pick[v] == j:
                    bad.add((min(w, v), max(w, v)))
    return dict(enumerate(pick)), rounds


def degeneracy_order(g: Graph) -> list[int]:
    """Smallest-last order: each vertex has at most ``degeneracy`` earlier neighbours."""
    deg = [len(a) for a in g.adj]
    removed = [False] * g.n
    out = []
    for _ in range(g.n):
        v = min((x for x in range(g.n) if not removed[x]), key=lambda x: (deg[x], x))
        removed[v] = True
        out.append(v)
        for y in g.adj[v]:
            if not removed[y]:
                deg[y] -= 1
    out.reverse()
    return out


def greedy_complete(rc: ResidualCover | Cover) -> PartialColoring:
    """Pick the lowest free slot at each vertex in degeneracy order.

    Succeeds whenever each list is longer than the vertex's number of earlier
    neighbours; raises :class:`CompletionFailed` naming the stuck vertex.
    """
    c = rc.cover if isinstance(rc, ResidualCover) else rc
    picks: PartialColoring = {}
    for u in degeneracy_order(c.base):
        for i in range(c.sizes[u]):
            if all(picks.get(v) != j for v, j in c.partners[u][i]):
                picks[u] = i
                break
        else:
            raise CompletionFailed(u)
    return dict(sorted(picks.items()))


def _finish(c: Cover, picks: PartialColoring, extra: PartialColoring, report: RunReport) -> RunReport:
    union = {**picks, **extra}
    if not is_coloring(c, union):
        raise AssertionError("pipeline produced an invalid colouring")
    report.outcome = "success"
    report.coloring = dict(sorted(union.items()))
    return report


def color_triangle_free(
    g: Graph,
    eps: float = 0.5,
    seed: int = 0,
    *,
    cover: Cover | None = None,
    k: int | None = None,
    ell: int | None = None,
    degree_cap: int | None = None,
    max_rounds: int | None = None,
    trim: bool = False,
) -> RunReport:
    """Phase 1 with the triangle-free events, then the local-lemma completion."""
    if not is_triangle_free(g):
        raise ValueError("graph contains a triangle")
    delta = g.max_degree
    k_theory, ell_theory = params_triangle_free(delta, eps) if delta >= 2 else (delta + 1, 1)
    if cover is None:
        k = k if k is not None else k_theory
        cover = random_cover(g, k, derive_seed(seed, "cover"))
    else:
        k = cover.fold
    if k is not None and k < k_theory:
        log.warning("k=%d is below the threshold k=%d for max degree %d", k, k_theory, delta)
    ell = ell if ell is not None else ell_theory
    cfg = Phase1Config(
        ell=ell, degree_cap=degree_cap, max_rounds=max_rounds, seed=derive_seed(seed, "phase1"), trim=trim
    )
    state, report = _phase1(cover, cfg)
    report.k = k
    if not report.success:
        return report
    picks = state.coloring()
    t0 = time.perf_counter()
    if trim:
        rc = restrict(cover, {v: state.kept_slots(v) for v in range(cover.n) if v not in picks})
    else:
        rc = residual(cover, picks)
    extra, rounds = complete_lll(
        rc, ell, cfg.rounds_cap(cover.n), random.Random(derive_seed(seed, "phase2")), check=cfg.degree_cap <= ell // 8
    )
    report.phase2_rounds = rounds
    report.timings["phase2"] = time.perf_counter() - t0
    if extra is None:
        report.outcome = "phase2_cap"
        return report
    return _finish(cover, picks, rc.lift(extra), report)


def color_kr_free(
    g: Graph,
    r: int = 4,
    seed: int = 0,
    *,
    cover: Cover | None = None,
    k: int | None = None,
    ell: int | None = None,
    max_rounds: int | None = None,
    threshold: int | None = None,
) -> RunReport:
    """Phase 1 with the K_r-free events (small residual degree), then greedy completion.

    Without an explicit ``k`` or cover the list size comes from the K_r-free
    parameter formula, which needs maximum degree at least 5.
    """
    if find_clique(g, r) is not None:
        raise ValueError(f"graph contains K_{r}")
    delta = g.max_degree
    theory = params_kr(delta, max(r, 4)) if delta >= 5 else None
    if cover is None:
        if k is None:
            if theory is None:
                raise ValueError("maximum degree below 5: pass k explicitly")
            k = theory[0]
        cover = random_cover(g, k, derive_seed(seed, "cover"))
    else:
        k = cover.fold
    if theory is not None and k is not None and k < theory[0]:
        log.warning("k=%d is below the threshold k=%d for max degree %d", k, theory[0], delta)
    if ell is None:
        ell = theory[1] if theory is not None and k is not None and k >= theory[0] else 1
    cfg = Phase1Config(
        ell=ell, max_rounds=max_rounds, seed=derive_seed(seed, "phase1"), mode="kr", threshold=threshold
    )
    picks, report = mt_phase1(cover, cfg)
    report.k = k
    if not report.success:
        return report
    rc = residual(cover, picks)
    extra = greedy_complete(rc)
    return _finish(cover, picks, rc.lift(extra), report)
