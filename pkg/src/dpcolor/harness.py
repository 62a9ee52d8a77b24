"""Monte-Carlo and exact-enumeration experiments on neighbourhood instances.

An experiment returns an :class:`ExperimentReport`.  Exact identities and
the Shearer-type inequality are *gated* verdicts (a failure is a bug or a
counterexample); inequalities that only hold for large maximum degree, and
anything judged from samples, are reported with both sides but not gated.

Confidence intervals are Wilson score intervals at 99%.  Per-trial seeds
come from :func:`dpcolor.seeding.derive_seed` applied to the master seed.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from statistics import NormalDist
from typing import Any, Iterable, Mapping, Sequence

from .colorer import color_triangle_free
from .cover import Cover, PartialColoring, random_cover
from .exact import ind_count, median_alpha
from .graph import Graph, generate, random_kr_free
from .sampler import (
    ENUM_LIMIT,
    EnumerationLimitExceeded,
    LayeredSampler,
    NeighborhoodInstance,
    StarSampler,
    enumerate_states,
    f_lambda,
    glauber_sample,
    neighborhood_glauber,
    params_triangle_free,
)
from .seeding import derive_seed

CONFIDENCE = 0.99
Z = NormalDist().inv_cdf(0.5 + CONFIDENCE / 2)
EXACT_TOL = 1e-12


class BoundViolated(AssertionError):
    """A gated inequality failed; the report is attached for replay."""

    def __init__(self, report: "ExperimentReport"):
        self.report = report
        failed = [v.name for v in report.verdicts if v.gated and not v.passed]
        super().__init__(f"{report.experiment}: gated verdicts failed: {', '.join(failed)}")


@dataclass
class Verdict:
    name: str
    inequality: str
    passed: bool
    gated: bool
    detail: str = ""


@dataclass
class ExperimentReport:
    experiment: str
    params: dict[str, Any]
    measurements: dict[str, Any] = field(default_factory=dict)
    bounds: dict[str, Any] = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)
    rows: list[dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """True when every gated verdict holds."""
        return all(v.passed for v in self.verdicts if v.gated)

    def verdict(self, name: str) -> Verdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        return rows_to_csv(self.rows)


def rows_to_csv(rows: Sequence[Mapping[str, Any]]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def wilson(successes: int, trials: int, z: float = Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


# --- seeded instances -----------------------------------------------------------


def star_graph_instance(degree: int, outer: int, p_edge: float, rng: random.Random, inner: float = 0.0) -> Graph:
    """Vertex 0 joined to ``1..degree``; those joined to the outer vertices at random.

    With ``inner == 0`` the neighbourhood of 0 is independent and the graph is
    bipartite apart from the star, hence triangle-free.
    """
    nbrs = range(1, degree + 1)
    outs = range(degree + 1, degree + 1 + outer)
    edges = [(0, v) for v in nbrs]
    edges += [(v, w) for v in nbrs for w in outs if rng.random() < p_edge]
    edges += [(v, w) for v, w in itertools.combinations(nbrs, 2) if rng.random() < inner]
    return Graph.from_edges(degree + 1 + outer, edges)


def seeded_instance(
    seed: int,
    degree: int = 3,
    outer: int = 4,
    k: int = 3,
    density: float = 0.7,
    p_edge: float = 0.5,
    inner: float = 0.0,
) -> NeighborhoodInstance:
    """A neighbourhood instance at vertex 0, with ``J`` drawn by Glauber on the outer vertices."""
    rng = random.Random(derive_seed(seed, "graph"))
    g = star_graph_instance(degree, outer, p_edge, rng, inner)
    c = random_cover(g, k, derive_seed(seed, "cover"), mode="density", p=density)
    return NeighborhoodInstance.from_partial(c, 0, default_fixed(c, 0, seed))


def default_fixed(c: Cover, u: int, seed: int) -> PartialColoring:
    """Glauber draw over the vertices outside ``N[u]``."""
    outside = [v for v in range(c.n) if v != u and v not in c.base.adj[u]]
    if not outside:
        return {}
    return glauber_sample(c, outside, None, random.Random(derive_seed(seed, "fixed")))


def enumerable_instances(master: int, count: int, max_attempts: int = 10_000, limit: int = ENUM_LIMIT, **kwargs):
    """The first ``count`` seeded instances with at most ``limit`` independent subsets.

    Yields ``(seed, instance)``; the seeds are ``derive_seed(master, "instance", i)``.
    """
    found = 0
    for i in range(max_attempts):
        if found == count:
            return
        seed = derive_seed(master, "instance", i)
        inst = seeded_instance(seed, **kwargs)
        try:
            enumerate_states(inst, limit)
        except EnumerationLimitExceeded:
            continue
        found += 1
        yield seed, inst
    if found < count:
        raise RuntimeError(f"only {found} enumerable instances in {max_attempts} attempts")


def random_capped_cover(g: Graph, k: int, cap: int, seed: int) -> Cover:
    """``k``-fold cover in which every cover vertex has at most ``cap`` cross neighbours.

    Edges are visited in a seeded random order; each gets a random partial
    matching between slots that still have spare capacity.
    """
    rng = random.Random(seed)
    load = [[0] * k for _ in range(g.n)]
    edges = list(g.edges())
    rng.shuffle(edges)
    pairs = []
    for u, v in edges:
        left = [i for i in range(k) if load[u][i] < cap]
        right = [j for j in range(k) if load[v][j] < cap]
        rng.shuffle(left)
        rng.shuffle(right)
        for i, j in zip(left, right):
            if rng.random() < 0.5:
                pairs.append((u, i, v, j))
                load[u][i] += 1
                load[v][j] += 1
    return Cover(g, (k,) * g.n, frozenset(pairs))


# --- helpers over a neighbourhood instance --------------------------------------


def _instance(c: Cover, u: int, fixed: Mapping[int, int] | None, seed: int) -> NeighborhoodInstance:
    if fixed is None:
        fixed = default_fixed(c, u, seed)
    return NeighborhoodInstance.from_partial(c, u, fixed)


def tilde_n(inst: NeighborhoodInstance, x: int) -> list[int]:
    """Neighbours ``v`` of ``u`` whose residual list meets the cross neighbourhood of slot ``x``."""
    return sorted({v for v, j in inst.cover.partners[inst.u][x] if j in inst.lists.get(v, ())})


def survival_probability(inst: NeighborhoodInstance, x: int) -> float:
    """``Pr[x in L_I(u)]`` under the star procedure: a product over ``tilde_n``."""
    return math.prod(1 - 1 / (len(inst.lists[v]) + 1) for v in tilde_n(inst, x))


def survival_bounds(inst: NeighborhoodInstance, x: int) -> tuple[float, float]:
    """The exponential lower and upper bounds on :func:`survival_probability`."""
    nx = tilde_n(inst, x)
    lower = math.exp(-sum(1 / len(inst.lists[v]) for v in nx))
    upper = math.exp(-sum(1 / (len(inst.lists[v]) + 1) for v in nx))
    return lower, upper


def absent_slots(inst: NeighborhoodInstance, sample: Mapping[int, int]) -> set[int]:
    """Slots of ``u`` matched to a pick of ``sample``, i.e. not in ``L_I(u)``."""
    partners = inst.cover.partners
    return {x for x in range(inst.cover.sizes[inst.u]) if any(sample.get(v) == j for v, j in partners[inst.u][x])}


def residual_degree(inst: NeighborhoodInstance, sample: Mapping[int, int], x: int) -> int:
    """Cross degree of slot ``x`` of ``u`` after colouring ``J`` and ``sample``.

    In the star setting no pick of ``N(u)`` blocks a slot of another
    neighbour, so a partner survives exactly when its vertex stays blank.
    """
    return sum(1 for v in tilde_n(inst, x) if v not in sample)


def _require_star(inst: NeighborhoodInstance) -> StarSampler:
    g = inst.cover.base
    nbrs = inst.neighbors
    if any(g.adj[v] & set(nbrs) for v in nbrs):
        raise ValueError(f"neighbourhood of {inst.u} is not independent; the star procedure does not apply")
    return StarSampler(inst)


def _states_or_none(inst: NeighborhoodInstance) -> list[PartialColoring] | None:
    try:
        return enumerate_states(inst)
    except EnumerationLimitExceeded:
        return None


def _instance_params(inst: NeighborhoodInstance) -> dict[str, Any]:
    c = inst.cover
    return {
        "u": inst.u,
        "n": c.n,
        "max_degree": c.base.max_degree,
        "deg_u": len(inst.lists),
        "k": c.sizes[inst.u],
        "fixed_picks": len(inst.fixed),
    }


# --- experiments -------------------------------------------------------------


def survival_experiment(
    c: Cover,
    u: int,
    ell: int,
    trials: int,
    seed: int,
    fixed: Mapping[int, int] | None = None,
    degree_cap: float | None = None,
) -> ExperimentReport:
    """Survival of the list of ``u`` after a star-procedure draw on ``N(u)``.

    Estimates ``p0 = Pr[|L_I(u)| < ell]`` and ``p1 = Pr[some surviving slot
    has residual cross degree > degree_cap]`` (default ``ell / 2``), and
    computes ``Pr[x in L_I(u)]`` exactly for every slot, twice when the
    instance is small enough to enumerate.
    """
    inst = _instance(c, u, fixed, seed)
    sampler = _require_star(inst)
    cap = ell / 2 if degree_cap is None else degree_cap
    k = c.sizes[u]
    delta = c.base.max_degree
    states = _states_or_none(inst)

    exact = [survival_probability(inst, x) for x in range(k)]
    bounds = [survival_bounds(inst, x) for x in range(k)]
    enumerated: list[float | None] = [None] * k
    exact_p0 = exact_p1 = None
    if states is not None:
        total = len(states)
        absent = [absent_slots(inst, s) for s in states]
        enumerated = [sum(x not in a for a in absent) / total for x in range(k)]
        exact_p0 = sum(k - len(a) < ell for a in absent) / total
        exact_p1 = (
            sum(any(residual_degree(inst, s, x) > cap for x in range(k) if x not in a) for s, a in zip(states, absent))
            / total
        )

    rng = random.Random(derive_seed(seed, "survival"))
    hits = [0] * k
    n0 = n1 = 0
    size_sum = 0
    for _ in range(trials):
        s = sampler.sample(rng)
        gone = absent_slots(inst, s)
        alive = [x for x in range(k) if x not in gone]
        size_sum += len(alive)
        for x in alive:
            hits[x] += 1
        n0 += len(alive) < ell
        n1 += any(residual_degree(inst, s, x) > cap for x in alive)

    expectation = sum(exact)
    low_sum = sum(lo for lo, _ in bounds)
    high_sum = sum(hi for _, hi in bounds)
    report = ExperimentReport(
        "survival",
        {**_instance_params(inst), "ell": ell, "degree_cap": cap, "trials": trials, "seed": seed},
    )
    report.measurements = {
        "p0_hat": n0 / trials if trials else None,
        "p0_ci": wilson(n0, trials),
        "p1_hat": n1 / trials if trials else None,
        "p1_ci": wilson(n1, trials),
        "p0_exact": exact_p0,
        "p1_exact": exact_p1,
        "expected_list_size": expectation,
        "mean_list_size": size_sum / trials if trials else None,
    }
    target = delta**-3 / 8 if delta else None
    report.bounds = {"asymptotic_p0": target, "asymptotic_p1": target, "sum_lower": low_sum, "sum_upper": high_sum}

    within_ci = True
    for x in range(k):
        lo, hi = wilson(hits[x], trials)
        within_ci &= lo - EXACT_TOL <= exact[x] <= hi + EXACT_TOL
        report.rows.append(
            {
                "x": x,
                "tilde_n": len(tilde_n(inst, x)),
                "exact": exact[x],
                "enumerated": enumerated[x],
                "lower": bounds[x][0],
                "upper": bounds[x][1],
                "empirical": hits[x] / trials if trials else None,
                "ci_low": lo,
                "ci_high": hi,
            }
        )

    if states is not None:
        gap = max(abs(a - b) for a, b in zip(exact, enumerated)) if k else 0.0
        report.verdicts.append(
            Verdict(
                "closed_form_matches_enumeration",
                "|prod_{v in N~(x)} (1 - 1/(|L_J(v)|+1)) - Pr_enum[x in L_I(u)]| <= 1e-12",
                gap <= EXACT_TOL,
                True,
                f"max gap {gap:.3e}",
            )
        )
    inside = all(lo - EXACT_TOL <= p <= hi + EXACT_TOL for p, (lo, hi) in zip(exact, bounds))
    report.verdicts.append(
        Verdict(
            "sandwich_per_slot",
            "exp(-sum 1/|L_J(v)|) <= Pr[x in L_I(u)] <= exp(-sum 1/(|L_J(v)|+1))",
            inside,
            True,
        )
    )
    report.verdicts.append(
        Verdict(
            "sandwich_expectation",
            "sum_x lower(x) <= E|L_I(u)| <= sum_x upper(x)",
            low_sum - EXACT_TOL <= expectation <= high_sum + EXACT_TOL,
            True,
            f"{low_sum:.6g} <= {expectation:.6g} <= {high_sum:.6g}",
        )
    )
    report.verdicts.append(
        Verdict("empirical_within_ci", "exact Pr[x in L_I(u)] inside the 99% Wilson interval", within_ci, False)
    )
    if target is not None:
        for name, hat, n_bad in (("p0", n0 / max(trials, 1), n0), ("p1", n1 / max(trials, 1), n1)):
            lo, _ = wilson(n_bad, trials)
            report.verdicts.append(
                Verdict(
                    f"asymptotic_{name}",
                    f"{name} <= max_degree^-3/8 (asymptotic; large max degree only)",
                    lo <= target,
                    False,
                    f"{name}_hat={hat:.6g} bound={target:.6g}",
                )
            )
    return report


def negcorr_experiment(
    c: Cover, u: int, seed: int, fixed: Mapping[int, int] | None = None, max_size: int = 4
) -> ExperimentReport:
    """Exact check that the events ``x not in L_I(u)`` are negatively correlated.

    For every set ``S`` of slots with ``2 <= |S| <= max_size`` the joint
    probability that all of ``S`` is blocked is compared with the product of
    the single-slot probabilities.  Both sides are ratios of state counts,
    so the comparison is done in integers and is exact.
    """
    inst = _instance(c, u, fixed, seed)
    states = enumerate_states(inst)
    total = len(states)
    k = c.sizes[u]
    absent = [absent_slots(inst, s) for s in states]
    single = [sum(x in a for a in absent) for x in range(k)]
    report = ExperimentReport("negcorr", {**_instance_params(inst), "states": total, "max_size": max_size, "seed": seed})
    failures = strict = checked = 0
    for size in range(2, max_size + 1):
        for subset in itertools.combinations(range(k), size):
            joint = sum(all(x in a for x in subset) for a in absent)
            lhs = joint * total ** (size - 1)
            rhs = math.prod(single[x] for x in subset)
            checked += 1
            failures += lhs > rhs
            strict += lhs < rhs
            report.rows.append(
                {
                    "S": " ".join(map(str, subset)),
                    "joint": joint / total,
                    "product": rhs / total**size,
                    "holds": lhs <= rhs,
                    "strict": lhs < rhs,
                }
            )
    report.measurements = {"subsets": checked, "strict": strict, "violations": failures}
    report.verdicts.append(
        Verdict(
            "negative_correlation",
            "Pr[S blocked] <= prod_{x in S} Pr[x blocked] for all |S| <= %d" % max_size,
            failures == 0,
            True,
            f"{checked} subsets, {strict} strict",
        )
    )
    return report


def chernoff_check(expectation: float, delta: float, side: str) -> float:
    """Tail bound for a sum of negatively correlated indicators.

    ``side="lower"``: ``Pr[X <= (1-delta) E] <= exp(-delta^2 E / 2)`` for
    ``0 < delta < 1``.  ``side="upper"``: ``Pr[X >= (1+delta) E] <=
    exp(-delta E / 3)`` for ``delta > 1``.
    """
    if expectation < 0:
        raise ValueError("expectation must be non-negative")
    if side == "lower":
        if not 0 < delta < 1:
            raise ValueError("lower tail needs 0 < delta < 1")
        return math.exp(-delta * delta * expectation / 2)
    if side == "upper":
        if not delta > 1:
            raise ValueError("upper tail needs delta > 1")
        return math.exp(-delta * expectation / 3)
    raise ValueError("side must be 'lower' or 'upper'")


def chernoff_experiment(
    c: Cover,
    u: int,
    delta: float,
    side: str,
    trials: int,
    seed: int,
    fixed: Mapping[int, int] | None = None,
) -> ExperimentReport:
    """Empirical tails against :func:`chernoff_check` on a star instance.

    Lower side: ``X = |L_I(u)|``, whose complementary indicators are
    negatively correlated.  Upper side: for each slot ``x``, ``X`` is its
    residual cross degree, a sum of independent blank indicators.
    """
    inst = _instance(c, u, fixed, seed)
    sampler = _require_star(inst)
    k = c.sizes[u]
    if side == "lower":
        targets = [("list_size", sum(survival_probability(inst, x) for x in range(k)), None)]
    else:
        targets = [
            (f"deg_{x}", sum(1 / (len(inst.lists[v]) + 1) for v in tilde_n(inst, x)), x) for x in range(k)
        ]
    bounds = [chernoff_check(e, delta, side) for _, e, _ in targets]
    tails = [0] * len(targets)
    rng = random.Random(derive_seed(seed, "chernoff"))
    for _ in range(trials):
        s = sampler.sample(rng)
        if side == "lower":
            value = k - len(absent_slots(inst, s))
            tails[0] += value <= (1 - delta) * targets[0][1] + EXACT_TOL
        else:
            for t, (_, e, x) in enumerate(targets):
                tails[t] += residual_degree(inst, s, x) >= (1 + delta) * e - EXACT_TOL
    states = _states_or_none(inst)
    report = ExperimentReport(
        "chernoff", {**_instance_params(inst), "delta": delta, "side": side, "trials": trials, "seed": seed}
    )
    ok = exact_ok = True
    for t, (name, e, x) in enumerate(targets):
        freq = tails[t] / trials if trials else 0.0
        b = min(bounds[t], 1.0)
        sigma = math.sqrt(b * (1 - b) / trials) if trials else 1.0
        lo, hi = wilson(tails[t], trials)
        exact_tail = None
        if states is not None:
            if side == "lower":
                hits = sum(k - len(absent_slots(inst, s)) <= (1 - delta) * e + EXACT_TOL for s in states)
            else:
                hits = sum(residual_degree(inst, s, x) >= (1 + delta) * e - EXACT_TOL for s in states)
            exact_tail = hits / len(states)
            exact_ok &= exact_tail <= bounds[t] + EXACT_TOL
        ok &= freq <= bounds[t] + 3 * sigma
        report.rows.append(
            {
                "target": name,
                "expectation": e,
                "bound": bounds[t],
                "empirical_tail": freq,
                "ci_low": lo,
                "ci_high": hi,
                "exact_tail": exact_tail,
            }
        )
    ineq = "Pr[X <= (1-d)E] <= exp(-d^2 E/2)" if side == "lower" else "Pr[X >= (1+d)E] <= exp(-d E/3)"
    report.verdicts.append(Verdict("empirical_tail", ineq + " + 3 sigma", ok, False))
    if states is not None:
        report.verdicts.append(Verdict("exact_tail", ineq, exact_ok, True))
    return report


def _shearer_sample(r: int, n_max: int, seed: int) -> Graph:
    rng = random.Random(seed)
    n = rng.randint(2, n_max)
    return random_kr_free(n, rng.uniform(0, n - 1), r, derive_seed(seed, "graph"))


def shearer_experiment(r: int, n_max: int, samples: int, seed: int, strict: bool = True) -> ExperimentReport:
    """Median independent-set size against ``f(ind)`` on random K_r-free graphs.

    Samples with ``ind(F) <= 2`` are skipped (``f`` is undefined there).
    With ``strict`` a failing sample raises :class:`BoundViolated`.
    """
    if r < 4:
        raise ValueError("r must be at least 4")
    report = ExperimentReport("shearer", {"r": r, "n_max": n_max, "samples": samples, "seed": seed})
    failures = skipped = 0
    for i in range(samples):
        f = _shearer_sample(r, n_max, derive_seed(seed, "shearer", i))
        ind = ind_count(f)
        if ind <= 2:
            skipped += 1
            continue
        med = median_alpha(f)
        bound = f_lambda(ind, r)
        holds = med >= bound
        failures += not holds
        report.rows.append(
            {"sample": i, "n": f.n, "edges": f.num_edges, "ind": ind, "median_alpha": med, "f": bound, "holds": holds}
        )
    report.measurements = {"checked": len(report.rows), "skipped": skipped, "failures": failures}
    report.verdicts.append(
        Verdict("shearer", "median_alpha(F) >= f(ind(F)) for ind(F) > 2", failures == 0, True, f"{failures} failures")
    )
    if strict and failures:
        raise BoundViolated(report)
    return report


def factorial_bound_experiment(
    c: Cover,
    u: int,
    ell: float,
    trials: int,
    seed: int,
    fixed: Mapping[int, int] | None = None,
    threshold: int | None = None,
) -> ExperimentReport:
    """Chance that ``ceil(ell)`` chosen neighbours stay blank with long residual lists.

    The neighbours are the lowest-indexed ones whose residual list has at
    least ``ell`` slots; draws come from the layered procedure started at an
    exactly uniform state when the instance is enumerable, Glauber otherwise.
    """
    inst = _instance(c, u, fixed, seed)
    m = math.ceil(ell - 1e-12)
    bound = 1 / math.factorial(m)
    chosen = [v for v in inst.neighbors if len(inst.lists[v]) >= ell][:m]
    report = ExperimentReport(
        "factorial", {**_instance_params(inst), "ell": ell, "trials": trials, "seed": seed, "chosen": chosen}
    )
    report.bounds = {"factorial": bound}
    if len(chosen) < m:
        report.measurements = {"applicable": False}
        report.verdicts.append(
            Verdict("factorial", f"not applicable: fewer than {m} neighbours with |L_J(v)| >= ell", True, False)
        )
        return report
    layered = LayeredSampler(inst, threshold)
    states = _states_or_none(inst)
    rng = random.Random(derive_seed(seed, "factorial"))
    picks_outside = dict(inst.fixed)

    def event(sample: Mapping[int, int]) -> bool:
        if any(v in sample for v in chosen):
            return False
        picks = {**picks_outside, **sample}
        for v in chosen:
            alive = sum(
                1 for j in range(c.sizes[v]) if not any(picks.get(w) == jj for w, jj in c.partners[v][j])
            )
            if alive < ell:
                return False
        return True

    hits = 0
    for _ in range(trials):
        if states is not None:
            start = dict(states[rng.randrange(len(states))])
        else:
            start = neighborhood_glauber(inst, rng)
        sample, _ = layered.run(start, rng)
        hits += event(sample)
    freq = hits / trials if trials else 0.0
    sigma = math.sqrt(bound * (1 - bound) / trials) if trials else 1.0
    exact = sum(map(event, states)) / len(states) if states is not None else None
    report.measurements = {
        "applicable": True,
        "empirical": freq,
        "ci": wilson(hits, trials),
        "exact": exact,
    }
    report.verdicts.append(
        Verdict(
            "factorial",
            "Pr[chosen neighbours blank with |L_I(v)| >= ell] <= 1/ceil(ell)! (+ 3 sigma)",
            freq <= bound + 3 * sigma and (exact is None or exact <= bound + EXACT_TOL),
            False,
            f"empirical={freq:.6g} exact={exact} bound={bound:.6g}",
        )
    )
    return report


# --- sweep ----------------------------------------------------------------------

SWEEP_FAMILIES = ("random_triangle_free", "random_bipartite")
SWEEP_COLUMNS = ("family", "n", "delta", "m", "k", "ell", "trials", "successes", "mean_rounds")


def sweep_graph(family: str, n: int, d: float, seed: int) -> Graph:
    """The sweep's graph for target average degree ``d``."""
    if family == "random_triangle_free":
        return generate(family, n=n, d=d, seed=seed)
    if family == "random_bipartite":
        half = n // 2
        return generate(family, n=half, m=n - half, p=min(1.0, d / max(half, 1)), seed=seed)
    raise ValueError(f"sweep family must be one of {', '.join(SWEEP_FAMILIES)}")


def sweep_k(delta: int, m: float) -> int:
    """``ceil(m * delta / ln delta)``, or ``delta + 1`` when ``ln delta <= 0``."""
    if delta < 2:
        return delta + 1
    return max(1, math.ceil(m * delta / math.log(delta) - 1e-9))


def _sweep_trial(job: tuple) -> tuple[bool, int]:
    g, eps, k, seed, max_rounds = job
    report = color_triangle_free(g, eps, seed, k=k, max_rounds=max_rounds)
    return report.success, report.rounds


def sweep(
    family: str,
    degrees: Iterable[float],
    multipliers: Iterable[float],
    trials: int,
    seed: int,
    n: int = 200,
    eps: float = 0.5,
    max_rounds: int | None = None,
    threads: int = 1,
) -> list[dict[str, Any]]:
    """Success counts of the triangle-free pipeline across list sizes.

    One graph per target degree (seeded from ``seed``); each trial draws a
    fresh cover and run seed.  ``delta`` in the output is the realised
    maximum degree.  Results do not depend on ``threads``.
    """
    degrees, multipliers = list(degrees), list(multipliers)
    cells = []
    jobs = []
    for d in degrees:
        g = sweep_graph(family, n, d, derive_seed(seed, "graph", family, str(d)))
        delta = g.max_degree
        ell = params_triangle_free(delta, eps)[1] if delta >= 2 else 1
        for m in multipliers:
            k = sweep_k(delta, m)
            cells.append((g, delta, m, k, ell))
            for t in range(trials):
                jobs.append((g, eps, k, derive_seed(seed, "trial", str(d), str(m), t), max_rounds))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_sweep_trial, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        results = [_sweep_trial(job) for job in jobs]
    rows = []
    for idx, (g, delta, m, k, ell) in enumerate(cells):
        chunk = results[idx * trials : (idx + 1) * trials]
        successes = sum(ok for ok, _ in chunk)
        rounds = sum(r for _, r in chunk)
        rows.append(
            {
                "family": family,
                "n": g.n,
                "delta": delta,
                "m": m,
                "k": k,
                "ell": ell,
                "trials": trials,
                "successes": successes,
                "mean_rounds": f"{rounds / trials:.4f}" if trials else "nan",
            }
        )
    return rows


def sweep_csv(rows: Sequence[Mapping[str, Any]]) -> str:
    return rows_to_csv(rows) if rows else ",".join(SWEEP_COLUMNS) + "\n"
