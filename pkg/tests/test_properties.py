"""Randomised properties (hypothesis) over small graphs and covers."""

import itertools
import random
from fractions import Fraction

from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

import oracles
from dpcolor.colorer import Phase1Config, _EventState, greedy_complete, lll_boundary, violated_events
from dpcolor.cover import cover_from_lists, is_coloring, parse_cover, random_cover, residual, validate
from dpcolor.exact import chi_dp, ind_count, median_alpha
from dpcolor.graph import Graph, is_kr_free, parse_graph
from dpcolor.harness import negcorr_experiment, survival_experiment
from dpcolor.sampler import NeighborhoodInstance, enumerate_states, f_lambda, star_probability

SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def graphs(draw, min_n=1, max_n=7):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [p for p, k in zip(pairs, keep) if k])


@st.composite
def covers(draw, max_n=6, max_k=3):
    g = draw(graphs(max_n=max_n))
    k = draw(st.integers(1, max_k))
    p = draw(st.sampled_from([0.0, 0.3, 0.7, 1.0]))
    return random_cover(g, k, draw(st.integers(0, 2**32)), mode="density", p=p)


@st.composite
def star_covers(draw):
    """Vertex 0 joined to 1..m, leaves joined to a few outer vertices; N(0) independent."""
    m = draw(st.integers(0, 4))
    outer = draw(st.integers(0, 3))
    edges = [(0, v) for v in range(1, m + 1)]
    for v in range(1, m + 1):
        for w in range(m + 1, m + 1 + outer):
            if draw(st.booleans()):
                edges.append((v, w))
    g = Graph.from_edges(m + 1 + outer, edges)
    k = draw(st.integers(1, 3))
    return random_cover(g, k, draw(st.integers(0, 2**32)), mode="density", p=draw(st.sampled_from([0.4, 0.8, 1.0])))


@SETTINGS
@given(graphs(max_n=9))
def test_graph_text_round_trip(g):
    assert parse_graph(g.to_text()) == g


@SETTINGS
@given(covers())
def test_random_covers_are_valid_and_round_trip(c):
    assert validate(c) == []
    assert parse_cover(c.to_text(), c.base) == c


@SETTINGS
@given(graphs(max_n=5), st.data())
def test_list_covers(g, data):
    lists = [data.draw(st.sets(st.integers(0, 3), min_size=1, max_size=3)) for _ in range(g.n)]
    c = cover_from_lists(g, lists)
    assert validate(c) == []
    via_cover = {tuple(c.labels[u][i] for u, i in sorted(p.items())) for p in oracles.cover_colorings(c)}
    direct = {
        f for f in itertools.product(*(sorted(s) for s in lists)) if all(f[u] != f[v] for u, v in g.edges())
    }
    assert via_cover == direct


@SETTINGS
@given(covers(max_n=5), st.data())
def test_residual_composition(c, data):
    picks_all = oracles.independent_picks(c, list(range(c.n)), [range(s) for s in c.sizes])
    picks = data.draw(st.sampled_from(picks_all))
    rc = residual(c, picks)
    assert validate(rc.cover) == []
    for t in itertools.product(*(range(s) for s in rc.cover.sizes)):
        sub = dict(enumerate(t))
        assert is_coloring(c, {**picks, **rc.lift(sub)}) == is_coloring(rc.cover, sub)


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=5))
def test_chi_dp_sandwich(g):
    kmax = min(g.max_degree + 1, 3)  # cover enumeration grows like (k!)^(cycle rank)
    value = chi_dp(g, kmax)
    if g.max_degree + 1 <= 3:
        assert value is not None and value <= g.max_degree + 1
    if value is not None:
        assert oracles.chromatic_number(g.n, list(g.edges())) <= value


@SETTINGS
@given(graphs(max_n=12))
def test_independent_set_counts(g):
    edges = list(g.edges())
    assert ind_count(g) == len(oracles.independent_sets(g.n, edges))
    assert median_alpha(g) == oracles.median_alpha_by_definition(g.n, edges)


@SETTINGS
@given(graphs(min_n=1, max_n=12))
def test_shearer_inequality(g):
    assume(is_kr_free(g, 4))
    lam = ind_count(g)
    assume(lam > 2)
    assert median_alpha(g) >= f_lambda(lam, 4)


@SETTINGS
@given(star_covers())
def test_star_closed_form(c):
    inst = NeighborhoodInstance.from_partial(c, 0)
    states = enumerate_states(inst, limit=10_000)
    for s in states:
        assert abs(star_probability(inst, s) - 1 / len(states)) < 1e-12
    picks = oracles.independent_picks(c, inst.neighbors, [inst.lists.get(v, ()) for v in range(c.n)])
    assert len(picks) == len(states)


@SETTINGS
@given(star_covers())
def test_survival_sandwich_and_negcorr(c):
    inst = NeighborhoodInstance.from_partial(c, 0)
    try:
        enumerate_states(inst)
    except ValueError:
        assume(False)
    report = survival_experiment(c, 0, 1, 20, 0, fixed={})
    assert report.passed
    assert negcorr_experiment(c, 0, 0, fixed={}).passed


@SETTINGS
@given(covers(max_n=7, max_k=4))
def test_greedy_with_delta_plus_one(c):
    assume(min(c.sizes, default=1) >= c.base.max_degree + 1)
    assert is_coloring(c, greedy_complete(c))


@given(st.integers(1, 10**6))
def test_lll_boundary_is_one(ell):
    p, d, product = lll_boundary(ell)
    assert product == 1 and p == Fraction(1, ell * ell)


def events_by_definition(c, picks, ell, cap, trim):
    """Uncoloured vertices whose residual list is short or holds a slot above the cap."""
    def free(u):
        return [i for i in range(c.sizes[u]) if not any(picks.get(v) == j for v, j in c.partners[u][i])]

    def live_degree(u, i):
        return sum(1 for v, j in c.partners[u][i] if v not in picks and j in free(v))

    out = []
    for u in range(c.n):
        if u in picks:
            continue
        slots = free(u)
        over = [i for i in slots if live_degree(u, i) > cap]
        bad = len(slots) - len(over) < ell if trim else len(slots) < ell or bool(over)
        if bad:
            out.append(u)
    return out


@SETTINGS
@given(covers(max_n=7, max_k=3), st.integers(1, 3), st.integers(0, 2), st.booleans(), st.integers(0, 10**6))
def test_event_bookkeeping_matches_fresh_evaluation(c, ell, cap, trim, seed):
    """Incremental event tracking agrees with a from-scratch evaluation after each change."""
    cfg = Phase1Config(ell=ell, degree_cap=cap, trim=trim)
    state = _EventState(c, cfg, {})
    rng = random.Random(seed)
    for _ in range(30):
        w = rng.randrange(c.n)
        state.set_pick(w, None)
        options = [None] + list(state.free_slots(w))
        state.set_pick(w, rng.choice(options))
        picks = state.coloring()
        assert sorted(state.violated) == violated_events(c, picks, cfg)
        assert violated_events(c, picks, cfg) == events_by_definition(c, picks, ell, cap, trim)
        for u in range(c.n):
            if u not in picks:
                free = tuple(
                    i for i in range(c.sizes[u]) if not any(picks.get(v) == j for v, j in c.partners[u][i])
                )
                assert state.free_slots(u) == free
