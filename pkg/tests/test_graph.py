import io
import random

import pytest

import oracles
from dpcolor.graph import (
    BudgetExceeded,
    Graph,
    GraphFormatError,
    ball,
    complete,
    complete_multipartite,
    cycle,
    empty,
    find_clique,
    generate,
    gnp,
    is_connected,
    is_kr_free,
    is_triangle_free,
    parse_graph,
    path,
    petersen,
    random_bipartite,
    random_kr_free,
    random_triangle_free,
)


def _check_simple(g: Graph):
    for u in range(g.n):
        assert u not in g.adj[u]
        for v in g.adj[u]:
            assert u in g.adj[v]
    assert g.max_degree == max((len(a) for a in g.adj), default=0)


class TestParse:
    def test_c4(self):
        g = parse_graph("p 4 4\ne 0 1\ne 1 2\ne 2 3\ne 3 0\n")
        assert g.n == 4 and g.num_edges == 4 and g.max_degree == 2
        assert sorted(g.edges()) == [(0, 1), (0, 3), (1, 2), (2, 3)]

    def test_single_edge(self):
        g = parse_graph("p 2 1\ne 0 1")
        assert g.n == 2 and list(g.edges()) == [(0, 1)]

    def test_duplicates_collapse(self):
        g = parse_graph("p 3 2\ne 0 1\ne 0 1\n")
        assert g.n == 3 and g.num_edges == 1 and g.degree(2) == 0

    def test_comments_and_blank_lines(self):
        g = parse_graph("# a comment\n\np 3 1\n# another\ne 2 0\n")
        assert g.has_edge(0, 2)

    def test_file_object(self):
        assert parse_graph(io.StringIO("p 2 1\ne 1 0\n")).num_edges == 1

    @pytest.mark.parametrize(
        "text, line",
        [
            ("p 3 1\ne 0 0\n", 2),  # self-loop
            ("p 3 1\ne 0 3\n", 2),  # out of range
            ("p 3 1\ne 0\n", 2),  # malformed
            ("p 3 1\nx 0 1\n", 2),  # unknown record
            ("p 3 1\ne 0 a\n", 2),  # not an integer
            ("e 0 1\n", 1),  # edge before header
        ],
    )
    def test_errors_carry_line_numbers(self, text, line):
        with pytest.raises(GraphFormatError) as info:
            parse_graph(text)
        assert info.value.line == line
        assert f"line {line}" in str(info.value)

    def test_missing_header(self):
        with pytest.raises(GraphFormatError):
            parse_graph("# nothing\n")

    def test_edge_count_mismatch(self):
        with pytest.raises(GraphFormatError):
            parse_graph("p 3 2\ne 0 1\n")

    def test_round_trip(self):
        g = random_triangle_free(40, 5, seed=3)
        assert parse_graph(g.to_text()) == g


class TestBall:
    def test_radius_zero(self):
        assert ball(cycle(8), 0, 0) == {0}

    def test_radius_two(self):
        assert ball(cycle(8), 0, 2) == {6, 7, 0, 1, 2}

    def test_radius_three_misses_antipode(self):
        b = ball(cycle(8), 0, 3)
        assert len(b) == 7 and 4 not in b

    def test_closed_neighbourhood(self):
        g = petersen()
        assert ball(g, 3, 1) == set(g.adj[3]) | {3}

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            ball(cycle(4), 4, 1)
        with pytest.raises(ValueError):
            ball(cycle(4), 0, -1)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_bfs_oracle(self, seed):
        g = gnp(30, 0.1, random.Random(seed))
        for u in range(0, 30, 7):
            for d in range(4):
                assert ball(g, u, d) == oracles.ball(g, u, d)


class TestPredicates:
    def test_triangle_free_small(self):
        assert is_triangle_free(cycle(4))
        assert not is_triangle_free(complete(3))
        assert is_triangle_free(petersen())

    def test_kr_free(self):
        assert not is_kr_free(complete(4), 4)
        assert is_kr_free(cycle(5), 3)
        assert is_kr_free(complete_multipartite(2, 2, 2), 4)
        assert not is_kr_free(complete_multipartite(2, 2, 2), 3)

    def test_r_guard(self):
        with pytest.raises(ValueError):
            is_kr_free(cycle(4), 1)

    def test_r_two_means_edgeless(self):
        assert is_kr_free(empty(3), 2)
        assert not is_kr_free(path(2), 2)

    def test_clique_witness(self):
        g = complete_multipartite(1, 1, 1, 1, 2)
        clique = find_clique(g, 5)
        assert clique is not None and len(clique) == 5
        assert all(g.has_edge(a, b) for i, a in enumerate(clique) for b in clique[i + 1 :])

    def test_clique_budget(self):
        with pytest.raises(BudgetExceeded):
            find_clique(complete_multipartite(3, 3, 3, 3, 3), 6, max_nodes=10)

    @pytest.mark.parametrize("seed", range(8))
    def test_kr_free_matches_networkx(self, seed):
        g = gnp(14, 0.5, random.Random(seed))
        for r in (3, 4, 5):
            assert is_kr_free(g, r) == (not oracles.has_clique(g, r))
        assert is_triangle_free(g) == is_kr_free(g, 3)

    def test_connected(self):
        assert is_connected(cycle(5))
        assert not is_connected(empty(2))


class TestGenerators:
    def test_cycle_and_complete(self):
        c5 = generate("cycle", n=5)
        assert c5.max_degree == 2 and is_triangle_free(c5) and c5.num_edges == 5
        k4 = generate("complete", n=4)
        assert k4.max_degree == 3 and k4.num_edges == 6

    def test_bipartite_parts(self):
        g = random_bipartite(5, 6, 0.7, seed=2)
        assert g.n == 11
        assert all((u < 5) != (v < 5) for u, v in g.edges())

    def test_random_triangle_free(self):
        g = generate("random_triangle_free", n=100, d=10, seed=1)
        assert g.n == 100 and is_triangle_free(g)
        _check_simple(g)

    def test_random_kr_free(self):
        g = random_kr_free(60, 20, 4, seed=5)
        assert is_kr_free(g, 4) and not oracles.has_clique(g, 4)

    def test_deterministic(self):
        assert random_triangle_free(80, 8, seed=9) == random_triangle_free(80, 8, seed=9)
        assert random_triangle_free(80, 8, seed=9) != random_triangle_free(80, 8, seed=10)

    @pytest.mark.parametrize(
        "family, params",
        [
            ("cycle", {"n": 2}),
            ("complete", {"n": 0}),
            ("random_bipartite", {"n": 3, "m": 3, "p": 1.5}),
            ("random_triangle_free", {"n": 10, "d": -1}),
            ("nope", {}),
        ],
    )
    def test_invalid(self, family, params):
        with pytest.raises(ValueError):
            generate(family, **params)

    def test_ball_size_bound(self):
        g = random_triangle_free(120, 6, seed=4)
        delta = g.max_degree
        for u in range(0, 120, 11):
            sizes = [len(ball(g, u, d)) for d in range(4)]
            assert sizes == sorted(sizes)
            assert sizes[3] <= delta**3 + delta**2 + delta + 1
