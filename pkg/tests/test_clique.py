import itertools

import numpy as np
import pytest

from growthdyn import (
    DimensionError,
    GraphParseError,
    GraphSpec,
    LinearFitness,
    ParameterError,
    PositivityError,
    SizeError,
    brute_force_clique_number,
    discrete_growth_step,
    discrete_iterate,
    motzkin_straus_clique,
    parse_graph_text,
)


def complete_graph(n: int) -> GraphSpec:
    return GraphSpec(n, tuple((u, v) for u in range(n) for v in range(u + 1, n)))


def cycle_graph(n: int) -> GraphSpec:
    return GraphSpec(n, tuple((i, (i + 1) % n) for i in range(n)))


def random_graph(rng: np.random.Generator, n: int, p: float) -> GraphSpec:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.uniform() < p]
    return GraphSpec(n, tuple(edges))


class TestGraphSpec:
    def test_edges_are_deduplicated_and_normalized(self):
        g = GraphSpec(3, ((1, 0), (0, 1), (2, 1)))
        assert g.edges == ((0, 1), (1, 2))
        assert g.m == 2

    def test_adjacency_is_symmetric_zero_diagonal(self):
        g = cycle_graph(5)
        a = g.adjacency()
        np.testing.assert_array_equal(a, a.T)
        np.testing.assert_array_equal(np.diag(a), np.zeros(5))
        assert a.sum() == 2 * g.m

    def test_rejects_out_of_range_self_loops_and_empty_vertex_set(self):
        with pytest.raises(DimensionError):
            GraphSpec(2, ((0, 2),))
        with pytest.raises(DimensionError):
            GraphSpec(2, ((1, 1),))
        with pytest.raises(DimensionError):
            GraphSpec(0, ())


class TestParser:
    def test_header_comments_and_blank_lines(self):
        text = "# a triangle\nc written by hand\np 4 3\n\n0 1\n1 2\n0 2\n"
        g = parse_graph_text(text)
        assert g.n == 4
        assert g.edges == ((0, 1), (0, 2), (1, 2))

    def test_vertex_count_inferred_without_header(self):
        g = parse_graph_text("0 1\n1 4\n")
        assert g.n == 5

    def test_malformed_line_reports_its_number(self):
        with pytest.raises(GraphParseError, match="line 3"):
            parse_graph_text("0 1\n1 2\na b c\n")

    def test_non_integer_ids_rejected(self):
        with pytest.raises(GraphParseError, match="line 1"):
            parse_graph_text("x y\n")

    def test_negative_ids_rejected(self):
        with pytest.raises(GraphParseError, match="line 2"):
            parse_graph_text("0 1\n-1 2\n")

    def test_self_loop_rejected(self):
        with pytest.raises(GraphParseError, match="self-loop"):
            parse_graph_text("2 2\n")

    def test_duplicate_header_rejected(self):
        with pytest.raises(GraphParseError, match="duplicate header"):
            parse_graph_text("p 3 1\np 3 1\n0 1\n")

    def test_header_must_have_integer_fields(self):
        with pytest.raises(GraphParseError, match="line 1"):
            parse_graph_text("p three 1\n0 1\n")

    def test_endpoint_beyond_declared_count_rejected(self):
        with pytest.raises(GraphParseError, match="exceeds"):
            parse_graph_text("p 3 1\n0 5\n")

    def test_empty_input_without_header_rejected(self):
        with pytest.raises(GraphParseError, match="cannot infer"):
            parse_graph_text("# nothing here\n")

    def test_header_alone_gives_an_edgeless_graph(self):
        g = parse_graph_text("p 4 0\n")
        assert g.n == 4 and g.m == 0


class TestBruteForce:
    def test_matches_exhaustive_subset_search_on_random_graphs(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            n = int(rng.integers(1, 8))
            g = random_graph(rng, n, float(rng.uniform(0.2, 0.9)))
            masks = g.neighbor_masks()
            best = 0
            for k in range(1, n + 1):
                for combo in itertools.combinations(range(n), k):
                    if all((masks[u] >> v) & 1 for u, v in itertools.combinations(combo, 2)):
                        best = max(best, k)
            assert brute_force_clique_number(g) == best

    def test_known_sizes(self):
        assert brute_force_clique_number(complete_graph(6)) == 6
        assert brute_force_clique_number(cycle_graph(5)) == 2
        assert brute_force_clique_number(GraphSpec(4, ())) == 1

    def test_large_graphs_rejected(self):
        with pytest.raises(SizeError):
            brute_force_clique_number(GraphSpec(21, ()))


class TestMotzkinStraus:
    def test_triangle(self):
        rep = motzkin_straus_clique(complete_graph(3))
        assert rep.omega == 3
        assert rep.value == pytest.approx(2.0 / 3.0, abs=1e-6)
        assert rep.clique == [0, 1, 2]
        np.testing.assert_allclose(rep.best_point, np.full(3, 1 / 3), atol=1e-6)

    def test_complete_graph_on_five(self):
        rep = motzkin_straus_clique(complete_graph(5))
        assert rep.omega == 5
        assert rep.value == pytest.approx(0.8, abs=1e-6)
        assert rep.clique == [0, 1, 2, 3, 4]

    def test_five_cycle(self):
        rep = motzkin_straus_clique(cycle_graph(5))
        assert rep.omega == 2
        assert rep.value == pytest.approx(0.5, abs=1e-6)
        assert len(rep.clique) == 2

    def test_path_on_three_vertices(self):
        rep = motzkin_straus_clique(GraphSpec(3, ((0, 1), (1, 2))))
        assert rep.omega == 2
        assert rep.value == pytest.approx(0.5, abs=1e-6)

    def test_edgeless_graph(self):
        rep = motzkin_straus_clique(GraphSpec(4, ()))
        assert rep.omega == 1
        assert rep.value == pytest.approx(0.0, abs=1e-12)
        assert len(rep.clique) == 1

    def test_petersen_graph_is_triangle_free(self):
        edges = []
        for i in range(5):
            edges.append((i, (i + 1) % 5))
            edges.append((i, i + 5))
            edges.append((5 + i, 5 + (i + 2) % 5))
        rep = motzkin_straus_clique(GraphSpec(10, tuple(edges)))
        assert rep.omega == 2
        assert rep.value == pytest.approx(0.5, abs=1e-4)

    def test_single_vertex_shortcut(self):
        rep = motzkin_straus_clique(GraphSpec(1, ()))
        assert rep.omega == 1 and rep.value == 0.0 and rep.clique == [0]
        assert rep.iterations == 0

    def test_returned_clique_is_a_clique_of_the_reported_size(self):
        rng = np.random.default_rng(29)
        for _ in range(20):
            n = int(rng.integers(2, 8))
            g = random_graph(rng, n, float(rng.uniform(0.3, 0.9)))
            rep = motzkin_straus_clique(g, restarts=50)
            masks = g.neighbor_masks()
            for u, v in itertools.combinations(rep.clique, 2):
                assert (masks[u] >> v) & 1
            assert rep.omega == brute_force_clique_number(g)
            assert len(rep.clique) == rep.omega

    def test_same_seed_reproduces_the_report(self):
        g = cycle_graph(7)
        a = motzkin_straus_clique(g, restarts=10, seed=3)
        b = motzkin_straus_clique(g, restarts=10, seed=3)
        assert a.omega == b.omega and a.value == b.value and a.clique == b.clique
        np.testing.assert_array_equal(a.best_point, b.best_point)

    def test_zero_shift_on_edgeless_graph_raises(self):
        with pytest.raises(PositivityError):
            motzkin_straus_clique(GraphSpec(3, ()), lam=0.0)

    def test_parameter_validation(self):
        with pytest.raises(ParameterError):
            motzkin_straus_clique(complete_graph(3), restarts=0)
        with pytest.raises(ParameterError):
            motzkin_straus_clique(complete_graph(3), lam=-1.0)

    def test_batched_map_agrees_with_the_scalar_map(self):
        from growthdyn.clique import _batched_iterate
        g = cycle_graph(6)
        a = g.adjacency()
        model = LinearFitness(a)
        rng = np.random.default_rng(31)
        starts = rng.standard_exponential((4, 6))
        starts /= starts.sum(axis=1, keepdims=True)
        batch, _ = _batched_iterate(a, starts, 0.5, 1, conv_tol=0.0)
        for r in range(4):
            single = discrete_growth_step(model, 0.5, starts[r])
            np.testing.assert_allclose(batch[r], single, atol=1e-14)

    def test_objective_is_monotone_under_the_map(self):
        g = cycle_graph(7)
        traj = discrete_iterate(LinearFitness(g.adjacency()), 0.5, np.full(7, 1 / 7),
                                max_iters=300, conv_tol=1e-15)
        vals = traj.mean_fitness
        assert np.all(np.diff(vals) >= -1e-12)
