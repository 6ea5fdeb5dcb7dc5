"""
Tests for Serre graph structure, cores, Betti numbers and isomorphism.
"""

import random

import networkx as nx
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from app.analyzers.graph_core import (
    GraphIsomorphism,
    SerreGraph,
    betti,
    components,
    core,
    degree,
    edges,
    enumerate_reduced_paths,
    from_edges,
    ident_key,
    is_isomorphism,
    is_tree,
    isomorphism,
    refinement_signature,
    relabel,
    require_connected,
    sorted_ids,
    validate,
)
from app.core.config import settings as app_settings
from app.core.errors import (
    DisconnectedGraphError,
    EmptyGraphError,
    GraphTooLargeError,
    UnknownVertexError,
)
from app.services.sampling import enumerate_connected_graphs, random_connected_graph


def to_networkx(g: SerreGraph) -> nx.MultiGraph:
    h = nx.MultiGraph()
    h.add_nodes_from(g.vertices)
    for d, r in edges(g):
        h.add_edge(g.endpoint[d], g.endpoint[r])
    return h


class TestIdentifiers:
    """Natural ordering of identifiers."""

    def test_numbers_sort_numerically(self):
        assert sorted_ids(["v10", "v2", "v1"]) == ["v1", "v2", "v10"]

    def test_plus_dart_sorts_before_minus(self):
        assert ident_key("e1+") < ident_key("e1-")


class TestValidate:
    """Structural invariants are reported, never raised."""

    def test_well_formed_triangle(self, triangle: SerreGraph):
        assert validate(triangle) == []

    def test_empty_graph(self):
        assert "graph has no vertices" in validate(SerreGraph({}, {}, {}))

    def test_dart_without_reverse(self):
        g = SerreGraph({"a": None}, {}, {"d": "a"})
        problems = validate(g)
        assert "dart d: no reverse" in problems
        assert any("odd number of darts" in p for p in problems)

    def test_reverse_fixed_point(self):
        g = SerreGraph({"a": None}, {"d": "d"}, {"d": "a"})
        assert "dart d: reverse is the dart itself" in validate(g)

    def test_reverse_not_involution(self):
        g = SerreGraph({"a": None}, {"d": "e", "e": "f", "f": "e"}, {"d": "a", "e": "a", "f": "a"})
        assert "dart d: reverse of reverse is not d" in validate(g)

    def test_dangling_endpoint(self):
        g = from_edges(["a"], [("1", "a", "z")])
        assert "dart 1-: endpoint z is not a vertex" in validate(g)


class TestDegreeAndBetti:
    def test_loop_counts_twice(self, single_loop: SerreGraph):
        assert degree(single_loop, "o") == 2

    def test_unknown_vertex(self, triangle: SerreGraph):
        with pytest.raises(UnknownVertexError):
            degree(triangle, "zz")

    def test_betti_numbers(self, triangle: SerreGraph, path3: SerreGraph, theta: SerreGraph, figure_eight: SerreGraph):
        assert betti(triangle) == 1
        assert betti(path3) == 0
        assert betti(theta) == 2
        assert betti(figure_eight) == 2

    def test_betti_counts_components(self):
        g = from_edges(["a", "b"], [])
        assert betti(g) == 0
        assert components(g) == [["a"], ["b"]]

    def test_require_connected(self):
        with pytest.raises(EmptyGraphError):
            require_connected(SerreGraph({}, {}, {}))
        with pytest.raises(DisconnectedGraphError):
            require_connected(from_edges(["a", "b"], []))


class TestCore:
    def test_tree_has_empty_core(self, path3: SerreGraph, single_vertex: SerreGraph):
        assert core(path3) is None
        assert core(single_vertex) is None
        assert is_tree(single_vertex)

    def test_pendant_is_removed(self, triangle_with_pendant: SerreGraph, triangle: SerreGraph):
        c = core(triangle_with_pendant)
        assert c is not None
        assert set(c.vertices) == {"a", "b", "c"}
        assert c == triangle

    def test_core_of_core_is_itself(self, triangle_with_pendant: SerreGraph):
        c = core(triangle_with_pendant)
        assert c is not None
        assert core(c) == c

    def test_loop_survives(self):
        g = from_edges(["a", "b"], [("1", "a", "a"), ("2", "a", "b")])
        c = core(g)
        assert c is not None
        assert set(c.vertices) == {"a"}
        assert c.edge_count == 1

    def test_disconnected_input_rejected(self):
        with pytest.raises(DisconnectedGraphError):
            core(from_edges(["a", "b"], []))

    def test_random_order_gives_same_core(self):
        rng = random.Random(7)
        for _ in range(20):
            g = random_connected_graph(rng)
            expected = core(g)
            for seed in range(5):
                assert core(g, rng=random.Random(seed)) == expected

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=100, deadline=None)
    def test_core_keeps_betti_number(self, seed: int):
        g = random_connected_graph(random.Random(seed))
        assume(not is_tree(g))
        c = core(g)
        assert c is not None
        assert betti(c) == betti(g)
        assert all(degree(c, v) >= 2 for v in c.vertices)


@pytest.fixture(scope="module")
def small_graphs() -> list[SerreGraph]:
    return enumerate_connected_graphs(6)


class TestReducedPaths:
    def test_limit_stops_the_search(self, single_loop: SerreGraph):
        assert len(enumerate_reduced_paths(single_loop, "o", "o", 6, limit=2)) == 2

    @pytest.mark.slow
    def test_trees_are_the_graphs_with_unique_reduced_paths(self, small_graphs: list[SerreGraph]):
        assert any(is_tree(g) for g in small_graphs)
        assert not all(is_tree(g) for g in small_graphs)
        for g in small_graphs:
            vertices = g.vertex_ids
            # closed paths first: a vertex on a cycle fails fastest
            pairs = [(v, v) for v in vertices] + [(u, v) for u in vertices for v in vertices if u != v]
            unique = all(
                len(enumerate_reduced_paths(g, u, v, g.edge_count, limit=2)) == 1 for u, v in pairs
            )
            assert unique == is_tree(g), f"{sorted(g.endpoint.items())}"

    def test_triangle_paths(self, triangle: SerreGraph):
        paths = enumerate_reduced_paths(triangle, "a", "a", 3)
        assert () in paths
        # both orientations of the cycle
        assert len([p for p in paths if len(p) == 3]) == 2

    def test_no_backtracking(self, path3: SerreGraph):
        assert enumerate_reduced_paths(path3, "a", "a", 4) == [()]

    def test_loop_paths(self, single_loop: SerreGraph):
        paths = enumerate_reduced_paths(single_loop, "o", "o", 2)
        assert ("1+",) in paths and ("1-",) in paths
        assert ("1+", "1+") in paths
        assert ("1+", "1-") not in paths


class TestIsomorphism:
    def test_identity_on_itself(self, triangle: SerreGraph):
        phi = isomorphism(triangle, triangle)
        assert phi is not None
        assert phi.is_identity()

    def test_square_to_relabelled_square(self, square: SerreGraph):
        other = from_edges(["p", "q", "r", "s"], [("9", "p", "r"), ("8", "r", "q"), ("7", "q", "s"), ("6", "s", "p")])
        phi = isomorphism(square, other)
        assert phi is not None
        assert is_isomorphism(square, other, phi)

    def test_theta_and_figure_eight_differ(self, theta: SerreGraph, figure_eight: SerreGraph):
        assert isomorphism(theta, figure_eight) is None

    def test_loop_versus_parallel_edges(self):
        g1 = from_edges(["a", "b"], [("1", "a", "a"), ("2", "a", "b")])
        g2 = from_edges(["a", "b"], [("1", "a", "b"), ("2", "a", "b")])
        assert isomorphism(g1, g2) is None

    def test_inverse_is_isomorphism_back(self, square: SerreGraph):
        other = relabel(square, GraphIsomorphism(
            vertices={"w": "z", "x": "w", "y": "x", "z": "y"},
            darts={d: d for d in square.darts},
        ))
        phi = isomorphism(square, other)
        assert phi is not None
        assert is_isomorphism(other, square, phi.inverse())

    def test_wrong_mapping_rejected(self, triangle: SerreGraph):
        bad = GraphIsomorphism(vertices={"a": "a", "b": "b", "c": "c"}, darts={d: d for d in triangle.darts} | {"1+": "2+", "2+": "1+"})
        assert not is_isomorphism(triangle, triangle, bad)

    def test_size_limit(self, monkeypatch: pytest.MonkeyPatch):
        monkeypatch.setattr(app_settings, "ISOMORPHISM_MAX_VERTICES", 3)
        g = from_edges(["a", "b", "c", "d"], [("1", "a", "b"), ("2", "b", "c"), ("3", "c", "d")])
        with pytest.raises(GraphTooLargeError):
            isomorphism(g, g)

    def test_signature_equal_on_relabelled(self, triangle_with_pendant: SerreGraph):
        other = from_edges(
            ["x", "y", "z", "w"],
            [("5", "w", "x"), ("6", "x", "y"), ("7", "y", "w"), ("8", "y", "z")],
        )
        assert refinement_signature(triangle_with_pendant) == refinement_signature(other)


@st.composite
def graph_pairs(draw):
    """Two random connected graphs of similar size, drawn from a seed."""
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = random.Random(seed)
    return random_connected_graph(rng, max_vertices=7, max_extra_edges=3), random_connected_graph(
        rng, max_vertices=7, max_extra_edges=3
    )


class TestIsomorphismAgainstNetworkx:
    """networkx serves as an independent oracle on multigraphs with loops."""

    @given(graph_pairs())
    @settings(max_examples=150, deadline=None)
    def test_agrees_with_networkx(self, pair):
        g1, g2 = pair
        ours = isomorphism(g1, g2)
        assert (ours is not None) == nx.is_isomorphic(to_networkx(g1), to_networkx(g2))
        if ours is not None:
            assert is_isomorphism(g1, g2, ours)

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=100, deadline=None)
    def test_finds_random_relabelling(self, seed):
        rng = random.Random(seed)
        g = random_connected_graph(rng, max_vertices=9)
        names = [f"n{i}" for i in range(g.vertex_count)]
        rng.shuffle(names)
        vmap = dict(zip(g.vertex_ids, names, strict=True))
        h = relabel(g, GraphIsomorphism(vertices=vmap, darts={d: f"x{d}" for d in g.darts}))
        phi = isomorphism(g, h)
        assert phi is not None
        assert is_isomorphism(g, h, phi)
