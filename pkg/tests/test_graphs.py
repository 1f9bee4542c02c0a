import pytest
from hypothesis import given, settings, strategies as st
from random import Random

from ttiwip.graphs import (
    EdgePath,
    Graph,
    GraphMap,
    induced_endomorphism,
    is_homotopy_equivalence,
    make_turn,
    parse_graph_map,
    print_graph_map,
    rose,
    rose_representative,
    turns_in_path,
)
from ttiwip.randmaps import random_rose_map
from ttiwip.words import Automorphism, Word


@pytest.fixture
def theta():
    """Two vertices joined by three edges."""
    return Graph(2, ((0, 1), (0, 1), (0, 1)))


class TestGraphBasics:
    def test_orientation(self, theta):
        assert theta.origin(1) == 0 and theta.terminus(1) == 1
        assert theta.origin(-1) == 1 and theta.terminus(-1) == 0

    def test_degree(self, theta):
        assert theta.degree(0) == 3
        assert rose(2).degree(0) == 4

    def test_betti(self, theta):
        assert theta.betti_number() == 2
        assert rose(4).betti_number() == 4

    def test_bad_endpoints(self):
        with pytest.raises(ValueError):
            Graph(1, ((0, 1),))

    def test_path_validation(self, theta):
        theta.path(0, (1, -2, 3))
        with pytest.raises(ValueError, match="concatenate"):
            theta.path(0, (1, 2))


class TestTighten:
    def test_backtrack(self, theta):
        p = theta.path(0, (1, -1))
        assert theta.tighten(p) == EdgePath(0, ())

    def test_tight_fixed(self, theta):
        p = theta.path(0, (1, -2, 3))
        assert theta.tighten(p) == p

    def test_inner_backtrack(self):
        g = rose(3)
        p = g.path(0, (1, 2, -2, 3))
        assert g.tighten(p).edges == (1, 3)

    @given(st.lists(st.integers(-3, 3).filter(lambda x: x != 0), max_size=20))
    def test_idempotent(self, edges):
        g = rose(3)
        p = EdgePath(0, tuple(edges))
        assert g.tighten(g.tighten(p)) == g.tighten(p)


class TestTurns:
    def test_single_edge(self):
        g = rose(2)
        assert turns_in_path(g.path(0, (1,))) == set()

    def test_two_letter_path(self):
        g = rose(2)
        assert turns_in_path(g.path(0, (1, 2))) == {make_turn(-1, 2)}

    def test_sphere5_d_image(self, sphere5_map):
        img = sphere5_map.image(4)  # d^-1 c^-1
        assert turns_in_path(img) == {make_turn(4, -3)}


class TestMapPath:
    def test_sphere5_no_cancellation(self, sphere5_map):
        p = sphere5_map.graph.path(0, (1, 2))  # a b
        assert sphere5_map.map_path(p).edges == (2, 3)  # b c

    def test_empty_path(self, sphere5_map):
        p = EdgePath(0, ())
        assert sphere5_map.map_path(p) == EdgePath(0, ())

    def test_cancellation_in_concatenation(self, non_tt_map):
        # images (ab)(a^-1) concatenate to a b a^-1, already tight
        p = non_tt_map.graph.path(0, (1, 2))
        assert non_tt_map.map_path(p).edges == (1, 2, -1)

    def test_matches_literal_concatenation(self, sphere5_map):
        g = sphere5_map.graph
        rng = Random(7)
        for _ in range(50):
            edges = []
            for _ in range(rng.randint(0, 8)):
                e = rng.choice([1, 2, 3, 4, -1, -2, -3, -4])
                if edges and edges[-1] == -e:
                    continue
                edges.append(e)
            p = g.path(0, edges)
            literal = []
            for e in p.edges:
                literal.extend(sphere5_map.image(e).edges)
            assert sphere5_map.map_path(p) == g.tighten(EdgePath(0, tuple(literal)))


class TestIterateEdge:
    def test_sphere5_first_iterate(self, sphere5_map):
        assert sphere5_map.iterate_edge(1, 1).path.edges == (2,)

    def test_sphere5_second_iterate_of_c(self, sphere5_map):
        # f(c) = d a^-1, then f(d a^-1) = (d^-1 c^-1)(b^-1)
        res = sphere5_map.iterate_edge(3, 2)
        assert res.path.edges == (-4, -3, -2)
        assert not res.truncated

    def test_permutation_period(self, swap_map):
        assert swap_map.iterate_edge(1, 2).path.edges == (1,)

    def test_truncation_flag(self, fib_map):
        res = fib_map.iterate_edge(1, 30, length_cap=100)
        assert res.truncated
        assert len(res.path) == 100

    def test_additivity(self, sphere5_map):
        # iterate m+n = n more applications of iterate m
        for e in (1, -3, 4):
            for m in range(1, 4):
                for n in range(1, 4):
                    whole = sphere5_map.iterate_edge(e, m + n).path
                    part = sphere5_map.iterate_edge(e, m).path
                    for _ in range(n):
                        part = sphere5_map.map_path(part)
                    assert whole == part


class TestDerivative:
    def test_sphere5_a(self, sphere5_map):
        assert sphere5_map.derivative(1) == 2

    def test_sphere5_c_inverse(self, sphere5_map):
        # f(c^-1) = a d^-1 starts with a
        assert sphere5_map.derivative(-3) == 1

    def test_length_one_image(self, swap_map):
        assert swap_map.derivative(1) == swap_map.image(1).edges[0]

    def test_derivative_iterates_track_initial_edges(self, sphere5_map):
        for e in (1, 2, -4):
            d = e
            for n in range(1, 6):
                d = sphere5_map.derivative(d)
                assert d == sphere5_map.iterate_edge(e, n).path.edges[0]


class TestRoseRepresentative:
    def test_sphere5(self, sphere5):
        rep = rose_representative(sphere5)
        f = rep.map
        assert f.graph == rose(4)
        assert f.image(1).edges == (2,)
        assert f.image(2).edges == (3,)
        assert f.image(3).edges == (4, -1)
        assert f.image(4).edges == (-4, -3)
        assert rep.marking == "identity-rose"
        assert rep.min_degree_3

    def test_identity(self):
        rep = rose_representative(Automorphism.identity(2))
        assert [rep.map.image(k).edges for k in (1, 2)] == [(1,), (2,)]

    def test_fib(self, fib_map):
        assert fib_map.image(1).edges == (1, 2)
        assert fib_map.image(2).edges == (1,)


class TestGraphMapValidation:
    def test_empty_image_rejected(self):
        g = rose(2)
        with pytest.raises(ValueError, match="empty"):
            GraphMap(g, (0,), (EdgePath(0, ()), g.path(0, (2,))))

    def test_non_tight_image_rejected(self):
        g = rose(2)
        with pytest.raises(ValueError, match="tight"):
            GraphMap(g, (0,), (g.path(0, (1, -1, 1)), g.path(0, (2,))))

    def test_vertex_image_consistency(self, theta):
        # vertices fixed but the image of edge 1 starts at the wrong vertex
        with pytest.raises(ValueError, match="starts at"):
            GraphMap(
                theta,
                (0, 1),
                (
                    theta.path(1, (-1,)),
                    theta.path(0, (2,)),
                    theta.path(0, (3,)),
                ),
            )


class TestInducedEndomorphism:
    def test_rose_map_recovers_automorphism(self, sphere5):
        f = rose_representative(sphere5).map
        assert tuple(induced_endomorphism(f)) == sphere5.images

    def test_non_surjective_rose_map(self):
        g = rose(2)
        f = GraphMap(g, (0,), (g.path(0, (2,)), g.path(0, (2,))))
        assert induced_endomorphism(f) == [Word(2, (2,)), Word(2, (2,))]
        assert not is_homotopy_equivalence(f)

    def test_theta_identity(self, theta):
        from ttiwip.graphs import identity_map

        assert is_homotopy_equivalence(identity_map(theta))

    def test_theta_collapse(self, theta):
        # send the third edge to the first: still a homotopy equivalence? no:
        # images generate a rank-1 subgroup of the rank-2 fundamental group
        f = GraphMap(
            theta,
            (0, 1),
            (theta.path(0, (1,)), theta.path(0, (1,)), theta.path(0, (1,))),
        )
        assert not is_homotopy_equivalence(f)

    def test_random_automorphism_roses_are_homotopy_equivalences(self):
        from ttiwip.randmaps import random_positive_automorphism

        for seed in range(25):
            aut = random_positive_automorphism(Random(seed), 2 + seed % 3)
            assert is_homotopy_equivalence(rose_representative(aut).map)


class TestFileFormat:
    def test_round_trip_rose(self, sphere5_map):
        text = print_graph_map(sphere5_map)
        again = parse_graph_map(text)
        assert again == sphere5_map
        assert print_graph_map(again) == text

    def test_round_trip_theta_map(self, theta):
        f = GraphMap(
            theta,
            (0, 1),
            (theta.path(0, (2,)), theta.path(0, (3,)), theta.path(0, (1,))),
        )
        assert parse_graph_map(print_graph_map(f)) == f

    def test_round_trip_random(self):
        for seed in range(20):
            f = random_rose_map(Random(seed), 2 + seed % 3)
            assert parse_graph_map(print_graph_map(f)) == f

    def test_missing_key(self):
        with pytest.raises(ValueError, match="misses key"):
            parse_graph_map("{}")

    def test_malformed_json(self):
        with pytest.raises(ValueError, match="malformed"):
            parse_graph_map("{nope")
