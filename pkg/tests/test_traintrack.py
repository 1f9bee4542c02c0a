from random import Random

import pytest
from hypothesis import given, settings, strategies as st

from ttiwip.graphs import EdgePath, GraphMap, make_turn, rose, rose_representative, turns_in_path
from ttiwip.randmaps import random_positive_automorphism, random_positive_map, random_rose_map
from ttiwip.traintrack import (
    TransitionMatrix,
    eigenray_prefix,
    is_expanding,
    is_irreducible,
    is_train_track,
    matrix_power,
    minimal_primitive_exponent,
    periodicity,
    primitive_exponent,
    primitivity_by_support_tracking,
    taken_turn_closure,
    transition_matrix,
    wielandt_bound,
)


def brute_force_train_track(f: GraphMap, depth: int = 8) -> bool:
    """Independent oracle: iterate every edge, watching the literal
    concatenation of images for a cancellation, up to the given depth."""
    for e in f.graph.oriented_edges():
        path = EdgePath(f.graph.origin(e), (e,))
        for _ in range(depth):
            literal = []
            cancelled = False
            for x in path.edges:
                for y in f.image(x).edges:
                    if literal and literal[-1] == -y:
                        cancelled = True
                        break
                    literal.append(y)
                if cancelled:
                    break
            if cancelled:
                return False
            path = EdgePath(f.vertex_map[path.start], tuple(literal))
    return True


def first_cancellation_depth(f: GraphMap, e: int, depth: int = 12):
    path = EdgePath(f.graph.origin(e), (e,))
    for n in range(1, depth + 1):
        literal = []
        for x in path.edges:
            for y in f.image(x).edges:
                if literal and literal[-1] == -y:
                    return n
                literal.append(y)
        path = EdgePath(f.vertex_map[path.start], tuple(literal))
    return None


class TestTurnClosure:
    def test_permutation_map_empty(self, swap_map):
        closure = taken_turn_closure(swap_map)
        assert closure.taken == frozenset()

    def test_non_tt_reaches_degenerate(self, non_tt_map):
        closure = taken_turn_closure(non_tt_map)
        assert (1, 1) in closure.taken
        chain = closure.witness_chain((1, 1))
        turns = [t for t, _, _ in chain]
        assert turns == [(-1, 2), (-1, -2), (1, -2), (1, 1)]

    def test_sphere5_no_degenerate(self, sphere5_map):
        closure = taken_turn_closure(sphere5_map)
        assert closure.degenerate_turns() == []

    def test_seed_contained_in_taken(self, sphere5_map):
        closure = taken_turn_closure(sphere5_map)
        assert closure.seed <= closure.taken

    def test_witnesses_verify(self, sphere5_map, fib_map):
        for f in (sphere5_map, fib_map):
            closure = taken_turn_closure(f)
            for turn in closure.taken:
                _, e, n = closure.provenance[turn]
                assert turn in turns_in_path(f.iterate_edge(e, n).path)


class TestIsTrainTrack:
    def test_sphere5(self, sphere5_map):
        assert is_train_track(sphere5_map)

    def test_non_tt(self, non_tt_map):
        assert not is_train_track(non_tt_map)

    def test_identity_rose(self):
        from ttiwip.words import Automorphism

        f = rose_representative(Automorphism.identity(3)).map
        assert is_train_track(f)

    def test_non_tt_first_cancellation_at_4(self, non_tt_map):
        assert first_cancellation_depth(non_tt_map, 1) == 4

    def test_agrees_with_brute_force_on_seeded_maps(self, non_tt_map):
        maps = [non_tt_map]
        for seed in range(200):
            maps.append(random_rose_map(Random(seed), 2 + seed % 2, 3))
        for f in maps:
            assert is_train_track(f) == brute_force_train_track(f, 8)

    def test_powers_stay_train_track(self, sphere5_map, fib_map, f3_cycle_map):
        for f in (sphere5_map, fib_map, f3_cycle_map):
            for m in range(1, 5):
                g = f.power(m)
                assert is_train_track(g)
                assert brute_force_train_track(g, 3)


class TestTransitionMatrix:
    def test_sphere5(self, sphere5_map):
        a = transition_matrix(sphere5_map)
        assert a.entries == (
            (0, 0, 1, 0),
            (1, 0, 0, 0),
            (0, 1, 0, 1),
            (0, 0, 1, 1),
        )

    def test_fib(self, fib_map):
        assert transition_matrix(fib_map).entries == ((1, 1), (1, 0))

    def test_swap(self, swap_map):
        assert transition_matrix(swap_map).entries == ((0, 1), (1, 0))

    def test_column_sums_are_image_lengths(self, sphere5_map):
        a = transition_matrix(sphere5_map)
        assert a.column_sums() == tuple(
            len(sphere5_map.image(k)) for k in range(1, 5)
        )

    def test_power_identity(self, fib_map):
        a = transition_matrix(fib_map)
        assert matrix_power(a, 0).entries == ((1, 0), (0, 1))

    def test_power_square(self, fib_map):
        a = transition_matrix(fib_map)
        assert matrix_power(a, 2).entries == ((2, 1), (1, 1))

    def test_sphere5_sixth_power_positive(self, sphere5_map):
        a = transition_matrix(sphere5_map)
        assert matrix_power(a, 6).is_positive()

    def test_power_matches_iterated_multiplication(self, sphere5_map):
        a = transition_matrix(sphere5_map)
        step = a
        for m in range(2, 9):
            step = step.mul(a)
            assert matrix_power(a, m).entries == step.entries

    def test_composition_identity_on_seeded_automorphisms(self):
        # matrix of the m-fold composition equals the m-th matrix power
        for seed in range(30):
            rng = Random(seed)
            aut = random_positive_automorphism(rng, 2 + seed % 4, 6)
            f = rose_representative(aut).map
            a = transition_matrix(f)
            for m in range(2, 5):
                assert transition_matrix(f.power(m)).entries == a.power(m).entries


class TestIrreducible:
    def test_identity_reducible(self):
        a = TransitionMatrix(((1, 0), (0, 1)), ("a", "b"))
        assert not is_irreducible(a)

    def test_fib_irreducible(self, fib_map):
        assert is_irreducible(transition_matrix(fib_map))

    def test_sphere5_irreducible(self, sphere5_map):
        assert is_irreducible(transition_matrix(sphere5_map))

    def test_one_by_one(self):
        assert not is_irreducible(TransitionMatrix(((0,),), ("a",)))
        assert is_irreducible(TransitionMatrix(((1,),), ("a",)))

    def test_positive_implies_irreducible_on_random(self):
        rng = Random(5)
        for _ in range(60):
            r = rng.randint(1, 5)
            entries = tuple(
                tuple(rng.randint(0, 2) for _ in range(r)) for _ in range(r)
            )
            a = TransitionMatrix(entries, tuple("abcde"[:r]))
            if a.is_positive():
                assert is_irreducible(a)


class TestPrimitivity:
    def test_fib_exponent_two(self, fib_map):
        assert primitive_exponent(fib_map) == 2

    def test_permutation_absent(self, swap_map):
        assert primitive_exponent(swap_map) is None

    def test_sphere5_some_exponent_at_most_6(self, sphere5_map):
        m = primitive_exponent(sphere5_map)
        a = transition_matrix(sphere5_map)
        assert m is not None and m <= 6
        assert a.power(m).is_positive()
        assert not a.power(m - 1).is_positive()

    def test_matrix_oracle_on_fib_matrix(self):
        a = TransitionMatrix(((1, 1), (1, 0)), ("a", "b"))
        assert minimal_primitive_exponent(a) == 2

    def test_support_tracking_positive_case(self, sphere5_map):
        res = primitivity_by_support_tracking(sphere5_map)
        assert res.preconditions_ok and res.exists
        a = transition_matrix(sphere5_map)
        assert a.power(res.witness_exponent).is_positive()

    def test_support_tracking_negative_case(self):
        # a -> b, b -> a a: irreducible and growing but period 2 blocks positivity
        g = rose(2)
        f = GraphMap(g, (0,), (g.path(0, (2,)), g.path(0, (1, 1))))
        res = primitivity_by_support_tracking(f)
        assert res.preconditions_ok and res.exists is False
        assert primitive_exponent(f) is None

    def test_support_tracking_precondition_failure(self, swap_map):
        res = primitivity_by_support_tracking(swap_map)
        assert not res.preconditions_ok
        assert res.diagnostics

    def test_cross_validation_on_seeded_maps(self):
        # spec-level property: the two routes agree on existence, and the
        # minimal exponent is genuinely minimal
        for seed in range(120):
            f = random_positive_map(Random(seed), 2 + seed % 4, 4)
            a = transition_matrix(f)
            minimal = minimal_primitive_exponent(a)
            tracked = primitivity_by_support_tracking(f)
            if tracked.preconditions_ok:
                assert tracked.exists == (minimal is not None)
                if tracked.exists:
                    assert a.power(tracked.witness_exponent).is_positive()
            if minimal is not None:
                assert a.power(minimal).is_positive()
                assert not a.power(minimal - 1).is_positive()
                assert minimal <= wielandt_bound(a.dimension)


class TestExpanding:
    def test_permutation_not_expanding(self, swap_map):
        report = is_expanding(swap_map)
        assert not report.expanding
        assert report.per_edge == (False, False)

    def test_sphere5_expanding(self, sphere5_map):
        report = is_expanding(sphere5_map)
        assert report.expanding and all(report.per_edge)

    def test_fib_expanding(self, fib_map):
        assert is_expanding(fib_map).expanding

    def test_mixed_growth(self, nielsen_map):
        # a -> ab grows, b -> b does not
        report = is_expanding(nielsen_map)
        assert report.expanding
        assert report.per_edge == (True, False)

    def test_chained_unit_cycles_grow(self):
        # two unit loops feeding one another only through a transfer edge
        g = rose(2)
        f = GraphMap(g, (0,), (g.path(0, (1, 2)), g.path(0, (2,))))
        assert is_expanding(f).per_edge == (True, False)

    def test_lengths_check_on_seeded_maps(self):
        # classification matches actual growth of iterate lengths
        for seed in range(120):
            f = random_positive_map(Random(seed + 1000), 2 + seed % 3, 3)
            report = is_expanding(f)
            a = transition_matrix(f)
            r = a.dimension
            lengths = a.power(4 * r + 8).column_sums()
            baseline = a.power(r + 1).column_sums()
            for j in range(r):
                assert report.per_edge[j] == (lengths[j] > baseline[j])


class TestPeriodicity:
    def test_swap_period_two(self, swap_map):
        per = periodicity(swap_map)
        assert per.edge_periods[1] == 2
        assert per.vertex_periods[0] == 1
        assert per.global_period == 2

    def test_identity_all_period_one(self):
        from ttiwip.words import Automorphism

        f = rose_representative(Automorphism.identity(2)).map
        per = periodicity(f)
        assert set(per.edge_periods.values()) == {1}

    def test_sphere5_nonempty(self, sphere5_map):
        per = periodicity(sphere5_map)
        assert per.edge_periods
        assert per.edge_periods == {3: 3, 4: 3, -4: 3}
        assert per.global_period == 3

    def test_periods_verified_by_derivative_orbits(self, sphere5_map, fib_map):
        for f in (sphere5_map, fib_map):
            per = periodicity(f)
            for e, s in per.edge_periods.items():
                d = e
                for _ in range(s):
                    d = f.derivative(d)
                assert d == e


class TestEigenray:
    def test_fib_prefix(self, fib_map):
        assert eigenray_prefix(fib_map, 3).edges == (1, 2, 1)

    def test_permutation_has_none(self, swap_map):
        with pytest.raises(ValueError, match="eigenray"):
            eigenray_prefix(swap_map, 3)

    def test_prefix_nesting(self, sphere5_map, fib_map, f3_cycle_map):
        for f in (sphere5_map, fib_map, f3_cycle_map):
            for length in range(1, 12):
                shorter = eigenray_prefix(f, length).edges
                longer = eigenray_prefix(f, length + 1).edges
                assert longer[:length] == shorter

    def test_prefix_extends_under_map(self, fib_map):
        per = periodicity(fib_map)
        prefix = eigenray_prefix(fib_map, 6)
        image = fib_map.power(per.edge_periods[1]).map_path(prefix)
        assert image.edges[:6] == prefix.edges
