import json
from random import Random

import jsonschema
import pytest

from ttiwip.blowup import verify_reduction
from ttiwip.decide import (
    REPORT_SCHEMA,
    VERDICT_IWIP_GIVEN_ATOROIDAL,
    VERDICT_NOT_ATOROIDAL_UNDETERMINED,
    VERDICT_NOT_IWIP,
    VERDICT_UNDETERMINED,
    AnalysisOptions,
    analyze,
    search_periodic_conjugacy,
)
from ttiwip.graphs import GraphMap, parse_graph_map, print_graph_map, rose, rose_representative
from ttiwip.randmaps import random_positive_automorphism
from ttiwip.whitehead import is_clean
from ttiwip.words import Automorphism, conjugate_equal, word_from_str


SMALL = AnalysisOptions(lmax=4, pmax=6)


class TestSearchPeriodicConjugacy:
    def test_sphere5_finds_a_period_5(self, sphere5):
        hit = search_periodic_conjugacy(sphere5, 1, 5)
        assert hit is not None
        word, period = hit
        assert str(word) == "a" and period == 5

    def test_identity_finds_a_period_1(self):
        hit = search_periodic_conjugacy(Automorphism.identity(2), 2, 2)
        assert hit == (word_from_str(2, "a"), 1)

    def test_f3_cycle_absent_at_small_bounds(self, f3_cycle):
        assert search_periodic_conjugacy(f3_cycle, 4, 6) is None

    def test_f3_cycle_absent_matches_exhaustive_oracle(self, f3_cycle):
        # brute force over all cyclically reduced words, not just canonical reps
        from itertools import product

        from ttiwip.words import Word

        for length in range(1, 5):
            for letters in product([1, -1, 2, -2, 3, -3], repeat=length):
                ok = all(letters[i] != -letters[i + 1] for i in range(length - 1))
                if not ok or (length > 1 and letters[0] == -letters[-1]):
                    continue
                word = Word(3, letters)
                current = word
                for _ in range(6):
                    current = f3_cycle.apply(current)
                    assert not conjugate_equal(current, word)

    def test_fib_finds_commutator_period_2(self, fib):
        hit = search_periodic_conjugacy(fib, 6, 12)
        assert hit is not None
        word, period = hit
        assert str(word) == "a b a^-1 b^-1" and period == 2


class TestAnalyzeVerdicts:
    def test_sphere5_not_iwip_with_free_factor(self, sphere5):
        report = analyze(sphere5)
        assert report.verdict == VERDICT_NOT_IWIP
        assert report.clean is True
        assert report.periodic_conjugacy == ("a", 5)
        kinds = {w["type"] for w in report.witnesses}
        assert "periodic-free-factor" in kinds
        witness = next(w for w in report.witnesses if w["type"] == "periodic-free-factor")
        assert witness["free_factor_generator"] == "a"
        assert witness["period"] == 5
        assert witness["image"] == "c d a d^-1 c^-1"

    def test_identity_not_iwip_with_both_witnesses(self):
        report = analyze(Automorphism.identity(2), SMALL)
        assert report.verdict == VERDICT_NOT_IWIP
        kinds = [w["type"] for w in report.witnesses]
        assert "reduction" in kinds
        assert "periodic-free-factor" in kinds
        periodic = next(w for w in report.witnesses if w["type"] == "periodic-free-factor")
        assert periodic["word"] == "a" and periodic["period"] == 1

    def test_f3_cycle_certified_when_asserted_atoroidal(self, f3_cycle):
        report = analyze(f3_cycle, AnalysisOptions(atoroidal="asserted-true", lmax=4, pmax=6))
        assert report.clean is True
        assert report.verdict == VERDICT_IWIP_GIVEN_ATOROIDAL
        cert = next(w for w in report.witnesses if w["type"] == "clean-certificate")
        assert cert["whitehead_connected"] is True

    def test_f3_cycle_undetermined_without_assertion(self, f3_cycle):
        report = analyze(f3_cycle, SMALL)
        assert report.verdict == VERDICT_UNDETERMINED
        assert report.clean is True

    def test_f3_cycle_asserted_non_atoroidal(self, f3_cycle):
        report = analyze(f3_cycle, AnalysisOptions(atoroidal="asserted-false", lmax=4, pmax=6))
        assert report.verdict == VERDICT_NOT_ATOROIDAL_UNDETERMINED

    def test_fib_not_atoroidal_undetermined(self, fib):
        report = analyze(fib)
        assert report.verdict == VERDICT_NOT_ATOROIDAL_UNDETERMINED
        assert report.clean is True
        assert report.periodic_conjugacy == ("a b a^-1 b^-1", 2)

    def test_nielsen_blow_up_verdict(self, nielsen_map):
        report = analyze(nielsen_map, SMALL)
        assert report.verdict == VERDICT_NOT_IWIP
        assert any(w["provenance"] == "blow-up" for w in report.reduction_witnesses)
        assert "whitehead-blowup-reduction" in report.justifications

    def test_non_tt_with_periodic_witness(self, non_tt_map):
        # not a train-track map, but the word-level search still certifies:
        # the sixth power fixes the class of a
        report = analyze(non_tt_map, SMALL)
        assert not report.train_track
        assert report.degenerate_turn_chain is not None
        assert report.verdict == VERDICT_NOT_IWIP
        assert report.periodic_conjugacy == ("a", 6)

    def test_non_tt_undetermined_when_search_misses(self, non_tt_map):
        report = analyze(non_tt_map, AnalysisOptions(lmax=1, pmax=1))
        assert report.verdict == VERDICT_UNDETERMINED
        assert not report.train_track
        assert any(
            w["type"] == "diagnostic" and "train-track" in w["reason"]
            for w in report.witnesses
        )

    def test_swap_map_obstruction(self, swap_map):
        report = analyze(swap_map, SMALL)
        # the swap has no reduction (its only invariant subgraph is everything),
        # is a train track, but fails every growth filter
        assert report.verdict == VERDICT_NOT_IWIP  # periodic (a,2) free factor
        periodic = next(w for w in report.witnesses if w["type"] == "periodic-free-factor")
        assert periodic["period"] == 2

    def test_matrix_obstruction_path(self):
        # a five-cycle permutation: train track, irreducible matrix, nothing
        # grows; with the period bound below 5 the search misses the orbit of
        # a, so only the growth obstruction remains
        cycle5 = Automorphism.from_strings(5, ["b", "c", "d", "e", "a"])
        report = analyze(cycle5, AnalysisOptions(lmax=2, pmax=4))
        assert report.verdict == VERDICT_UNDETERMINED
        obstruction = next(w for w in report.witnesses if w["type"] == "matrix-obstruction")
        assert "no-positive-power" in obstruction["kinds"]
        assert "non-expanding-edge" in obstruction["kinds"]
        assert report.irreducible

    def test_non_homotopy_equivalence_abstains(self):
        # a -> b, b -> a a: a train-track map that represents no automorphism;
        # map-level evidence is reported but the verdict abstains
        g = rose(2)
        f = GraphMap(g, (0,), (g.path(0, (2,)), g.path(0, (1, 1))))
        report = analyze(f, SMALL)
        assert report.homotopy_equivalence is False
        assert report.verdict == VERDICT_UNDETERMINED
        assert report.reduction_witnesses  # the blow-up fact is still recorded
        assert any(
            w["type"] == "diagnostic" and "homotopy equivalence" in w["reason"]
            for w in report.witnesses
        )

    def test_claimed_graph_map_skips_search(self):
        from ttiwip.graphs import Graph, identity_map

        theta = Graph(2, ((0, 1), (0, 1), (0, 1)))
        report = analyze(identity_map(theta), SMALL)
        assert report.marking == "claimed"
        assert report.periodic_conjugacy is None
        assert any("search skipped" in d for d in report.diagnostics)
        # single-edge closures on the theta graph are trees, so no reduction
        # witness comes out of them; the growth obstruction remains
        assert report.verdict == VERDICT_UNDETERMINED
        assert not report.reduction_witnesses

    def test_rose_graph_map_input_recovers_automorphism(self, sphere5):
        f = rose_representative(sphere5).map
        report = analyze(parse_graph_map(print_graph_map(f)))
        assert report.marking == "identity-rose"
        assert report.verdict == VERDICT_NOT_IWIP
        assert report.periodic_conjugacy == ("a", 5)


class TestAnalyzeReportShape:
    def test_json_schema_valid(self, sphere5, fib, f3_cycle, non_tt_map, swap_map):
        for obj, options in [
            (sphere5, AnalysisOptions()),
            (fib, AnalysisOptions()),
            (f3_cycle, SMALL),
            (non_tt_map, SMALL),
            (swap_map, SMALL),
            (Automorphism.identity(2), SMALL),
        ]:
            report = analyze(obj, options)
            jsonschema.validate(json.loads(report.to_json()), REPORT_SCHEMA)

    def test_byte_determinism(self, sphere5):
        a = analyze(sphere5).to_json()
        b = analyze(
            Automorphism.from_strings(4, ["b", "c", "d a^-1", "d^-1 c^-1"])
        ).to_json()
        assert a == b

    def test_text_and_json_verdicts_match(self, sphere5, fib):
        for aut in (sphere5, fib):
            report = analyze(aut)
            assert report.verdict in report.to_text()
            assert json.loads(report.to_json())["verdict"] == report.verdict

    def test_input_echo_round_trips(self, sphere5):
        from ttiwip.words import parse_automorphism

        report = analyze(sphere5)
        assert parse_automorphism(report.input_text) == sphere5


class TestWitnessSoundness:
    def corpus(self):
        fixtures = [
            Automorphism.identity(2),
            Automorphism.from_strings(2, ["a", "b a"]),
            Automorphism.from_strings(2, ["a b", "b"]),
            Automorphism.from_strings(4, ["b", "c", "d a^-1", "d^-1 c^-1"]),
            Automorphism.from_strings(2, ["a b", "a"]),
            Automorphism.from_strings(2, ["b", "a"]),
        ]
        for seed in range(40):
            fixtures.append(random_positive_automorphism(Random(seed), 2 + seed % 3, 5))
        return fixtures

    def test_not_iwip_witnesses_reverify(self):
        small = AnalysisOptions(lmax=3, pmax=6, search_word_cap=64)
        hits = 0
        for aut in self.corpus():
            report = analyze(aut, small)
            if report.verdict != VERDICT_NOT_IWIP:
                continue
            hits += 1
            assert report.witnesses
            for witness in report.witnesses:
                if witness["type"] == "periodic-free-factor":
                    word = word_from_str(aut.rank, witness["word"])
                    image = word
                    for _ in range(witness["period"]):
                        image = aut.apply(image)
                    assert conjugate_equal(image, word)
                    assert len(word.cyclic_reduce()[0]) == 1
                elif witness["type"] == "reduction" and witness["graph"] == "base":
                    f = rose_representative(aut).map
                    edges = {f.graph.edge_names.index(n) + 1 for n in witness["edges"]}
                    assert verify_reduction(f, edges).ok
        assert hits >= 5

    def test_certified_fixtures_pass_lemma_filters(self):
        # anything certified as fully irreducible (given atoroidality) must
        # have an irreducible matrix and all edges growing
        options = AnalysisOptions(atoroidal="asserted-true", lmax=3, pmax=4, search_word_cap=64)
        certified = 0
        for aut in self.corpus():
            report = analyze(aut, options)
            if report.verdict == VERDICT_IWIP_GIVEN_ATOROIDAL:
                certified += 1
                assert report.irreducible
                assert all(report.expanding_per_edge)
                assert report.primitive_exponent is not None
        assert certified >= 1

    def test_certified_fixture_powers_stay_clean(self, f3_cycle):
        # composed powers are also train-track representatives; a certified
        # map's powers must pass the clean test as well
        f = rose_representative(f3_cycle).map
        for m in (2, 3):
            rep = is_clean(f.power(m))
            assert rep.clean
