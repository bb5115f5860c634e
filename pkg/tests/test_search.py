"""search: pairings, candidate evaluation, deterministic ranking."""

from __future__ import annotations

import pytest

from mvirm.core import ContractError, truth_table
from mvirm.search import (
    Pairing,
    SearchConfig,
    apply_pairing,
    enumerate_pairings,
    evaluate_candidate,
    search_best,
)

from conftest import B1, B2, B3, X1, X2, expr, lit

BITS4 = ("a", "b", "c", "d")


def fingerprint(solutions):
    return [
        (s.report.maslov, s.report.tqc, s.pa.sort_key(), s.pairing.sort_key())
        for s in solutions
    ]


class TestPairings:
    def test_counts(self):
        assert len(list(enumerate_pairings(BITS4, max_group=1))) == 1
        assert len(list(enumerate_pairings(BITS4, max_group=2))) == 10
        assert len(list(enumerate_pairings(BITS4, max_group=4))) == 15
        assert len(list(enumerate_pairings(("a", "b"), max_group=2))) == 2

    def test_exactly_two_pairs(self):
        pairs = [
            p
            for p in enumerate_pairings(BITS4, max_group=2)
            if all(len(g) == 2 for g in p.groups)
        ]
        assert len(pairs) == 3

    def test_deterministic_order(self):
        a = [p.groups for p in enumerate_pairings(BITS4, max_group=2)]
        b = [p.groups for p in enumerate_pairings(BITS4, max_group=2)]
        assert a == b

    def test_validation(self):
        with pytest.raises(ContractError):
            Pairing((("a", "b"), ("b",)))
        with pytest.raises(ContractError):
            Pairing((("a",), ()))


class TestApplyPairing:
    def test_truth_preserved_all_pairings(self, binary_f):
        want = truth_table(binary_f).outputs[0][1]
        for pairing in enumerate_pairings(("x1", "x2", "x3"), max_group=3):
            [paired] = apply_pairing([binary_f], pairing)
            # natural-binary group encoding keeps the assignment order
            assert truth_table(paired).outputs[0][1] == want

    def test_group_radix(self, binary_f):
        [paired] = apply_pairing(
            [binary_f], Pairing((("x1", "x2"), ("x3",)))
        )
        assert [v.radix for v in paired.variables] == [4, 2]

    def test_non_binary_group_rejected(self, f2):
        with pytest.raises(ContractError):
            apply_pairing([f2], Pairing((("X1", "X2"),)))

    def test_must_cover_variables(self, binary_f):
        with pytest.raises(ContractError):
            apply_pairing([binary_f], Pairing((("x1", "x2"),)))


class TestEvaluate:
    def test_trivial_candidate(self, f2, pa_P):
        cfg = SearchConfig()
        sol = evaluate_candidate(f2, Pairing.trivial(f2.variables), pa_P, cfg)
        assert sol.report.maslov == 8
        assert sol.spectrum is not None

    def test_grm_target_single_output_only(self, f1, f2, pa_P):
        cfg = SearchConfig(target="grm")
        with pytest.raises(ContractError):
            evaluate_candidate([f1, f2], Pairing.trivial(f1.variables), pa_P, cfg)


class TestConfig:
    def test_sampling_needs_seed(self):
        with pytest.raises(ContractError):
            SearchConfig(polarity_scope="sample:10")
        SearchConfig(polarity_scope="sample:10", seed=1)

    def test_bad_fields(self):
        with pytest.raises(ContractError):
            SearchConfig(method="magic")
        with pytest.raises(ContractError):
            SearchConfig(target="qft")
        with pytest.raises(ContractError):
            SearchConfig(objective="depth")
        with pytest.raises(ContractError):
            SearchConfig(polarity_scope="some")


class TestSearch:
    def test_fixed_polarity_search(self, f2, pa_P, pa_Q):
        cfg = SearchConfig(fixed_polarities=(pa_P, pa_Q))
        sols = search_best(f2, cfg)
        assert len(sols) == 2
        assert sols[0].report.maslov <= sols[1].report.maslov

    def test_sampled_deterministic(self, f2):
        cfg = SearchConfig(polarity_scope="sample:20", seed=7)
        a = search_best(f2, cfg)
        b = search_best(f2, cfg)
        assert fingerprint(a) == fingerprint(b)

    def test_parallel_equals_sequential(self, f2):
        seq = SearchConfig(polarity_scope="sample:20", seed=7, jobs=1)
        par = SearchConfig(polarity_scope="sample:20", seed=7, jobs=2)
        assert fingerprint(search_best(f2, seq)) == fingerprint(
            search_best(f2, par)
        )

    def test_methods_agree(self, f2):
        a = SearchConfig(polarity_scope="sample:10", seed=3, method="butterfly")
        b = SearchConfig(
            polarity_scope="sample:10", seed=3, method="products-matching"
        )
        assert fingerprint(search_best(f2, a)) == fingerprint(search_best(f2, b))

    def test_esop_target_single_candidate(self, f2):
        cfg = SearchConfig(target="esop")
        sols = search_best(f2, cfg)
        assert len(sols) == 1
        assert sols[0].report.maslov == 13

    def test_pairing_search_binary(self, binary_f):
        pairings = tuple(enumerate_pairings(("x1", "x2", "x3"), max_group=2))
        cfg = SearchConfig(pairings=pairings, top=50)
        sols = search_best(binary_f, cfg)
        # every candidate verified; ranking is by the objective
        costs = [s.report.maslov for s in sols]
        assert costs == sorted(costs)
