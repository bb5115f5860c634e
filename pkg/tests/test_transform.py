"""transform: spectra by products-matching, butterfly, and the oracle."""

from __future__ import annotations

import random

import pytest

from mvirm.core import (
    ContractError,
    MviVariable,
    PolarityAssignment,
    ProductTerm,
    TruthSet,
    enumerate_polarities,
    truth_table,
)
from mvirm.transform import (
    butterfly_spectrum,
    expression_terms,
    minterm_vector,
    oracle_spectrum,
    products_matching,
    spectrum_to_expression,
)

from conftest import (
    F1_SPECTRUM_P,
    F2_SPECTRUM_P,
    F2_SPECTRUM_Q,
    F3_MINTERMS,
    F3_SPECTRUM,
    F4_SPECTRUM,
    ADDER_SPECTRUM_P,
    ADDER_SPECTRUM_Q,
    X1,
    X2,
    expr,
    lit,
    pmat,
)


def spectrum_three_ways(exprs, pa):
    if not isinstance(exprs, list):
        exprs = [exprs]
    bf = butterfly_spectrum(minterm_vector(exprs), pa)
    variables, labels, terms = expression_terms(exprs)
    pm = products_matching(terms, variables, pa, labels)
    orc = oracle_spectrum(truth_table(exprs), variables, pa)
    assert bf == pm == orc
    return bf


class TestWorkedSpectra:
    def test_f1_all_twelve_coefficients(self, f1, pa_P):
        sp = spectrum_three_ways(f1, pa_P)
        got = {idx: sp.get(idx) for idx in sp.indices()}
        assert got == F1_SPECTRUM_P

    def test_f2_result_row(self, f2, pa_P):
        sp = spectrum_three_ways(f2, pa_P)
        got = {idx: sp.get(idx) for idx in sp.indices()}
        assert got == F2_SPECTRUM_P

    def test_f2_under_q(self, f2, pa_Q):
        sp = spectrum_three_ways(f2, pa_Q)
        assert {i for i, _ in sp.nonzero()} == F2_SPECTRUM_Q

    def test_multi_output_shared_term(self, f1, f2, pa_Q):
        sp = spectrum_three_ways([f1, f2], pa_Q)
        assert dict(sp.nonzero()) == {(2, 1): 2, (2, 2): 1, (4, 2): 3}

    def test_f3(self, f3, pa_f3):
        sp = spectrum_three_ways(f3, pa_f3)
        assert {i for i, _ in sp.nonzero()} == F3_SPECTRUM

    def test_f3_minterm_vector(self, f3):
        mv = minterm_vector(f3)
        want = 0
        for i, b in enumerate(F3_MINTERMS):
            if b:
                want |= 1 << i
        assert mv.bits == (want,)

    def test_f4(self, f4, pa_f4):
        sp = spectrum_three_ways(f4, pa_f4)
        assert {i for i, _ in sp.nonzero()} == F4_SPECTRUM

    def test_adder_p(self, adder_minterms, pa_adder_P):
        sp = butterfly_spectrum(adder_minterms, pa_adder_P)
        assert dict(sp.nonzero()) == ADDER_SPECTRUM_P

    def test_adder_q(self, adder_minterms, pa_adder_Q):
        sp = butterfly_spectrum(adder_minterms, pa_adder_Q)
        assert dict(sp.nonzero()) == ADDER_SPECTRUM_Q


class TestCanonicity:
    def test_grouping_invariance(self, f2, pa_P):
        # same function expressed with different term groupings
        alt = expr(
            [X1, X2],
            "F2",
            [lit(X1, 0)],
            [lit(X1, 2, 3), lit(X2, 0, 1)],
        )
        assert truth_table(alt).outputs[0][1] == truth_table(f2).outputs[0][1]
        assert butterfly_spectrum(minterm_vector(alt), pa_P) == butterfly_spectrum(
            minterm_vector(f2), pa_P
        )

    def test_random_cross_method(self):
        rng = random.Random(20240824)
        mats = {
            3: list(enumerate_polarities(3)),
            4: list(enumerate_polarities(4)),
        }
        for _ in range(60):
            n = rng.choice([2, 3])
            variables = tuple(
                MviVariable(f"V{i}", rng.choice([3, 4]), (f"v{i}a", f"v{i}b"))
                for i in range(n)
            )
            terms = []
            for _ in range(rng.randrange(1, 5)):
                sets = {}
                for v in variables:
                    if rng.random() < 0.7:
                        mask = rng.randrange(1, 1 << v.radix)
                        sets[v.name] = TruthSet(mask, v.radix)
                terms.append(ProductTerm.of(sets))
            e = expr(variables, "F")
            e = e.__class__.of(variables, terms, label="F")
            pa = PolarityAssignment.of(
                {v.name: rng.choice(mats[v.radix]) for v in variables}
            )
            spectrum_three_ways(e, pa)


class TestRoundTrip:
    def test_spectrum_to_expression_inverts(self, f3, pa_f3):
        sp = butterfly_spectrum(minterm_vector(f3), pa_f3)
        back = spectrum_to_expression(sp, "F3")
        assert truth_table(back).outputs[0][1] == truth_table(f3).outputs[0][1]

    def test_reexpressed_spectrum_fixed_point(self, f2, pa_P):
        sp = butterfly_spectrum(minterm_vector(f2), pa_P)
        back = spectrum_to_expression(sp, "F2")
        again = butterfly_spectrum(minterm_vector(back), pa_P)
        assert again == sp


class TestValidation:
    def test_non_canonical_rejected(self, f2):
        pa = PolarityAssignment.of(
            {"X1": pmat("1111", "1111", "0011", "0111"), "X2": pmat("111", "100", "001")}
        )
        with pytest.raises(ContractError):
            butterfly_spectrum(minterm_vector(f2), pa)

    def test_missing_polarity_rejected(self, f2):
        pa = PolarityAssignment.of({"X1": pmat("1111", "0101", "0011", "0111")})
        with pytest.raises(ContractError):
            butterfly_spectrum(minterm_vector(f2), pa)
