"""
Tests for distance synthesis and the pre-metric expansion.
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from app.models.reports import CheckStatus
from app.models.vocabulary import Vocabulary
from app.services.cauchy import check_cauchy
from app.services.expansion import (
    check_ultraproduct_commutation,
    definitional_axioms,
    distance_table,
    enumerate_patterns,
    eval_distance,
    expand_structure,
    synthesize_distance,
)
from app.services.metric_checks import check_modulus, check_pseudometric
from app.services.reduction import leibniz_partition
from app.services.semantics import is_model
from app.services.ultra import enumerate_ultrafilters
from app.utils.error_handling import EvaluationError, ExpansionError
from app.utils.random_structures import random_family, random_structure

SEEDS = st.integers(min_value=0, max_value=100_000)


class TestPatterns:
    """Tests for atomic pattern enumeration."""

    def test_binary_patterns(self):
        patterns = enumerate_patterns(Vocabulary(predicates=(("R", 2),)))
        assert [str(p) for p in patterns] == ["R(u,u)", "R(u,z1)", "R(z1,u)"]

    def test_ternary_patterns_include_repeated_slots(self):
        patterns = [str(p) for p in enumerate_patterns(Vocabulary(predicates=(("T", 3),)))]
        assert "T(u,z1,z1)" in patterns
        assert "T(z1,z2,u)" in patterns
        assert all("u" in p for p in patterns)

    def test_functions_are_rejected(self):
        with pytest.raises(ExpansionError):
            enumerate_patterns(Vocabulary(predicates=(("P", 1),), functions=(("F", 1),)))


class TestSynthesizeDistance:
    """Tests for synthesize_distance and eval_distance."""

    def test_m0_distance(self, m0):
        distance, signature, _ = synthesize_distance(m0.vocabulary)
        assert eval_distance(m0, distance, "a", "b") == Fraction(1, 2)
        assert eval_distance(m0, distance, "a", "a") == 0
        assert signature.coefficient("P") == 1
        assert signature.distance_symbol == "D"

    def test_coefficients(self):
        vocab = Vocabulary(predicates=(("P", 1), ("R", 2)))
        _, signature, _ = synthesize_distance(vocab)
        # R(u,z1) and R(z1,u) sit at global indices 2 and 3
        assert signature.coefficient("R") == 2 ** 3 * 2
        assert signature.modulus("R", Fraction(1, 2)) == Fraction(1, 32)

    def test_distance_symbol_avoids_clashes(self):
        vocab = Vocabulary(predicates=(("D", 1),))
        _, signature, _ = synthesize_distance(vocab)
        assert signature.distance_symbol == "D'"

    def test_foreign_element(self, m0):
        distance, _, _ = synthesize_distance(m0.vocabulary)
        with pytest.raises(EvaluationError):
            eval_distance(m0, distance, "a", "z")

    def test_kernel_is_leibniz_equality(self, twins):
        distance, _, _ = synthesize_distance(twins.vocabulary)
        table = distance_table(twins, distance)
        partition = leibniz_partition(twins)
        for (a, b), value in table.items():
            assert (value == 0) == partition.same_block(a, b)

    def test_expansion_models_definitional_axioms(self, twins):
        distance, signature, _ = synthesize_distance(twins.vocabulary)
        expanded = expand_structure(twins, distance, signature)
        assert expanded.vocabulary == signature.expanded_vocabulary
        assert is_model(expanded, definitional_axioms(distance, signature)).holds


class TestExpansionSoundness:
    """Seeded sweeps over random relational structures."""

    @hypothesis_settings(max_examples=15, deadline=None)
    @given(SEEDS)
    def test_synthesized_distance(self, seed):
        m = random_structure(seed, size=4)
        distance, signature, sequence = synthesize_distance(m.vocabulary)
        table = distance_table(m, distance)
        assert check_pseudometric(m, table).status == CheckStatus.PASS
        for name, _ in m.vocabulary.predicates:
            report = check_modulus(m, name, signature.coefficient(name), table)
            assert report.status == CheckStatus.PASS
        assert check_cauchy(sequence, [m]).status == CheckStatus.PASS
        partition = leibniz_partition(m)
        for (a, b), value in table.items():
            assert (value == 0) == partition.same_block(a, b)

    @hypothesis_settings(max_examples=15, deadline=None)
    @given(SEEDS)
    def test_reordering_keeps_zero_sets(self, seed):
        m = random_structure(seed, size=4)
        forward = distance_table(m, synthesize_distance(m.vocabulary)[0])
        backward = distance_table(m, synthesize_distance(m.vocabulary.reordered())[0])
        assert {k for k, v in forward.items() if v == 0} == {k for k, v in backward.items() if v == 0}

    @hypothesis_settings(max_examples=10, deadline=None)
    @given(SEEDS, st.integers(min_value=1, max_value=3))
    def test_commutes_with_ultraproducts(self, seed, factors):
        family = random_family(seed, factors, max_size=2)
        vocab = next(iter(family.values())).vocabulary
        distance = synthesize_distance(vocab)[0]
        for D in enumerate_ultrafilters(tuple(family)):
            assert check_ultraproduct_commutation(family, D, distance).status == CheckStatus.PASS
