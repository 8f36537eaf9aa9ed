"""
Tests for evaluation, models, embeddings and distinguishing sentences.
"""
from fractions import Fraction

import pytest

from app.models.syntax import Theory, alpha_normalize, atom, constant, dotminus, inf, neg, sup
from app.models.vocabulary import Vocabulary
from app.services.formula_family import generate_formulas, generate_sentences
from app.services.semantics import (
    Evaluator,
    distinguish,
    evaluate,
    evaluator_for,
    is_embedding,
    is_model,
    type_partition,
)
from app.services.textio import parse_formula, parse_structure
from app.utils.error_handling import EvaluationError, VocabularyMismatchError
from tests.conftest import M0_TEXT


class TestEvaluate:
    """Tests for evaluate on the two-element structure M0."""

    def test_quantifiers(self, m0):
        assert evaluate(m0, sup("x", atom("P", "x"))) == Fraction(3, 4)
        assert evaluate(m0, inf("x", atom("P", "x"))) == Fraction(1, 4)

    def test_connectives_and_assignment(self, m0):
        f = dotminus(atom("P", "x"), constant("1/2"))
        assert evaluate(m0, f, {"x": "b"}) == Fraction(1, 4)
        assert evaluate(m0, neg(atom("P", "x")), {"x": "a"}) == Fraction(3, 4)

    def test_element_literal(self, m0):
        assert evaluate(m0, parse_formula("(P #b)", m0.vocabulary)) == Fraction(3, 4)

    def test_unbound_variable(self, m0):
        with pytest.raises(EvaluationError):
            evaluate(m0, atom("P", "x"))

    def test_foreign_element(self, m0):
        with pytest.raises(EvaluationError):
            evaluate(m0, atom("P", "x"), {"x": "z"})
        with pytest.raises(EvaluationError):
            evaluate(m0, parse_formula("(P #z)", m0.vocabulary))

    def test_vocabulary_mismatch(self, m0):
        with pytest.raises(VocabularyMismatchError):
            evaluate(m0, sup("x", atom("Q", "x")))

    def test_functions_and_constants(self, swap):
        f = parse_formula("(sup x (absdiff (Q (F x)) (Q c)))", swap.vocabulary)
        assert evaluate(swap, f) == 0


class TestIsModel:
    """Tests for is_model."""

    def test_holds_exactly_at_zero(self, m0):
        theory = Theory((inf("x", atom("P", "x")),))
        report = is_model(m0, theory)
        assert not report.holds
        assert report.failing_index == 0
        assert report.value == "1/4"
        assert is_model(m0, theory, tolerance=Fraction(1, 4)).holds

    def test_empty_theory(self, m0):
        assert is_model(m0, Theory(())).holds


class TestEmbeddings:
    """Tests for is_embedding."""

    def test_identity_is_elementary(self, m0):
        report = is_embedding({"a": "a", "b": "b"}, m0, m0, depth_budget=1)
        assert report.embedding
        assert report.elementary

    def test_atomic_failure_has_witness(self, m0):
        report = is_embedding({"a": "b", "b": "b"}, m0, m0)
        assert not report.embedding
        assert report.witness["symbol"] == "P"

    def test_non_elementary_embedding(self):
        small = parse_structure("(structure (vocabulary (predicate P 1)) (universe a) (predicate P (a 0)))")
        large = parse_structure(
            "(structure (vocabulary (predicate P 1)) (universe a b) (predicate P (a 0) (b 1)))"
        )
        report = is_embedding({"a": "a"}, small, large, depth_budget=1)
        assert report.embedding
        assert report.elementary is False
        assert report.witness is not None


class TestDistinguish:
    """Tests for distinguish and bounded types."""

    def test_maximal_gap(self, m0):
        other = parse_structure(
            "(structure (vocabulary (predicate P 1)) (universe a b) (predicate P (a 1/4) (b 1/4)))"
        )
        sentence, gap = distinguish(m0, other, 1)
        assert gap == Fraction(1, 2)
        assert sentence.is_sentence

    def test_raised_value_found_by_sup(self, m0):
        raised = parse_structure(
            "(structure (vocabulary (predicate P 1)) (universe a b) (predicate P (a 1/4) (b 1)))"
        )
        sentence, gap = distinguish(m0, raised, 1)
        assert alpha_normalize(sentence) == alpha_normalize(sup("x", atom("P", "x")))
        assert gap == Fraction(1, 4)

    def test_structure_against_itself(self, m0):
        assert distinguish(m0, m0, 2) is None

    def test_equivalent_structures(self, m0):
        copy = parse_structure(
            "(structure (vocabulary (predicate P 1)) (universe u v w) (predicate P (u 1/4) (v 3/4) (w 3/4)))"
        )
        assert distinguish(m0, copy, 2) is None

    def test_type_partition(self, twins):
        partition = type_partition(twins, 1)
        assert partition.same_block("b", "c")
        assert not partition.same_block("a", "b")

    def test_sentences_are_a_subfamily(self):
        vocab = Vocabulary(predicates=(("P", 1),))
        family = generate_formulas(vocab, 2)
        sentences = generate_sentences(vocab, 2)
        assert sentences
        assert all(s in family for s in sentences)
        assert len(set(family)) == len(family)


class TestEvaluatorCache:
    """Tests for evaluator sharing and the memo bound."""

    def test_one_evaluator_per_structure(self, m0):
        assert evaluator_for(m0) is evaluator_for(m0)
        copy = parse_structure(M0_TEXT)
        assert copy == m0
        assert evaluator_for(copy) is not evaluator_for(m0)

    def test_memo_is_bounded(self, m0):
        evaluator = Evaluator(m0, memo_limit=3)
        f = sup("x", inf("y", dotminus(atom("P", "x"), neg(atom("P", "y")))))
        assert evaluator.value(f, {}) == evaluate(m0, f)
        assert len(evaluator._memo) <= 3
