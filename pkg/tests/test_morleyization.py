"""
Tests for depth-bounded atomic Morleyization.
"""
import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from app.models.syntax import Atom, Const, Var, apply, atom
from app.models.vocabulary import Vocabulary
from app.services.expansion import synthesize_distance
from app.services.formula_family import generate_formulas
from app.services.morleyization import abstract_atom, morleyize
from app.services.semantics import assignments, evaluate, evaluator_for
from app.services.textio import parse_formula
from app.utils.error_handling import DepthExceededError, StructuralError, VocabularyMismatchError
from app.utils.random_structures import random_structure


class TestAbstraction:
    """Tests for abstract_atom."""

    def test_leaves_become_distinct_variables(self):
        pattern, leaves = abstract_atom(atom("R", apply("F", "y"), "y"))
        assert pattern == atom("R", apply("F", "x1"), "x2")
        assert leaves == (Var("y"), Var("y"))


class TestMorleyize:
    """Tests for morleyize on the swap structure."""

    def test_target_vocabulary(self, swap):
        target, translated, translation = morleyize(swap.vocabulary, swap, 1)
        assert target.is_relational
        assert target.predicates == (("Q_m0", 1), ("Q_m1", 1))
        assert target.constants == ("c",)
        assert translation.definitions["Q_m1"] == atom("Q", apply("F", "x1"))
        assert translated.universe == swap.universe

    def test_translation_preserves_values(self, swap):
        _, translated, translation = morleyize(swap.vocabulary, swap, 1)
        f = parse_formula("(sup x (absdiff (Q (F x)) (Q c)))", swap.vocabulary)
        g = translation(f)
        assert g.is_sentence
        assert evaluate(translated, g) == evaluate(swap, f)
        assert translation.translate_atom(atom("Q", apply("F", Const("c")))) == Atom("Q_m1", (Const("c"),))

    def test_depth_exceeded(self, swap):
        _, _, translation = morleyize(swap.vocabulary, swap, 1)
        with pytest.raises(DepthExceededError):
            translation(atom("Q", apply("F", apply("F", "x"))))

    def test_bad_arguments(self, swap, m0):
        with pytest.raises(StructuralError):
            morleyize(swap.vocabulary, swap, 0)
        with pytest.raises(VocabularyMismatchError):
            morleyize(m0.vocabulary, swap, 1)

    def test_name_clash_is_primed(self):
        vocab = Vocabulary(predicates=(("Q", 1), ("Q_m0", 1)), functions=(("F", 1),))
        m = random_structure(0, vocab, size=2)
        target, _, _ = morleyize(vocab, m, 1)
        names = [n for n, _ in target.predicates]
        assert "Q_m0'" in names
        assert len(set(names)) == len(names)


class TestMorleyizeProperty:
    """Translation preserves values and feeds the relational expansion."""

    @hypothesis_settings(max_examples=10, deadline=None)
    @given(st.integers(min_value=0, max_value=100_000))
    def test_random_structures(self, seed):
        vocab = Vocabulary(predicates=(("P", 1), ("R", 2)), functions=(("F", 1),), constants=("c",))
        m = random_structure(seed, vocab, size=3, denominator=4)
        target, translated, translation = morleyize(vocab, m, 2)
        source_eval, target_eval = evaluator_for(m), evaluator_for(translated)
        for f in generate_formulas(vocab, 1, width=40):
            g = translation(f)
            for env in assignments(m, f._free_sorted):
                assert source_eval.value(f, env) == target_eval.value(g, env)
        distance = synthesize_distance(target)[0]
        assert len(distance) > 0
