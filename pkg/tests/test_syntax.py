"""
Tests for terms, formulas and structural utilities.
"""
from fractions import Fraction

import pytest

from app.models.syntax import (
    FormulaSequence,
    Theory,
    Var,
    absdiff,
    alpha_normalize,
    apply,
    atom,
    constant,
    dotminus,
    dotplus,
    fmax,
    formula_lipschitz_bound,
    half,
    halved,
    inf,
    neg,
    quantifier_depth,
    scaled,
    schedule_by_name,
    schedule_from_text,
    substitute,
    sup,
    term_depth,
)
from app.models.vocabulary import Vocabulary
from app.services.semantics import evaluate
from app.services.textio import parse_structure
from app.utils.error_handling import StructuralError


class TestFormulaNodes:
    """Tests for construction and cached properties."""

    def test_free_vars_and_depth(self):
        f = sup("x", dotminus(atom("P", "x"), atom("P", "y")))
        assert f.free_vars == {"y"}
        assert f.depth == 2
        assert not f.is_sentence
        assert sup("y", f).is_sentence

    def test_equality_is_structural(self):
        assert atom("P", "x") == atom("P", "x")
        assert hash(neg(atom("P", "x"))) == hash(neg(atom("P", "x")))
        assert atom("P", "x") != atom("P", "y")

    def test_term_depth(self):
        f = atom("P", apply("F", apply("F", "x")))
        assert term_depth(f) == 2
        assert quantifier_depth(sup("x", inf("y", f))) == 2

    def test_sequence_frame_is_enforced(self):
        with pytest.raises(StructuralError):
            FormulaSequence((atom("P", "z"),), frame=("x", "y"))

    def test_theory_rejects_open_formulas(self):
        with pytest.raises(StructuralError):
            Theory((atom("P", "x"),))

    def test_unknown_schedule(self):
        assert schedule_by_name("lemma").bound(0) == Fraction(1, 2)
        assert schedule_by_name("stability").bound(1) == Fraction(3, 2)
        with pytest.raises(StructuralError):
            schedule_by_name("linear")

    def test_schedule_from_first_step(self):
        schedule = schedule_from_text("2/8")
        assert schedule.name == "1/4"
        assert [schedule.bound(m) for m in range(3)] == [Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)]
        assert schedule_from_text(" lemma ") == schedule_by_name("lemma")
        for bad in ("0", "1/0", "linear"):
            with pytest.raises(StructuralError):
                schedule_from_text(bad)


class TestSubstitution:
    """Tests for capture-avoiding substitution."""

    def test_substitution_renames_bound_variable(self):
        f = sup("y", absdiff(atom("P", "x"), atom("P", "y")))
        result = substitute(f, {"x": Var("y")})
        assert result.free_vars == {"y"}
        assert result.var != "y"
        assert result.body == absdiff(atom("P", "y"), atom("P", result.var))

    def test_simultaneous(self):
        f = absdiff(atom("R", "x", "y"), atom("R", "y", "x"))
        swapped = substitute(f, {"x": Var("y"), "y": Var("x")})
        assert swapped == absdiff(atom("R", "y", "x"), atom("R", "x", "y"))

    def test_bound_occurrences_untouched(self):
        f = sup("x", atom("P", "x"))
        assert substitute(f, {"x": Var("z")}) is f

    def test_substitution_preserves_values(self):
        m = parse_structure(
            "(structure (vocabulary (predicate R 2)) (universe a b)"
            " (predicate R (a a 0) (a b 1/4) (b a 3/4) (b b 1)))"
        )
        f = sup("y", dotminus(atom("R", "x", "y"), atom("R", "y", "x")))
        g = substitute(f, {"x": Var("y")})
        for e in m.universe:
            assert evaluate(m, f, {"x": e}) == evaluate(m, g, {"y": e})


class TestAlphaNormalization:
    """Tests for bound-variable normalization."""

    def test_alpha_equivalent_formulas_normalize_equally(self):
        f = sup("x", inf("y", absdiff(atom("R", "x", "y"), atom("P", "z"))))
        g = sup("u", inf("w", absdiff(atom("R", "u", "w"), atom("P", "z"))))
        assert alpha_normalize(f) == alpha_normalize(g)

    def test_skips_free_names(self):
        f = sup("x", dotplus(atom("P", "x"), atom("P", "v0")))
        assert alpha_normalize(f).var == "v1"


class TestDerivedBuilders:
    """Tests for scaled, halved and the Lipschitz bound."""

    def setup_method(self):
        self.m = parse_structure(
            "(structure (vocabulary (predicate P 1)) (universe a b c)"
            " (predicate P (a 0) (b 1/8) (c 3/8)))"
        )

    @pytest.mark.parametrize("factor", [1, 2, 3, 5, 8])
    def test_scaled_is_capped_multiplication(self, factor):
        f = scaled(atom("P", "x"), factor)
        for e, value in (("a", 0), ("b", Fraction(1, 8)), ("c", Fraction(3, 8))):
            assert evaluate(self.m, f, {"x": e}) == min(factor * value, 1)

    def test_scaled_rejects_zero(self):
        with pytest.raises(StructuralError):
            scaled(atom("P", "x"), 0)

    def test_halved(self):
        assert evaluate(self.m, halved(atom("P", "x"), 2), {"x": "c"}) == Fraction(3, 32)

    def test_lipschitz_bound(self):
        assert formula_lipschitz_bound(constant(1)) == 0
        assert formula_lipschitz_bound(half(half(atom("P", "x")))) == Fraction(1, 4)
        assert formula_lipschitz_bound(sup("x", fmax(atom("P", "x"), half(atom("P", "x"))))) == 1

    def test_vocabulary_rejects_reserved_names(self):
        with pytest.raises(StructuralError):
            Vocabulary(predicates=(("sup", 1),))
        with pytest.raises(StructuralError):
            Vocabulary(predicates=(("P", 1),), constants=("P",))
