"""
Tests for truth values and the connective basis.
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from app.core.kernel import (
    ABSDIFF,
    DOTMINUS,
    DOTPLUS,
    HALF_CONNECTIVE,
    MAX,
    MIN,
    NEG,
    TruthValue,
    apply_connective,
    connective_by_name,
    const,
    format_rational,
    lipschitz_constant,
    parse_rational,
)
from app.utils.error_handling import StructuralError, TruthValueRangeError

truth_values = st.fractions(min_value=0, max_value=1, max_denominator=64)


class TestTruthValue:
    """Tests for exact values in [0,1]."""

    def test_accepts_bounds_and_strings(self):
        assert TruthValue(0) == 0
        assert TruthValue("3/4") == Fraction(3, 4)
        assert TruthValue(2, 4) == Fraction(1, 2)

    @pytest.mark.parametrize("value", [Fraction(-1, 2), Fraction(5, 4), 2])
    def test_rejects_out_of_range(self, value):
        with pytest.raises(TruthValueRangeError):
            TruthValue(value)

    def test_format_and_parse(self):
        assert format_rational(Fraction(2, 4)) == "1/2"
        assert format_rational(Fraction(1)) == "1"
        assert parse_rational("6/8") == Fraction(3, 4)
        with pytest.raises(ValueError):
            parse_rational("1/0")
        with pytest.raises(ValueError):
            parse_rational("0.5")


class TestConnectives:
    """Tests for apply_connective."""

    def test_spec_values(self):
        assert apply_connective(DOTMINUS, ["3/4", "1/2"]) == Fraction(1, 4)
        assert apply_connective(DOTMINUS, ["1/4", "1/2"]) == 0
        assert apply_connective(DOTPLUS, ["3/4", "1/2"]) == 1
        assert apply_connective(NEG, ["1/4"]) == Fraction(3, 4)
        assert apply_connective(HALF_CONNECTIVE, ["1/2"]) == Fraction(1, 4)
        assert apply_connective(MIN, ["1/4", "1/2"]) == Fraction(1, 4)
        assert apply_connective(MAX, ["1/4", "1/2"]) == Fraction(1, 2)
        assert apply_connective(ABSDIFF, ["1/4", "1"]) == Fraction(3, 4)
        assert apply_connective(const("1/2"), []) == Fraction(1, 2)

    def test_arity_mismatch(self):
        with pytest.raises(StructuralError):
            apply_connective(NEG, [0, 1])

    def test_out_of_range_argument(self):
        with pytest.raises(TruthValueRangeError):
            apply_connective(NEG, [Fraction(3, 2)])

    def test_unknown_name(self):
        with pytest.raises(StructuralError):
            connective_by_name("implies")

    def test_lipschitz_constants(self):
        assert lipschitz_constant(HALF_CONNECTIVE) == Fraction(1, 2)
        assert lipschitz_constant(const(0)) == 0
        assert lipschitz_constant(DOTPLUS) == 1

    @hypothesis_settings(max_examples=200, deadline=None)
    @given(truth_values, truth_values)
    def test_results_stay_in_range(self, a, b):
        for conn in (DOTMINUS, DOTPLUS, MIN, MAX, ABSDIFF):
            value = apply_connective(conn, [a, b])
            assert isinstance(value, TruthValue)
            assert 0 <= value <= 1

    @hypothesis_settings(max_examples=200, deadline=None)
    @given(truth_values, truth_values, truth_values)
    def test_binary_connectives_are_1_lipschitz(self, a, b, c):
        for conn in (DOTMINUS, DOTPLUS, MIN, MAX, ABSDIFF):
            moved = abs(apply_connective(conn, [a, b]) - apply_connective(conn, [c, b]))
            assert moved <= abs(a - c)
