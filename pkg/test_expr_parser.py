"""
Unit tests for expr_parser.py
Tests cover the expression grammar, cyclicization, error positions and field labels.
"""

from fractions import Fraction

import pytest

from errors import InvalidInputError, ParseError
from expr_parser import parse_field_label, parse_poly, parse_relations
from nc_core import RATIONALS, FieldSpec, FreePoly

GOLDEN = [
    "x^3 + y^3 + cyc(x y x y)",
    "cyc(x^2 y) + y^4",
    "cyc(x^2 y) + y^4 + y^5",
    "1/3 y x y - x^2",
    "-2 x + 3/2 (x y - y x)",
]


class TestParsePoly:
    """Test parsing of polynomial expressions."""

    def test_dim8_potential(self):
        """Test cyc expands to the sum of rotations."""
        f = parse_poly("x^3 + y^3 + cyc(x y x y)")
        assert f == FreePoly({"xxx": 1, "yyy": 1, "xyxy": 2, "yxyx": 2})

    def test_cyclic_x2y(self):
        """Test cyc(x^2 y) + y^4."""
        assert parse_poly("cyc(x^2 y) + y^4") == FreePoly({"xxy": 1, "xyx": 1, "yxx": 1, "yyyy": 1})

    def test_rational_coefficients(self):
        """Test rational coefficients and subtraction."""
        assert parse_poly("1/3 y x y - x^2") == FreePoly({"yxy": Fraction(1, 3), "xx": -1})

    def test_parentheses_distribute(self):
        """Test a coefficient times a group."""
        assert parse_poly("2(x + y)") == FreePoly({"x": 2, "y": 2})

    def test_power_binds_tighter(self):
        """Test ^ applies to the letter only."""
        assert parse_poly("x y^2") == FreePoly({"xyy": 1})

    def test_whitespace_insignificant(self):
        """Test spacing does not matter."""
        assert parse_poly("x y x") == parse_poly("xyx") == parse_poly(" x  yx ")

    def test_cap_truncates(self):
        """Test words above the cap are dropped."""
        assert parse_poly("x + x^5", cap=3) == FreePoly({"x": 1}, cap=3)

    def test_prime_field(self):
        """Test coefficients reduce into the requested field."""
        F = FieldSpec(3)
        assert parse_poly("4 x", F) == FreePoly({"x": 1}, F)

    def test_round_trip(self):
        """Test rendering reparses to the same polynomial."""
        for text in GOLDEN:
            f = parse_poly(text)
            assert parse_poly(f.render()) == f


class TestParseErrors:
    """Test syntax errors carry positions."""

    def test_double_caret(self):
        """Test x^^2 fails at offset 2."""
        with pytest.raises(ParseError) as info:
            parse_poly("x^^2")
        assert info.value.position == 2

    def test_zero_denominator(self):
        """Test 1/0 is rejected at the coefficient."""
        with pytest.raises(ParseError) as info:
            parse_poly("1/0 x^3")
        assert info.value.position == 0

    def test_denominator_not_invertible(self):
        """Test 1/7 has no meaning over GF(7)."""
        with pytest.raises(ParseError):
            parse_poly("1/7 x^3", FieldSpec(7))

    def test_zero_exponent_inside_cyc(self):
        """Test degree-0 words are rejected inside cyc."""
        with pytest.raises(ParseError):
            parse_poly("cyc(x^0)")

    def test_constant_inside_cyc(self):
        """Test a bare constant inside cyc is rejected."""
        with pytest.raises(ParseError):
            parse_poly("cyc(1)")

    def test_unknown_letter(self):
        """Test unknown variables are syntax errors."""
        with pytest.raises(ParseError):
            parse_poly("x + z")

    def test_unexpected_end(self):
        """Test a dangling operator."""
        with pytest.raises(ParseError):
            parse_poly("x +")


class TestParseRelations:
    """Test comma-separated relation lists."""

    def test_two_relations(self):
        """Test each part parses separately."""
        rels = parse_relations("x y + y x, x^2 + y^3")
        assert rels == [FreePoly({"xy": 1, "yx": 1}), FreePoly({"xx": 1, "yyy": 1})]

    def test_error_offset_is_global(self):
        """Test error positions count from the start of the whole list."""
        with pytest.raises(ParseError) as info:
            parse_relations("x y, x^^2")
        assert info.value.position == 7


class TestFieldLabels:
    """Test field label parsing."""

    def test_labels(self):
        """Test accepted spellings."""
        assert parse_field_label("QQ") == RATIONALS
        assert parse_field_label("GF(5)") == FieldSpec(5)
        assert parse_field_label("7") == FieldSpec(7)

    def test_unknown_label(self):
        """Test unknown labels raise ParseError."""
        with pytest.raises(ParseError):
            parse_field_label("RR")

    def test_composite_characteristic(self):
        """Test GF(4) is rejected."""
        with pytest.raises(InvalidInputError):
            parse_field_label("GF(4)")
