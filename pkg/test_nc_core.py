"""
Unit tests for nc_core.py
Tests cover word orders, exact fields, truncated polynomials and substitutions.
"""

from fractions import Fraction

import pytest

from errors import FieldError, FieldMismatchError, InvalidInputError, SingularSubstitutionError, SubstitutionError
from nc_core import (
    RATIONALS,
    FieldSpec,
    FreePoly,
    MonomialOrder,
    Ordering,
    OrderMode,
    Substitution,
    abelianize_cubic,
    compare_words,
    invert_substitution,
    poly_mul,
    render_word,
    substitute,
    words_of_degree,
)


@pytest.fixture
def x():
    return FreePoly.letter("x")


@pytest.fixture
def y():
    return FreePoly.letter("y")


class TestWords:
    """Test word enumeration and rendering."""

    def test_words_of_degree(self):
        """Test words come in lexicographic order."""
        assert words_of_degree(2) == ["xx", "xy", "yx", "yy"]
        assert words_of_degree(0) == [""]

    def test_render_word_collapses_powers(self):
        """Test runs of a letter render as powers."""
        assert render_word("xxyx") == "x^2 y x"
        assert render_word("") == "1"


class TestMonomialOrder:
    """Test degree-lexicographic comparison."""

    def test_degree_first(self):
        """Test longer words are greater."""
        assert compare_words("x", "yy") is Ordering.LESS

    def test_precedence(self):
        """Test the precedence string decides lex comparison."""
        assert compare_words("xy", "yx") is Ordering.GREATER
        assert compare_words("xy", "yx", MonomialOrder("yx")) is Ordering.LESS

    def test_local_and_global_leading_words(self):
        """Test local orders lead with low degree and global orders with high degree."""
        words = ["x", "yy", "y"]
        assert MonomialOrder().leading_word(words) == "x"
        assert MonomialOrder("xy", OrderMode.GLOBAL).leading_word(words) == "yy"

    def test_bad_precedence(self):
        """Test precedence must name both letters."""
        with pytest.raises(InvalidInputError):
            MonomialOrder("xx")


class TestFieldSpec:
    """Test exact coefficient fields."""

    def test_labels(self):
        """Test field labels."""
        assert RATIONALS.label == "QQ"
        assert FieldSpec(5).label == "GF(5)"

    def test_non_prime_rejected(self):
        """Test a composite characteristic is rejected."""
        with pytest.raises(InvalidInputError):
            FieldSpec(4)

    def test_rational_strings(self):
        """Test "a/b" strings coerce exactly."""
        assert RATIONALS.render(RATIONALS.coerce("2/4")) == "1/2"
        assert RATIONALS.to_fraction(RATIONALS.coerce(Fraction(-3, 6))) == Fraction(-1, 2)

    def test_prime_field_inverse(self):
        """Test fractions reduce into prime fields."""
        F = FieldSpec(5)
        assert F.to_int(F.coerce(Fraction(1, 2))) == 3

    def test_non_invertible_denominator(self):
        """Test a denominator divisible by p raises FieldError."""
        with pytest.raises(FieldError):
            FieldSpec(5).coerce("1/5")

    def test_garbage_string(self):
        """Test non-numeric strings raise FieldError."""
        with pytest.raises(FieldError):
            RATIONALS.coerce("abc")


class TestFreePoly:
    """Test truncated polynomial arithmetic."""

    def test_cap_drops_high_words(self):
        """Test words above the cap are never stored."""
        f = FreePoly({"x": 1, "xxx": 2}, RATIONALS, cap=2)
        assert f.words() == ["x"]

    def test_zero_coefficients_dropped(self):
        """Test zero coefficients disappear."""
        assert FreePoly({"x": 0}).is_zero()

    def test_add_and_subtract(self, x, y):
        """Test addition cancels exactly."""
        assert (x + y) - x == y

    def test_field_mismatch(self, x):
        """Test combining fields raises FieldMismatchError."""
        with pytest.raises(FieldMismatchError):
            x + FreePoly.letter("y", FieldSpec(3))

    def test_product(self, x, y):
        """Test the noncommutative product."""
        assert poly_mul(x + y, x - y) == FreePoly({"xx": 1, "xy": -1, "yx": 1, "yy": -1})

    def test_product_truncates(self, x, y):
        """Test products respect the cap argument."""
        assert poly_mul(x, y, cap=1).is_zero()

    def test_render(self):
        """Test rendering order and exact coefficients."""
        f = FreePoly({"xy": 1, "yx": -1, "x": Fraction(1, 2)})
        assert f.render() == "1/2 x + x y - y x"
        assert FreePoly().render() == "0"

    def test_leading_word_by_mode(self):
        """Test local and global leading words."""
        f = FreePoly({"xx": 1, "yyy": 1})
        assert f.leading_word() == "xx"
        assert f.leading_word(MonomialOrder("xy", OrderMode.GLOBAL)) == "yyy"

    def test_monic(self):
        """Test monic divides by the leading coefficient."""
        f = FreePoly({"xy": 2, "yx": 4}).monic()
        assert f == FreePoly({"xy": 1, "yx": 2})

    def test_zero_has_no_leading_word(self):
        """Test the zero polynomial has no leading word."""
        with pytest.raises(InvalidInputError):
            FreePoly().leading_word()

    def test_degree_helpers(self):
        """Test degree inspection."""
        f = FreePoly({"x": 1, "xyy": 3})
        assert f.low_degree() == 1
        assert f.max_degree() == 3
        assert f.degree_part(3) == FreePoly({"xyy": 3})
        assert not f.is_homogeneous()


class TestSubstitution:
    """Test substitutions and their inverses."""

    def test_substitute(self, x, y):
        """Test letters are replaced by their images."""
        s = Substitution(x + y, y)
        assert substitute(FreePoly({"xy": 1}), s) == FreePoly({"xy": 1, "yy": 1})

    def test_constant_term_rejected(self, y):
        """Test images with a constant term raise SubstitutionError."""
        with pytest.raises(SubstitutionError):
            Substitution(FreePoly({"": 1, "x": 1}), y)

    def test_inverse_series(self, y):
        """Test the inverse of x -> x + x^2 through degree 4."""
        s = Substitution(FreePoly({"x": 1, "xx": 1}, cap=4), y.with_cap(4), 4)
        inv = invert_substitution(s)
        assert inv.image_x == FreePoly({"x": 1, "xx": -1, "xxx": 2, "xxxx": -5}, cap=4)
        assert s.then(inv).is_identity()

    def test_singular_inverse(self, x):
        """Test a singular linear part cannot be inverted."""
        s = Substitution(x.with_cap(3), x.with_cap(3), 3)
        with pytest.raises(SingularSubstitutionError):
            invert_substitution(s)

    def test_scaling_determinant(self):
        """Test the determinant of a scaling."""
        assert Substitution.scaling(2, 3).determinant() == RATIONALS.coerce(6)

    def test_to_dict(self, x, y):
        """Test rendering of images."""
        assert Substitution(x + y, y).to_dict() == {"x": "x + y", "y": "y"}


class TestAbelianize:
    """Test commutative images of cubics."""

    def test_cyclic_x2y(self):
        """Test cyc(x^2 y) abelianizes to 3 x^2 y."""
        f = FreePoly({"xxy": 1, "xyx": 1, "yxx": 1})
        assert tuple(RATIONALS.to_fraction(c) for c in abelianize_cubic(f)) == (0, 3, 0, 0)

    def test_non_cubic_rejected(self):
        """Test non-homogeneous input raises InvalidInputError."""
        with pytest.raises(InvalidInputError):
            abelianize_cubic(FreePoly({"xxx": 1, "xx": 1}))
