"""
Unit tests for rewrite.py
Tests cover completion, normal forms, ambiguities and the linear-algebra oracle.
"""

import pytest

from errors import FieldMismatchError, InvalidInputError, ResourceCapExceeded
from expr_parser import parse_poly, parse_relations
from nc_core import FieldSpec, FreePoly, MonomialOrder, OrderMode
from potential import Potential, relations_of
from rewrite import RewriteSystem, ambiguities, complete, normal_form, oracle_dimension, unresolved_ambiguities
from settings import WorkbenchSettings


@pytest.fixture
def settings():
    return WorkbenchSettings(workers=2)


@pytest.fixture
def r1_relations():
    return list(relations_of(Potential(parse_poly("cyc(x^2 y) + y^4"))))


@pytest.fixture
def r1_system(r1_relations, settings):
    return complete(r1_relations, cap=10, settings=settings)


class TestComplete:
    """Test completion into a truncated Gröbner basis."""

    def test_leading_words(self, r1_system):
        """Test the leading words of cyc(x^2 y) + y^4."""
        assert set(r1_system.leading_words()) == {"xy", "xx", "yyyx", "yyyyyy"}

    def test_elements_are_monic(self, r1_system):
        """Test every element has leading coefficient one."""
        for g in r1_system.elements:
            assert g.leading_coefficient(r1_system.order) == r1_system.field.one

    def test_complete_through(self, r1_system):
        """Test certification stops lead degree below the cap."""
        assert r1_system.cap == 10
        assert r1_system.complete_through == 8

    def test_ambiguities_resolve(self, r1_system):
        """Test no ambiguity is left unresolved."""
        assert unresolved_ambiguities(r1_system) == []

    def test_no_relations(self, settings):
        """Test completion of nothing raises InvalidInputError."""
        with pytest.raises(InvalidInputError):
            complete([], cap=6, settings=settings)

    def test_cap_below_lead_degree(self, settings):
        """Test a cap below the leading degree raises InvalidInputError."""
        with pytest.raises(InvalidInputError):
            complete(parse_relations("x^2 + y^3"), cap=1, settings=settings)

    def test_global_commutative(self, settings):
        """Test a global completion of the commutator."""
        G = complete(parse_relations("x y - y x"), MonomialOrder("xy", OrderMode.GLOBAL), 6, settings=settings)
        assert G.leading_words() == ["xy"]
        assert normal_form(parse_poly("x y x"), G) == parse_poly("y x^2")

    def test_prime_field(self, settings):
        """Test completion over GF(5)."""
        rels = parse_relations("x y + y x, x^2 + y^3", FieldSpec(5))
        G = complete(rels, cap=10, settings=settings)
        assert set(G.leading_words()) == {"xy", "xx", "yyyx", "yyyyyy"}


class TestNormalForm:
    """Test reduction to normal form."""

    def test_x_squared(self, r1_system):
        """Test x^2 reduces to -y^3."""
        assert normal_form(parse_poly("x^2"), r1_system) == parse_poly("-y^3")

    def test_higher_order_term(self, settings):
        """Test the extra y^5 term shows up in the normal form of x^2."""
        rels = relations_of(Potential(parse_poly("cyc(x^2 y) + y^4 + y^5")))
        G = complete(rels, cap=10, settings=settings)
        assert normal_form(parse_poly("x^2"), G) == parse_poly("-y^3 - y^4")

    def test_normal_words_unchanged(self, r1_system):
        """Test normal words are fixed points."""
        f = parse_poly("y x + 2 y^2 x")
        assert normal_form(f, r1_system) == f

    def test_field_mismatch(self, r1_system):
        """Test reducing a GF(3) polynomial by a rational system fails."""
        with pytest.raises(FieldMismatchError):
            normal_form(FreePoly.letter("x", FieldSpec(3)), r1_system)


class TestAmbiguities:
    """Test overlap and inclusion ambiguities."""

    def test_found_for_raw_relations(self, r1_relations):
        """Test the raw relations have overlaps."""
        found = ambiguities([r.monic() for r in r1_relations], max_degree=4)
        assert found
        assert all(a.degree <= 4 for a in found)


class TestRecord:
    """Test the JSON record of a rewrite system."""

    def test_round_trip(self, r1_system):
        """Test from_record restores the elements."""
        restored = RewriteSystem.from_record(r1_system.to_record())
        assert restored.elements == r1_system.elements
        assert restored.complete_through == r1_system.complete_through

    def test_record_fields(self, r1_system):
        """Test the record carries order, field and leading words."""
        record = r1_system.to_record()
        assert record["order"] == {"precedence": "xy", "mode": "local"}
        assert record["field"] == "QQ"
        assert "x y" in record["leading_words"]


class TestOracle:
    """Test the linear-algebra dimension oracle."""

    def test_r1_counts(self, r1_relations, settings):
        """Test oracle counts of cyc(x^2 y) + y^4 through degree 8."""
        assert oracle_dimension(r1_relations, 8, settings=settings) == [1, 2, 2, 2, 1, 1, 0, 0, 0]

    def test_cap_limit(self, r1_relations):
        """Test caps above the configured limit raise ResourceCapExceeded."""
        with pytest.raises(ResourceCapExceeded):
            oracle_dimension(r1_relations, 8, settings=WorkbenchSettings(oracle_max_cap=6))
