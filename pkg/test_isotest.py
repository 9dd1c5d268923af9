"""
Unit tests for isotest.py
Tests cover finite algebras, exact witnesses, modular searches and distinguish.
"""

import pytest

from errors import FieldError, InvalidInputError, ResourceCapExceeded
from expr_parser import parse_poly, parse_relations
from isotest import (
    FiniteAlgebra,
    IsoStatus,
    Strategy,
    brute_force_iso,
    distinguish,
    identity_images,
    lifted_iso_search,
    permuted_copy,
    reduce_mod_p,
    swap_letters,
    verify_isomorphism,
)
from nc_core import FieldSpec
from potential import Potential, relations_of
from quotient import StructureTable, dimension_of
from settings import WorkbenchSettings


@pytest.fixture
def settings():
    return WorkbenchSettings(workers=2)


def algebra(relations, settings, field=FieldSpec(0)):
    Q = dimension_of(parse_relations(relations, field), 6, settings=settings)
    return FiniteAlgebra.from_quotient(Q, workers=1)


@pytest.fixture
def exterior(settings):
    """x^2 = y^2 = 0, x y = -y x"""
    return algebra("x^2, y^2, x y + y x", settings)


@pytest.fixture
def monomial(settings):
    """x^2 = y^2 = x y = 0"""
    return algebra("x^2, y^2, x y", settings)


class TestFiniteAlgebra:
    """Test finite algebra construction."""

    def test_from_quotient(self, monomial):
        """Test the basis words."""
        assert monomial.words == ["", "x", "y", "yx"]

    def test_basis_must_be_products(self):
        """Test a word that is not the product of its letters is rejected."""
        with pytest.raises(InvalidInputError):
            FiniteAlgebra(FieldSpec(0), ["", "x", "y", "xy"], {})

    def test_generators_required(self):
        """Test both generators must be basis elements."""
        with pytest.raises(InvalidInputError):
            FiniteAlgebra.from_table(StructureTable(FieldSpec(0), ["", "x"], {}))

    def test_swap_letters(self, monomial):
        """Test swapping renames the basis."""
        assert swap_letters(monomial).words == ["", "y", "x", "xy"]

    def test_permuted_copy(self, monomial):
        """Test permuting the radical basis."""
        assert permuted_copy(monomial, [1, 0, 2]).words == ["", "y", "x", "yx"]

    def test_bad_permutation(self, monomial):
        """Test non-permutations are rejected."""
        with pytest.raises(InvalidInputError):
            permuted_copy(monomial, [0, 0, 2])


class TestVerifyIsomorphism:
    """Test exact witness checks."""

    def test_identity(self, monomial):
        """Test the identity is an automorphism."""
        assert verify_isomorphism(monomial, monomial, identity_images(monomial))

    def test_swap_is_not_an_automorphism(self, monomial):
        """Test exchanging x and y does not respect x y = 0."""
        ident = identity_images(monomial)
        assert not verify_isomorphism(monomial, monomial, {"x": ident["y"], "y": ident["x"]})

    def test_swap_into_swapped_copy(self, monomial):
        """Test the identity on names maps into the swapped copy only after exchanging letters."""
        other = swap_letters(monomial)
        ident = identity_images(other)
        assert verify_isomorphism(monomial, other, {"x": ident["y"], "y": ident["x"]})


class TestReduceModP:
    """Test entry-wise reduction."""

    def test_field(self, exterior):
        """Test the reduced algebra lives over GF(p)."""
        assert reduce_mod_p(exterior, 5).field == FieldSpec(5)

    def test_prime_input_rejected(self, settings):
        """Test only rational tables are reduced."""
        with pytest.raises(FieldError):
            reduce_mod_p(algebra("x^2, y^2, x y", settings, FieldSpec(3)), 5)


class TestModularSearch:
    """Test brute force and lifted searches over prime fields."""

    def test_brute_force_finds_witness(self, monomial, settings):
        """Test the monomial algebra is isomorphic to its swapped copy over GF(3)."""
        A = reduce_mod_p(monomial, 3)
        verdict = brute_force_iso(A, swap_letters(A), workers=1, settings=settings)
        assert verdict.status is IsoStatus.ISOMORPHIC
        assert verdict.field == "GF(3)"

    def test_brute_force_rejects(self, exterior, monomial, settings):
        """Test exhaustion proves non-isomorphism over GF(3)."""
        verdict = brute_force_iso(reduce_mod_p(exterior, 3), reduce_mod_p(monomial, 3), workers=1, settings=settings)
        assert verdict.status is IsoStatus.NOT_ISOMORPHIC

    def test_brute_force_budget(self, monomial):
        """Test the candidate budget."""
        A = reduce_mod_p(monomial, 3)
        with pytest.raises(ResourceCapExceeded):
            brute_force_iso(A, A, workers=1, settings=WorkbenchSettings(brute_force_budget=100))

    def test_lift_finds_witness(self, monomial, settings):
        """Test the lifted search finds the swap."""
        verdict = lifted_iso_search(monomial, swap_letters(monomial), p=5, settings=settings)
        assert verdict.status is IsoStatus.ISOMORPHIC
        assert verdict.field == "GF(5)"

    def test_lift_rejects(self, exterior, monomial, settings):
        """Test every linear part fails between non-isomorphic algebras."""
        verdict = lifted_iso_search(exterior, monomial, p=5, settings=settings)
        assert verdict.status is IsoStatus.NOT_ISOMORPHIC


class TestDistinguish:
    """Test the combined isomorphism test."""

    def test_invariant_mismatch(self, exterior, monomial, settings):
        """Test annihilators separate the exterior and monomial algebras over QQ."""
        verdict = distinguish(exterior, monomial, settings=settings)
        assert verdict.status is IsoStatus.NOT_ISOMORPHIC
        assert not verdict.proxy
        assert "left_annihilator" in verdict.certificate["invariants"]

    def test_exact_swap(self, monomial, settings):
        """Test the swap candidate is found exactly."""
        verdict = distinguish(monomial, swap_letters(monomial), settings=settings)
        assert verdict.status is IsoStatus.ISOMORPHIC
        assert verdict.certificate["strategy"] == "swap"
        assert not verdict.proxy

    def test_permuted_copy(self, monomial, settings):
        """Test reordering the basis keeps the algebra."""
        verdict = distinguish(monomial, permuted_copy(monomial, [1, 0, 2]), settings=settings)
        assert verdict.status is IsoStatus.ISOMORPHIC

    def test_invariants_only(self, exterior, settings):
        """Test the invariant strategy never searches."""
        verdict = distinguish(exterior, exterior, strategy=Strategy.INVARIANTS, settings=settings)
        assert verdict.status is IsoStatus.ISOMORPHIC

    def test_to_dict(self, exterior, monomial, settings):
        """Test the verdict document."""
        data = distinguish(exterior, monomial, settings=settings).to_dict()
        assert data["status"] == IsoStatus.NOT_ISOMORPHIC.value
        assert data["field"] == "QQ"

    def test_field_mismatch(self, exterior, settings):
        """Test algebras over different fields cannot be compared."""
        with pytest.raises(FieldError):
            distinguish(exterior, reduce_mod_p(exterior, 3), settings=settings)

    @pytest.mark.slow
    def test_dim9_representatives(self, settings):
        """Test the two nine-dimensional representatives are not isomorphic."""
        algebras = []
        for text in ("cyc(x^2 y) + y^4", "cyc(x^2 y) + y^4 + y^5"):
            F = Potential(parse_poly(text, cap=12))
            algebras.append(dimension_of(relations_of(F), 12, settings=settings))
        verdict = distinguish(*algebras, settings=settings)
        assert verdict.status is IsoStatus.NOT_ISOMORPHIC
