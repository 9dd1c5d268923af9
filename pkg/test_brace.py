"""
Unit tests for brace.py
Tests cover brace and truss axioms, filtrations, the associated graded structure and the
distributivity series.
"""

import json

import numpy as np
import pytest
from pydantic import ValidationError

from brace import (
    BraceFile,
    FiniteBrace,
    FiniteTruss,
    Filtration,
    associated_graded,
    brace_from_nilpotent_ring,
    check_brace,
    check_filtration,
    check_truss,
    cyclic_ring,
    degree_bound_violations,
    distributivity_series,
    enumerate_braces,
    ideal_ring,
    is_right_distributive,
    load_brace_file,
    power_chain,
    pre_lie_defect,
    sign_brace,
    truncated_polynomial_ring,
    truss_from_nilpotent_ring,
    upper_triangular_ring,
)
from errors import InvalidInputError, ResourceCapExceeded
from settings import WorkbenchSettings


def cyclic_add(n):
    idx = np.arange(n)
    return (idx[:, None] + idx[None, :]) % n


@pytest.fixture
def sign8():
    return sign_brace(8)


@pytest.fixture
def sign8_chain():
    return Filtration.from_lists(8, [[0, 2, 4, 6], [0, 4]])


@pytest.fixture
def ring_brace():
    return brace_from_nilpotent_ring(truncated_polynomial_ring(2, 4))


@pytest.fixture
def z2_truss():
    """Z/2 with a*b = 1 and alpha = 1."""
    return FiniteTruss(cyclic_add(2), np.ones((2, 2), dtype=np.int64), np.ones(2, dtype=np.int64))



@pytest.fixture
def z3_truss():
    """Z/3 with a*b = 1 and alpha = 2, so a o b = a + b + 1."""
    return FiniteTruss(cyclic_add(3), np.ones((3, 3), dtype=np.int64), np.full(3, 2, dtype=np.int64))


@pytest.fixture
def cubic_ring():
    return truncated_polynomial_ring(3, 4)


@pytest.fixture
def ring_truss(cubic_ring):
    """a*b = ab - 2x^3 with alpha = 2x^3 on x F_3[x]/(x^4)."""
    return truss_from_nilpotent_ring(cubic_ring, max(cubic_ring.annihilator()))


class TestAxioms:
    """Test brace and truss axiom checks."""

    def test_trivial_brace(self):
        """Test the zero product gives a brace."""
        assert check_brace(FiniteBrace(cyclic_add(5), np.zeros((5, 5), dtype=np.int64))).valid

    def test_bad_circle_identity(self):
        """Test a*b = a breaks the circle identity."""
        idx = np.arange(4)
        verdict = check_brace(FiniteBrace(cyclic_add(4), np.repeat(idx[:, None], 4, axis=1)))
        assert not verdict.valid
        assert verdict.failed == "circle identity"

    def test_non_commutative_addition(self):
        """Test a non-symmetric addition table is reported first."""
        add = np.array([[0, 1, 2], [2, 0, 1], [1, 2, 0]])
        verdict = check_brace(FiniteBrace(add, np.zeros((3, 3), dtype=np.int64)))
        assert verdict.failed == "additive commutativity"

    def test_sign_brace(self, sign8):
        """Test the sign brace is valid and not right distributive."""
        assert check_brace(sign8).valid
        assert not is_right_distributive(sign8)

    def test_sign_brace_needs_even_order(self):
        """Test odd orders are rejected."""
        with pytest.raises(InvalidInputError):
            sign_brace(5)

    def test_truss(self, z2_truss):
        """Test the constant truss on Z/2."""
        assert check_truss(z2_truss).valid

    def test_truss_with_doubled_alpha(self, z3_truss):
        """Test a truss with 2 alpha != 0 passes."""
        assert check_truss(z3_truss).valid

    def test_ring_truss(self, ring_truss):
        """Test the ring truss passes although its tables do not form a brace."""
        assert check_truss(ring_truss).valid
        assert not check_brace(FiniteBrace(ring_truss.add, ring_truss.star)).valid

    def test_truss_axiom(self, z2_truss):
        """Test a wrong alpha fails the truss axiom."""
        broken = FiniteTruss(z2_truss.add, z2_truss.star, np.zeros(2, dtype=np.int64))
        assert check_truss(broken).failed == "truss axiom"

    def test_table_validation(self):
        """Test tables with out-of-range entries are rejected."""
        with pytest.raises(InvalidInputError):
            FiniteBrace(cyclic_add(3), np.full((3, 3), 3))

    def test_to_dict(self):
        """Test the verdict document."""
        idx = np.arange(4)
        data = check_brace(FiniteBrace(cyclic_add(4), np.repeat(idx[:, None], 4, axis=1))).to_dict()
        assert data["valid"] is False
        assert data["witness"] is not None


class TestRings:
    """Test ring constructions and their adjoint braces."""

    def test_nilpotent_rings_give_braces(self):
        """Test ring braces pass the axioms."""
        for R in (truncated_polynomial_ring(2, 4), upper_triangular_ring(2, 3), cyclic_ring(4, 2), ideal_ring(8, 2)):
            assert check_brace(brace_from_nilpotent_ring(R)).valid

    def test_not_nilpotent(self):
        """Test Z/3 is rejected."""
        with pytest.raises(InvalidInputError):
            brace_from_nilpotent_ring(cyclic_ring(3))

    def test_annihilator(self, cubic_ring):
        """Test the annihilator of x F_3[x]/(x^4) is spanned by x^3."""
        assert cubic_ring.annihilator() == [0, 9, 18]

    def test_truss_needs_annihilator(self, cubic_ring):
        """Test alpha must annihilate the ring."""
        with pytest.raises(InvalidInputError):
            truss_from_nilpotent_ring(cubic_ring, 1)

    def test_ideal_ring_divisibility(self):
        """Test the ideal must divide the modulus."""
        with pytest.raises(InvalidInputError):
            ideal_ring(8, 3)

    def test_power_filtration(self):
        """Test x F_2[x]/(x^4) has powers of orders 8, 4, 2, 1."""
        chain = truncated_polynomial_ring(2, 4).power_filtration()
        assert [len(c) for c in chain.components] == [8, 4, 2, 1]

    def test_power_chain_matches_ring_powers(self, ring_brace):
        """Test the brace power chain of a ring brace is the ring power filtration."""
        R = truncated_polynomial_ring(2, 4)
        assert power_chain(ring_brace).components == R.power_filtration().components

    def test_ring_is_right_distributive(self, ring_brace):
        """Test ring braces are two-sided."""
        assert is_right_distributive(ring_brace)


class TestFiltration:
    """Test filtration checks."""

    def test_from_lists(self, sign8_chain):
        """Test B and {0} are added at the ends."""
        assert sign8_chain.length == 4
        assert sign8_chain.part(1) == frozenset(range(8))
        assert sign8_chain.part(9) == frozenset({0})

    def test_degree(self, sign8_chain):
        """Test element degrees."""
        assert sign8_chain.degree(1) == 1
        assert sign8_chain.degree(4) == 3
        assert sign8_chain.degree(0) == float("inf")

    def test_sign_chain_valid(self, sign8, sign8_chain):
        """Test the sign brace chain passes every condition."""
        assert check_filtration(sign8, sign8_chain).valid

    def test_not_a_subgroup(self, sign8):
        """Test a component that is not a subgroup."""
        chain = Filtration.from_lists(8, [[0, 2, 4]])
        assert check_filtration(sign8, chain).failed == "subgroup"

    def test_multiplicativity(self, sign8):
        """Test the trivial two-step chain is not multiplicative."""
        assert check_filtration(sign8, Filtration.from_lists(8, [])).failed == "multiplicativity"

    def test_truss_chain(self, z2_truss):
        """Test the constant truss on Z/2 keeps alpha outside B_3."""
        assert check_filtration(z2_truss, Filtration.from_lists(2, [])).failed == "alpha degree"

    def test_ring_truss_chain(self, ring_truss, cubic_ring):
        """Test the power filtration passes with alpha inside B_3."""
        chain = cubic_ring.power_filtration()
        assert [len(c) for c in chain.components] == [27, 9, 3, 1]
        assert check_filtration(ring_truss, chain).valid

    def test_alpha_degree(self, z3_truss):
        """Test alpha outside B_3 is reported once the products pass."""
        assert check_filtration(z3_truss, Filtration.from_lists(3, [])).failed == "alpha degree"

    def test_ring_power_filtration(self, ring_brace):
        """Test the ring power filtration passes."""
        chain = truncated_polynomial_ring(2, 4).power_filtration()
        assert check_filtration(ring_brace, chain).valid


class TestGraded:
    """Test the associated graded structure and the pre-Lie identity."""

    def test_sign_graded(self, sign8, sign8_chain):
        """Test graded products are well defined and pre-Lie."""
        G = associated_graded(sign8, sign8_chain)
        assert G.well_defined
        assert G.top == 3
        assert pre_lie_defect(G).defect == 0

    def test_ring_graded(self, ring_brace):
        """Test the ring brace graded structure."""
        G = associated_graded(ring_brace, truncated_polynomial_ring(2, 4).power_filtration())
        assert G.well_defined
        report = pre_lie_defect(G)
        assert report.defect == 0
        assert report.triples > 0

    def test_ring_truss_graded(self, ring_truss, cubic_ring):
        """Test the truss graded structure is well defined and pre-Lie."""
        G = associated_graded(ring_truss, cubic_ring.power_filtration())
        assert G.well_defined
        report = pre_lie_defect(G)
        assert report.defect == 0
        assert report.triples > 0

    def test_to_dict(self, sign8, sign8_chain):
        """Test the graded document."""
        data = associated_graded(sign8, sign8_chain).to_dict()
        assert data["well_defined"] is True
        assert set(data["components"]) == {"1", "2", "3"}


class TestSeries:
    """Test the distributivity correction series."""

    def test_sign_brace_exact(self, sign8, sign8_chain):
        """Test every triple is recovered after as many terms as the chain is long."""
        for a in range(8):
            for b in range(8):
                for c in range(8):
                    report = distributivity_series(sign8, a, b, c, sign8_chain.length)
                    assert report.exact, (a, b, c)

    def test_direct_defect(self, sign8):
        """Test the defect of 1 + 1 against 1."""
        report = distributivity_series(sign8, 1, 1, 1, 4)
        assert report.direct == 4
        assert report.partial_sums[0] == 0

    def test_zero_b_terminates_immediately(self, sign8):
        """Test the series stops at once when b = 0."""
        assert distributivity_series(sign8, 3, 0, 1, 2).terminated_at == 0

    def test_degree_bound(self, sign8, sign8_chain):
        """Test the defect degree bound holds."""
        assert degree_bound_violations(sign8, sign8_chain) == []


class TestEnumeration:
    """Test brace enumeration on abelian groups."""

    def test_z2(self):
        """Test Z/2 carries only the trivial brace."""
        found = enumerate_braces((2,), WorkbenchSettings())
        assert len(found) == 1
        assert not found[0].star.any()

    def test_z4(self):
        """Test every enumerated brace on Z/4 is valid."""
        found = enumerate_braces((4,), WorkbenchSettings())
        assert len(found) >= 2
        assert all(check_brace(B).valid for B in found)

    def test_budget(self):
        """Test the node budget."""
        with pytest.raises(ResourceCapExceeded):
            enumerate_braces((2, 2), WorkbenchSettings(enumeration_node_budget=1))


class TestBraceFile:
    """Test the brace JSON format."""

    def test_shape_validation(self):
        """Test tables of the wrong size are rejected."""
        with pytest.raises(ValidationError):
            BraceFile(order=2, add=[[0, 1]], star=[[0, 0], [0, 0]])

    def test_round_trip(self, sign8, sign8_chain):
        """Test from_structure keeps tables and chain."""
        data = BraceFile.from_structure(sign8, sign8_chain)
        assert np.array_equal(data.structure().star, sign8.star)
        assert data.chain().components == sign8_chain.components

    def test_load_truss(self, tmp_path, z2_truss):
        """Test alpha makes a truss."""
        path = tmp_path / "truss.json"
        path.write_text(BraceFile.from_structure(z2_truss).model_dump_json())
        B, chain = load_brace_file(str(path))
        assert isinstance(B, FiniteTruss)
        assert chain.length == 2

    def test_load_errors(self, tmp_path):
        """Test unreadable and invalid files raise InvalidInputError."""
        with pytest.raises(InvalidInputError):
            load_brace_file(str(tmp_path / "missing.json"))
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"order": 2, "add": [[0, 1], [1, 0]], "star": [[0, 5], [0, 0]]}))
        with pytest.raises(InvalidInputError):
            load_brace_file(str(bad))
