"""Tests for two-bridge links, Seifert forms and the obstruction bound."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.errors import (
    DegenerateInputError,
    DegenerateParameterError,
    InvalidInputError,
    PreconditionError,
    UnsupportedInputError,
)
from src.models.certificate import Verdict
from src.models.knot import EvenContinuedFraction, LaurentPoly, Orientation
from src.services.twobridge import (
    alexander_polynomial,
    branched_cover_report,
    cf_matrix_product,
    cf_to_rational,
    compact_form,
    component_count,
    definite_on_arc,
    fk_block,
    fprime_block,
    intersection_corank,
    levine_tristram_form,
    lspace_obstruction_bound,
    lt_signature,
    ors_pattern_check,
    principal_block,
    reversed_family,
    rho_theta,
    seifert_matrix,
    validate_cf,
)

TREFOIL = [[1, 1], [0, 1]]

even_entries = st.lists(
    st.integers(-5, 5).filter(bool).map(lambda k: 2 * k), min_size=1, max_size=6
)


class TestContinuedFractions:
    def test_values(self):
        assert cf_to_rational([2, 2, 2]) == Fraction(12, 5)
        assert cf_to_rational([2, -2]) == Fraction(3, 2)
        assert cf_to_rational([4]) == 4

    @given(even_entries)
    def test_matrix_product_agrees(self, entries):
        assert cf_matrix_product(entries) == cf_to_rational(entries)

    def test_components(self):
        assert component_count([2, 2, 2]) == 2
        assert component_count([2, 2]) == 1

    @pytest.mark.parametrize("entries", [[], [2, 0], [3], [2, 5, 2]])
    def test_invalid(self, entries):
        with pytest.raises(InvalidInputError):
            validate_cf(entries)

    def test_parse(self):
        cf = EvenContinuedFraction.parse("[2, 4, 2]", "reversed")
        assert cf.coefficients == (2, 4, 2)
        assert cf.orientation == Orientation.REVERSED


class TestSeifert:
    def test_canonical_matrix(self):
        assert seifert_matrix([2, 2]).matrix == [[1, 1], [0, -1]]
        assert seifert_matrix([2, -2]).matrix == TREFOIL

    def test_reversed_matrix_is_fprime_block(self):
        data = seifert_matrix([2, 2, 2], Orientation.REVERSED)
        assert data.matrix == fprime_block(1)
        assert data.blocks["F'(1)#1"] == [0, 1, 2]

    def test_reversed_chain(self):
        data = seifert_matrix([4, 2, 2], Orientation.REVERSED)
        assert data.size == 5
        assert data.blocks["F(2)#1"] == [0, 1, 2]
        assert data.matrix[3][3] == 2

    def test_principal_block_of_chain(self):
        data = seifert_matrix([4, 2, 2], Orientation.REVERSED)
        assert principal_block(data.matrix, data.blocks["F(2)#1"]) == fk_block(2)
        assert principal_block(data.matrix, data.blocks["F'(1)#1"]) == fprime_block(1)

    def test_reversed_family(self):
        assert reversed_family([4, 2, 2, 6, 2]) == ([2, 1, 1], [1, 3])
        with pytest.raises(UnsupportedInputError):
            reversed_family([2, 2])
        with pytest.raises(UnsupportedInputError):
            reversed_family([2, -2, 2])

    def test_fk_block(self):
        assert fk_block(2) == [[1, -1, 0], [0, 1, -1], [0, 0, 1]]
        with pytest.raises(InvalidInputError):
            fk_block(0)

    def test_corank_counts_components(self):
        assert intersection_corank(seifert_matrix([2, 2])) == 0
        assert intersection_corank(seifert_matrix([2, 2, 2])) == 1

    def test_non_square(self):
        with pytest.raises(InvalidInputError):
            alexander_polynomial([[1, 2]])


class TestAlexander:
    def test_figure_eight(self):
        assert alexander_polynomial(seifert_matrix([2, 2])).text() == "t^2 - 3*t + 1"

    def test_trefoil(self):
        delta = alexander_polynomial(TREFOIL)
        assert delta.ascending() == [1, -1, 1]
        assert delta.is_symmetric()

    def test_normalization(self):
        delta = alexander_polynomial([[1]])
        assert delta.ascending() == [-1, 1]
        assert delta.min_degree == 0

    def test_empty_matrix(self):
        assert alexander_polynomial([]).ascending() == [1]

    @given(even_entries)
    def test_canonical_polynomials_are_symmetric(self, entries):
        delta = alexander_polynomial(seifert_matrix(entries))
        assert delta.leading() > 0
        assert delta.is_symmetric()


class TestCompactForm:
    def test_trefoil(self):
        form = compact_form(alexander_polynomial(TREFOIL))
        assert form.g == [-1, 1]
        assert form.minus_one_power == 0

    def test_with_linear_factor(self):
        form = compact_form(LaurentPoly((-1, 1)))
        assert form.minus_one_power == 1
        assert form.g == [1]

    def test_zero(self):
        with pytest.raises(DegenerateInputError):
            compact_form(LaurentPoly())

    def test_not_palindromic(self):
        with pytest.raises(UnsupportedInputError):
            compact_form(LaurentPoly((1, 2)))


class TestSignatures:
    def test_trefoil_at_minus_one(self):
        assert lt_signature(TREFOIL, angle=Fraction(1, 2)) == (2, 0)

    def test_figure_eight_at_minus_one(self):
        assert lt_signature(seifert_matrix([2, 2]), angle=Fraction(1, 2)) == (0, 0)

    def test_form_is_hermitian(self):
        form = levine_tristram_form(TREFOIL, angle=Fraction(1, 3))
        assert np.allclose(form.matrix, form.matrix.conj().T)
        assert form.to_dict()["angle"] == "1/3"

    def test_form_at_minus_one(self):
        form = levine_tristram_form(TREFOIL, xi=-1)
        assert np.allclose(form.matrix, [[4, 2], [2, 4]])

    def test_degenerate_angle(self):
        with pytest.raises(DegenerateParameterError):
            lt_signature(TREFOIL, angle=Fraction(0))

    def test_off_circle(self):
        with pytest.raises(InvalidInputError):
            lt_signature(TREFOIL, xi=2)


class TestArcDefiniteness:
    @pytest.mark.parametrize("n, definite", [(2, True), (3, True), (5, True), (6, False), (7, False)])
    def test_trefoil(self, n, definite):
        assert definite_on_arc(TREFOIL, n).definite is definite

    def test_boundary_root_counts(self):
        result = definite_on_arc(TREFOIL, 6)
        assert result.witness["boundary"] is True

    def test_fk_block_two(self):
        assert definite_on_arc(fk_block(2), 3).definite
        boundary = definite_on_arc(fk_block(2), 4)
        assert not boundary.definite
        assert boundary.witness["boundary"] is True
        assert not definite_on_arc(fk_block(2), 5).definite

    @pytest.mark.parametrize("n", [3, 4, 6])
    def test_interior_root_with_rational_endpoint(self, n):
        result = definite_on_arc(fk_block(5), n)
        assert not result.definite
        assert "x_interval" in result.witness
        assert "boundary" not in result.witness

    def test_rational_root_inside_arc(self):
        result = definite_on_arc(fk_block(3), 4)
        assert not result.definite
        lo, hi = (Fraction(v) for v in result.witness["x_interval"])
        assert lo <= -1 <= hi < 0

    def test_unknot_block(self):
        assert definite_on_arc([[1]], 9).definite

    def test_n_too_small(self):
        with pytest.raises(InvalidInputError):
            definite_on_arc(TREFOIL, 1)


class TestObstructionBound:
    @pytest.mark.parametrize(
        "entries, n, block",
        [([2, 2, 2], 6, "F'(1)"), ([2, 4, 2], 8, "F'(2)"), ([2, 6, 2], 9, "F'(3)"), ([4, 2, 2], 4, "F(2)")],
    )
    def test_bounds(self, entries, n, block):
        bound = lspace_obstruction_bound(entries)
        assert (bound.n, bound.block) == (n, block)

    def test_closed_form(self):
        assert lspace_obstruction_bound([2, 2, 2]).closed_form == pytest.approx(6.0)
        assert lspace_obstruction_bound([4, 2, 2]).closed_form is None

    def test_bound_exceeds_closed_form(self):
        bound = lspace_obstruction_bound([2, 4, 2])
        assert bound.n >= bound.closed_form
        assert bound.closed_form == pytest.approx(2 * math.pi / math.acos(2 / 3))
        assert bound.closed_form == pytest.approx(7.47, abs=0.005)
        assert bound.n == 8

    def test_hopf_link(self):
        with pytest.raises(UnsupportedInputError):
            lspace_obstruction_bound([2])


class TestRhoTheta:
    def test_real_conjugate_for_small_angle(self):
        record = rho_theta(pi_multiple=Fraction(1, 7))
        assert record.conjugate_to_real
        assert record.rotation == Fraction(1, 7)
        assert record.s == pytest.approx(3 - 4 * math.cos(math.pi / 7) ** 2)
        assert record.relation_residual < 1e-9
        assert record.symmetry_residual < 1e-9
        assert record.closed_form_error < 1e-9

    def test_not_conjugate_at_third(self):
        record = rho_theta(pi_multiple=Fraction(1, 3))
        assert not record.conjugate_to_real
        assert record.rotation is None

    @given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100), max_denominator=100))
    def test_exact_verdict(self, r):
        record = rho_theta(pi_multiple=r)
        assert record.conjugate_to_real == (r < Fraction(1, 6) or r > Fraction(5, 6))

    def test_float_angle(self):
        assert rho_theta(theta=math.pi / 9).conjugate_to_real

    def test_degenerate_angle(self):
        with pytest.raises(PreconditionError):
            rho_theta(pi_multiple=Fraction(2))
        with pytest.raises(InvalidInputError):
            rho_theta()


class TestReport:
    def test_patterns(self):
        assert ors_pattern_check([4, 2, 4], target_k=2)
        assert not ors_pattern_check([4, 2, 6])
        assert ors_pattern_check([2, 2, 2, 4, 2, 2, 2], pattern="triple-block", target_ls=[2])
        with pytest.raises(InvalidInputError):
            ors_pattern_check([2], pattern="other")

    def test_l222(self):
        report = branched_cover_report([2, 2, 2])
        assert report.verdict == Verdict.CERTIFIED
        assert report.canonical["components"] == 2
        assert report.reversed["not_lspace_from"]["n"] == 6
        assert set(report.reversed["left_orderable"]) == {"7", "8", "9", "10", "11", "12"}
        assert report.reversed["left_orderable"]["7"] == {"left_orderable": True, "rotation": "1/7"}

    def test_knot_is_unsupported_when_reversed(self):
        report = branched_cover_report([2, 2])
        assert report.verdict == Verdict.UNSUPPORTED
        assert "unsupported" in report.reversed


class TestBlockFormulas:
    @pytest.mark.parametrize("k", range(1, 9))
    def test_fk_alexander(self, k):
        delta = alexander_polynomial(fk_block(k))
        assert delta.ascending() == [(-1) ** (i + 1) for i in range(2 * k)]

    @pytest.mark.parametrize("l", range(1, 9))
    def test_fprime_alexander(self, l):
        delta = alexander_polynomial(fprime_block(l))
        assert delta.ascending() == [-(l + 1), 3 * l + 1, -(3 * l + 1), l + 1]

    @pytest.mark.slow
    def test_fk_definiteness_table(self):
        for k in range(2, 13):
            for n in range(3, 13):
                assert definite_on_arc(fk_block(k), n).definite is (k * (n - 2) < n), (k, n)

    @pytest.mark.parametrize("n", range(7, 25))
    def test_rho_theta_on_pi_over_n(self, n):
        record = rho_theta(pi_multiple=Fraction(1, n))
        assert record.s < 0
        assert record.relation_residual <= 1e-12
        assert record.closed_form_error <= 1e-12
        assert record.symmetry_residual <= 1e-12
