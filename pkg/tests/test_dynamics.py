"""Tests for PL circle maps and translation numbers."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.config import EngineConfig
from src.errors import InvalidInputError, PreconditionError
from src.models.circle_map import PLCircleMap
from src.models.circular_order import OrderAutomorphism
from src.services.circord import from_cyclic_listing
from src.services.dynamics import (
    compose,
    conjugate,
    displacement_range,
    dynamic_realization,
    embedding,
    has_fixed_point,
    identity,
    inverse,
    power,
    rotation_number_mod1,
    shift,
    translation_number,
)

F = Fraction


def half_symmetric_bump() -> PLCircleMap:
    """Commutes with x -> x + 1/2; fixed points 1/4 and 3/4, attracting from 0."""
    return PLCircleMap.from_points(
        [(0, F(1, 20)), (F(1, 4), F(1, 4)), (F(1, 2), F(11, 20)), (F(3, 4), F(3, 4))]
    )


def attracting_half_turn() -> PLCircleMap:
    """Rotation number 1/2 with 0 not periodic."""
    return compose(shift(F(1, 2)), half_symmetric_bump())


small_fractions = st.fractions(min_value=-3, max_value=3, max_denominator=40)


class TestMaps:
    def test_evaluate_wraps(self):
        f = PLCircleMap.from_points([(0, F(1, 10)), (F(1, 2), F(1, 2))])
        assert f(0) == F(1, 10)
        assert f(F(1, 4)) == F(1, 10) + F(4, 5) * F(1, 4)
        assert f(F(3, 2)) == F(3, 2)
        assert f(-1) == F(-9, 10)

    def test_from_dict_both_forms(self):
        a = PLCircleMap.from_dict({"points": [["0", "1/3"], ["1/2", "2/3"]]})
        b = PLCircleMap.from_dict({"breakpoints": ["0", "1/2"], "values": ["1/3", "2/3"]})
        assert a == b
        assert PLCircleMap.from_dict(a.to_dict()) == a

    def test_points_are_reduced_into_unit_interval(self):
        f = PLCircleMap.from_points([(F(5, 4), F(3, 2))])
        assert f.breakpoints == (F(1, 4),)
        assert f.values == (F(1, 2),)

    def test_inverse_and_compose(self):
        f = half_symmetric_bump()
        g = compose(f, inverse(f))
        for x in (F(0), F(1, 7), F(1, 3), F(5, 6), F(-2, 3)):
            assert g(x) == x

    def test_power_of_shift(self):
        assert power(shift(F(1, 3)), 3)(F(1, 5)) == F(6, 5)
        assert power(shift(F(1, 3)), -2)(0) == F(-2, 3)
        assert power(half_symmetric_bump(), 0)(F(2, 7)) == F(2, 7)

    def test_displacement(self):
        assert displacement_range(shift(F(1, 3))) == (F(1, 3), F(1, 3))
        assert displacement_range(half_symmetric_bump()) == (F(0), F(1, 20))
        assert has_fixed_point(identity())
        assert not has_fixed_point(shift(F(1, 3)))

    def test_invalid_map(self):
        bad = PLCircleMap((F(0), F(1, 2)), (F(1, 2), F(1, 4)))
        with pytest.raises(InvalidInputError):
            translation_number(bad)
        wide = PLCircleMap((F(0), F(1, 2)), (F(0), F(3, 2)))
        with pytest.raises(InvalidInputError):
            translation_number(wide)


class TestTranslationNumber:
    def test_identity(self):
        tau = translation_number(identity())
        assert tau.is_exact and tau.exact == 0
        assert tau.method == "orbit"

    def test_rigid_rotation(self):
        assert translation_number(shift(F(1, 3))).exact == F(1, 3)
        assert rotation_number_mod1(shift(F(5, 2))).exact == F(1, 2)
        assert translation_number(shift(F(5, 2))).exact == F(5, 2)

    def test_fixed_point_found_by_search(self):
        f = PLCircleMap.from_points([(0, F(1, 10)), (F(1, 2), F(1, 2))])
        tau = translation_number(f)
        assert tau.exact == 0
        assert tau.method == "periodic-point"

    def test_periodic_orbit_found_by_search(self):
        tau = translation_number(attracting_half_turn())
        assert tau.exact == F(1, 2)
        assert tau.method == "periodic-point"
        assert tau.iterations == 2

    def test_interval_fallback_is_certified(self):
        config = EngineConfig(max_period=1, exact_bits=64, width_tolerance=F(1, 1000))
        tau = translation_number(attracting_half_turn(), budget=4096, config=config)
        assert tau.method == "interval"
        assert not tau.is_exact
        assert tau.contains(F(1, 2))
        assert tau.width <= F(1, 1000)
        assert tau.certified_width

    def test_interval_fallback_reports_loose_width(self):
        config = EngineConfig(max_period=1, exact_bits=64, width_tolerance=F(1, 10**9))
        tau = translation_number(attracting_half_turn(), budget=300, config=config)
        assert tau.contains(F(1, 2))
        assert not tau.certified_width
        assert "interval" in tau.to_dict()

    def test_budget_must_be_positive(self):
        with pytest.raises(InvalidInputError):
            translation_number(identity(), budget=0)

    @given(small_fractions)
    def test_shift_translation_number(self, r):
        assert translation_number(shift(r)).exact == r

    @settings(deadline=None, max_examples=30)
    @given(st.fractions(min_value=0, max_value=1, max_denominator=12))
    def test_conjugation_invariance(self, r):
        f = conjugate(half_symmetric_bump(), shift(r))
        assert translation_number(f).exact == r

    @settings(deadline=None, max_examples=30)
    @given(small_fractions, small_fractions)
    def test_commuting_maps_add(self, r, s):
        assert translation_number(compose(shift(r), shift(s))).exact == r + s


class TestRealization:
    def test_embedding_positions(self):
        c = from_cyclic_listing([1, 4, 3, 2])
        assert embedding(c) == {1: F(0), 4: F(1, 4), 3: F(1, 2), 2: F(3, 4)}

    def test_rotation_by_one_place(self):
        c = from_cyclic_listing([1, 2, 3, 4])
        g = OrderAutomorphism((1, 2, 3, 4), (2, 3, 4, 1))
        assert rotation_number_mod1(dynamic_realization(c, g)).exact == F(1, 4)

    def test_rotation_read_in_another_order(self):
        c = from_cyclic_listing([1, 4, 3, 2])
        g = OrderAutomorphism((1, 2, 3, 4), (2, 3, 4, 1))
        assert rotation_number_mod1(dynamic_realization(c, g)).exact == F(3, 4)

    def test_non_preserving_map(self):
        c = from_cyclic_listing([1, 2, 3, 4])
        g = OrderAutomorphism((1, 2, 3, 4), (2, 1, 3, 4))
        with pytest.raises(PreconditionError):
            dynamic_realization(c, g)

    @given(st.integers(3, 9), st.data())
    def test_rotation_matches_orbit_step(self, n, data):
        k = data.draw(st.integers(0, n - 1))
        c = from_cyclic_listing(list(range(n)))
        g = OrderAutomorphism(tuple(range(n)), tuple((e + k) % n for e in range(n)))
        assert rotation_number_mod1(dynamic_realization(c, g)).exact == F(k, n)


class TestTranslationLaws:
    @settings(deadline=None, max_examples=40)
    @given(st.fractions(min_value=-2, max_value=2, max_denominator=10), st.integers(-3, 3))
    def test_power_scales(self, r, n):
        f = conjugate(half_symmetric_bump(), shift(r))
        assert translation_number(power(f, n)).exact == n * translation_number(f).exact

    @settings(deadline=None, max_examples=40)
    @given(st.fractions(min_value=-2, max_value=2, max_denominator=10))
    def test_fixed_point_iff_zero(self, r):
        f = conjugate(half_symmetric_bump(), shift(r))
        assert has_fixed_point(f) == (translation_number(f).exact == 0)

    def test_fixed_point_maps(self):
        f = PLCircleMap.from_points([(0, F(1, 10)), (F(1, 2), F(1, 2))])
        assert has_fixed_point(f)
        assert translation_number(f).exact == 0
        assert not has_fixed_point(attracting_half_turn())
