"""Tests for circular orders on finite sets and automorphism groups."""

import random
from itertools import permutations, product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.errors import InvalidInputError, SizeLimitError
from src.models.circular_order import OrderAutomorphism, RawOrderTable, permutation_sign
from src.services.circord import (
    automorphism_group,
    check_circular_order,
    check_table,
    circular_order_on_aut,
    cocycle_defect,
    extension_circular_order,
    from_cyclic_listing,
    from_signs,
    is_left_invariant,
    is_order_preserving,
    order_from_table,
    validate_circular_order,
)


def full_table(listing):
    """Every ordered triple of distinct elements with its sign."""
    place = {e: i for i, e in enumerate(listing)}
    rows = []
    for a, b, c in permutations(listing, 3):
        rows.append([a, b, c, permutation_sign((place[a], place[b], place[c]))])
    return {"elements": list(listing), "triples": rows}


class TestFromCyclicListing:
    def test_canonical_three_cycle(self):
        c = from_cyclic_listing([1, 2, 3])
        assert c.value(1, 2, 3) == 1
        assert c.value(2, 3, 1) == 1
        assert c.value(1, 3, 2) == -1
        assert c.value(1, 1, 2) == 0
        assert validate_circular_order(c)

    def test_listing_round_trip_starts_anywhere(self):
        c = from_cyclic_listing(["c", "a", "d", "b"])
        assert c.to_listing("a") == ("a", "d", "b", "c")
        assert c.to_listing("c") == ("c", "a", "d", "b")

    def test_rejects_duplicates_and_short_listings(self):
        with pytest.raises(InvalidInputError):
            from_cyclic_listing([1, 2, 1])
        with pytest.raises(InvalidInputError):
            from_cyclic_listing([1, 2])

    @given(st.permutations(list(range(7))))
    def test_any_listing_is_a_circular_order(self, listing):
        c = from_cyclic_listing(listing)
        assert check_circular_order(c).valid
        assert c.to_listing(listing[0]) == tuple(listing)

    @given(st.permutations(list(range(6))), st.integers(min_value=0, max_value=5))
    def test_sign_pattern_matches_positions(self, listing, shift):
        rotated = listing[shift:] + listing[:shift]
        assert from_cyclic_listing(listing) == from_cyclic_listing(rotated)


class TestTableValidation:
    def test_full_table_is_valid(self):
        table = RawOrderTable.from_dict(full_table([1, 2, 3, 4]))
        assert check_table(table).valid
        assert order_from_table(table) == from_cyclic_listing([1, 2, 3, 4])

    def test_missing_triple_is_not_total(self):
        data = full_table([1, 2, 3, 4])
        data["triples"] = [row for row in data["triples"] if set(row[:3]) != {1, 2, 4}]
        check = check_table(RawOrderTable.from_dict(data))
        assert not check.valid
        assert check.failure == "table is not total"
        assert set(check.witness) == {1, 2, 4}

    def test_antisymmetry_violation_names_the_triples(self):
        data = {"elements": [1, 2, 3], "triples": [[1, 2, 3, 1], [2, 1, 3, 1]]}
        check = check_table(RawOrderTable.from_dict(data))
        assert not check.valid
        assert "antisymmetry" in check.failure

    def test_zero_on_distinct_arguments(self):
        data = {"elements": [1, 2, 3], "triples": [[1, 2, 3, 0]]}
        assert check_table(RawOrderTable.from_dict(data)).failure == "zero value on distinct arguments"

    def test_cocycle_failure_on_four_elements(self):
        # Antisymmetric and total, but not coming from a cyclic arrangement
        data = {
            "elements": [1, 2, 3, 4],
            "triples": [[1, 2, 3, 1], [1, 2, 4, 1], [1, 3, 4, 1], [2, 3, 4, -1]],
        }
        check = check_table(RawOrderTable.from_dict(data))
        assert not check.valid
        assert check.failure == "cocycle identity fails"
        assert set(check.witness) == {1, 2, 3, 4}

    def test_unknown_element(self):
        data = {"elements": [1, 2, 3], "triples": [[1, 2, 9, 1]]}
        with pytest.raises(InvalidInputError):
            check_table(RawOrderTable.from_dict(data))

    def test_order_from_invalid_table_raises(self):
        data = {"elements": [1, 2, 3], "triples": [[1, 2, 3, 0]]}
        with pytest.raises(InvalidInputError):
            order_from_table(RawOrderTable.from_dict(data))

    def test_malformed_row(self):
        with pytest.raises(ValueError):
            RawOrderTable.from_dict({"elements": [1, 2, 3], "triples": [[1, 2, 3]]})


class TestCocycle:
    @given(st.permutations(list(range(6))), st.lists(st.integers(0, 5), min_size=4, max_size=4))
    def test_defect_vanishes_on_all_quadruples(self, listing, quad):
        c = from_cyclic_listing(listing)
        assert cocycle_defect(c.value, *quad) == 0

    def test_random_signs_usually_fail(self):
        rng = random.Random(7)
        failures = 0
        for _ in range(20):
            c = from_signs(range(6), lambda a, b, d: rng.choice((-1, 1)) * permutation_sign((a, b, d)))
            failures += not check_circular_order(c).valid
        assert failures > 0


class TestAutomorphisms:
    def test_four_cycle_has_rotations_only(self):
        c = from_cyclic_listing([1, 2, 3, 4])
        group = automorphism_group(c)
        assert len(group) == 4
        assert group[0].is_identity()
        assert all(is_order_preserving(c, g) for g in group)

    def test_reflection_is_not_order_preserving(self):
        c = from_cyclic_listing([1, 2, 3, 4])
        reflection = OrderAutomorphism((1, 2, 3, 4), (1, 4, 3, 2))
        assert not is_order_preserving(c, reflection)

    def test_marking_kills_rotations(self):
        c = from_cyclic_listing([1, 2, 3, 4])
        group = automorphism_group(c, marking={1: "red"})
        assert [g.label for g in group] == ["[1 2 3 4]"]

    def test_marking_with_period_two(self):
        c = from_cyclic_listing([1, 2, 3, 4])
        group = automorphism_group(c, marking={1: "red", 3: "red", 2: "blue", 4: "blue"})
        assert len(group) == 2

    def test_size_bound(self):
        c = from_cyclic_listing(list(range(5)))
        with pytest.raises(SizeLimitError):
            automorphism_group(c, bound=4)

    def test_unknown_marked_element(self):
        c = from_cyclic_listing([1, 2, 3])
        with pytest.raises(InvalidInputError):
            automorphism_group(c, marking={9: "red"})

    @given(st.integers(min_value=3, max_value=7))
    def test_cyclic_group_order_equals_size(self, n):
        c = from_cyclic_listing(list(range(n)))
        assert len(automorphism_group(c, bound=9)) == n


class TestOrderOnAutomorphisms:
    def test_four_cycle_orbit_order(self):
        c = from_cyclic_listing([1, 2, 3, 4])
        result = circular_order_on_aut(c, 1)
        assert result.stabilizer_size == 1
        assert result.order.to_listing() == ("[1 2 3 4]", "[2 3 4 1]", "[3 4 1 2]", "[4 1 2 3]")
        assert check_circular_order(result.order).valid
        assert is_left_invariant(result)

    def test_orbit_order_follows_images_of_basepoint(self):
        c = from_cyclic_listing(["a", "c", "b", "e", "d"])
        result = circular_order_on_aut(c, "b")
        labels = result.by_label()
        for g1, g2, g3, sign in result.order.triples():
            images = (labels[g](("b")) for g in (g1, g2, g3))
            assert c.value(*images) == sign

    def test_group_without_identity(self):
        c = from_cyclic_listing([1, 2, 3])
        rotation = OrderAutomorphism((1, 2, 3), (2, 3, 1))
        with pytest.raises(InvalidInputError):
            circular_order_on_aut(c, 1, [rotation])

    def test_unknown_basepoint(self):
        with pytest.raises(InvalidInputError):
            circular_order_on_aut(from_cyclic_listing([1, 2, 3]), 7)

    @given(st.integers(min_value=3, max_value=6), st.data())
    def test_left_invariance_for_cyclic_groups(self, n, data):
        listing = data.draw(st.permutations(list(range(n))))
        c = from_cyclic_listing(listing)
        result = circular_order_on_aut(c, data.draw(st.sampled_from(listing)))
        assert is_left_invariant(result)


class TestExtensionConstruction:
    """Z/3 x Z with cosets of {0} x Z ordered cyclically and the Z factor ordered by <."""

    @staticmethod
    def extension():
        return extension_circular_order(
            coset_of=lambda g: g[0],
            coset_order=lambda a, b, d: from_cyclic_listing([0, 1, 2]).value(a, b, d),
            stabilizer_less=lambda h1, h2: h1[1] < h2[1],
            multiply=lambda g, h: ((g[0] + h[0]) % 3, g[1] + h[1]),
            inverse=lambda g: ((-g[0]) % 3, -g[1]),
        )

    def test_window_is_circularly_ordered(self):
        c_prime = self.extension()
        window = [(a, x) for a, x in product(range(3), range(-2, 3))]
        labels = {f"{a}:{x}": (a, x) for a, x in window}
        order = from_signs(list(labels), lambda p, q, r: c_prime(labels[p], labels[q], labels[r]))
        assert check_circular_order(order).valid

    def test_same_coset_follows_stabilizer_order(self):
        c_prime = self.extension()
        assert c_prime((0, 0), (0, 1), (0, 2)) == 1
        assert c_prime((0, 1), (0, 0), (0, 2)) == -1
        assert c_prime((0, 0), (0, 1), (1, 0)) == 1
        assert c_prime((0, 1), (1, 0), (0, 0)) == 1

    @given(
        st.tuples(st.integers(0, 2), st.integers(-5, 5)),
        st.lists(st.tuples(st.integers(0, 2), st.integers(-5, 5)), min_size=3, max_size=3, unique=True),
    )
    def test_left_invariance(self, g, triple):
        c_prime = self.extension()

        def mul(h):
            return ((g[0] + h[0]) % 3, g[1] + h[1])

        assert c_prime(*map(mul, triple)) == c_prime(*triple)
