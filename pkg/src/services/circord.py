"""Circular orders on finite sets and on their automorphism groups."""

import logging
from itertools import combinations, permutations
from typing import Callable, Hashable, Optional, Sequence

from src.config import get_engine_config
from src.errors import InvalidInputError, SizeLimitError
from src.models.circular_order import (
    CircularOrder,
    ElementId,
    GroupCircularOrder,
    OrderAutomorphism,
    OrderCheck,
    RawOrderTable,
    element_sort_key,
    permutation_sign,
)

logger = logging.getLogger(__name__)


def cocycle_defect(c: Callable, e1, e2, e3, e4) -> int:
    """c(e2,e3,e4) - c(e1,e3,e4) + c(e1,e2,e4) - c(e1,e2,e3); zero for a circular order."""
    return c(e2, e3, e4) - c(e1, e3, e4) + c(e1, e2, e4) - c(e1, e2, e3)


def from_signs(elements: Sequence[ElementId], sign_of: Callable) -> CircularOrder:
    """Build a canonical CircularOrder from any function evaluating c on distinct triples."""
    ordered = tuple(sorted(elements, key=element_sort_key))
    if len(set(ordered)) != len(ordered):
        raise InvalidInputError(f"Duplicate elements in {list(elements)}")
    signs = tuple(
        sign_of(ordered[i], ordered[j], ordered[k])
        for i, j, k in combinations(range(len(ordered)), 3)
    )
    return CircularOrder(elements=ordered, signs=signs)


def from_cyclic_listing(listing: Sequence[ElementId]) -> CircularOrder:
    """
    Build the circular order in which `listing` is read counter-clockwise.

    Args:
        listing: At least three distinct element ids.

    Returns:
        CircularOrder with c(a, b, c) = 1 iff a, b, c appear in cyclic listing order.
    """
    listing = list(listing)
    if len(set(listing)) != len(listing):
        raise InvalidInputError(f"Cyclic listing has duplicates: {listing}")
    if len(listing) < 3:
        raise InvalidInputError(f"Cyclic listing needs at least 3 elements, got {len(listing)}")
    place = {e: i for i, e in enumerate(listing)}
    return from_signs(listing, lambda a, b, c: permutation_sign((place[a], place[b], place[c])))


def check_circular_order(c: CircularOrder) -> OrderCheck:
    """Check the sign and cocycle axioms of a canonical circular order exhaustively."""
    for e1, e2, e3, sign in c.triples():
        if sign not in (-1, 1):
            return OrderCheck(False, f"triple has sign {sign}, expected +1 or -1", (e1, e2, e3))

    # The defect is alternating, so increasing quadruples cover all of them.
    for quad in combinations(c.elements, 4):
        if cocycle_defect(c.value, *quad) != 0:
            return OrderCheck(False, "cocycle identity fails", quad)
    return OrderCheck(True)


def check_table(table: RawOrderTable) -> OrderCheck:
    """
    Validate a raw table c: E^3 -> {-1, 0, 1} against both axioms.

    Missing ordered triples are filled from a given permutation of the same
    elements; a triple with no given permutation makes the table non-total.

    Raises:
        InvalidInputError: If the table mentions an element not in the element list.
    """
    known = set(table.elements)
    if len(known) != len(table.elements):
        raise InvalidInputError(f"Duplicate elements in {table.elements}")
    for triple in table.entries:
        for e in triple:
            if e not in known:
                raise InvalidInputError(f"Element {e!r} in triple {triple} is not in the element list")

    canonical: dict[frozenset, tuple[tuple, int]] = {}
    for triple, value in table.entries.items():
        if value not in (-1, 0, 1):
            return OrderCheck(False, f"value {value} outside {{-1, 0, 1}}", triple)
        if len(set(triple)) < 3:
            if value != 0:
                return OrderCheck(False, "nonzero value on coinciding arguments", triple)
            continue
        if value == 0:
            return OrderCheck(False, "zero value on distinct arguments", triple)

        ordered = tuple(sorted(triple, key=element_sort_key))
        keys = tuple(ordered.index(e) for e in triple)
        normalized = permutation_sign(keys) * value
        key = frozenset(triple)
        if key in canonical and canonical[key][1] != normalized:
            return OrderCheck(
                False, "antisymmetry fails between permutations", canonical[key][0] + triple
            )
        canonical.setdefault(key, (triple, normalized))

    for triple in combinations(sorted(table.elements, key=element_sort_key), 3):
        if frozenset(triple) not in canonical:
            return OrderCheck(False, "table is not total", triple)

    def value(a, b, c) -> int:
        if a == b or b == c or a == c:
            return 0
        ordered = tuple(sorted((a, b, c), key=element_sort_key))
        keys = tuple(ordered.index(e) for e in (a, b, c))
        return permutation_sign(keys) * canonical[frozenset((a, b, c))][1]

    for quad in combinations(table.elements, 4):
        if cocycle_defect(value, *quad) != 0:
            return OrderCheck(False, "cocycle identity fails", quad)
    return OrderCheck(True)


def validate_circular_order(c) -> bool:
    """True iff `c` (a CircularOrder or RawOrderTable) satisfies both axioms."""
    if isinstance(c, RawOrderTable):
        return check_table(c).valid
    return check_circular_order(c).valid


def order_from_table(table: RawOrderTable) -> CircularOrder:
    """Validate a raw table and convert it to canonical form."""
    check = check_table(table)
    if not check.valid:
        raise InvalidInputError(f"Not a circular order: {check.failure} at {check.witness}")
    signs = {tuple(t): s for t, s in table.entries.items()}

    def sign_of(a, b, c) -> int:
        for perm in permutations((a, b, c)):
            if perm in signs:
                ordered = (a, b, c)
                return permutation_sign(tuple(perm.index(e) for e in ordered)) * signs[perm]
        raise InvalidInputError(f"Triple {(a, b, c)} missing from table")

    return from_signs(table.elements, sign_of)


def is_order_preserving(c: CircularOrder, g: OrderAutomorphism) -> bool:
    """True iff g is a bijection of the elements of c preserving c on every triple."""
    if sorted(g.domain, key=element_sort_key) != list(c.elements):
        return False
    if sorted(g.images, key=element_sort_key) != list(c.elements):
        return False
    return all(c.value(g(a), g(b), g(d)) == s for a, b, d, s in c.triples())


def automorphism_group(
    c: CircularOrder,
    bound: Optional[int] = None,
    marking: Optional[dict[ElementId, Hashable]] = None,
) -> list[OrderAutomorphism]:
    """
    Enumerate every permutation of E preserving c (and `marking`, if given).

    The search assigns images element by element and prunes as soon as a
    triple among assigned elements changes sign.

    Args:
        c: Circular order on E.
        bound: Largest |E| accepted (default from ORDERFORGE_MAX_ORDER_SIZE).
        marking: Optional colouring of elements that automorphisms must preserve.

    Returns:
        Automorphisms sorted by label, identity included.

    Raises:
        SizeLimitError: If |E| exceeds the bound.
    """
    bound = bound if bound is not None else get_engine_config().max_order_size
    if c.size > bound:
        raise SizeLimitError(f"|E| = {c.size} exceeds the automorphism search bound {bound}")
    colour = marking or {}
    for e in colour:
        if e not in c:
            raise InvalidInputError(f"Marked element {e!r} is not in the circular order")

    elements = c.elements
    found: list[OrderAutomorphism] = []

    def extend(images: list[ElementId], used: set[ElementId]) -> None:
        k = len(images)
        if k == len(elements):
            found.append(OrderAutomorphism(elements, tuple(images)))
            return
        source = elements[k]
        for target in elements:
            if target in used or colour.get(target) != colour.get(source):
                continue
            consistent = all(
                c.value(images[i], images[j], target) == c.value(elements[i], elements[j], source)
                for i, j in combinations(range(k), 2)
            )
            if consistent:
                images.append(target)
                used.add(target)
                extend(images, used)
                images.pop()
                used.discard(target)

    extend([], set())
    logger.debug(f"Found {len(found)} automorphisms of an order on {c.size} elements")
    return sorted(found, key=lambda g: [element_sort_key(e) for e in g.images])


def extension_circular_order(
    coset_of: Callable,
    coset_order: Callable,
    stabilizer_less: Callable,
    multiply: Callable,
    inverse: Callable,
) -> Callable:
    """
    Piece together a circular order on a group from a circular order on the
    cosets of a stabilizer and a left-order on the stabilizer.

    Args:
        coset_of: Maps g to a hashable label of its coset g G_e.
        coset_order: Circular order on coset labels.
        stabilizer_less: Strict left-order on stabilizer elements.
        multiply: Group multiplication.
        inverse: Group inversion.

    Returns:
        Function c'(g1, g2, g3) following the four cases of the construction.
    """

    def sign_of(h) -> int:
        identity = multiply(h, inverse(h))
        if h == identity:
            return 0
        return 1 if stabilizer_less(identity, h) else -1

    def c_prime(g1, g2, g3) -> int:
        gs = (g1, g2, g3)
        if g1 == g2 or g2 == g3 or g1 == g3:
            return 0
        cosets = [coset_of(g) for g in gs]
        if len(set(cosets)) == 3:
            return coset_order(*cosets)
        if len(set(cosets)) == 2:
            for i, j in ((0, 1), (0, 2), (1, 2)):
                if cosets[i] == cosets[j]:
                    return (-1) ** ((j - i) + 1) * sign_of(multiply(inverse(gs[i]), gs[j]))
        base = inverse(g1)
        hs = [multiply(base, g) for g in gs]
        ranking = sorted(range(3), key=lambda idx: _rank(hs, idx, stabilizer_less))
        return permutation_sign(tuple(ranking))

    return c_prime


def _rank(hs: list, idx: int, less: Callable) -> int:
    return sum(1 for other in hs if less(other, hs[idx]))


def circular_order_on_aut(
    c: CircularOrder,
    basepoint: ElementId,
    group: Optional[list[OrderAutomorphism]] = None,
) -> GroupCircularOrder:
    """
    Circularly order the automorphism group of (E, c) from a basepoint e.

    Cosets of the stabilizer G_e are ordered through g G_e -> g(e); the
    stabilizer is ordered lexicographically on E minus e, where e1 < e2 iff
    c(e, e1, e2) = 1.

    Raises:
        InvalidInputError: If c fails validation or the basepoint is not in E.
    """
    check = check_circular_order(c)
    if not check.valid:
        raise InvalidInputError(f"Not a circular order: {check.failure} at {check.witness}")
    if basepoint not in c:
        raise InvalidInputError(f"Basepoint {basepoint!r} is not in the circular order")

    automorphisms = group if group is not None else automorphism_group(c)
    if not any(g.is_identity() for g in automorphisms):
        raise InvalidInputError("Automorphism list must contain the identity")

    line = [e for e in c.to_listing(basepoint)[1:]]
    by_label = {g.label: g for g in automorphisms}

    def stabilizer_less(h1: OrderAutomorphism, h2: OrderAutomorphism) -> bool:
        for e in line:
            a, b = h1(e), h2(e)
            if a != b:
                return c.value(basepoint, a, b) == 1
        return False

    c_prime = extension_circular_order(
        coset_of=lambda g: g(basepoint),
        coset_order=c.value,
        stabilizer_less=stabilizer_less,
        multiply=lambda g, h: g.compose(h),
        inverse=lambda g: g.inverse(),
    )
    order = from_signs(
        list(by_label), lambda a, b, d: c_prime(by_label[a], by_label[b], by_label[d])
    )

    stabilizer = [g for g in automorphisms if g(basepoint) == basepoint]
    if len(stabilizer) > 1:
        logger.warning(f"Stabilizer of {basepoint!r} has {len(stabilizer)} elements")
    return GroupCircularOrder(
        basepoint=basepoint,
        automorphisms=list(automorphisms),
        order=order,
        stabilizer_size=len(stabilizer),
    )


def is_left_invariant(result: GroupCircularOrder) -> bool:
    """Check c'(g g1, g g2, g g3) = c'(g1, g2, g3) over all g and triples."""
    labels = result.by_label()
    order = result.order
    for g in result.automorphisms:
        for a, b, d, sign in order.triples():
            moved = (g.compose(labels[x]).label for x in (a, b, d))
            if order.value(*moved) != sign:
                return False
    return True
