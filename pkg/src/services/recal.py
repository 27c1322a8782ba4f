"""Recalibration of vertex stars and whole trees."""

import copy
import logging
from fractions import Fraction
from math import gcd
from typing import Iterable

from src.errors import InvalidInputError, PreconditionError
from src.models.calibration import RecalibratedTree, StarCalibration
from src.models.tree import CyclicOrderTree, NodeKind
from src.services.ordtree import TreeSkeleton

logger = logging.getLogger(__name__)


def _split_against(delta: int, n: int) -> tuple[int, int]:
    """Factor delta = c * e where every prime of c divides n and gcd(e, n) = 1."""
    c, e = 1, delta
    g = gcd(e, n)
    while g > 1:
        c *= g
        e //= g
        g = gcd(e, n)
    return c, e


def adjust_coprime(a: int, n: int, delta: int) -> int:
    """
    Shift a within its class mod n so it becomes coprime to delta.

    Writes delta = c * e with the primes of c dividing n and gcd(e, n) = 1, and
    takes the smallest k >= 0 with k * n = 1 - a (mod e). Then a' = a + k * n is
    1 mod e and a unit mod c.

    Raises:
        InvalidInputError: If n or delta is not positive.
        PreconditionError: If gcd(a, n) != 1.
    """
    if n < 1 or delta < 1:
        raise InvalidInputError(f"n and delta must be positive, got n={n}, delta={delta}")
    if gcd(a, n) != 1:
        raise PreconditionError(f"gcd({a}, {n}) = {gcd(a, n)} != 1")
    _, e = _split_against(delta, n)
    k = 0 if e == 1 else ((1 - a) * pow(n, -1, e)) % e
    adjusted = a + k * n
    logger.debug(f"adjust_coprime({a}, {n}, {delta}): k={k}, a'={adjusted}")
    return adjusted


def balanced_inverse(a: int, d: int) -> int:
    """Representative of a^-1 mod d in (-d/2, d/2]."""
    if d < 1:
        raise InvalidInputError(f"Modulus must be positive, got {d}")
    if gcd(a, d) != 1:
        raise PreconditionError(f"{a} is not invertible mod {d}")
    b = pow(a, -1, d) if d > 1 else 0
    if 2 * b > d:
        b -= d
    return b


def calibrate(n: int, delta: int, a: int) -> StarCalibration:
    """Build the calibration for target rotation a/n at valency n * delta."""
    adjusted = adjust_coprime(a, n, delta)
    d = n * delta
    return StarCalibration(d=d, delta=delta, n=n, a=adjusted, b=balanced_inverse(adjusted, d))


def check_calibration(cal: StarCalibration) -> None:
    """
    Raises:
        InvalidInputError: If the calibration violates its invariants.
    """
    if min(cal.d, cal.delta, cal.n) < 1:
        raise InvalidInputError(f"Calibration sizes must be positive: {cal.to_dict()}")
    if cal.d != cal.n * cal.delta:
        raise InvalidInputError(f"Valency {cal.d} != n * delta = {cal.n * cal.delta}")
    if gcd(cal.a, cal.d) != 1:
        raise InvalidInputError(f"a = {cal.a} is not coprime to d = {cal.d}")
    if (cal.a * cal.b - 1) % cal.d:
        raise InvalidInputError(f"a * b = {cal.a * cal.b} is not 1 mod {cal.d}")


def recalibrate_star(d: int, b: int) -> tuple[int, ...]:
    """
    The listing (1, b+1, 2b+1, ..., (d-1)b+1) of star indices, taken in {1..d}.

    Raises:
        PreconditionError: If gcd(b, d) != 1.
    """
    if d < 1:
        raise InvalidInputError(f"Valency must be positive, got {d}")
    if gcd(b, d) != 1:
        raise PreconditionError(f"gcd({b}, {d}) != 1; the listing would repeat")
    return tuple((k * b) % d + 1 for k in range(d))


def index_shift_winding(listing: tuple[int, ...], step: int) -> Fraction:
    """
    Rotation number of the index shift i -> i + step, read in the circular
    order given by `listing`: total forward displacement along the orbit of
    index 1, in turns, divided by the orbit length.
    """
    d = len(listing)
    position = {index: p for p, index in enumerate(listing)}
    here, travelled, length = 1, 0, 0
    while True:
        nxt = (here - 1 + step) % d + 1
        travelled += (position[nxt] - position[here]) % d
        length += 1
        here = nxt
        if here == 1:
            break
    return Fraction(travelled, d * length)


def star_rotation_number(cal: StarCalibration) -> tuple[Fraction, Fraction]:
    """
    Rotation numbers of the meridional shift by delta before and after recalibration.

    Returns:
        (natural, recalibrated): natural = delta/d = 1/n; recalibrated = a/n mod 1.
    """
    check_calibration(cal)
    natural = Fraction(cal.delta, cal.d)
    listing = recalibrate_star(cal.d, cal.b)
    recalibrated = index_shift_winding(listing, cal.delta) % 1
    logger.debug(f"Star rotation {natural} -> {recalibrated} for {cal.to_dict()}")
    return natural, recalibrated


def recalibrate_tree(
    t: CyclicOrderTree, vertices: Iterable[str], cal: StarCalibration
) -> RecalibratedTree:
    """
    Replace the local order at each vertex of V by its recalibrated listing.

    The stored listing at v is read as the indexed star sigma_1..sigma_d.

    Raises:
        InvalidInputError: If a vertex is unknown, not regular, has the wrong
            degree or lacks a local order.
    """
    check_calibration(cal)
    skeleton = TreeSkeleton(t)
    chosen = sorted(set(vertices))
    result = copy.deepcopy(t)
    previous: dict[str, list[str]] = {}
    listing = recalibrate_star(cal.d, cal.b)

    for v in chosen:
        if v not in t.nodes:
            raise InvalidInputError(f"Vertex {v} is not in the tree")
        if t.nodes[v] != NodeKind.REGULAR:
            raise InvalidInputError(f"Vertex {v} is tagged {t.nodes[v].value}, not regular")
        degree = len(skeleton.adjacency[v])
        if degree != cal.d:
            raise InvalidInputError(f"Vertex {v} has degree {degree}, expected {cal.d}")
        if v not in t.orders:
            raise InvalidInputError(f"Vertex {v} has no indexed local order")
        star = t.orders[v]
        previous[v] = list(star)
        result.orders[v] = [star[i - 1] for i in listing]

    TreeSkeleton(result)
    natural, recalibrated = star_rotation_number(cal)
    logger.info(f"Recalibrated {len(chosen)} vertices with {cal.to_dict()}")
    return RecalibratedTree(
        tree=result,
        vertices=chosen,
        calibration=cal,
        natural=natural,
        recalibrated=recalibrated,
        previous_orders=previous,
    )
