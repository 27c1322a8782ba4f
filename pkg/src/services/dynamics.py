"""Translation and rotation numbers of PL circle maps, and dynamic realization."""

import logging
from fractions import Fraction
from math import ceil, floor
from typing import Optional

from src.config import EngineConfig, get_engine_config
from src.errors import InvalidInputError, PreconditionError
from src.models.circle_map import PLCircleMap, RotationNumber
from src.models.circular_order import CircularOrder, ElementId, OrderAutomorphism
from src.services.circord import is_order_preserving

logger = logging.getLogger(__name__)

GRID = 2**64


def validate_map(f: PLCircleMap) -> None:
    """
    Raises:
        InvalidInputError: If f is not a lift of an orientation-preserving PL homeomorphism.
    """
    xs, ys = f.breakpoints, f.values
    if not xs or len(xs) != len(ys):
        raise InvalidInputError("A circle map needs matching, non-empty breakpoints and values")
    if xs[0] < 0 or xs[-1] >= 1:
        raise InvalidInputError("Breakpoints must lie in [0, 1)")
    for i in range(1, len(xs)):
        if xs[i] <= xs[i - 1]:
            raise InvalidInputError(f"Breakpoints not increasing at index {i}")
        if ys[i] <= ys[i - 1]:
            raise InvalidInputError(f"Values not increasing at breakpoint {xs[i]}")
    if ys[-1] >= ys[0] + 1:
        raise InvalidInputError("Values must increase by less than one period")


def identity() -> PLCircleMap:
    return PLCircleMap((Fraction(0),), (Fraction(0),))


def shift(r) -> PLCircleMap:
    """Translation x -> x + r."""
    return PLCircleMap((Fraction(0),), (Fraction(r),))


def inverse(f: PLCircleMap) -> PLCircleMap:
    return PLCircleMap.from_points((y, x) for x, y in f.points())


def compose(f: PLCircleMap, g: PLCircleMap) -> PLCircleMap:
    """f after g, with breakpoints at those of g and the g-preimages of those of f."""
    g_inv = inverse(g)
    candidates = set(g.breakpoints) | {g_inv(x) for x in f.breakpoints}
    return simplify(PLCircleMap.from_points((x, f(g(x))) for x in candidates))


def power(f: PLCircleMap, n: int) -> PLCircleMap:
    base = f if n >= 0 else inverse(f)
    result = identity()
    for _ in range(abs(n)):
        result = compose(base, result)
    return result


def conjugate(g: PLCircleMap, f: PLCircleMap) -> PLCircleMap:
    """g f g^-1."""
    return compose(g, compose(f, inverse(g)))


def simplify(f: PLCircleMap) -> PLCircleMap:
    """Drop breakpoints where the slope does not change."""
    points = f.points()
    if len(points) < 2:
        return f
    k = len(points)

    def slope(i: int, j: int) -> Fraction:
        (x0, y0), (x1, y1) = points[i], points[j]
        if j <= i:
            x1, y1 = x1 + 1, y1 + 1
        return (y1 - y0) / (x1 - x0)

    kept = [
        points[i] for i in range(k) if slope((i - 1) % k, i) != slope(i, (i + 1) % k)
    ]
    if not kept:
        kept = [points[0]]
    return PLCircleMap.from_points(kept)


def displacement_range(f: PLCircleMap) -> tuple[Fraction, Fraction]:
    """Exact minimum and maximum of f(x) - x."""
    moves = [y - x for x, y in f.points()]
    return min(moves), max(moves)


def has_fixed_point(f: PLCircleMap) -> bool:
    lo, hi = displacement_range(f)
    return lo <= 0 <= hi


def _exact_orbit(f: PLCircleMap, budget: int, bits: int) -> Optional[RotationNumber]:
    """Follow the orbit of 0 until its fractional part repeats."""
    seen: dict[Fraction, tuple[int, Fraction]] = {}
    x = Fraction(0)
    limit = 2**bits
    for step in range(budget + 1):
        frac = x - floor(x)
        if frac in seen:
            first, start = seen[frac]
            tau = (x - start) / (step - first)
            logger.debug(f"Orbit of 0 closed after {step} steps: tau={tau}")
            return RotationNumber(tau, tau, method="orbit", iterations=step)
        seen[frac] = (step, x)
        if x.denominator > limit:
            logger.debug(f"Orbit denominators exceeded 2^{bits} after {step} steps")
            return None
        x = f(x)
    return None


def _periodic_search(f: PLCircleMap, max_period: int) -> tuple[Optional[RotationNumber], Fraction, Fraction]:
    """
    Look for x with f^q(x) = x + p for q <= max_period.

    Returns the exact answer when found, together with the tightest enclosure
    min(f^q - id)/q <= tau <= max(f^q - id)/q seen along the way.
    """
    lower, upper = displacement_range(f)
    iterate = f
    for q in range(1, max_period + 1):
        if q > 1:
            iterate = compose(f, iterate)
        lo, hi = displacement_range(iterate)
        lower, upper = max(lower, lo / q), min(upper, hi / q)
        p = ceil(lo)
        if p <= hi:
            tau = Fraction(p, q)
            logger.debug(f"Periodic point of period {q} with displacement {p}")
            return RotationNumber(tau, tau, method="periodic-point", iterations=q), tau, tau
    return None, lower, upper


def _bracket(
    f: PLCircleMap, budget: int, tolerance: Fraction, lower: Fraction, upper: Fraction
) -> RotationNumber:
    """Outward-rounded iteration of 0 on a dyadic grid."""
    lo = hi = Fraction(0)
    best_lo, best_hi = lower, upper
    steps = 0
    for steps in range(1, budget + 1):
        lo = Fraction(floor(f(lo) * GRID), GRID)
        hi = Fraction(ceil(f(hi) * GRID), GRID)
        if steps % 256 == 0 or steps == budget:
            best_lo = max(lower, (lo - 1) / steps)
            best_hi = min(upper, (hi + 1) / steps)
            if best_hi - best_lo <= tolerance:
                break
    certified = best_hi - best_lo <= tolerance
    if not certified:
        logger.warning(
            f"Rotation interval width {float(best_hi - best_lo):.3g} exceeds tolerance "
            f"after {steps} iterations"
        )
    return RotationNumber(best_lo, best_hi, method="interval", iterations=steps, certified_width=certified)


def translation_number(
    f: PLCircleMap, budget: Optional[int] = None, config: Optional[EngineConfig] = None
) -> RotationNumber:
    """
    Translation number lim f^n(0)/n of a PL lift.

    Exact when the orbit of 0 is eventually periodic mod 1 or f has a periodic
    point of small period; otherwise a certified enclosure.

    Args:
        f: The lift.
        budget: Iteration budget (default from ORDERFORGE_ITER_BUDGET).
        config: Engine configuration (default from environment).

    Raises:
        InvalidInputError: If budget < 1 or f is not a valid map.
    """
    config = config or get_engine_config()
    budget = config.iter_budget if budget is None else budget
    if budget < 1:
        raise InvalidInputError(f"Iteration budget must be at least 1, got {budget}")
    validate_map(f)

    exact = _exact_orbit(f, budget, config.exact_bits)
    if exact is not None:
        return exact
    found, lower, upper = _periodic_search(f, config.max_period)
    if found is not None:
        return found
    return _bracket(f, budget, config.width_tolerance, lower, upper)


def reduce_mod1(tau: RotationNumber) -> RotationNumber:
    whole = floor(tau.lower)
    return RotationNumber(
        tau.lower - whole,
        tau.upper - whole,
        method=tau.method,
        iterations=tau.iterations,
        certified_width=tau.certified_width,
    )


def rotation_number_mod1(
    f: PLCircleMap, budget: Optional[int] = None, config: Optional[EngineConfig] = None
) -> RotationNumber:
    """Image of the translation number in R/Z; an enclosure may straddle 1."""
    return reduce_mod1(translation_number(f, budget, config))


def embedding(c: CircularOrder, start: Optional[ElementId] = None) -> dict[ElementId, Fraction]:
    """Equally spaced positions on R/Z following the cyclic listing of c."""
    listing = c.to_listing(start)
    return {e: Fraction(i, len(listing)) for i, e in enumerate(listing)}


def dynamic_realization(c: CircularOrder, g: OrderAutomorphism) -> PLCircleMap:
    """
    Realize an order automorphism as a PL circle map on the default embedding.

    Raises:
        PreconditionError: If g does not preserve c.
    """
    if not is_order_preserving(c, g):
        raise PreconditionError(f"{g.label} does not preserve the circular order")
    places = embedding(c)
    listing = c.to_listing()
    points = []
    previous: Optional[Fraction] = None
    for e in listing:
        value = places[g(e)]
        if previous is not None:
            while value <= previous:
                value += 1
        points.append((places[e], value))
        previous = value
    realized = PLCircleMap.from_points(points)
    validate_map(realized)
    return realized
