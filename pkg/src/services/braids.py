"""Braid-word bookkeeping, the FDTC ledger and hypothesis checks."""

import logging
from fractions import Fraction
from math import floor, gcd
from typing import Iterable, Optional

from src.errors import InvalidInputError, PreconditionError
from src.models.braid import (
    BraidWord,
    FdtcProvenance,
    FdtcRecord,
    HypothesisReport,
    QuasipositiveDecomposition,
)

logger = logging.getLogger(__name__)


def parse_braid(text: str, strands: Optional[int] = None) -> BraidWord:
    """
    Raises:
        InvalidInputError: On a malformed word or an index out of range.
    """
    try:
        word = BraidWord.parse(text, strands)
    except ValueError as e:
        raise InvalidInputError(str(e)) from e
    validate_word(word)
    return word


def validate_word(b: BraidWord) -> None:
    if b.strands < 2:
        raise InvalidInputError(f"A braid needs at least 2 strands, got {b.strands}")
    for pos, (i, e) in enumerate(b.letters):
        if not 1 <= i <= b.strands - 1 or e not in (1, -1):
            raise InvalidInputError(f"Letter {pos + 1} (index {i}) is out of range for B_{b.strands}")


def exponent_sum(b: BraidWord) -> int:
    return sum(e for _, e in b.letters)


def permutation(b: BraidWord) -> tuple[int, ...]:
    """Final position of each strand 1..w, multiplying transpositions left to right."""
    validate_word(b)
    arrangement = list(range(1, b.strands + 1))
    for i, _ in b.letters:
        arrangement[i - 1], arrangement[i] = arrangement[i], arrangement[i - 1]
    final = [0] * b.strands
    for position, strand in enumerate(arrangement, start=1):
        final[strand - 1] = position
    return tuple(final)


def cycles(perm: tuple[int, ...]) -> list[tuple[int, ...]]:
    seen, result = set(), []
    for start in range(1, len(perm) + 1):
        if start in seen:
            continue
        cycle, here = [], start
        while here not in seen:
            seen.add(here)
            cycle.append(here)
            here = perm[here - 1]
        result.append(tuple(cycle))
    return result


def cycle_notation(perm: tuple[int, ...]) -> str:
    """Non-trivial cycles, e.g. '(2 3)'; '()' for the identity."""
    parts = ["(" + " ".join(map(str, c)) + ")" for c in cycles(perm) if len(c) > 1]
    return "".join(parts) or "()"


def closure_components(b: BraidWord) -> int:
    return len(cycles(permutation(b)))


def free_reduce(b: BraidWord) -> BraidWord:
    """Cancel adjacent sigma_i sigma_i^-1 pairs."""
    stack: list[tuple[int, int]] = []
    for letter in b.letters:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
    return BraidWord(b.strands, tuple(stack))


def full_twist(w: int) -> BraidWord:
    """C_w = (sigma_1 ... sigma_(w-1))^w."""
    if w < 2:
        raise InvalidInputError(f"Full twist needs w >= 2, got {w}")
    return BraidWord(w, tuple((i, 1) for i in range(1, w)) * w)


def full_twist_compose(b: BraidWord, k: int) -> BraidWord:
    """C_w^k b."""
    validate_word(b)
    return full_twist(b.strands) ** k * b


def fdtc_shift(rec: FdtcRecord, k: int) -> FdtcRecord:
    """
    Ledger entry for C_w^k b given one for b: c(C_w^k b) = k + c(b).

    Chains collapse onto the base record, so shifting back by -k returns it.
    """
    if k == 0:
        return rec
    base, twists = (rec.base, rec.twists + k) if rec.base is not None else (rec, k)
    if twists == 0:
        return base
    return FdtcRecord(
        value=base.value + twists,
        provenance=FdtcProvenance.LEDGER,
        label=f"C^{twists} {base.label}".strip(),
        base=base,
        twists=twists,
    )


def band_generator(l: int, strands: Optional[int] = None) -> BraidWord:
    """a_(1, l+2) = (sigma_1^-1 ... sigma_l^-1) sigma_(l+1) (sigma_l ... sigma_1)."""
    if l < 1:
        raise InvalidInputError(f"Band generator needs l >= 1, got {l}")
    strands = strands or l + 2
    conjugator = tuple((i, -1) for i in range(1, l + 1))
    back = tuple((i, 1) for i in range(l, 0, -1))
    return BraidWord(strands, conjugator + ((l + 1, 1),) + back)


def bpqr(p: int, q: int, r: int) -> tuple[BraidWord, FdtcRecord]:
    """b(p,q,r) = sigma_1^p (sigma_2 ... sigma_(q+1)) a_(1,q+2)^r, with c(b) = 1 cited."""
    if min(p, q, r) < 1:
        raise InvalidInputError(f"b(p,q,r) needs p, q, r >= 1, got ({p}, {q}, {r})")
    strands = q + 2
    word = BraidWord(strands, ((1, 1),) * p + tuple((i, 1) for i in range(2, q + 2)))
    word = word * band_generator(q, strands) ** r
    record = FdtcRecord(Fraction(1), FdtcProvenance.CITED, label=f"b({p},{q},{r})")
    return word, record


def two_bridge_braid(k: int, l: int, m: int) -> BraidWord:
    """sigma_1^(2k) (sigma_2 ... sigma_(l+1)) a_(1,l+2)^(2m); closes to L(2k, 2l, 2m) reversed."""
    word, _ = bpqr(2 * k, l, 2 * m)
    return word


def bpqr_decomposition(p: int, q: int, r: int) -> QuasipositiveDecomposition:
    strands = q + 2
    empty = BraidWord(strands)
    bands = [(empty, 1)] * p + [(empty, i) for i in range(2, q + 2)]
    conjugator = BraidWord(strands, tuple((i, -1) for i in range(1, q + 1)))
    bands += [(conjugator, q + 1)] * r
    return QuasipositiveDecomposition(strands=strands, bands=bands)


def expand_decomposition(d: QuasipositiveDecomposition) -> BraidWord:
    word = BraidWord(d.strands)
    for conjugator, k in d.bands:
        word = word * conjugator * BraidWord(d.strands, ((k, 1),)) * ~conjugator
    return free_reduce(word)


def is_quasipositive_form(d: QuasipositiveDecomposition, target: BraidWord) -> bool:
    """True iff the expanded band product freely reduces to the reduced target word."""
    if d.strands != target.strands:
        return False
    try:
        expanded = expand_decomposition(d)
        validate_word(expanded)
    except (InvalidInputError, ValueError):
        return False
    return expanded.letters == free_reduce(target).letters


def degeneracy_to_fdtc(c: int, d: int) -> Fraction:
    """
    FDTC d/c of the degeneracy locus c*mu + d*lambda.

    Raises:
        PreconditionError: If c = 0.
    """
    if c == 0:
        raise PreconditionError("Degeneracy locus with c = 0 has no meridional part")
    return Fraction(d, c)


def meridional_check(c: int, d: int) -> bool:
    return d == 0


def well_adapted_check(n: int, alpha: tuple[int, int], delta: tuple[int, int]) -> tuple[bool, int]:
    """
    n * |alpha . delta| >= 2, with alpha . delta = p*d - q*c.

    Returns:
        (well adapted, |alpha . delta|)

    Raises:
        InvalidInputError: If n < 1 or alpha is zero or not primitive.
    """
    p, q = alpha
    c, d = delta
    if n < 1:
        raise InvalidInputError(f"n must be positive, got {n}")
    if (p, q) == (0, 0) or gcd(p, q) != 1:
        raise InvalidInputError(f"Slope {alpha} is not a primitive class")
    intersection = abs(p * d - q * c)
    return n * intersection >= 2, intersection


def hypothesis_check(
    c,
    k: Optional[int] = None,
    boundary_fdtcs: Optional[Iterable] = None,
    quasipositive: Optional[bool] = None,
    degeneracy: Optional[Iterable[tuple[int, int]]] = None,
) -> HypothesisReport:
    """
    Evaluate the FDTC conditions of the closed-braid statements.

    Args:
        c: c(b), exact.
        k: Full-twist exponent for the C_w^k b family.
        boundary_fdtcs: FDTCs on every boundary component of a fibred link.
        quasipositive: Whether b is known to be quasipositive.
        degeneracy: (c_i, d_i) of the degeneracy loci.
    """
    c = Fraction(c)
    report = HypothesisReport(c=c)

    if c == 0:
        report.record("closed_braids", False, "c(b) = 0")
    elif abs(c.numerator) == 1:
        report.record("closed_braids", False, f"c(b) = {c} is the reciprocal of an integer")
    else:
        report.record("closed_braids", True)
    report.record("fdtc_braid", abs(c) > 1, "|c(b)| <= 1")

    if k is not None:
        if c.denominator == 1:
            excluded = {-int(c), -int(c) + 1, -int(c) - 1}
            clause = f"k in {{-c(b), -c(b) + 1, -c(b) - 1}} = {sorted(excluded)}"
        else:
            excluded = {-floor(c), -floor(c) - 1}
            clause = f"k in {{-floor(c(b)), -floor(c(b)) - 1}} = {sorted(excluded)}"
        report.record("example_of_braids", k not in excluded, clause)
        report.checks["example_of_braids"]["shifted_c"] = str(c + k)
        if quasipositive:
            report.record("quasipositive_twists", k >= 1, "k < 1")

    if boundary_fdtcs is not None:
        values = [Fraction(v) for v in boundary_fdtcs]
        zero = [i + 1 for i, v in enumerate(values) if v == 0]
        report.record("fibred_boundary", not zero, f"zero FDTC on boundary components {zero}")
    if quasipositive is not None and quasipositive:
        report.record("quasipositive_positive", c > 0, "quasipositive braid with c(b) <= 0")
    if degeneracy is not None:
        meridional = [i + 1 for i, (ci, di) in enumerate(degeneracy) if meridional_check(ci, di)]
        report.record("no_meridional_locus", not meridional, f"meridional loci {meridional}")

    logger.debug(f"Hypothesis check for c={c}: {report.checks}")
    return report
