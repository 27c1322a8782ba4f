"""Integer homology of presentation 2-complexes, Milnor cocycles and lifting certificates."""

import copy
import logging
import re
from fractions import Fraction
from itertools import product
from math import floor, gcd
from pathlib import Path
from typing import Optional

import sympy
import yaml

from src.errors import InvalidInputError, PreconditionError
from src.models.certificate import Verdict
from src.models.complex import (
    CocycleData,
    CohomologyResult,
    DetectionResult,
    OrbifoldCell,
    Presentation2Complex,
)

logger = logging.getLogger(__name__)

_LETTER = re.compile(r"\s*([A-Za-z])(?:\^(-?\d+))?")
_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?")


class SmithNormalForm:
    """
    Smith normal form of an integer matrix by repeated Euclidean elimination.

    Pivots are chosen by minimal absolute value. Entries stay Python ints, so
    coefficient growth never overflows.
    """

    def __init__(self, matrix: list[list[int]]):
        self.rows = len(matrix)
        self.cols = len(matrix[0]) if matrix else 0
        if any(len(row) != self.cols for row in matrix):
            raise InvalidInputError("Matrix rows have different lengths")
        self.A = [[int(v) for v in row] for row in matrix]
        self.left = [[int(i == j) for j in range(self.rows)] for i in range(self.rows)]
        self.right = [[int(i == j) for j in range(self.cols)] for i in range(self.cols)]

    def _min_abs(self, s: int) -> Optional[tuple[int, int]]:
        best, where = None, None
        for i in range(s, self.rows):
            for j in range(s, self.cols):
                v = abs(self.A[i][j])
                if v and (best is None or v < best):
                    best, where = v, (i, j)
        return where

    def _swap_rows(self, i: int, j: int) -> None:
        self.A[i], self.A[j] = self.A[j], self.A[i]
        self.left[i], self.left[j] = self.left[j], self.left[i]

    def _swap_cols(self, i: int, j: int) -> None:
        for row in self.A:
            row[i], row[j] = row[j], row[i]
        for row in self.right:
            row[i], row[j] = row[j], row[i]

    def _add_row(self, target: int, source: int, k: int) -> None:
        """row[target] += k * row[source]"""
        for mat in (self.A, self.left):
            src, dst = mat[source], mat[target]
            for j in range(len(dst)):
                dst[j] += k * src[j]

    def _add_col(self, target: int, source: int, k: int) -> None:
        for mat in (self.A, self.right):
            for row in mat:
                row[target] += k * row[source]

    def _negate_row(self, i: int) -> None:
        self.A[i] = [-v for v in self.A[i]]
        self.left[i] = [-v for v in self.left[i]]

    def _non_divisible(self, s: int) -> Optional[int]:
        pivot = self.A[s][s]
        for i in range(s + 1, self.rows):
            for j in range(s + 1, self.cols):
                if self.A[i][j] % pivot:
                    return i
        return None

    def compute(self) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
        """
        Returns:
            (D, U, V) with U * M * V = D, D diagonal with d_i | d_(i+1), U and V unimodular.
        """
        for s in range(min(self.rows, self.cols)):
            while True:
                pivot = self._min_abs(s)
                if pivot is None:
                    return self.A, self.left, self.right
                self._swap_rows(s, pivot[0])
                self._swap_cols(s, pivot[1])
                p = self.A[s][s]
                clean = True
                for i in range(s + 1, self.rows):
                    if self.A[i][s]:
                        self._add_row(i, s, -(self.A[i][s] // p))
                        clean = clean and self.A[i][s] == 0
                for j in range(s + 1, self.cols):
                    if self.A[s][j]:
                        self._add_col(j, s, -(self.A[s][j] // p))
                        clean = clean and self.A[s][j] == 0
                if not clean:
                    continue
                bad = self._non_divisible(s)
                if bad is not None:
                    self._add_row(s, bad, 1)
                    continue
                if self.A[s][s] < 0:
                    self._negate_row(s)
                break
        return self.A, self.left, self.right


def _matmul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    if not a or not b:
        return [[] for _ in a]
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


def smith_normal_form(M: list[list[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """
    Smith normal form with self-verification.

    Returns:
        (D, U, V) with U * M * V = D.
    """
    D, U, V = SmithNormalForm(M).compute()
    if M and M[0]:
        assert _matmul(_matmul(U, M), V) == D, "U * M * V != D"
        assert abs(sympy.Matrix(U).det()) == 1, "U is not unimodular"
        assert abs(sympy.Matrix(V).det()) == 1, "V is not unimodular"
    logger.debug(f"SNF of {len(M)}x{len(M[0]) if M else 0} matrix: diag {diagonal(D)}")
    return D, U, V


def diagonal(D: list[list[int]]) -> list[int]:
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def parse_word(text: str, generators: list[str]) -> list[tuple[str, int]]:
    """
    Parse a relator word into (generator, exponent) syllables.

    Single-letter generators may be concatenated (`xyxY`); longer names are
    separated by spaces. An uppercase letter is the inverse of its lowercase
    generator, and `g^k` raises to an integer power.

    Raises:
        InvalidInputError: On an unknown symbol, with its column.
    """
    single = all(len(g) == 1 for g in generators)
    pattern = _LETTER if single else _TOKEN
    known = set(generators)
    syllables = []
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        match = pattern.match(stripped, pos)
        if not match:
            raise InvalidInputError(f"col {pos + 1}: unexpected {stripped[pos]!r} in word {text!r}")
        name, power = match.group(1), int(match.group(2) or 1)
        if name not in known:
            if name.lower() in known and name != name.lower():
                name, power = name.lower(), -power
            else:
                raise InvalidInputError(
                    f"col {match.start(1) + 1}: unknown generator {name!r} in word {text!r}"
                )
        syllables.append((name, power))
        pos = match.end()
    return syllables


def exponent_vector(text: str, generators: list[str]) -> list[int]:
    sums = dict.fromkeys(generators, 0)
    for name, power in parse_word(text, generators):
        sums[name] += power
    return [sums[g] for g in generators]


def validate_complex(cx: Presentation2Complex) -> None:
    """
    Raises:
        InvalidInputError: If the complex is malformed.
    """
    if not cx.generators or len(set(cx.generators)) != len(cx.generators):
        raise InvalidInputError("Generators must be non-empty and distinct")
    for i, m in enumerate(cx.meridians):
        if m not in cx.generators:
            raise InvalidInputError(f"Meridian {m} is not a generator", location=("meridians", i))
    for i, r in enumerate(cx.relators):
        if len(r) != len(cx.generators):
            raise InvalidInputError(
                f"Relator {i + 1} has {len(r)} entries, expected {len(cx.generators)}",
                location=("relators", i),
            )
    for i, cell in enumerate(cx.cells):
        if cell.meridian not in cx.meridians:
            raise InvalidInputError(
                f"Orbifold cell on {cell.meridian}, which is not a meridian", location=("cells", i)
            )
        if cell.order < 1:
            raise InvalidInputError(
                f"Orbifold cell order must be positive, got {cell.order}", location=("cells", i)
            )
    if cx.boundary3 is not None:
        boundary2 = cx.boundary2()
        if any(len(row) != len(boundary2) for row in cx.boundary3):
            raise InvalidInputError("boundary3 columns must match the number of 2-cells")
        if any(any(v for v in row) for row in _matmul(cx.boundary3, boundary2)):
            raise InvalidInputError("boundary3 * boundary2 != 0")


def build_complex(
    generators: list[str],
    meridians: list[str],
    relators: list,
    cells: Optional[list] = None,
    boundary3: Optional[list[list[int]]] = None,
) -> Presentation2Complex:
    """Assemble a complex from word or exponent-vector relators and (meridian, order) cells."""
    vectors, words = [], []
    for i, r in enumerate(relators):
        if isinstance(r, str):
            words.append(r)
            try:
                vectors.append(exponent_vector(r, generators))
            except InvalidInputError as e:
                raise InvalidInputError(f"Relator {i + 1}: {e}", location=("relators", i)) from e
        else:
            vectors.append([int(v) for v in r])
    cx = Presentation2Complex(
        generators=list(generators),
        meridians=list(meridians),
        relators=vectors,
        cells=[OrbifoldCell(str(m), int(k)) for m, k in (cells or [])],
        words=words,
        boundary3=boundary3,
    )
    validate_complex(cx)
    return cx


def complex_from_dict(data: dict) -> Presentation2Complex:
    try:
        generators = [str(g) for g in data["generators"]]
        return build_complex(
            generators=generators,
            meridians=[str(m) for m in data.get("meridians", generators)],
            relators=data.get("relators", []),
            cells=data.get("cells", []),
            boundary3=data.get("boundary3"),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidInputError(f"Malformed presentation: {e}") from e


def load_complex(path: Path) -> Presentation2Complex:
    """Load a presentation file (JSON or YAML)."""
    with open(path) as f:
        data = yaml.safe_load(f)
    if not isinstance(data, dict):
        raise InvalidInputError(f"{path}: expected a mapping at top level")
    return complex_from_dict(data)


def elementary_divisors(torsion: list[int]) -> list[int]:
    """Prime powers p^e with Z/t = sum of Z/p^e over the torsion coefficients, sorted."""
    return sorted(p**e for t in torsion for p, e in sympy.factorint(t).items())


def second_cohomology(cx: Presentation2Complex) -> CohomologyResult:
    """
    H^2 of the 2-complex (or of the 3-complex when boundary3 is given).

    Torsion comes from the cokernel of the coboundary C^1 -> C^2, whose
    matrix is the 2-cell boundary matrix.
    """
    validate_complex(cx)
    boundary2 = cx.boundary2()
    cells = len(boundary2)
    if cells == 0:
        return CohomologyResult(torsion=[], free_rank=0)
    D, _, _ = smith_normal_form(boundary2)
    diag = [abs(d) for d in diagonal(D)]
    rank = sum(1 for d in diag if d)
    cocycles = cells
    if cx.boundary3 is not None and cx.boundary3:
        D3, _, _ = smith_normal_form(cx.boundary3)
        cocycles -= sum(1 for d in diagonal(D3) if d)
    torsion = [d for d in diag if d > 1]
    logger.debug(f"H^2 torsion {torsion}, free rank {cocycles - rank}")
    return CohomologyResult(
        torsion=torsion,
        free_rank=cocycles - rank,
        diagonal=diag,
        elementary_divisors=elementary_divisors(torsion),
    )


def element_order(a: int, n: int) -> int:
    return n // gcd(a, n)


def milnor_cocycle_value(n_i: int, a_i: int, n: int) -> int:
    """
    Value -n_i * a_i / n of the Milnor cocycle on an orbifold cell.

    Raises:
        PreconditionError: If n_i is not the order of a_i in Z/n.
    """
    if n < 1:
        raise InvalidInputError(f"Cover order must be positive, got {n}")
    if (n_i * a_i) % n:
        raise PreconditionError(f"{n} does not divide {n_i} * {a_i}")
    if n_i != element_order(a_i, n):
        raise PreconditionError(f"{a_i} has order {element_order(a_i, n)} in Z/{n}, not {n_i}")
    return -(n_i * a_i) // n


def attach_orbifold_cells(cx: Presentation2Complex, n: int, a: dict[str, int]) -> Presentation2Complex:
    """Replace the orbifold cells by D_i along mu_i^(n_i), n_i the order of a_i mod n."""
    result = copy.deepcopy(cx)
    result.cells = [OrbifoldCell(m, element_order(a[m], n)) for m in cx.meridians]
    validate_complex(result)
    return result


def _extend_psi(cx: Presentation2Complex, n: int, a: dict[str, int], others: Optional[dict]) -> dict[str, int]:
    """Values of psi on every generator, propagated through relators with a unit coefficient."""
    psi = {m: a[m] % n for m in cx.meridians}
    for g, v in (others or {}).items():
        if g not in cx.generators:
            raise InvalidInputError(f"Unknown generator {g} in psi values")
        psi[g] = int(v) % n
    changed = True
    while changed and len(psi) < len(cx.generators):
        changed = False
        for r in cx.relators:
            unknown = [j for j, g in enumerate(cx.generators) if r[j] and g not in psi]
            if len(unknown) == 1 and abs(r[unknown[0]]) == 1:
                j = unknown[0]
                rest = sum(r[k] * psi[g] for k, g in enumerate(cx.generators) if g in psi)
                psi[cx.generators[j]] = (-rest * r[j]) % n
                changed = True
    missing = [g for g in cx.generators if g not in psi]
    if missing:
        raise InvalidInputError(f"psi is not determined on {missing}; give their values explicitly")
    return psi


def _solve_integer(M: list[list[int]], target: list[int]) -> tuple[Optional[list[int]], Optional[str]]:
    """An integer x with M x = target, or the reduced equation that has no solution."""
    D, U, V = smith_normal_form(M)
    reduced = [sum(u * t for u, t in zip(row, target)) for row in U]
    diag = diagonal(D)
    y = [0] * len(V)
    for i, value in enumerate(reduced):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if value:
                return None, f"reduced equation {i + 1}: 0 = {value}"
        elif value % d:
            return None, f"reduced equation {i + 1}: {d} does not divide {value}"
        else:
            y[i] = value // d
    return [sum(v * yy for v, yy in zip(row, y)) for row in V], None


def lifting_certificate(
    cx: Presentation2Complex,
    n: int,
    a: dict[str, int],
    others: Optional[dict[str, int]] = None,
) -> CocycleData:
    """
    Solve delta(eta) = n * omega over the integers and certify eta(mu_i) = -a_i.

    omega vanishes on relator cells and is -n_i a_i / n on the orbifold cell
    along mu_i. Hypothesis failures come back as an UNSUPPORTED verdict, an
    unsolvable system as REFUTED.

    Args:
        cx: Complex with an orbifold cell on every meridian.
        n: Cover order.
        a: Rotation numerator per meridian.
        others: psi values on non-meridian generators not forced by relators.

    Raises:
        InvalidInputError: If the inputs do not match the complex.
    """
    validate_complex(cx)
    if n < 1:
        raise InvalidInputError(f"Cover order must be positive, got {n}")
    if set(a) != set(cx.meridians):
        raise InvalidInputError(f"Numerators given for {sorted(a)}, meridians are {cx.meridians}")
    with_cells = {cell.meridian for cell in cx.cells}
    for m in cx.meridians:
        if m not in with_cells:
            raise InvalidInputError(f"Meridian {m} has no orbifold cell; attach cells first")

    psi = _extend_psi(cx, n, a, others)
    data = CocycleData(n=n, a=dict(a), verdict=Verdict.UNSUPPORTED, psi=psi)
    for i, r in enumerate(cx.relators):
        image = sum(c * psi[g] for c, g in zip(r, cx.generators)) % n
        if image:
            data.failure = f"relator R{i + 1} maps to {image} mod {n}; psi is not a homomorphism"
            return data
    if gcd(n, *psi.values()) != 1:
        data.failure = f"psi does not surject onto Z/{n}"
        return data

    labels = cx.cell_labels()
    omega = [0] * len(cx.relators)
    for cell in cx.cells:
        try:
            omega.append(milnor_cocycle_value(cell.order, a[cell.meridian], n))
        except PreconditionError as e:
            data.failure = f"cell D({cell.meridian}^{cell.order}): {e}"
            return data
    data.omega = dict(zip(labels, omega))

    boundary2 = cx.boundary2()
    target = [n * w for w in omega]
    eta, failure = _solve_integer(boundary2, target)
    if eta is None:
        data.verdict = Verdict.REFUTED
        data.failure = failure
        logger.info(f"No integer lift: {failure}")
        return data

    coboundary = [sum(c * e for c, e in zip(row, eta)) for row in boundary2]
    assert coboundary == target, "delta(eta) != n * omega"
    data.eta = dict(zip(cx.generators, eta))
    data.checks = {
        "coboundary": True,
        "eta_on_meridians": all(data.eta[m] == -a[m] for m in cx.meridians),
        "f_equals_minus_psi": all((data.eta[m] + psi[m]) % n == 0 for m in cx.meridians),
    }
    data.verdict = Verdict.CERTIFIED if all(data.checks.values()) else Verdict.REFUTED
    if data.verdict == Verdict.REFUTED:
        data.failure = "eta(mu_i) != -a_i"
    logger.info(f"Lifting certificate for n={n}: {data.verdict.value}")
    return data


def orientation_sweep(cx: Presentation2Complex, n: int) -> list[CocycleData]:
    """Lifting certificates for a_i = +1 or -1 on every meridian."""
    results = []
    for signs in product((1, -1), repeat=len(cx.meridians)):
        a = dict(zip(cx.meridians, signs))
        results.append(lifting_certificate(attach_orbifold_cells(cx, n, a), n, a))
    return results


def order_detection_certificate(rot_mu, rot_alpha, n: Optional[int] = None) -> DetectionResult:
    """
    Decide order detection of the slope alpha from peripheral rotation numbers.

    The lift of mu is normalized to translation number 0; alpha is then
    detected when every lift of its rotation number is non-zero.

    Raises:
        PreconditionError: If n is given and the denominator of rot_alpha does not divide it.
    """
    rot_mu, rot_alpha = Fraction(rot_mu), Fraction(rot_alpha)
    if n is not None and n % rot_alpha.denominator:
        raise PreconditionError(f"rot(alpha) = {rot_alpha} does not have denominator dividing {n}")
    trace = []
    mu_frac = rot_mu - floor(rot_mu)
    if mu_frac:
        return DetectionResult(
            False, rot_mu, rot_alpha, trace=trace, reason=f"rot(mu) = {mu_frac} is not 0 mod 1"
        )
    trace.append(f"choose the lift of mu with translation number 0 (shift by {-floor(rot_mu)})")
    alpha_frac = rot_alpha - floor(rot_alpha)
    if alpha_frac == 0:
        return DetectionResult(
            False,
            rot_mu,
            rot_alpha,
            tau_mu=Fraction(0),
            trace=trace,
            reason="rot(alpha) is 0 mod 1; both translation numbers could vanish",
        )
    trace.append(f"tau(alpha) = {alpha_frac} + k for an integer k, never 0")
    return DetectionResult(
        True, rot_mu, rot_alpha, tau_mu=Fraction(0), tau_alpha=alpha_frac, trace=trace
    )


def meridian_detection(c: int, n: int) -> DetectionResult:
    """
    Meridional detection for degeneracy locus c*mu and the slope alpha = mu + lambda.

    Requires well-adaptedness n * |alpha . delta| >= 2, then reads rot(mu) = 0
    and rot(alpha) = 1/n.
    """
    from src.services.braids import well_adapted_check

    if n < 1:
        raise InvalidInputError(f"Cover order must be positive, got {n}")
    adapted, intersection = well_adapted_check(n, (1, 1), (c, 0))
    if not adapted:
        return DetectionResult(
            False,
            Fraction(0),
            Fraction(1, n),
            reason=f"not well adapted: {n} * {intersection} < 2",
        )
    result = order_detection_certificate(Fraction(0), Fraction(1, n), n)
    result.trace.insert(0, f"well adapted: {n} * |alpha . delta| = {n * intersection} >= 2")
    return result
