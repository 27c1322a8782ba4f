"""Two-bridge link, Seifert form and polynomial models."""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from src.models.certificate import Verdict, fraction_text


class Orientation(str, Enum):
    CANONICAL = "canonical"
    REVERSED = "reversed"


@dataclass(frozen=True)
class EvenContinuedFraction:
    """Coefficients [2a_1, ..., 2a_r] of a two-bridge link with an orientation choice."""

    coefficients: tuple[int, ...]
    orientation: Orientation = Orientation.CANONICAL

    @property
    def halves(self) -> tuple[int, ...]:
        return tuple(c // 2 for c in self.coefficients)

    @classmethod
    def parse(cls, text: str, orientation: str = "canonical") -> "EvenContinuedFraction":
        """Parse '2,2,2' (brackets and spaces allowed)."""
        cleaned = text.strip().strip("[]")
        entries = tuple(int(part) for part in cleaned.replace(" ", "").split(",") if part)
        return cls(coefficients=entries, orientation=Orientation(orientation))

    def to_dict(self) -> dict:
        return {"cf": list(self.coefficients), "orientation": self.orientation.value}


@dataclass(frozen=True)
class LaurentPoly:
    """Integer Laurent polynomial sum coefficients[i] * t^(offset + i)."""

    coefficients: tuple[int, ...] = ()
    offset: int = 0

    @classmethod
    def from_dense(cls, coefficients, offset: int = 0) -> "LaurentPoly":
        """Build from ascending coefficients, trimming zeros at both ends."""
        coeffs = [int(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        start = 0
        while start < len(coeffs) and coeffs[start] == 0:
            start += 1
        if start == len(coeffs):
            return cls()
        return cls(tuple(coeffs[start:]), offset + start)

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def min_degree(self) -> int:
        return self.offset

    @property
    def max_degree(self) -> int:
        return self.offset + len(self.coefficients) - 1

    @property
    def span(self) -> int:
        return len(self.coefficients) - 1 if self.coefficients else -1

    def leading(self) -> int:
        return self.coefficients[-1] if self.coefficients else 0

    def lowest(self) -> int:
        return self.coefficients[0] if self.coefficients else 0

    def ascending(self) -> list[int]:
        return list(self.coefficients)

    def normalized(self) -> "LaurentPoly":
        """Shift to minimal exponent 0 and make the leading coefficient positive."""
        if self.is_zero:
            return self
        sign = -1 if self.leading() < 0 else 1
        return LaurentPoly(tuple(sign * c for c in self.coefficients), 0)

    def is_symmetric(self) -> bool:
        """Delta(t) = +-t^k Delta(1/t)."""
        c = self.coefficients
        return c == c[::-1] or c == tuple(-v for v in c[::-1])

    def text(self, var: str = "t") -> str:
        if self.is_zero:
            return "0"
        terms = []
        for power in range(self.max_degree, self.min_degree - 1, -1):
            c = self.coefficients[power - self.offset]
            if c == 0:
                continue
            if power == 0:
                body = str(abs(c))
            else:
                mono = var if power == 1 else f"{var}^{power}"
                body = mono if abs(c) == 1 else f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def to_dict(self) -> dict:
        return {
            "offset": self.offset,
            "coefficients": list(self.coefficients),
            "text": self.text(),
        }


@dataclass
class SeifertData:
    """A Seifert matrix with named principal sub-blocks."""

    matrix: list[list[int]]
    descriptor: str = ""
    blocks: dict[str, list[int]] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.matrix)

    def to_dict(self) -> dict:
        return {
            "matrix": [list(row) for row in self.matrix],
            "descriptor": self.descriptor,
            "blocks": {k: list(v) for k, v in self.blocks.items()},
        }


@dataclass
class HermitianFormAt:
    """The Levine-Tristram form (1 - xi) S + (1 - conj(xi)) S^T at a unit-circle point."""

    xi: complex
    matrix: object
    angle: Optional[Fraction] = None

    def to_dict(self) -> dict:
        return {
            "angle": fraction_text(self.angle) if self.angle is not None else None,
            "xi": [self.xi.real, self.xi.imag],
            "matrix": [[[z.real, z.imag] for z in row] for row in self.matrix.tolist()],
        }


@dataclass
class CompactForm:
    """Delta = (t - 1)^a (t + 1)^b t^d g(t + 1/t), up to a unit."""

    minus_one_power: int
    plus_one_power: int
    g: list[int]

    def to_dict(self) -> dict:
        return {
            "t_minus_1": self.minus_one_power,
            "t_plus_1": self.plus_one_power,
            "g": list(self.g),
        }


@dataclass
class ArcDefiniteness:
    """Whether the form is definite on the closed arc through -1 bounded by e^(+-2 pi i/n)."""

    n: int
    definite: bool
    witness: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"n": self.n, "definite": self.definite, "witness": dict(self.witness)}


@dataclass
class ObstructionBound:
    """Smallest n at which definiteness fails, and the block that decides it."""

    n: int
    block: str
    closed_form: Optional[float] = None

    def to_dict(self) -> dict:
        return {"n": self.n, "block": self.block, "closed_form": self.closed_form}


@dataclass
class RhoThetaRecord:
    """Numeric data of the representation family at one angle."""

    theta: float
    s: float
    relation_residual: float
    closed_form_error: float
    symmetry_residual: float
    conjugate_to_real: bool
    rotation: Optional[Fraction] = None
    pi_multiple: Optional[Fraction] = None
    matrices: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "pi_multiple": fraction_text(self.pi_multiple) if self.pi_multiple is not None else None,
            "s": self.s,
            "relation_residual": self.relation_residual,
            "closed_form_error": self.closed_form_error,
            "symmetry_residual": self.symmetry_residual,
            "conjugate_to_real": self.conjugate_to_real,
            "rotation": fraction_text(self.rotation) if self.rotation is not None else None,
        }


@dataclass
class CoverReport:
    """Branched-cover summary for both orientations of a two-bridge link."""

    cf: list[int]
    verdict: Verdict
    canonical: dict = field(default_factory=dict)
    reversed: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "cf": list(self.cf),
            "verdict": self.verdict.value,
            "canonical": self.canonical,
            "reversed": self.reversed,
        }
