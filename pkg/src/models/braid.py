"""Braid word and fractional Dehn twist ledger models."""

import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from src.models.certificate import fraction_text

_LETTER = re.compile(r"([sS])(\d+)(?:\^(-?\d+))?$")

Letter = tuple[int, int]


@dataclass(frozen=True)
class BraidWord:
    """
    A word in the standard generators of the braid group on `strands` strands.

    Letters are (i, +1) for sigma_i and (i, -1) for its inverse.
    """

    strands: int
    letters: tuple[Letter, ...] = ()

    @classmethod
    def parse(cls, text: str, strands: Optional[int] = None) -> "BraidWord":
        """
        Parse `s1 s1 S2 s3^2` (capital S is an inverse).

        The strand count defaults to one more than the largest index.

        Raises:
            ValueError: On a malformed token, with its column.
        """
        letters: list[Letter] = []
        for token in re.finditer(r"\S+", text):
            match = _LETTER.match(token.group())
            if not match:
                raise ValueError(f"col {token.start() + 1}: bad braid letter {token.group()!r}")
            index = int(match.group(2))
            sign = 1 if match.group(1) == "s" else -1
            power = int(match.group(3) or 1)
            if power < 0:
                sign, power = -sign, -power
            letters.extend([(index, sign)] * power)
        if strands is None:
            strands = max((i for i, _ in letters), default=1) + 1
        return cls(strands=strands, letters=tuple(letters))

    def format(self) -> str:
        return " ".join(f"s{i}" if e > 0 else f"S{i}" for i, e in self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if other.strands != self.strands:
            raise ValueError(f"Cannot multiply braids on {self.strands} and {other.strands} strands")
        return BraidWord(self.strands, self.letters + other.letters)

    def __invert__(self) -> "BraidWord":
        return BraidWord(self.strands, tuple((i, -e) for i, e in reversed(self.letters)))

    def __pow__(self, k: int) -> "BraidWord":
        base = self if k >= 0 else ~self
        return BraidWord(self.strands, base.letters * abs(k))

    def __len__(self) -> int:
        return len(self.letters)

    def to_dict(self) -> dict:
        return {"strands": self.strands, "word": self.format()}


class FdtcProvenance(str, Enum):
    CITED = "cited-fact"
    LEDGER = "ledger-derived"
    ASSERTED = "user-asserted"


@dataclass(frozen=True)
class FdtcRecord:
    """A fractional Dehn twist coefficient with where it came from."""

    value: Fraction
    provenance: FdtcProvenance = FdtcProvenance.ASSERTED
    label: str = ""
    base: Optional["FdtcRecord"] = None
    twists: int = 0

    def to_dict(self) -> dict:
        result = {
            "value": fraction_text(self.value),
            "provenance": self.provenance.value,
            "label": self.label,
        }
        if self.base is not None:
            result["base"] = self.base.to_dict()
            result["twists"] = self.twists
        return result


@dataclass
class QuasipositiveDecomposition:
    """Bands w_i sigma_(k_i) w_i^-1 whose product should spell a braid word."""

    strands: int
    bands: list[tuple[BraidWord, int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "strands": self.strands,
            "bands": [{"conjugator": w.format(), "generator": k} for w, k in self.bands],
        }


@dataclass
class HypothesisReport:
    """Per-statement pass/fail with the clause that failed."""

    c: Fraction
    checks: dict[str, dict] = field(default_factory=dict)

    def record(self, name: str, passed: bool, clause: Optional[str] = None) -> None:
        self.checks[name] = {"passed": passed, "failed_clause": None if passed else clause}

    @property
    def all_passed(self) -> bool:
        return all(check["passed"] for check in self.checks.values())

    def to_dict(self) -> dict:
        return {"c": fraction_text(self.c), "checks": dict(self.checks)}
