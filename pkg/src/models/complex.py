"""Presentation 2-complexes and lifting data."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from src.models.certificate import Verdict, fraction_text


@dataclass
class OrbifoldCell:
    """A 2-cell attached along meridian^order."""

    meridian: str
    order: int

    def to_dict(self) -> dict:
        return {"meridian": self.meridian, "order": self.order}


@dataclass
class Presentation2Complex:
    """
    The 2-complex of a group presentation, with orbifold cells.

    `relators` are abelianized exponent vectors indexed like `generators`;
    `words` keeps the original relator text when the complex was parsed from words.
    """

    generators: list[str]
    meridians: list[str]
    relators: list[list[int]] = field(default_factory=list)
    cells: list[OrbifoldCell] = field(default_factory=list)
    words: list[str] = field(default_factory=list)
    boundary3: Optional[list[list[int]]] = None

    def index(self, generator: str) -> int:
        return self.generators.index(generator)

    def cell_labels(self) -> list[str]:
        labels = [f"R{i + 1}" for i in range(len(self.relators))]
        labels += [f"D({cell.meridian}^{cell.order})" for cell in self.cells]
        return labels

    def boundary2(self) -> list[list[int]]:
        """Rows are 2-cells (relators, then orbifold cells), columns are generators."""
        rows = [list(r) for r in self.relators]
        for cell in self.cells:
            row = [0] * len(self.generators)
            row[self.index(cell.meridian)] = cell.order
            rows.append(row)
        return rows

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        result = {
            "generators": list(self.generators),
            "meridians": list(self.meridians),
            "relators": [list(r) for r in self.relators],
            "cells": [[c.meridian, c.order] for c in self.cells],
        }
        if self.words:
            result["words"] = list(self.words)
        if self.boundary3 is not None:
            result["boundary3"] = [list(r) for r in self.boundary3]
        return result


@dataclass
class CohomologyResult:
    """H^2 of a presentation 2-complex: free rank plus torsion coefficients."""

    torsion: list[int]
    free_rank: int
    diagonal: list[int] = field(default_factory=list)
    elementary_divisors: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "torsion": self.torsion,
            "free_rank": self.free_rank,
            "diagonal": self.diagonal,
            "elementary_divisors": self.elementary_divisors,
        }


@dataclass
class CocycleData:
    """Milnor cocycle values and an integer lift eta with delta(eta) = n * omega."""

    n: int
    a: dict[str, int]
    verdict: Verdict
    omega: dict[str, int] = field(default_factory=dict)
    eta: dict[str, int] = field(default_factory=dict)
    psi: dict[str, int] = field(default_factory=dict)
    failure: Optional[str] = None
    checks: dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {
            "n": self.n,
            "a": dict(self.a),
            "verdict": self.verdict.value,
            "omega": dict(self.omega),
            "eta": dict(self.eta),
            "psi": dict(self.psi),
            "failure": self.failure,
            "checks": dict(self.checks),
        }


@dataclass
class DetectionResult:
    """Outcome of the order-detection test on peripheral rotation numbers."""

    detected: bool
    rot_mu: Fraction
    rot_alpha: Fraction
    tau_mu: Optional[Fraction] = None
    tau_alpha: Optional[Fraction] = None
    trace: list[str] = field(default_factory=list)
    reason: Optional[str] = None

    @property
    def verdict(self) -> Verdict:
        return Verdict.CERTIFIED if self.detected else Verdict.INCONCLUSIVE

    def to_dict(self) -> dict:
        return {
            "detected": self.detected,
            "rot_mu": fraction_text(self.rot_mu),
            "rot_alpha": fraction_text(self.rot_alpha),
            "tau_mu": fraction_text(self.tau_mu) if self.tau_mu is not None else None,
            "tau_alpha": fraction_text(self.tau_alpha) if self.tau_alpha is not None else None,
            "trace": list(self.trace),
            "reason": self.reason,
        }
