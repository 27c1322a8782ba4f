"""Star calibration models."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from src.models.certificate import fraction_text
from src.models.tree import CyclicOrderTree


@dataclass(frozen=True)
class StarCalibration:
    """
    Recalibration data at a valency-d vertex.

    d = n * delta is the valency, a the target rotation numerator (coprime to d)
    and b an inverse of a modulo d.
    """

    d: int
    delta: int
    n: int
    a: int
    b: int

    def to_dict(self) -> dict:
        return {"d": self.d, "delta": self.delta, "n": self.n, "a": self.a, "b": self.b}

    @classmethod
    def from_dict(cls, data: dict) -> "StarCalibration":
        return cls(
            d=int(data["d"]),
            delta=int(data["delta"]),
            n=int(data["n"]),
            a=int(data["a"]),
            b=int(data["b"]),
        )


@dataclass
class RecalibratedTree:
    """A tree whose local orders at `vertices` were replaced by recalibrated listings."""

    tree: CyclicOrderTree
    vertices: list[str]
    calibration: StarCalibration
    natural: Optional[Fraction] = None
    recalibrated: Optional[Fraction] = None
    previous_orders: dict[str, list[str]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {
            "tree": self.tree.to_dict(),
            "vertices": sorted(self.vertices),
            "calibration": self.calibration.to_dict(),
            "natural_rotation": fraction_text(self.natural) if self.natural is not None else None,
            "recalibrated_rotation": (
                fraction_text(self.recalibrated) if self.recalibrated is not None else None
            ),
        }
