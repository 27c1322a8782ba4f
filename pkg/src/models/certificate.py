"""Certificate model and exact serialization helpers."""

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

SCHEMA_VERSION = "1"


class Verdict(str, Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"
    UNSUPPORTED = "unsupported"


EXIT_CODES = {
    Verdict.CERTIFIED: 0,
    Verdict.REFUTED: 1,
    Verdict.INCONCLUSIVE: 2,
    Verdict.UNSUPPORTED: 2,
}
INVALID_INPUT_EXIT = 3


def fraction_text(value) -> str:
    """Exact 'p/q' text (or 'p' for integers)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text) -> Fraction:
    """Inverse of fraction_text; also accepts ints and decimal strings."""
    return Fraction(str(text))


def exact_payload(value: Any) -> Any:
    """Recursively convert a value into JSON-ready data with exact fraction strings."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return fraction_text(value)
    if isinstance(value, Enum):
        return value.value
    if hasattr(value, "to_dict"):
        return exact_payload(value.to_dict())
    if isinstance(value, dict):
        return {str(k): exact_payload(v) for k, v in value.items()}
    if isinstance(value, (frozenset, set)):
        return sorted(exact_payload(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [exact_payload(v) for v in value]
    return value


def canonical_json(value: Any) -> str:
    return json.dumps(exact_payload(value), sort_keys=True, separators=(",", ":"))


def input_digest(inputs: dict) -> str:
    """Short stable digest of the canonical JSON of the inputs."""
    return hashlib.sha256(canonical_json(inputs).encode()).hexdigest()[:16]


@dataclass
class Certificate:
    """Machine-readable result of a pipeline run."""

    pipeline: str
    verdict: Verdict
    inputs: dict
    evidence: dict = field(default_factory=dict)
    provenance: list[str] = field(default_factory=list)
    tool_version: str = ""
    schema_version: str = SCHEMA_VERSION

    @property
    def input_digest(self) -> str:
        return input_digest({"pipeline": self.pipeline, "inputs": self.inputs})

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {
            "schema_version": self.schema_version,
            "pipeline": self.pipeline,
            "input_digest": self.input_digest,
            "verdict": self.verdict.value,
            "inputs": exact_payload(self.inputs),
            "evidence": exact_payload(self.evidence),
            "provenance": list(self.provenance),
            "tool_version": self.tool_version,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Certificate":
        """Create from dictionary."""
        return cls(
            pipeline=data["pipeline"],
            verdict=Verdict(data["verdict"]),
            inputs=data.get("inputs", {}),
            evidence=data.get("evidence", {}),
            provenance=list(data.get("provenance", [])),
            tool_version=data.get("tool_version", ""),
            schema_version=data.get("schema_version", SCHEMA_VERSION),
        )
