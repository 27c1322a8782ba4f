"""Batch case and result models."""

from dataclasses import dataclass, field
from typing import Optional


@dataclass
class BatchCase:
    """A pipeline run with the verdict and evidence values it should produce."""

    id: str
    pipeline: str
    inputs: dict = field(default_factory=dict)
    expected_verdict: Optional[str] = None
    expected_evidence: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "BatchCase":
        """Create from dictionary."""
        expect = data.get("expect", {}) or {}
        return cls(
            id=str(data["id"]),
            pipeline=data["pipeline"],
            inputs=data.get("inputs", {}) or {},
            expected_verdict=expect.get("verdict"),
            expected_evidence=expect.get("evidence", {}) or {},
        )


@dataclass
class BatchResult:
    """Outcome of a single batch case."""

    case_id: str
    pipeline: str
    verdict: Optional[str] = None
    passed: bool = False
    mismatches: list[str] = field(default_factory=list)
    error: Optional[str] = None
    input_digest: Optional[str] = None

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {
            "case_id": self.case_id,
            "pipeline": self.pipeline,
            "verdict": self.verdict,
            "passed": self.passed,
            "mismatches": self.mismatches,
            "error": self.error,
            "input_digest": self.input_digest,
        }
