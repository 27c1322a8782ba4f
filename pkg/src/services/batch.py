"""Batch service for running a file of pipeline cases against expectations."""

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Optional

import yaml

from src.config import EngineConfig, get_engine_config
from src.errors import InvalidInputError, OrderForgeError
from src.models.batch import BatchCase, BatchResult
from src.models.certificate import exact_payload
from src.services.pipelines import run_pipeline

logger = logging.getLogger(__name__)

_MISSING = object()


def _lookup(payload: Any, dotted: str) -> Any:
    """Follow a dotted path (`checks.fdtc_braid.passed`, `listing.0`) into evidence."""
    here = payload
    for part in dotted.split("."):
        if isinstance(here, dict) and part in here:
            here = here[part]
        elif isinstance(here, list) and part.lstrip("-").isdigit() and -len(here) <= int(part) < len(here):
            here = here[int(part)]
        else:
            return _MISSING
    return here


class BatchService:
    """Service for running batches of pipeline cases."""

    def __init__(self, config: Optional[EngineConfig] = None):
        """
        Initialize the batch service.

        Args:
            config: Engine configuration shared by every case.
        """
        self.config = config or get_engine_config()

    def load_cases(self, cases_path: Path) -> list[BatchCase]:
        """
        Load cases from a YAML file with a top-level `cases:` list.

        Raises:
            InvalidInputError: If a case lacks an id or pipeline, or ids repeat.
        """
        with open(cases_path) as f:
            data = yaml.safe_load(f) or {}

        cases = []
        for pos, item in enumerate(data.get("cases", [])):
            try:
                cases.append(BatchCase.from_dict(item))
            except (KeyError, TypeError) as e:
                raise InvalidInputError(f"{cases_path}: case {pos + 1} is missing {e}") from e

        ids = [c.id for c in cases]
        duplicates = sorted({i for i in ids if ids.count(i) > 1})
        if duplicates:
            raise InvalidInputError(f"{cases_path}: duplicate case ids {duplicates}")
        return cases

    def run_case(self, case: BatchCase) -> BatchResult:
        """Run one case; pipeline errors are reported on the result, not raised."""
        result = BatchResult(case_id=case.id, pipeline=case.pipeline)
        try:
            cert = run_pipeline(case.pipeline, case.inputs, self.config)
        except OrderForgeError as e:
            result.error = f"{type(e).__name__}: {e}"
            result.passed = case.expected_verdict == "error"
            return result

        result.verdict = cert.verdict.value
        result.input_digest = cert.input_digest
        if case.expected_verdict is not None and case.expected_verdict != result.verdict:
            result.mismatches.append(f"verdict: expected {case.expected_verdict}, got {result.verdict}")

        evidence = exact_payload(cert.evidence)
        for key, expected in case.expected_evidence.items():
            actual = _lookup(evidence, key)
            if actual is _MISSING:
                result.mismatches.append(f"{key}: missing from evidence")
            elif exact_payload(expected) != actual and str(expected) != str(actual):
                result.mismatches.append(f"{key}: expected {expected!r}, got {actual!r}")

        result.passed = not result.mismatches
        return result

    def run_batch(self, cases_path: Path) -> dict:
        """
        Run every case in a file.

        Cases run on a thread pool; results keep the file order.

        Returns:
            Dictionary with pass counts and per-case details.
        """
        cases = self.load_cases(cases_path)
        if not cases:
            return {"total_cases": 0, "cases_passed": 0, "pass_rate": 0, "details": []}

        workers = max(1, min(self.config.batch_workers, len(cases)))
        logger.info(f"Running {len(cases)} cases on {workers} workers")
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(self.run_case, cases))

        passed = sum(1 for r in results if r.passed)
        return {
            "total_cases": len(results),
            "cases_passed": passed,
            "pass_rate": round(passed / len(results), 2),
            "details": [r.to_dict() for r in results],
        }
