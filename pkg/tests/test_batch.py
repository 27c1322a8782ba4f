"""Tests for the batch runner."""

from pathlib import Path

import pytest
import yaml

from src.config import EngineConfig
from src.errors import InvalidInputError
from src.models.batch import BatchCase
from src.services.batch import BatchService, _lookup

ACCEPTANCE = Path(__file__).parent.parent / "eval" / "acceptance.yaml"


def write_cases(path: Path, cases: list[dict]) -> Path:
    path.write_text(yaml.safe_dump({"cases": cases}))
    return path


@pytest.fixture
def service():
    return BatchService(EngineConfig(batch_workers=2))


class TestLookup:
    def test_dotted_paths(self):
        payload = {"a": {"b": [10, {"c": "x"}]}}
        assert _lookup(payload, "a.b.0") == 10
        assert _lookup(payload, "a.b.1.c") == "x"
        assert _lookup(payload, "a.b.-1.c") == "x"

    def test_missing(self):
        from src.services.batch import _MISSING

        assert _lookup({"a": 1}, "b") is _MISSING
        assert _lookup({"a": [1]}, "a.3") is _MISSING


class TestCases:
    def test_from_dict(self):
        case = BatchCase.from_dict(
            {"id": 7, "pipeline": "rotnum", "inputs": {"shift": "0"}, "expect": {"verdict": "certified"}}
        )
        assert case.id == "7"
        assert case.expected_verdict == "certified"
        assert case.expected_evidence == {}

    def test_missing_pipeline(self, service, temp_dir):
        path = write_cases(temp_dir / "cases.yaml", [{"id": "a"}])
        with pytest.raises(InvalidInputError, match="case 1"):
            service.load_cases(path)

    def test_duplicate_ids(self, service, temp_dir):
        case = {"id": "a", "pipeline": "rotnum", "inputs": {"shift": "0"}}
        path = write_cases(temp_dir / "cases.yaml", [case, case])
        with pytest.raises(InvalidInputError, match="duplicate"):
            service.load_cases(path)


class TestRunCase:
    def test_evidence_mismatch(self, service):
        case = BatchCase(
            id="third",
            pipeline="rotnum",
            inputs={"shift": "1/3"},
            expected_verdict="certified",
            expected_evidence={"rotation": "1/4", "nowhere": 1},
        )
        result = service.run_case(case)
        assert not result.passed
        assert result.verdict == "certified"
        assert any(m.startswith("rotation") for m in result.mismatches)
        assert "nowhere: missing from evidence" in result.mismatches

    def test_verdict_mismatch(self, service):
        case = BatchCase(id="f2", pipeline="twobridge.lt-definite", inputs={"block": "F:2", "n": 5},
                         expected_verdict="certified")
        result = service.run_case(case)
        assert not result.passed
        assert result.mismatches == ["verdict: expected certified, got refuted"]

    def test_numbers_compare_with_text(self, service):
        case = BatchCase(id="r", pipeline="rotnum", inputs={"shift": "2"}, expected_evidence={"rotation": 0})
        assert service.run_case(case).passed

    def test_expected_error(self, service):
        case = BatchCase(id="bad", pipeline="recalibrate", inputs={"n": 4, "delta": 1, "a": 2},
                         expected_verdict="error")
        result = service.run_case(case)
        assert result.passed
        assert result.error.startswith("PreconditionError")

    def test_unexpected_error(self, service):
        case = BatchCase(id="bad", pipeline="no.such.pipeline", expected_verdict="certified")
        result = service.run_case(case)
        assert not result.passed
        assert result.error.startswith("InvalidInputError")


class TestRunBatch:
    def test_acceptance_file_passes(self, service):
        results = service.run_batch(ACCEPTANCE)
        failed = [d for d in results["details"] if not d["passed"]]
        assert failed == []
        assert results["total_cases"] == results["cases_passed"] == 24
        assert results["pass_rate"] == 1.0

    def test_results_keep_file_order(self, service):
        ids = [d["case_id"] for d in service.run_batch(ACCEPTANCE)["details"]]
        assert ids == [c.id for c in service.load_cases(ACCEPTANCE)]

    def test_empty_file(self, service, temp_dir):
        path = temp_dir / "empty.yaml"
        path.write_text("")
        assert service.run_batch(path)["total_cases"] == 0

    def test_partial_pass(self, service, temp_dir):
        path = write_cases(
            temp_dir / "cases.yaml",
            [
                {"id": "ok", "pipeline": "rotnum", "inputs": {"shift": "0"}, "expect": {"verdict": "certified"}},
                {"id": "bad", "pipeline": "rotnum", "inputs": {"shift": "0"}, "expect": {"verdict": "refuted"}},
            ],
        )
        results = service.run_batch(path)
        assert results["cases_passed"] == 1
        assert results["pass_rate"] == 0.5
