"""Tests for the orderforge command line."""

import json
from pathlib import Path

import pytest
import yaml
from click.testing import CliRunner

from src import __version__
from src.cli import cli

ACCEPTANCE = Path(__file__).parent.parent / "eval" / "acceptance.yaml"


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli, list(args))


class TestExitCodes:
    def test_version(self, runner):
        result = invoke(runner, "--version")
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_certified(self, runner):
        result = invoke(runner, "--json", "recalibrate", "--n", "3", "--delta", "2", "--a", "2")
        assert result.exit_code == 0
        cert = json.loads(result.stdout)
        assert cert["verdict"] == "certified"
        assert cert["evidence"]["listing"] == [1, 6, 5, 4, 3, 2]
        assert cert["evidence"]["recalibrated"] == "2/3"

    def test_refuted(self, runner):
        result = invoke(runner, "twobridge", "lt-definite", "--block", "F:2", "--n", "5")
        assert result.exit_code == 1

    def test_boundary_root_is_inconclusive(self, runner):
        result = invoke(runner, "--json", "twobridge", "lt-definite", "--block", "F:2", "--n", "4")
        assert result.exit_code == 2
        assert json.loads(result.stdout)["verdict"] == "inconclusive"

    def test_inconclusive(self, runner):
        result = invoke(runner, "homology", "detect", "--rot-mu", "0", "--rot-alpha", "0")
        assert result.exit_code == 2

    def test_unsupported_input(self, runner):
        result = invoke(runner, "twobridge", "bound", "--cf", "2,2")
        assert result.exit_code == 2
        assert "Error:" in result.output

    def test_precondition(self, runner):
        result = invoke(runner, "recalibrate", "--n", "4", "--delta", "1", "--a", "2")
        assert result.exit_code == 3

    def test_missing_map(self, runner):
        assert invoke(runner, "rotnum").exit_code == 3


class TestFiles:
    def test_yaml_syntax_error_names_position(self, runner, temp_dir):
        path = temp_dir / "bad.yaml"
        path.write_text("listing: [1, 2, 3]]\n")
        result = invoke(runner, "order", "validate", str(path))
        assert result.exit_code == 3
        assert f"{path}:" in result.output
        line_col = result.output.split(f"{path}:")[1].split(":")[:2]
        assert all(part.isdigit() for part in line_col)

    def test_tree_error_names_position(self, runner, temp_dir):
        path = temp_dir / "star.yaml"
        path.write_text(
            "nodes: {v: regular, a: leaf, b: leaf, c: leaf, d: leaf}\n"
            "edges: [[v, a], [v, b], [v, c], [v, d]]\n"
            "orders:\n"
            "  v: [a, b, c]\n"
        )
        result = invoke(runner, "tree", "ends", str(path))
        assert result.exit_code == 3
        assert f"{path}:4:3: Local order at v" in result.output

    def test_relator_error_names_position(self, runner, temp_dir):
        path = temp_dir / "bad.yaml"
        path.write_text("generators: [x, y]\nrelators:\n  - xyXY\n  - xQ\n")
        result = invoke(runner, "homology", "h2", str(path))
        assert result.exit_code == 3
        assert f"{path}:4:5: Relator 2: col 2: unknown generator" in result.output

    def test_error_without_location_names_file(self, runner, temp_dir):
        path = temp_dir / "bad.yaml"
        path.write_text("generators: []\n")
        result = invoke(runner, "homology", "h2", str(path))
        assert result.exit_code == 3
        assert f"{path}: Generators must be non-empty" in result.output

    def test_missing_file(self, runner, temp_dir):
        result = invoke(runner, "order", "validate", str(temp_dir / "nope.yaml"))
        assert result.exit_code == 3

    def test_order_validate(self, runner, temp_dir):
        path = temp_dir / "order.yaml"
        path.write_text("listing: [a, c, b]\n")
        result = invoke(runner, "order", "validate", str(path))
        assert result.exit_code == 0
        assert "Verdict:  certified" in result.output

    def test_tree_ends(self, runner, temp_dir, cataclysm_tree_data):
        path = temp_dir / "tree.json"
        path.write_text(json.dumps(cataclysm_tree_data))
        result = invoke(runner, "--json", "tree", "ends", str(path))
        assert result.exit_code == 0
        assert json.loads(result.stdout)["evidence"]["listing"] == ["a1", "a2", "b1", "b2", "r"]

    def test_homology_lift(self, runner, temp_dir):
        path = temp_dir / "l222.yaml"
        path.write_text(yaml.safe_dump({"generators": ["x", "y"], "relators": ["xyXY"]}))
        result = invoke(runner, "--json", "homology", "lift", str(path), "--n", "7", "--a", "x=1,y=1")
        assert result.exit_code == 0
        assert json.loads(result.stdout)["evidence"]["eta"] == {"x": -1, "y": -1}

    def test_homology_lift_sweep(self, runner, temp_dir):
        path = temp_dir / "l222.yaml"
        path.write_text(yaml.safe_dump({"generators": ["x", "y"], "relators": ["xyXY"]}))
        result = invoke(runner, "--json", "homology", "lift", str(path), "--n", "7", "--sweep")
        assert result.exit_code == 0
        assert len(json.loads(result.stdout)["evidence"]["orientations"]) == 4

    def test_homology_lift_needs_numerators(self, runner, temp_dir):
        path = temp_dir / "l222.yaml"
        path.write_text("generators: [x, y]\n")
        result = invoke(runner, "homology", "lift", str(path), "--n", "7")
        assert result.exit_code == 3

    def test_bad_assignment(self, runner, temp_dir):
        path = temp_dir / "l222.yaml"
        path.write_text("generators: [x, y]\n")
        result = invoke(runner, "homology", "lift", str(path), "--n", "7", "--a", "x1")
        assert result.exit_code == 3


class TestOutputModes:
    def test_tsv(self, runner):
        result = invoke(runner, "--tsv", "rotnum", "--shift", "1/3")
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert "verdict\tcertified" in lines
        assert "evidence.rotation\t1/3" in lines

    def test_braid_tsv(self, runner):
        result = invoke(runner, "--tsv", "braid", "stats", "s1 s2 s1")
        assert "evidence.permutation\t(1 3)" in result.output.splitlines()

    def test_braid_family_tsv(self, runner):
        result = invoke(runner, "--tsv", "braid", "stats", "--family", "1,1,1")
        assert result.exit_code == 0
        assert "evidence.components\t2" in result.output.splitlines()

    def test_text(self, runner):
        result = invoke(runner, "twobridge", "rational", "--cf", "2,2,2")
        assert result.exit_code == 0
        assert "Pipeline: twobridge.rational" in result.output
        assert "  value: 12/5" in result.output


class TestBatchAndReplay:
    def test_batch_passes(self, runner):
        result = invoke(runner, "batch", str(ACCEPTANCE), "--workers", "2")
        assert result.exit_code == 0
        assert "Passed: 24" in result.output

    def test_batch_failure_exit(self, runner, temp_dir):
        path = temp_dir / "cases.yaml"
        path.write_text(
            yaml.safe_dump(
                {"cases": [{"id": "x", "pipeline": "rotnum", "inputs": {"shift": "0"}, "expect": {"verdict": "refuted"}}]}
            )
        )
        result = invoke(runner, "--json", "batch", str(path))
        assert result.exit_code == 1
        assert json.loads(result.stdout)["cases_passed"] == 0

    def test_replay(self, runner, temp_dir):
        produced = invoke(runner, "--json", "braid", "fdtc-shift", "--c", "3/2", "--k", "2")
        assert produced.exit_code == 0
        path = temp_dir / "cert.json"
        path.write_text(produced.stdout)

        result = invoke(runner, "replay", str(path))
        assert result.exit_code == 0
        assert "evidence_matches: True" in result.output

        cert = json.loads(produced.stdout)
        cert["evidence"]["record"]["value"] = "9/2"
        path.write_text(json.dumps(cert))
        assert invoke(runner, "replay", str(path)).exit_code == 1

    def test_replay_rejects_non_certificate(self, runner, temp_dir):
        path = temp_dir / "cert.json"
        path.write_text(json.dumps({"verdict": "certified"}))
        assert invoke(runner, "replay", str(path)).exit_code == 3
