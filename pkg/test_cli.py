"""
Unit tests for cli.py
Tests cover command dispatch, JSON output and exit codes.
"""

import json

import pytest

import cli
from brace import BraceFile, Filtration, sign_brace
from settings import reset_settings

R1 = "cyc(x^2 y) + y^4"


@pytest.fixture(autouse=True)
def fresh_settings():
    yield
    reset_settings()


def run(capsys, *argv):
    code = cli.main(["--workers", "2", *argv])
    return code, json.loads(capsys.readouterr().out)


@pytest.fixture
def sign_file(tmp_path):
    """Fixture to write the sign brace on Z/8 with its three-step chain."""
    path = tmp_path / "sign8.json"
    chain = Filtration.from_lists(8, [[0, 2, 4, 6], [0, 4]])
    path.write_text(BraceFile.from_structure(sign_brace(8), chain).model_dump_json())
    return str(path)


class TestDerive:
    """Test the derive command."""

    def test_relations(self, capsys):
        """Test relations are printed as JSON."""
        code, data = run(capsys, "derive", "--potential", R1)
        assert code == 0
        assert data["relations"] == ["x y + y x", "x^2 + y^3"]

    def test_parse_error_exit_code(self, capsys):
        """Test input errors exit with 2."""
        code, data = run(capsys, "derive", "--potential", "x^^2")
        assert code == 2
        assert data["type"] == "ParseError"

    def test_zero_denominator_exit_code(self, capsys):
        """Test a zero denominator is an input error."""
        code, data = run(capsys, "derive", "--potential", "1/0 x^3")
        assert code == 2
        assert data["type"] == "ParseError"


class TestGroebner:
    """Test the gb command."""

    def test_relations(self, capsys):
        """Test completing explicit relations."""
        code, data = run(capsys, "gb", "--relations", "x y + y x, x^2 + y^3", "--cap", "10")
        assert code == 0
        assert data["unresolved"] == 0
        assert data["order"] == {"precedence": "xy", "mode": "local"}

    def test_needs_one_source(self, capsys):
        """Test gb without a source is an input error."""
        code, data = run(capsys, "gb", "--cap", "6")
        assert code == 2
        assert data["type"] == "InvalidInputError"


class TestDimension:
    """Test the dim command."""

    def test_r1_with_oracle(self, capsys):
        """Test the oracle agrees on cyc(x^2 y) + y^4."""
        code, data = run(capsys, "dim", "--potential", R1, "--cap", "10", "--oracle")
        assert code == 0
        assert data["total"] == 9
        assert data["oracle"]["agrees"] is True

    def test_table(self, capsys):
        """Test the table document."""
        code, data = run(capsys, "dim", "--potential", R1, "--cap", "10", "--table")
        assert data["basis"][0] == "1"
        assert "x,x" in data["table"]


class TestCanon:
    """Test the canon command."""

    def test_representative(self, capsys):
        """Test classification output."""
        code, data = run(capsys, "canon", "--potential", R1, "--cap", "10")
        assert code == 0
        assert data["representative"] == "dim9-a"


class TestIso:
    """Test the iso command."""

    def test_same_algebra(self, capsys, tmp_path):
        """Test an algebra file compared with itself."""
        _, table = run(capsys, "dim", "--potential", R1, "--cap", "10", "--table")
        path = tmp_path / "r1.json"
        path.write_text(json.dumps({"basis": table["basis"], "field": table["field"], "table": table["table"]}))
        code, data = run(capsys, "iso", "--a", str(path), "--b", str(path), "--strategy", "invariants")
        assert code == 0
        assert data["status"] == "isomorphic"

    def test_missing_file(self, capsys, tmp_path):
        """Test unreadable files are input errors."""
        missing = str(tmp_path / "missing.json")
        code, data = run(capsys, "iso", "--a", missing, "--b", missing)
        assert code == 2


class TestBrace:
    """Test the brace command."""

    def test_check(self, capsys, sign_file):
        """Test axioms and filtration of the sign brace."""
        code, data = run(capsys, "brace", "check", "--input", sign_file)
        assert code == 0
        assert data["axioms"]["valid"] is True
        assert data["filtration"]["valid"] is True

    def test_prelie(self, capsys, sign_file):
        """Test the pre-Lie defect."""
        code, data = run(capsys, "brace", "prelie", "--input", sign_file)
        assert data["prelie"]["defect"] == 0

    def test_series(self, capsys, sign_file):
        """Test the series document."""
        code, data = run(capsys, "brace", "series", "--input", sign_file, "--series-args", "1,1,1,4")
        assert code == 0
        assert data["series"]["direct"] == 4
        assert data["series"]["exact"] is True

    def test_series_needs_arguments(self, capsys, sign_file):
        """Test missing series arguments."""
        code, _ = run(capsys, "brace", "series", "--input", sign_file)
        assert code == 2

    def test_series_bad_arguments(self, capsys, sign_file):
        """Test malformed series arguments."""
        code, _ = run(capsys, "brace", "series", "--input", sign_file, "--series-args", "1,2")
        assert code == 2


class TestExitCodes:
    """Test exit codes of resource errors."""

    def test_oracle_limit(self, capsys, tmp_path):
        """Test exceeding the oracle cap exits with 3."""
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"workbench": {"oracle_max_cap": 4}}))
        code, data = run(capsys, "--config", str(config), "reproduce", "--theorem", "dim8")
        assert code == 3
        assert data["type"] == "ResourceCapExceeded"

    def test_unknown_command(self):
        """Test argparse rejects unknown commands."""
        with pytest.raises(SystemExit):
            cli.main(["frobnicate"])
