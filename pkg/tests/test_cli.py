import json
from pathlib import Path

import pytest

from qmut.cli import (
    EXIT_BUDGET_EXHAUSTED,
    EXIT_CHECK_FAILED,
    EXIT_INFINITE,
    EXIT_INVALID_VERTEX,
    EXIT_OK,
    EXIT_PARSE_ERROR,
    main,
)
from qmut.documents import load_quiver, save_quiver
from qmut.errors import RealizationError
from qmut.quiver import Quiver, opposite
from .tests import PHI

MARKOV = Quiver.triangle(2, 2, 2)


def _write(tmp_path: Path, quiver: Quiver, name: str = "q") -> str:
    path = tmp_path / f"{name}.json"
    save_quiver(quiver, path)
    return str(path)


def test_mutate(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    source = _write(tmp_path, MARKOV)
    target = tmp_path / "out.json"
    assert main(["mutate", source, "--seq", "1", "-o", str(target)]) == EXIT_OK
    assert load_quiver(target) == opposite(MARKOV)
    out = capsys.readouterr().out
    assert "2 -> 1  0/1" in out


def test_mutate_invalid_vertex(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    source = _write(tmp_path, MARKOV)
    assert main(["mutate", source, "--seq", "1,4"]) == EXIT_INVALID_VERTEX
    assert "qmut:" in capsys.readouterr().err
    assert main(["mutate", source, "--seq", "1,x"]) == EXIT_PARSE_ERROR


def test_malformed_input(tmp_path: Path) -> None:
    path = tmp_path / "bad.json"
    path.write_text("{ not json")
    assert main(["explore", str(path)]) == EXIT_PARSE_ERROR
    assert main(["explore", str(tmp_path / "missing.json")]) == EXIT_PARSE_ERROR


def test_explore_json(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    source = _write(tmp_path, Quiver.path([1, PHI]))
    assert main(["explore", source, "--report", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"] == "finite"
    assert data["size"] == 6
    assert data["highest_denominator"] == 5
    assert data["schema_version"] == 1
    assert "witness" not in data


def test_explore_infinite(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    source = _write(tmp_path, Quiver.path([3, 1]))
    assert main(["explore", source]) == EXIT_INFINITE
    out = capsys.readouterr().out
    assert "verdict: infinite" in out
    assert "witness:" in out


def test_explore_budget(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    source = _write(tmp_path, Quiver.path([1, 1]))
    assert main(["--threads", "1", "explore", source, "--budget", "2"]) == EXIT_BUDGET_EXHAUSTED
    assert "budget_exhausted" in capsys.readouterr().out


def test_classify_rank3(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    assert main(["classify-rank3", _write(tmp_path, MARKOV)]) == EXIT_OK
    assert capsys.readouterr().out == "finite: (2, 2, 2)\n"
    assert main(["classify-rank3", _write(tmp_path, Quiver.path([1]), "a2")]) == EXIT_PARSE_ERROR


def test_series_form(capsys: pytest.CaptureFixture) -> None:
    argv = ["series", "--family", "ODD", "--n", "3", "--form", "3", "0", "3", "1", "--vertex", "2"]
    assert main(argv) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("mu_2: ")
    assert "case 2b" in out


def test_series_invalid_form() -> None:
    argv = ["series", "--family", "ODD", "--n", "3", "--form", "1", "2", "2", "2"]
    assert main(argv) == EXIT_PARSE_ERROR


def test_series_closure(capsys: pytest.CaptureFixture) -> None:
    assert main(["series", "--family", "EVEN_A", "--n", "4"]) == EXIT_OK
    assert "0 failures" in capsys.readouterr().out
    assert main(["series", "--family", "EVEN_B", "--n", "4", "--catalogue"]) == EXIT_OK
    assert "vanishing: m+q,s+q" in capsys.readouterr().out


def test_realize(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    source = _write(tmp_path, Quiver.path([1, PHI]))
    assert main(["realize", source, "--report", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"] == "finite"
    assert data["corank"] == 0
    assert data["type"] == "finite"
    assert data["violations"] == []
    assert data["acute_flips"] == [True]
    assert data["gram"]["rank"] == 3


def test_export_dot(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    source = _write(tmp_path, Quiver.path([1, PHI]), "h3")
    assert main(["export-dot", source]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith('digraph "h3" {')
    target = tmp_path / "h3.dot"
    assert main(["export-dot", source, "-o", str(target)]) == EXIT_OK
    assert target.read_text() == out


def test_path(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    first = _write(tmp_path, Quiver.path([1, 1]), "a3")
    second = _write(tmp_path, Quiver.triangle(1, 1, 1), "oriented")
    assert main(["path", first, second]) == EXIT_OK
    assert capsys.readouterr().out.strip()
    other = _write(tmp_path, Quiver.triangle(1, 1, -1), "affine")
    assert main(["path", first, other, "--max-depth", "3"]) == EXIT_CHECK_FAILED


def test_realize_infinite(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    source = _write(tmp_path, Quiver.path([PHI, PHI]))
    assert main(["realize", source]) == EXIT_INFINITE
    assert "verdict: infinite" in capsys.readouterr().out
    assert main(["realize", source, "--report", "json"]) == EXIT_INFINITE
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"] == "infinite"
    assert data["witness"]["sequence"] == []


def test_realization_error(
    tmp_path: Path, capsys: pytest.CaptureFixture, monkeypatch: pytest.MonkeyPatch
) -> None:
    def fail(*args: object, **kwargs: object) -> None:
        raise RealizationError("no admissible sign assignment")

    monkeypatch.setattr("qmut.cli.verify_class_realization", fail)
    source = _write(tmp_path, Quiver.path([1, PHI]))
    assert main(["realize", source]) == EXIT_CHECK_FAILED
    assert "no admissible sign assignment" in capsys.readouterr().err


def test_explore_weight_above_two_in_rank2(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    source = _write(tmp_path, Quiver.path([3]))
    assert main(["explore", source, "--report", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["size"] == 1
    assert data["highest_denominator"] is None
    assert main(["explore", source]) == EXIT_OK
    assert "highest denominator: none" in capsys.readouterr().out
