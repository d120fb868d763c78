import json
from pathlib import Path
from typing import Any, List, Sequence

import pytest
from typer.testing import CliRunner

from ccsp.cli import app
from ccsp.generate import canonical_a3
from ccsp.schema import AlgebraModel, InstanceModel
from ccsp.storage import dump_algebra, load_result

runner = CliRunner()

ORDER = {"arity": 2, "tuples": [[0, 0], [0, 1], [1, 1]]}
NEQ = {"arity": 2, "tuples": [[0, 1], [1, 0]]}
ONE_IN_THREE = {"arity": 3, "tuples": [[0, 0, 1], [0, 1, 0], [1, 0, 0]]}


def _language(*relations: Any) -> dict:
    return {"universe": [0, 1], "relations": list(relations)}


def _instance(algebra: Any, scopes: Sequence[Sequence[str]], tuples: List[List[int]]) -> dict:
    variables = sorted({v for s in scopes for v in s})
    return {
        "algebra": algebra,
        "variables": variables,
        "domains": {v: [0, 1] for v in variables},
        "constraints": [{"scope": list(s), "tuples": tuples} for s in scopes],
    }


def _write(path: Path, data: Any) -> str:
    path.write_text(json.dumps(data))
    return str(path)


def _json(output: str) -> Any:
    return json.loads(output[output.index("{") :])


TRIANGLE = [("x", "y"), ("y", "z"), ("x", "z")]
SQUARE = [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]
HARD = [("a", "b", "c"), ("b", "c", "d")]


def test_classify(tmp_path: Path) -> None:
    result = runner.invoke(app, ["classify", _write(tmp_path / "order.json", _language(ORDER))])
    assert result.exit_code == 0, result.output
    assert "tractable" in result.output

    hard = _write(tmp_path / "hard.json", _language(ONE_IN_THREE))
    result = runner.invoke(app, ["classify", hard])
    assert result.exit_code == 3

    result = runner.invoke(app, ["classify", hard, "--json"])
    assert result.exit_code == 3
    assert json.loads(result.output) == {"status": "np-complete", "witness_pair": [0, 1]}

    result = runner.invoke(app, ["classify", str(tmp_path / "order.json"), "--json"])
    out = json.loads(result.output)
    assert out["status"] == "tractable"
    AlgebraModel(**out["algebra"])


def test_solve_language_instances(tmp_path: Path) -> None:
    sat = _write(tmp_path / "sat.json", _instance(_language(NEQ), SQUARE, NEQ["tuples"]))
    result = runner.invoke(app, ["solve", sat])
    assert result.exit_code == 0, result.output
    assert "SAT" in result.output

    unsat = _write(tmp_path / "unsat.json", _instance(_language(NEQ), TRIANGLE, NEQ["tuples"]))
    result = runner.invoke(app, ["solve", unsat])
    assert result.exit_code == 1, result.output
    assert "UNSAT" in result.output

    hard = _write(
        tmp_path / "hard.json", _instance(_language(ONE_IN_THREE), HARD, ONE_IN_THREE["tuples"])
    )
    result = runner.invoke(app, ["solve", hard, "--json"])
    assert result.exit_code == 3
    assert _json(result.output)["status"] == "np-complete"

    result = runner.invoke(app, ["solve", hard, "--force-oracle"])
    assert result.exit_code == 0, result.output


def test_solve_json_and_output(tmp_path: Path) -> None:
    path = _write(tmp_path / "sat.json", _instance(_language(ORDER), TRIANGLE, ORDER["tuples"]))
    out = tmp_path / "result.json"
    result = runner.invoke(app, ["solve", path, "--json", "--output", str(out)])
    assert result.exit_code == 0, result.output
    shown = _json(result.output)
    assert shown["status"] == "sat"
    assert set(shown["assignment"]) == {"x", "y", "z"}
    assert "depth_guideline" in shown["trace"]
    assert load_result(out).assignment == shown["assignment"]


def test_solve_with_algebra(tmp_path: Path) -> None:
    algebra, graph = canonical_a3()
    dump_algebra(tmp_path / "a3.json", algebra, graph)
    data = _instance("a3.json", TRIANGLE, [[0, 2], [2, 0]])
    data["domains"] = {v: [0, 2] for v in "xyz"}
    path = _write(tmp_path / "inst.json", data)

    result = runner.invoke(app, ["solve", path])
    assert result.exit_code == 1, result.output
    result = runner.invoke(app, ["oracle", path])
    assert result.exit_code == 1, result.output

    data["constraints"] = data["constraints"][:2]
    path = _write(tmp_path / "inst.json", data)
    result = runner.invoke(app, ["oracle", path, "--json"])
    assert result.exit_code == 0, result.output
    assert _json(result.output)["status"] == "sat"


def test_invalid_input(tmp_path: Path) -> None:
    result = runner.invoke(app, ["solve", str(tmp_path / "missing.json")])
    assert result.exit_code == 2

    (tmp_path / "broken.json").write_text("{not json")
    result = runner.invoke(app, ["solve", str(tmp_path / "broken.json")])
    assert result.exit_code == 2

    result = runner.invoke(app, ["classify", _write(tmp_path / "lang.json", {"universe": [0]})])
    assert result.exit_code == 2

    # tuple outside the domain of y
    algebra, graph = canonical_a3()
    dump_algebra(tmp_path / "a3.json", algebra, graph)
    data = _instance("a3.json", [("x", "y")], [[0, 2]])
    result = runner.invoke(app, ["solve", _write(tmp_path / "inst.json", data)])
    assert result.exit_code == 2

    (tmp_path / "ccsp.yml").write_text("wrong: 1")
    path = _write(tmp_path / "sat.json", _instance(_language(ORDER), TRIANGLE, ORDER["tuples"]))
    result = runner.invoke(app, ["solve", path, "--config", str(tmp_path / "ccsp.yml")])
    assert result.exit_code == 2


def test_solve_search_fallback(tmp_path: Path) -> None:
    algebra, graph = canonical_a3()
    dump_algebra(tmp_path / "a3.json", algebra, graph)
    data = _instance("a3.json", [("x", "y")], [[0, 1], [0, 2], [2, 1], [2, 2]])
    data["domains"] = {"x": [0, 2], "y": [1, 2]}
    path = _write(tmp_path / "mixed.json", data)

    strict = tmp_path / "strict.yml"
    strict.write_text("solver:\n  search_fallback: false\n  greedy_first: false\n")
    result = runner.invoke(app, ["solve", path, "--config", str(strict)])
    assert result.exit_code == 2
    assert "Disabled by configuration" in result.output

    search = tmp_path / "search.yml"
    search.write_text("solver:\n  search_fallback: true\n  greedy_first: false\n")
    result = runner.invoke(app, ["solve", path, "--config", str(search)])
    assert result.exit_code == 0, result.output

    result = runner.invoke(app, ["solve", "--help"])
    assert "search_fallback" in result.output


def test_oracle_budget(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    path = _write(tmp_path / "sat.json", _instance(_language(NEQ), SQUARE, NEQ["tuples"]))
    monkeypatch.setenv("CCSP_BUDGET", "4")
    result = runner.invoke(app, ["oracle", path])
    assert result.exit_code == 2
    monkeypatch.setenv("CCSP_BUDGET", "16")
    result = runner.invoke(app, ["oracle", path])
    assert result.exit_code == 0


def test_gen(tmp_path: Path) -> None:
    result = runner.invoke(app, ["gen", "algebra", "--seed", "4", "--domain-size", "3"])
    assert result.exit_code == 0, result.output
    assert AlgebraModel(**json.loads(result.output)).universe == [0, 1, 2]

    out = tmp_path / "inst.json"
    args = ["gen", "instance", "--seed", "4", "--variables", "4", "--constraints", "5"]
    result = runner.invoke(app, args + ["-o", str(out)])
    assert result.exit_code == 0, result.output
    model = InstanceModel(**json.loads(out.read_text()))
    assert model.variables == ["v0", "v1", "v2", "v3"]
    assert len(model.constraints) == 5

    solved = runner.invoke(app, ["solve", str(out)])
    checked = runner.invoke(app, ["oracle", str(out)])
    assert solved.exit_code in (0, 1)
    assert solved.exit_code == checked.exit_code

    result = runner.invoke(app, ["gen", "algebra", "--domain-size", "0"])
    assert result.exit_code == 2


def test_laws() -> None:
    result = runner.invoke(app, ["laws", "--seed", "2", "--samples", "3"])
    assert result.exit_code == 0, result.output
    assert "no failures" in result.output


def test_compare() -> None:
    result = runner.invoke(app, ["compare", "--count", "4", "--seed", "1", "--variables", "4"])
    assert result.exit_code == 0, result.output
    assert "4 instances agree" in result.output


def test_bench() -> None:
    args = ["bench", "--sizes", "3", "--sizes", "5", "--repeats", "1", "--seed", "1"]
    result = runner.invoke(app, args)
    assert result.exit_code == 0, result.output
    assert "Bench" in result.output
