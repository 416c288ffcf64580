import json

import pytest

from kegelbench.main import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main
from kegelbench.util.workbench import CORPUS_DIR


def corpus(name: str) -> str:
    return str(CORPUS_DIR / name)


@pytest.fixture
def program(tmp_path):
    def write(text: str, name: str = "prog.ppcf") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_check(capsys):
    code, body = run_json(capsys, ["check", corpus("geometric.ppcf")])
    assert code == EXIT_OK
    assert body == {
        "path": corpus("geometric.ppcf"),
        "language": "ppcf",
        "success": True,
        "type": "nat",
        "error": None,
    }


def test_check_text_output(capsys):
    assert main(["check", corpus("geometric.ppcf"), "--format", "text"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "nat"


def test_check_ill_typed(capsys, program):
    code, body = run_json(capsys, ["check", program("succ(\\x:nat. x)")])
    assert code == EXIT_FAILURE
    assert body["success"] is False
    assert "[succ]" in body["error"]


def test_check_parse_error(capsys, program):
    code, body = run_json(capsys, ["check", program("coin(5/4)")])
    assert code == EXIT_FAILURE
    assert body["error"].startswith("1:6:")


def test_check_fpc(capsys):
    code, body = run_json(capsys, ["check", corpus("succ_zero.fpc")])
    assert code == EXIT_OK
    assert body["language"] == "fpc"
    assert body["type"] == "mu X. 1 + X"
    assert main(["fpc-check", corpus("pairs.fpc"), "--format", "text"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "1"


def test_fpc_check_rejects_ppcf(capsys):
    assert main(["fpc-check", corpus("geometric.ppcf")]) == EXIT_FAILURE


def test_missing_file_is_a_usage_error(capsys, tmp_path):
    assert main(["check", str(tmp_path / "absent.ppcf")]) == EXIT_USAGE
    assert "error:" in capsys.readouterr().err


def test_invalid_flags(capsys):
    assert main(["adequacy", corpus("geometric.ppcf"), "--tol", "3/2"]) == EXIT_USAGE
    assert main(["dist", corpus("geometric.ppcf"), "--op-depth", "-1"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        main(["explode", corpus("geometric.ppcf")])
    assert info.value.code == EXIT_USAGE


def test_dist(capsys, program):
    code, body = run_json(capsys, ["dist", "--depth", "1", program("coin(1/3)")])
    assert code == EXIT_OK
    assert body == {"outcomes": {"0": "1/3", "1": "2/3"}, "residual": "0"}
    code, body = run_json(capsys, ["dist", "--op-depth", "7", program("5")])
    assert body == {"outcomes": {"5": "1"}, "residual": "0"}


def test_dist_geometric(capsys):
    code, body = run_json(capsys, ["dist", corpus("geometric.ppcf")])
    assert code == EXIT_OK
    for n in range(10):
        assert body["outcomes"][str(n)] == f"1/{2 ** (n + 1)}"


def test_dist_rejects_functions(capsys, program):
    assert main(["dist", program("\\x:nat. x")]) == EXIT_FAILURE
    assert "nat" in capsys.readouterr().err


def test_denote(capsys):
    code, body = run_json(capsys, ["denote", corpus("cascade_if.ppcf")])
    assert code == EXIT_OK
    assert body == {"mass": "1", "weights": {"0": "1/6", "1": "1/3", "2": "1/8", "3": "3/8"}, "discardedMass": "0"}
    code, body = run_json(capsys, ["denote", corpus("geometric.ppcf"), "--fix-iters", "3"])
    assert body["weights"] == {"0": "1/2", "1": "1/4", "2": "1/8"}


def test_adequacy(capsys, program):
    code, body = run_json(capsys, ["adequacy", program("coin(1/4)"), "--numeral", "1"])
    assert code == EXIT_OK
    assert (body["opLower"], body["denLower"], body["gap"], body["passed"]) == ("3/4", "3/4", "0", True)
    assert body["depths"] == {"k": 200, "D": 60, "C": 64}

    code, body = run_json(capsys, ["adequacy", corpus("divergent.ppcf")])
    assert code == EXIT_OK
    assert body["gap"] == "0"

    code, body = run_json(capsys, ["adequacy", corpus("geometric.ppcf"), "--numeral", "2"])
    assert code == EXIT_OK
    assert body["opLower"] == body["denLower"] == "1/8"


def test_adequacy_failure_exits_one(capsys):
    code, body = run_json(capsys, ["adequacy", corpus("geometric.ppcf"), "--numeral", "2", "--op-depth", "10"])
    assert code == EXIT_FAILURE
    assert body["passed"] is False
    assert body["gap"] == "1/8"


def test_run_is_deterministic(capsys):
    first = main(["run", corpus("geometric.ppcf"), "--seed", "42"])
    out1 = capsys.readouterr().out
    second = main(["run", corpus("geometric.ppcf"), "--seed", "42"])
    out2 = capsys.readouterr().out
    assert first == second == EXIT_OK
    assert out1 == out2
    body = json.loads(out1)
    assert body["seed"] == 42
    assert body["timeout"] is False
    assert body["steps"] == 6 * int(body["outcome"]) + 5


def test_run_timeout_is_not_an_error(capsys):
    code, body = run_json(capsys, ["run", corpus("divergent.ppcf"), "--max-steps", "30"])
    assert code == EXIT_OK
    assert body["timeout"] is True
    assert body["steps"] == 30


def test_run_samples(capsys):
    code, body = run_json(capsys, ["run", corpus("cascade_apply.ppcf"), "--samples", "400", "--seed", "5"])
    assert code == EXIT_OK
    assert body["runs"] == 400
    assert set(body["numerals"]) <= {"2", "5"}
    assert sum(body["numerals"].values()) == 400
    assert body["timeouts"] == 0


def test_run_trace(capsys, program):
    code, body = run_json(capsys, ["run", program("succ(succ(0))"), "--trace"])
    assert code == EXIT_OK
    assert body == ["succ(succ(0))", "succ(1)", "2"]


def test_fpc_run(capsys):
    code, body = run_json(capsys, ["fpc-run", corpus("pairs.fpc")])
    assert code == EXIT_OK
    assert body == {"normal": True, "term": "\\u:0. u", "type": "1"}
    code, body = run_json(capsys, ["fpc-run", corpus("omega.fpc"), "--fuel", "9"])
    assert code == EXIT_FAILURE
    assert body["normal"] is False


def test_corpus(capsys):
    code = main(["corpus"])
    reports = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert len(reports) == 6 * 6
    assert all(report["passed"] for report in reports)
    terms = [report["term"] for report in reports]
    assert terms == sorted(terms)


def test_json_output_is_byte_identical(capsys):
    argv = ["adequacy", corpus("biased_walk.ppcf"), "--numeral", "3"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first
