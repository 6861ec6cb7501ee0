import io
import json
from pathlib import Path

import pytest

from omegalab.cli import main

HERE = Path(__file__).parent
DATA = HERE / "data"
GOLDEN = HERE / "golden"

# (golden name, argv); each payload below was checked by hand against the module tests
CASES = [
    ("run_tokens", ["run", "--program", "INC INC INC OUT END", "--program-format", "tokens",
                    "--fuel", "100"]),
    ("run_out_end", ["run", "--program", "001000"]),
    ("run_out_of_fuel", ["run", "--program", "010110111000", "--fuel", "100"]),
    ("oracle_inc_loop", ["oracle", "--program", "010110111000"]),
    ("omega_t3", ["omega", "--max-tokens", "3", "--stages", "6", "--format", "json"]),
    ("omega_t4_oracle", ["omega", "--max-tokens", "4", "--stages", "5", "--oracle", "bounded"]),
    ("omega_t1_events", ["omega", "--max-tokens", "1", "--stages", "1", "--format", "csv"]),
    ("enumerate_t1", ["enumerate", "--max-tokens", "1"]),
    ("enumerate_t2_valid_csv", ["enumerate", "--max-tokens", "2", "--valid-only", "--format", "csv"]),
    ("theorem_dec_loop", ["theorem-stream", "--program", "DEC LOOP_OPEN LOOP_CLOSE END",
                          "--program-format", "tokens", "--max-tokens", "4"]),
    ("theorem_budget", ["theorem-stream", "--program", "011110111000", "--budget", "5"]),
    ("cantor", ["diagonal", "cantor", "--streams", str(DATA / "streams.json"), "--digits", "5"]),
    ("turing_oracle", ["diagonal", "turing", "--digits", "8", "--fuel", "100",
                       "--oracle", "bounded"]),
    ("cover_eps1", ["cover", "--epsilon", "1", "--streams", str(DATA / "streams.json"),
                    "--count", "3"]),
    ("borel_encode", ["borel", "encode", "--answers", "101"]),
    ("borel_ask", ["borel", "ask", "--value", "5/8", "--index", "2"]),
    ("complexity_3", ["complexity", "--target", "3", "--max-tokens", "5", "--fuel", "1000"]),
    ("complexity_31", ["complexity", "--target", "31", "--max-tokens", "4", "--fuel", "1000"]),
    ("probe_0100", ["complexity", "--target", "0100", "--max-tokens", "5", "--fuel", "1000",
                    "--probe"]),
]


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("name, argv", CASES, ids=[c[0] for c in CASES])
def test_golden(name, argv):
    code, out, _ = invoke(argv)
    assert code == 0
    assert out == (GOLDEN / f"{name}.out").read_text()


def test_run_example_payload():
    code, out, _ = invoke(CASES[0][1])
    assert json.loads(out) == {"kind": "halted", "output": "3", "steps": 5}


def test_omega_example_payload():
    assert json.loads(invoke(CASES[4][1])[1])["lower"] == "65/256"


def test_invalid_program_is_domain_error():
    code, out, err = invoke(["run", "--program", "110000", "--program-format", "bits"])
    assert code == 3 and out == ""
    assert "unbalanced-loop" in err


def test_unknown_subcommand(capsys):
    assert invoke(["frobnicate"])[0] == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_flag(capsys):
    assert invoke(["run", "--program", "000", "--colour"])[0] == 2


def test_csv_refused_for_nested_payloads():
    code, out, err = invoke(["borel", "encode", "--answers", "1", "--format", "csv"])
    assert code == 2 and out == ""


def test_step_budget_is_resource_error():
    code, out, _ = invoke(["omega", "--max-tokens", "4", "--stages", "8", "--step-budget", "500"])
    assert code == 4 and out == ""


def test_global_flags_before_subcommand():
    code, out, _ = invoke(["--fuel", "100", "--program-format", "tokens", "run",
                           "--program", "INC INC INC OUT END"])
    assert code == 0 and json.loads(out)["output"] == "3"


@pytest.fixture(scope="module")
def universe_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("u") / "universe.json"
    code, out, _ = invoke(["oracle", "--max-tokens", "4", "--output", str(path)])
    assert code == 0
    assert json.loads(out) == {"programs": 172, "halting": 170, "omega": "589/2048",
                               "tape_width": 16}
    return path


def test_oracle_writes_versioned_universe(universe_file):
    doc = json.loads(universe_file.read_text())
    assert doc["version"] == 1
    assert {"bits": "000", "halts": True, "output": ""} in doc["programs"]


@pytest.mark.parametrize("prefix, program, verdict", [
    ("010010011010", "010110111000", "never-halts"),
    ("010010011010", "000", "halts"),
    ("010", "010110111000", "prefix-insufficient"),
])
def test_decode(universe_file, prefix, program, verdict):
    code, out, _ = invoke(["decode", "--universe", str(universe_file), "--omega-prefix", prefix,
                           "--program", program])
    assert code == 0 and json.loads(out) == {"verdict": verdict}


def test_decode_bad_prefix_is_domain_error(universe_file):
    code, _, err = invoke(["decode", "--universe", str(universe_file), "--omega-prefix",
                           "0000001", "--program", "000"])
    assert code == 3


def test_decode_missing_universe(tmp_path):
    code, _, _ = invoke(["decode", "--universe", str(tmp_path / "nope.json"),
                         "--omega-prefix", "01", "--program", "000"])
    assert code == 3


def test_theorem_stream_file_contradiction(tmp_path):
    path = tmp_path / "stream.json"
    path.write_text(json.dumps({"version": 1, "statements": [
        {"bits": "000", "verdict": "halts"},
        {"bits": "000", "verdict": "never-halts"},
    ]}))
    code, _, err = invoke(["theorem-stream", "--program", "010110111000", "--stream", str(path)])
    assert code == 3 and "both verdicts" in err


def test_cover_localization_failure(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps([{"kind": "program", "bits": "010110111000"}]))
    code, _, _ = invoke(["cover", "--epsilon", "1/4", "--streams", str(path), "--count", "1",
                         "--fuel", "50"])
    assert code == 4


def test_omega_checkpoint_resume_and_jobs(tmp_path):
    base = ["omega", "--max-tokens", "4", "--stages", "6"]
    _, straight, _ = invoke(base)
    _, parallel, _ = invoke(base + ["--jobs", "4"])
    cp = tmp_path / "cp.json"
    invoke(["omega", "--max-tokens", "4", "--stages", "3", "--checkpoint", str(cp)])
    _, resumed, _ = invoke(["omega", "--resume", str(cp), "--stages", "6"])
    assert straight == parallel == resumed


def test_omega_resume_rejects_truncated_checkpoint(tmp_path):
    cp = tmp_path / "cp.json"
    invoke(["omega", "--max-tokens", "3", "--stages", "2", "--checkpoint", str(cp)])
    cp.write_text(cp.read_text()[:40])
    code, out, _ = invoke(["omega", "--resume", str(cp), "--stages", "4"])
    assert code == 3 and out == ""


def test_no_files_written_without_flags(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for _, argv in CASES:
        invoke(argv)
    assert list(tmp_path.iterdir()) == []
