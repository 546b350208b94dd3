"""Tests for the smoothdual command-line front end."""

import json
from unittest.mock import patch

from smoothdual.cli import COMMAND_HANDLERS, main, parse_arguments, run
from smoothdual.exactnum import format_rational, parse_rational


def _run_json(tmp_path, argv, name="out.json"):
    out = tmp_path / name
    code = run([*argv, "--jobs", "1", "-o", str(out)])
    return code, json.loads(out.read_text(encoding="utf-8"))


class TestParseArguments:
    def test_build(self):
        args = parse_arguments(["build", "--n", "9", "--d", "1"])
        assert (args.command, args.n, args.d) == ("build", 9, 1)
        assert args.precision == 128
        assert not args.debug

    def test_debug_and_degree_flags_coexist(self):
        args = parse_arguments(["claims", "--n", "9", "--d", "1", "-d"])
        assert args.d == 1
        assert args.debug

    def test_ratdeg_optional_degrees(self):
        args = parse_arguments(["ratdeg", "--fn", "maj:3", "--eps", "1/3", "--d0", "1", "--d1", "2"])
        assert (args.d, args.d0, args.d1) == (None, 1, 2)

    def test_from_sys_argv(self):
        with patch("sys.argv", ["smoothdual", "upp", "--n", "2"]):
            args = parse_arguments()
        assert args.command == "upp"
        assert args.beta is None


class TestBuildVerify:
    def test_build_then_verify(self, tmp_path):
        code, data = _run_json(tmp_path, ["build", "--n", "9", "--d", "1"], "w.json")
        assert code == 0
        assert data["delta_int"] == 2
        assert data["manifest"]["command"] == "build"
        assert data["manifest"]["outcome"] == "pass"
        assert data["manifest"]["parameters"] == {"n": 9, "d": 1}
        assert "wall_time_seconds" not in data["manifest"]
        code, verified = _run_json(tmp_path, ["verify", str(tmp_path / "w.json")], "v.json")
        assert code == 0
        assert verified["report"]["status"] == "pass"

    def test_tampered_witness_fails(self, tmp_path):
        run(["build", "--n", "9", "--d", "1", "--jobs", "1", "-o", str(tmp_path / "w.json")])
        data = json.loads((tmp_path / "w.json").read_text(encoding="utf-8"))
        row = next(r for r in data["values"] if r["t"] == 1)
        row["a"] = format_rational(-parse_rational(row["a"]))
        row["b"] = format_rational(-parse_rational(row["b"]))
        (tmp_path / "bad.json").write_text(json.dumps(data), encoding="utf-8")
        assert run(["verify", str(tmp_path / "bad.json"), "--jobs", "1"]) == 2

    def test_deterministic_output(self, tmp_path):
        out = tmp_path / "w.json"
        argv = ["build", "--n", "9", "--d", "1", "--jobs", "1", "-o", str(out)]
        run(argv)
        first = out.read_bytes()
        run(argv)
        assert out.read_bytes() == first

    def test_manifest_records_argv(self, tmp_path):
        out = tmp_path / "u.json"
        argv = ["upp", "--n", "2", "--jobs", "1", "-o", str(out)]
        assert run(argv) == 0
        assert json.loads(out.read_text(encoding="utf-8"))["manifest"]["argv"] == argv

    def test_manifest_argv_from_sys_argv(self, tmp_path):
        out = tmp_path / "u.json"
        with patch("sys.argv", ["smoothdual", "upp", "--n", "1", "--jobs", "1", "-o", str(out)]):
            assert main() == 0
        manifest = json.loads(out.read_text(encoding="utf-8"))["manifest"]
        assert manifest["argv"] == ["upp", "--n", "1", "--jobs", "1", "-o", str(out)]

    def test_record_time(self, tmp_path):
        _, data = _run_json(tmp_path, ["upp", "--n", "2", "--record-time"])
        assert "wall_time_seconds" in data["manifest"]

    def test_summary_on_stdout(self, capsys):
        assert run(["claims", "--n", "9", "--d", "1", "--jobs", "1"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("### Claims n=9 d=1")
        assert "center_mass" in out


class TestSubcommands:
    def test_lift_and_psi(self, tmp_path):
        code, data = _run_json(tmp_path, ["lift", "--n", "9", "--d", "1"])
        assert code == 0
        assert data["report"]["fields"]["m"] == 18
        code, data = _run_json(tmp_path, ["psi", "--n", "9", "--d", "1"], "psi.json")
        assert code == 0
        assert data["psi1"]["m"] == 18

    def test_thrdeg(self, tmp_path):
        code, data = _run_json(tmp_path, ["thrdeg", "--fn", "parity:2"])
        assert code == 0
        assert data["degree"] == 2
        assert data["witness"]["kind"] == "threshold"
        assert data["manifest"]["parameters"]["fn"] == "parity:2"

    def test_ratdeg_search_prints_json(self, capsys):
        assert run(["ratdeg", "--fn", "parity:2", "--eps", "1/3", "--jobs", "1"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["degree"] == 2
        assert data["eps"] == "1/3"

    def test_ratdeg_dual(self, tmp_path):
        code, data = _run_json(tmp_path, ["ratdeg", "--fn", "maj:2", "--eps", "1/2", "--d", "0"])
        assert code == 0
        assert data["feasible"] is False
        assert data["witness"]["kind"] == "rational_pair"

    def test_pattern_csv(self, tmp_path):
        out = tmp_path / "m.csv"
        assert run(["pattern", "--N", "2", "--n", "1", "--format", "csv", "-o", str(out), "--jobs", "1"]) == 0
        assert out.read_text(encoding="utf-8").splitlines()[0] == "x,S=0;w=+,S=0;w=-,S=1;w=+,S=1;w=-"

    def test_pattern_json(self, tmp_path):
        code, data = _run_json(tmp_path, ["pattern", "--N", "2", "--n", "1"])
        assert code == 0
        assert data["matrix"][0] == [1, -1, 1, -1]

    def test_bound(self, tmp_path):
        code, data = _run_json(tmp_path, ["bound", "--gamma", "1", "--d", "2", "--n", "1", "--N", "2"])
        assert code == 0
        assert data["exact_bound"] == "4/1"
        assert data["log2_bound"] == {"lo": "2/1", "hi": "2/1"}

    def test_pipeline(self, tmp_path):
        code, data = _run_json(tmp_path, ["pipeline", "--log2n", "20000"])
        assert code == 0
        assert data["d"] == 200

    def test_upp(self, tmp_path):
        code, data = _run_json(tmp_path, ["upp", "--n", "3"])
        assert code == 0
        assert data["report"]["fields"]["beta"] == "1/24"
        assert run(["upp", "--n", "2", "--beta", "0", "--jobs", "1"]) == 2


class TestSuite:
    def _write(self, path, text):
        path.write_text(text, encoding="utf-8")
        return str(path)

    def test_suite(self, tmp_path):
        config = self._write(
            tmp_path / "suite.yaml",
            "witnesses:\n  - {n: 9, d: 1}\n  - {n: 8, d: 1}\n"
            "thrdeg:\n  - {fn: 'maj:3'}\n"
            "bounds:\n  - {gamma: 1, d: 2, n: 1, N: 2}\n"
            "upp:\n  - {n: 2}\n  - not-a-mapping\n",
        )
        code, data = _run_json(tmp_path, ["suite", "--config", config])
        assert code == 0
        assert [e["command"] for e in data["results"]] == ["build", "thrdeg", "bound", "upp"]
        assert data["results"][2]["result"]["exact_bound"] == "4/1"

    def test_failing_entry_sets_exit_code(self, tmp_path):
        config = self._write(tmp_path / "suite.yaml", "upp:\n  - {n: 2, beta: '0'}\n")
        code, data = _run_json(tmp_path, ["suite", "--config", config])
        assert code == 2
        assert data["manifest"]["outcome"] == "fail"

    def test_entry_missing_key_is_skipped(self, tmp_path, caplog):
        config = self._write(tmp_path / "suite.yaml", "witnesses:\n  - {n: 9}\nupp:\n  - {n: 2}\n")
        code, data = _run_json(tmp_path, ["suite", "--config", config])
        assert code == 0
        assert [e["command"] for e in data["results"]] == ["upp"]
        assert "Skipping witnesses entry" in caplog.text

    def test_empty_config(self, tmp_path):
        config = self._write(tmp_path / "suite.yaml", "")
        assert run(["suite", "--config", config, "--jobs", "1"]) == 1

    def test_nothing_runnable(self, tmp_path):
        config = self._write(tmp_path / "suite.yaml", "witnesses:\n  - {n: 8, d: 1}\n")
        assert run(["suite", "--config", config, "--jobs", "1"]) == 1


def test_main_uses_sys_argv():
    with patch("sys.argv", ["smoothdual", "upp", "--n", "1", "--jobs", "1"]):
        assert main() == 0


def test_handlers_cover_every_subcommand():
    assert set(COMMAND_HANDLERS) == {
        "build", "verify", "claims", "lift", "psi", "thrdeg", "ratdeg", "pattern", "bound", "pipeline", "upp", "suite"
    }
