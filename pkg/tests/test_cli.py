import io
import json
import subprocess
import sys

import pytest

from bernrand.cli import EXIT_FAIL, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, main, parse_n_range
from bernrand.deficiency import DeficiencyReport


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def run_json(argv):
    code, text = run(argv + ["--json"])
    assert code == EXIT_OK
    return json.loads(text)


class TestAnalyze:
    def test_bits(self):
        doc = run_json(["analyze", "--bits", "0011"])
        assert doc["schema_version"] == 1
        (rep,) = doc["reports"]
        assert (rep["n"], rep["k"]) == (4, 2)
        assert all(f in rep for f in DeficiencyReport.FIELDS)
        assert doc["config"]["code"] == "markov-index"

    def test_field_order(self):
        rep = run_json(["analyze", "--bits", "0011"])["reports"][0]
        keys = list(rep)
        assert keys[5:14] == list(DeficiencyReport.FIELDS)
        assert all(v >= 0 for v in rep["clamped"].values())

    def test_hex(self):
        rep = run_json(["analyze", "--hex", "00", "--format", "hex"])["reports"][0]
        assert (rep["n"], rep["k"]) == (8, 0)

    def test_windows(self, tmp_path):
        f = tmp_path / "rng.bin"
        f.write_bytes(bytes(range(256)) * 4)  # 8192 bits
        doc = run_json(["analyze", "--file", str(f), "--window", "128:64"])
        assert len(doc["reports"]) == -(-(8192 - 128) // 64) + 1
        assert [r["offset"] for r in doc["reports"][:3]] == [0, 64, 128]

    def test_threshold_flag(self):
        rep = run_json(["analyze", "--bits", "0" * 40, "--threshold", "0"])["reports"][0]
        assert rep["flagged"] is (rep["d_bern_grid"] >= 0)

    def test_audit_defaults(self, tmp_path):
        f = tmp_path / "data.bin"
        f.write_bytes(bytes(300))
        doc = run_json(["audit", "--file", str(f)])
        assert doc["window"] == {"length": 1024, "stride": 512}
        assert len(doc["reports"]) == 4

    def test_deterministic(self):
        argv = ["analyze", "--bits", "0110100110010110", "--bits", "0001", "--tests", "lr-kt,exch-index"]
        assert run(argv + ["--json"]) == run(argv + ["--json"])

    def test_impossible_label(self):
        from bernrand.cli import _json_number

        assert _json_number(float("inf")) == "impossible-under-P"
        assert _json_number(float("-inf")) == "-inf"
        assert _json_number(float("nan")) is None

    def test_text_mode(self):
        code, text = run(["analyze", "--bits", "0011"])
        assert code == EXIT_OK and "d_bern_grid" in text and not text.startswith("{")

    def test_decode_error(self, capsys):
        code, text = run(["analyze", "--bits", "01x1"])
        assert code == EXIT_USAGE and text == ""
        assert "byte offset 2" in capsys.readouterr().err

    def test_empty_input(self):
        assert run(["analyze", "--bits", " "])[0] == EXIT_USAGE

    def test_window_too_long(self):
        assert run(["analyze", "--bits", "0101", "--window", "8:1"])[0] == EXIT_USAGE

    def test_bad_code(self, capsys):
        assert run(["analyze", "--bits", "01", "--code", "nope"])[0] == EXIT_USAGE
        assert "unknown code provider" in capsys.readouterr().err


class TestPartition:
    def test_n4(self):
        code, text = run(["partition", "4"])
        lines = [l for l in text.splitlines() if not l.startswith("#")]
        assert code == EXIT_OK and "n=4 num_cells=5" in text
        assert [tuple(l.split()[1:3]) for l in lines] == [(str(k), str(k)) for k in range(5)]

    def test_n1(self):
        doc = run_json(["partition", "1"])
        assert [(c["lo"], c["hi"]) for c in doc["cells"]] == [(0, 0), (1, 1)]

    def test_lazy_cell_of(self):
        doc = run_json(["partition", "1000000", "--cell-of", "500000"])
        (cell,) = doc["cells"]
        assert cell["lo"] <= 500000 <= cell["hi"]
        assert 1 / 8 <= cell["width_ratio"] <= 8

    def test_zero(self):
        assert run(["partition", "0"])[0] == EXIT_USAGE


class TestVerify:
    def test_exhaustive(self):
        code, text = run(["verify", "--exhaustive", "--n", "1..4"])
        assert code == EXIT_OK
        assert all(l.startswith(("#", "CHECK")) for l in text.splitlines())

    def test_resource(self, capsys):
        assert run(["verify", "--n", "15", "--exhaustive"])[0] == EXIT_RESOURCE
        assert "resource" in capsys.readouterr().err

    def test_sampled_deterministic(self):
        argv = ["verify", "--sampled", "300", "--seed", "7", "--n", "200"]
        a, b = run(argv), run(argv)
        assert a == b and a[0] == EXIT_OK

    def test_sampled_needs_seed(self):
        assert run(["verify", "--sampled", "10", "--n", "5"])[0] == EXIT_USAGE

    def test_ledger_file(self, tmp_path):
        path = tmp_path / "ledger.txt"
        code, text = run(["verify", "--n", "3", "--tests", "zero", "--ledger", str(path)])
        assert code == EXIT_OK and text == ""
        assert "CHECK expect/zero n=3" in path.read_text()

    def test_fail_exit(self, monkeypatch):
        from bernrand import randtests

        broken = randtests.RandomnessTest("one", randtests.SEQUENCE, lambda x, P: 1)
        monkeypatch.setitem(randtests._TESTS, "one", broken)
        assert run(["verify", "--n", "2", "--tests", "one", "--providers", ""])[0] == EXIT_FAIL

    @pytest.mark.parametrize("text,expected", [("1..3", (1, 2, 3)), ("8,10,12", (8, 10, 12)), ("1..2,5", (1, 2, 5))])
    def test_n_range(self, text, expected):
        assert parse_n_range(text) == expected


class TestConfigFile:
    def test_flags_override(self, tmp_path):
        cfg = tmp_path / "b.cfg"
        cfg.write_text("code = index\ngrid = tenths\nbackend.gz = zlib\n")
        doc = run_json(["analyze", "--config", str(cfg), "--bits", "0011", "--code", "kt"])
        assert doc["config"]["code"] == "kt" and doc["config"]["grid"] == "tenths"
        doc = run_json(["analyze", "--config", str(cfg), "--bits", "0011", "--code", "gz"])
        assert doc["config"]["code"] == "gz"

    def test_bad_key(self, tmp_path):
        cfg = tmp_path / "b.cfg"
        cfg.write_text("colour = red\n")
        assert run(["analyze", "--config", str(cfg), "--bits", "01"])[0] == EXIT_USAGE


def test_console_script_exit_code():
    proc = subprocess.run(
        [sys.executable, "-m", "bernrand.cli", "verify", "--n", "15", "--exhaustive"], capture_output=True, text=True
    )
    assert proc.returncode == EXIT_RESOURCE and proc.stdout == ""
