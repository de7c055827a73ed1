import contextlib
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from hadspec.cli import run
from hadspec.spectral import SpectralEstimate

HERE = Path(__file__).parent
DATA = HERE / "data"
GOLDEN = HERE / "golden"

sys.path.insert(0, str(GOLDEN))
from regenerate import GOLDENS  # noqa: E402


def invoke(argv):
    buf = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(err):
        code = run(argv)
    return code, buf.getvalue(), err.getvalue()


class TestGoldenFiles:
    @pytest.mark.parametrize("name", sorted(GOLDENS))
    def test_byte_identical(self, name):
        code, out, _ = invoke(GOLDENS[name])
        assert out == (GOLDEN / name).read_text(encoding="utf-8")
        assert code in (0, 1)

    def test_repeat_invocation_is_stable(self):
        argv = GOLDENS["check_audenaert.json"]
        _, first, _ = invoke(argv)
        _, second, _ = invoke(argv)
        assert first == second


class TestExitCodes:
    def test_demo_ok(self):
        code, out, _ = invoke(["demo"])
        assert code == 0
        assert json.loads(out)["all_match"] is True

    def test_spectral_ok(self):
        code, out, _ = invoke(["spectral", "--fn", "rho", "--in", str(DATA / "a.json")])
        assert code == 0
        assert json.loads(out)["converged"] is True

    def test_spectral_validation_error(self):
        code, _, err = invoke(["spectral", "--fn", "rho", "--in", str(DATA / "bad.json")])
        assert code == 2
        assert "negative entry" in err

    def test_spectral_missing_file(self):
        code, _, err = invoke(["spectral", "--fn", "rho", "--in", str(DATA / "nope.json")])
        assert code == 2 and "not found" in err

    def test_check_ok(self):
        code, out, _ = invoke(["check", "--chain", "huang",
                               "--in", str(DATA / "a.json"), "--in", str(DATA / "b.json")])
        assert code == 0
        assert json.loads(out)["holds"] is True

    def test_check_unknown_chain(self):
        code, _, err = invoke(["check", "--chain", "nope", "--in", str(DATA / "a.json")])
        assert code == 2
        assert "valid ids" in err

    def test_check_arity_error(self):
        code, _, err = invoke(["check", "--chain", "audenaert", "--in", str(DATA / "a.json")])
        assert code == 2

    def test_check_param_error(self):
        code, _, err = invoke(["check", "--chain", "genP1_rho", "--t", "9",
                               "--in", str(DATA / "a.json"), "--in", str(DATA / "b.json")])
        assert code == 2 and "[1, m]" in err

    def test_scan_ok_and_csv_header(self):
        code, out, _ = invoke(["scan", "--in", str(DATA / "ones.json"), "--grid", "1:2:3"])
        assert code == 0
        assert out.splitlines()[0] == "t,r,N"

    def test_scan_bad_grid(self):
        code, _, err = invoke(["scan", "--in", str(DATA / "ones.json"), "--grid", "junk"])
        assert code == 2

    def test_scan_json_format(self):
        code, out, _ = invoke(["scan", "--in", str(DATA / "ones.json"),
                               "--grid", "1:2:3", "--format", "json"])
        assert code == 0
        obj = json.loads(out)
        assert obj["monotone_r"] is True and obj["bounded_r"] is True

    def test_search_finding_exits_one(self):
        code, out, _ = invoke(["search", "--target", "jordan_naive",
                               "--seed", "1", "--trials", "1000", "--n", "2"])
        assert code == 1
        assert json.loads(out)["kind"] == "jordan_naive_violation"

    def test_search_exhausted_exits_zero(self):
        code, out, _ = invoke(["search", "--target", "inequivalence",
                               "--seed", "3", "--trials", "20", "--n", "1"])
        assert code == 0
        assert json.loads(out)["exhausted"] is True

    def test_search_persists_findings(self, tmp_path):
        corpus = tmp_path / "found.jsonl"
        code, _, _ = invoke(["search", "--target", "jordan_naive", "--seed", "1",
                             "--trials", "1000", "--n", "2", "--findings", str(corpus)])
        assert code == 1
        lines = corpus.read_text().strip().splitlines()
        assert len(lines) == 1
        assert json.loads(lines[0])["kind"] == "jordan_naive_violation"

    def test_kernel_ok(self):
        code, out, _ = invoke(["kernel", "--formula", "1", "--formula", "x*y", "--n", "16"])
        assert code == 0
        assert json.loads(out)["holds"] is True

    def test_kernel_syntax_error(self):
        code, _, err = invoke(["kernel", "--formula", "x +", "--n", "8"])
        assert code == 2 and "offset" in err

    def test_kernel_domain_error(self):
        code, _, err = invoke(["kernel", "--formula", "x - y", "--n", "8"])
        assert code == 2

    def test_kernel_requires_formula(self):
        code, _, err = invoke(["kernel"])
        assert code == 2

    def test_usage_error_from_argparse(self):
        code, _, _ = invoke(["spectral", "--fn", "bogus", "--in", str(DATA / "a.json")])
        assert code == 2

    def test_nonconvergence_maps_to_exit_three(self, monkeypatch):
        import hadspec.cli as cli

        stalled = SpectralEstimate(1.0, 10, 1.0, False, "gelfand")
        monkeypatch.setattr(cli, "spectral_radius", lambda m: stalled)
        code, out, _ = invoke(["spectral", "--fn", "rho", "--in", str(DATA / "a.json")])
        assert code == 3
        assert json.loads(out)["converged"] is False

    def test_out_flag_writes_file(self, tmp_path):
        target = tmp_path / "report.json"
        code, out, _ = invoke(["demo", "--out", str(target)])
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["all_match"] is True


class TestConsoleEntry:
    def test_module_execution(self):
        proc = subprocess.run(
            [sys.executable, "-m", "hadspec.cli", "demo"],
            capture_output=True, text=True, cwd=str(HERE.parent),
        )
        assert proc.returncode == 0
        assert (GOLDEN / "demo.json").read_text(encoding="utf-8") == proc.stdout
