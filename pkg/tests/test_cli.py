"""CLI: artifact formats, determinism, exit codes."""

import json
import math

import pytest

from epzeta.cli import main


def run(tmp_path, *argv, csv=False):
    """Invoke main() writing JSON (and optionally CSV) to temp files."""
    jpath = tmp_path / "out.json"
    args = list(argv) + ["--json", str(jpath)]
    cpath = tmp_path / "out.csv"
    if csv:
        args += ["--csv", str(cpath)]
    code = main(args)
    payload = json.loads(jpath.read_text()) if jpath.exists() else None
    # read_bytes keeps the RFC-4180 CRLF endings visible
    text = cpath.read_bytes().decode() if csv and cpath.exists() else None
    return code, payload, text


class TestEval:
    def test_value_and_oracle(self, tmp_path):
        code, out, _ = run(
            tmp_path, "eval", "--form", "1,0,5", "--s", "2,3", "--oracle"
        )
        assert code == 0
        assert out["discriminant"] == -20 and out["h"] == 2 and out["w"] == 2
        assert out["oracle_abs_diff"] < out["oracle_tail_bound"] + 1e-9
        assert out["fe_relative_residual"] < 1e-8
        assert "config_fingerprint" in out

    def test_bad_form(self, tmp_path):
        code, _, _ = run(tmp_path, "eval", "--form", "1,5,1", "--s", "2,0")
        assert code == 2


class TestDecompose:
    def test_residual(self, tmp_path):
        code, out, _ = run(
            tmp_path, "decompose", "--form", "2,2,3", "--s", "1.5,10"
        )
        assert code == 0
        assert out["residual"] < 1e-10
        assert [t["a_j"] for t in out["terms"]] == [1.0, -1.0]


class TestZeros:
    def test_strip_csv(self, tmp_path):
        code, out, text = run(
            tmp_path, "zeros", "--sigma1", "0.6", "--sigma2", "0.95",
            "--T", "20", csv=True,
        )
        assert code == 0
        lines = text.split("\r\n")  # RFC 4180 line endings
        assert lines[0] == "re,im,residual,certified"
        assert out["count"] == 1
        re0, im0 = out["zeros"][0]
        assert abs(complex(re0, im0) - (0.932969697485 + 15.668249531278j)) < 1e-6

    def test_line_scan(self, tmp_path):
        code, out, _ = run(
            tmp_path, "zeros", "--line", "0.933", "--tol", "0.05", "--T", "20"
        )
        assert code == 0
        assert out["count"] == 1


class TestJensen:
    def test_profile_and_report(self, tmp_path):
        code, out, text = run(
            tmp_path, "jensen", "--form", "2,2,3",
            "--sigma-range", "5.0:6.0:0.25", "--T", "60", csv=True,
        )
        assert code == 0
        lines = [l for l in text.split("\r\n") if l]
        assert lines[0] == "sigma,phi,err,dphi,d2phi"
        assert len(lines) == 6
        assert len(out["intervals"]) == 1
        assert abs(out["intervals"][0][2] + math.log(2)) < 2e-2

    def test_bad_range(self, tmp_path):
        code, _, _ = run(
            tmp_path, "jensen", "--sigma-range", "5.0:6.0", "--T", "10"
        )
        assert code == 2


class TestDensity:
    def test_kde(self, tmp_path):
        code, out, _ = run(
            tmp_path, "density", "--sigma", "0.75", "--n", "4",
            "--samples", "1024",
        )
        assert code == 0
        assert out["G"] > 0 and out["method"] == "kde"

    def test_constant_degenerate(self, tmp_path):
        code, out, _ = run(
            tmp_path, "density", "--constant", "0.75", "0.75", "--n", "4",
            "--samples", "512",
        )
        assert code == 0
        assert out["c_pred"] == 0.0


class TestVerify:
    def test_single_check(self, tmp_path):
        code, out, _ = run(tmp_path, "verify", "--only", "class-group")
        assert code == 0
        assert out["passed"] is True
        assert out["checks"][0]["name"] == "class-group"

    def test_unknown_check(self, tmp_path):
        code, _, _ = run(tmp_path, "verify", "--only", "nope")
        assert code == 2

    def test_determinism(self, tmp_path):
        outs = []
        for name in ("a.json", "b.json"):
            path = tmp_path / name
            assert (
                main(
                    ["verify", "--only", "class-sum", "--seed", "7",
                     "--json", str(path)]
                )
                == 0
            )
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]


class TestExperiment:
    def test_line_scan(self, tmp_path):
        code, out, text = run(
            tmp_path, "experiment", "LineScan", "--sigma1", "0.75",
            "--T", "100", csv=True,
        )
        assert code == 0
        assert len(out["summary"]["rates"]) == 3
        assert text.split("\r\n")[0] == "T,count,rate"

    def test_count_vs_predict(self, tmp_path):
        code, out, _ = run(
            tmp_path, "experiment", "CountVsPredict", "--T", "60",
            "--n", "4", "--samples", "512", csv=True,
        )
        assert code == 0
        s = out["summary"]
        assert s["count"] >= 0 and s["c_pred"] > 0

    def test_unknown_experiment(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["experiment", "Bogus"])
        assert exc.value.code == 2
