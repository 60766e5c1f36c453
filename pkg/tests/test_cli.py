import io
import json
import subprocess
import sys

import numpy as np
import pytest

from stolarsky import stolarsky_mean
from stolarsky.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


class TestMean:
    @pytest.mark.parametrize(
        "argv, text",
        [
            (["--alpha", "2", "--a", "1", "--b", "3"], "2"),
            (["--alpha", "-1", "--a", "1", "--b", "4"], "2"),
            (["--alpha", "0", "--a", "1", "--b", "1"], "1"),
        ],
    )
    def test_examples(self, argv, text):
        code, out = run("mean", *argv)
        assert code == 0
        assert out.strip() == text

    def test_round_trip_digits(self):
        code, out = run("mean", "--alpha", "0.3", "--a", "1", "--b", "7")
        assert float(out) == stolarsky_mean(0.3, (1, 7))

    def test_json_schema(self):
        code, out = run("mean", "--alpha", "1", "--a", "1", "--b", "2", "--format", "json")
        doc = json.loads(out)
        assert set(doc) == {"command", "inputs", "results", "diagnostics"}
        assert doc["command"] == "mean"
        assert doc["results"]["mean"] == stolarsky_mean(1, (1, 2))

    def test_csv(self):
        code, out = run("mean", "--alpha", "2", "--a", "1", "--b", "3", "--format", "csv")
        assert out.splitlines() == ["alpha,a,b,mean", "2,1,3,2"]

    def test_domain_error(self, capsys):
        code, _ = run("mean", "--alpha", "2", "--a", "-1", "--b", "3")
        assert code == 2
        assert "error" in capsys.readouterr().err


class TestAbscissa:
    def test_square(self):
        code, out = run("abscissa", "-f", "x^2", "--a", "1", "--b", "3")
        assert code == 0
        assert json.loads(out)["results"]["abscissas"] == [2.0]

    def test_match(self):
        code, out = run("abscissa", "-f", "1/x", "--a", "1", "--b", "4", "--alpha", "-1")
        assert code == 0
        assert json.loads(out)["results"]["matches"] is True

    def test_syntax_error(self, capsys):
        code, _ = run("abscissa", "-f", "x^", "--a", "1", "--b", "2")
        assert code == 2
        assert "offset 2" in capsys.readouterr().err

    def test_no_root(self):
        code, _ = run("abscissa", "-f", "x^3", "--a", "1", "--b", "2.3", "--tol", "1e-20")
        assert code == 3

    def test_degenerate(self):
        code, out = run("abscissa", "-f", "3*x + 1", "--a", "1", "--b", "2")
        assert code == 4
        assert json.loads(out)["results"]["degenerate"] is True

    def test_non_match_plain(self):
        code, out = run("abscissa", "-f", "x^3", "--a", "1", "--b", "2", "--alpha", "2", "--format", "plain")
        assert code == 0
        assert "matches: false" in out


class TestVerify:
    def test_passes(self):
        code, _ = run("verify", "--alpha-grid", "-3,-1,0,0.5,1,2,3", "--trials", "100", "--seed", "7", "--tol", "1e-9")
        assert code == 0

    def test_zero_tolerance(self, capsys):
        code, _ = run("verify", "--alpha-grid", "2", "--trials", "1", "--seed", "1", "--tol", "0")
        assert code == 1
        err = capsys.readouterr().err
        assert "alpha=2" in err and "c=" in err and "a=" in err and "b=" in err

    def test_defaults_and_determinism(self):
        code, first = run("verify", "--format", "json")
        assert code == 0
        assert run("verify", "--format", "json")[1] == first
        doc = json.loads(first)
        assert doc["inputs"]["seed"] == 0 and doc["inputs"]["trials"] == 100
        assert [r["alpha"] for r in doc["results"]["rows"]] == [-3, -1, 0, 0.5, 1, 2, 3]

    def test_csv(self):
        code, out = run("verify", "--alpha-grid", "0.5", "--trials", "5", "--format", "csv")
        lines = out.splitlines()
        assert lines[0] == "alpha,trials,max_fde,max_ode,pass"
        assert len(lines) == 2


class TestProofcheck:
    def test_passes(self):
        code, out = run("proofcheck", "--alpha", "3", "--t", "1", "--family", "1,1,1", "--kmax", "14")
        assert code == 0
        assert out.strip().endswith("PASS")

    def test_json(self):
        code, out = run("proofcheck", "--alpha", "-2", "--format", "json")
        doc = json.loads(out)
        assert code == 0 and doc["results"]["pass"]
        assert len(doc["results"]["convergence"]) == 13

    @pytest.mark.parametrize("alpha", ["0", "1", "2"])
    def test_refused(self, alpha, capsys):
        code, _ = run("proofcheck", "--alpha", alpha)
        assert code == 6
        assert capsys.readouterr().err

    def test_precision_floor(self, monkeypatch):
        monkeypatch.setattr("stolarsky.proofcheck.FLOOR_RELATIVE_NOISE", 1e-17)
        code, _ = run("proofcheck", "--alpha", "3")
        assert code == 5

    def test_bad_family(self):
        assert run("proofcheck", "--alpha", "3", "--family", "1,2")[0] == 2


def write(tmp_path, text):
    p = tmp_path / "triples.csv"
    p.write_text(text)
    return str(p)


class TestFitAlpha:
    def test_arithmetic_row(self, tmp_path):
        code, out = run("fit-alpha", "--input", write(tmp_path, "# a,b,c\n1,3,2\n"), "--format", "json")
        assert code == 0
        (row,) = json.loads(out)["results"]["rows"]
        assert row["alpha"] == pytest.approx(2.0, abs=1e-9)

    def test_out_of_range(self, tmp_path, capsys):
        code, _ = run("fit-alpha", "--input", write(tmp_path, "1,3,5\n"))
        assert code == 3
        assert "row 1" in capsys.readouterr().err

    @pytest.mark.parametrize("bad", ["1,2\n", "1,x,1.5\n", "1,2,3,4\n", "-1,2,1\n"])
    def test_malformed(self, tmp_path, capsys, bad):
        code, _ = run("fit-alpha", "--input", write(tmp_path, "# header\n1,3,2\n" + bad))
        assert code == 2
        assert "row 3" in capsys.readouterr().err

    def test_median(self, tmp_path):
        rng = np.random.Generator(np.random.PCG64(2))
        a = rng.uniform(0.1, 10, 50)
        b = a * rng.uniform(1.1, 5, 50)
        c = [stolarsky_mean(1.5, (x, y)) for x, y in zip(a, b)]
        text = "".join(f"{float(x)!r},{float(y)!r},{z!r}\n" for x, y, z in zip(a, b, c))
        code, out = run("fit-alpha", "--input", write(tmp_path, text), "--format", "json")
        assert code == 0
        assert json.loads(out)["results"]["median_alpha"] == pytest.approx(1.5, abs=1e-6)

    def test_missing_file(self, tmp_path):
        assert run("fit-alpha", "--input", str(tmp_path / "nope.csv"))[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "stolarsky", "mean", "--alpha", "2", "--a", "1", "--b", "3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "2"


def test_usage_error():
    assert run("mean", "--alpha")[0] == 2
