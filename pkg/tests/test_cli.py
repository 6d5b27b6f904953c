import csv
import hashlib
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from ellipstat import AffineDensity, Ellipse, NumericalError, generate, read_mesh, theorem1_energy
from ellipstat import cli


def run(*args, check=True):
    proc = subprocess.run([sys.executable, "-m", "ellipstat", *args], capture_output=True, text=True)
    if check:
        assert proc.returncode == 0, proc.stderr
    return proc


def jsonl(text):
    return [json.loads(line) for line in text.splitlines()]


def test_help():
    proc = run("--help")
    assert "energy" in proc.stdout and "tables" in proc.stdout


def test_energy_analytic_alpha():
    (row,) = jsonl(run("energy", "--method", "analytic", "-a", "1.5", "-b", "0.5", "--alpha", "3,1.5,1").stdout)
    assert round(row["value"], 4) == 7.5316
    assert row["reference"] is None and row["relative_error"] is None
    assert row["density"]["convention"] == "normalized"


def test_energy_sigma_matches_alpha():
    a = jsonl(run("energy", "-a", "1.5", "-b", "0.5", "--alpha", "3,1.5,1").stdout)[0]
    s = jsonl(run("energy", "-a", "1.5", "-b", "0.5", "--sigma", "x1 + 2*x2 + 3").stdout)[0]
    assert s["value"] == pytest.approx(a["value"], rel=1e-15)
    assert s["density"]["convention"] == "monomial"
    assert s["density"]["coefficients"] == [3.0, 1.0, 2.0]


def test_energy_spectral_circle():
    (row,) = jsonl(run("energy", "--method", "spectral", "-a", "1", "-b", "1", "--density", "one", "-N", "30").stdout)
    assert row["value"] == pytest.approx(4 / 3, abs=1e-4)
    assert row["parameters"] == {"N": 30}
    assert row["relative_error"] == abs(row["value"] - row["reference"]) / row["reference"]


def test_energy_bem_level0():
    (row,) = jsonl(run("energy", "--method", "bem", "-a", "1", "-b", "1", "--density", "one", "--level", "0").stdout)
    assert 0 < row["value"] < 4 / 3
    assert row["parameters"] == {"level": 0, "q": 4, "q_sing": 6}


def test_energy_oracle():
    rows = jsonl(run("energy", "--method", "oracle", "-a", "1", "-b", "1", "--density", "one", "x1").stdout)
    assert [r["value"] for r in rows] == pytest.approx([4 / 3, 2 / 15], rel=1e-10)


def test_energy_product_order():
    proc = run("energy", "--method", "analytic", "spectral", "-a", "0.7", "0.9", "-b", "0.5",
               "--density", "one", "x2", "-N", "6", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(proc.stdout)))
    assert [(r["a"], r["method"], r["density"]) for r in rows] == [
        (a, m, d) for a in ("0.69999999999999996", "0.90000000000000002")
        for m in ("analytic", "spectral") for d in ("one", "x2")]


def test_csv_format(tmp_path):
    out = tmp_path / "e.csv"
    run("energy", "--method", "analytic", "-a", "1", "-b", "1", "--density", "one", "--format", "csv", "--out", str(out))
    raw = out.read_bytes()
    assert b"\r" not in raw
    rows = list(csv.DictReader(io.StringIO(raw.decode("utf-8"))))
    assert float(rows[0]["value"]) == theorem1_energy(Ellipse(1, 1), AffineDensity(1, 0, 0)).total
    assert rows[0]["value"] == "1.3333333333333335"
    rounded = run("energy", "-a", "1", "-b", "1", "--density", "one", "--format", "csv", "--rounded").stdout
    assert list(csv.DictReader(io.StringIO(rounded)))[0]["value"] == "1.3333"


def test_text_format():
    text = run("energy", "--method", "spectral", "-a", "1", "-b", "1", "--density", "one", "--format", "text").stdout
    assert text.splitlines()[0].split()[:3] == ["method", "a", "b"]


@pytest.mark.parametrize("args", [
    ["energy", "--method", "analytic", "-a", "1", "-b", "1", "--density", "one", "--level", "2"],
    ["energy", "--method", "bem", "-a", "1", "-b", "1", "--density", "one", "-N", "4"],
    ["energy", "-a", "0.5", "-b", "1", "--density", "one"],
    ["energy", "--method", "oracle", "-a", "2", "-b", "1", "--density", "one"],
    ["energy", "-a", "1", "-b", "1", "--alpha", "1,2"],
    ["energy", "-a", "1", "-b", "1", "--sigma", "x1*x2"],
    ["energy", "-a", "1", "-b", "1", "--sigma", "1", "--density", "one"],
    ["energy", "-a", "1", "-b", "1"],
    ["energy", "-a", "-1", "-b", "1", "--density", "one"],
    ["convergence", "--method", "spectral", "-a", "1", "-b", "1", "--density", "one", "--sweep", "4:2"],
    ["convergence", "--method", "analytic", "-a", "1", "-b", "1", "--density", "one", "--sweep", "0:2"],
    ["frobnicate"],
])
def test_usage_errors(args):
    proc = run(*args, check=False)
    assert proc.returncode == 1
    assert "usage" in proc.stderr


def test_numerical_failure_exit_code(monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise NumericalError("quadrature did not converge")

    monkeypatch.setattr(cli.Calculator, "value", boom)
    assert cli.main(["energy", "-a", "1", "-b", "1", "--density", "one"]) == 2
    assert "did not converge" in capsys.readouterr().err


def test_tables_exact_only(tmp_path):
    run("tables", "--exact-only", "--out", str(tmp_path))
    text = (tmp_path / "tables.txt").read_text()
    assert "0.1666   0.2741   0.3939   0.5234   0.6608   0.8048" in text
    assert "2.7736   3.6159   4.5165   5.4708   6.4763   7.5316" in text
    rows = list(csv.DictReader(io.StringIO((tmp_path / "tables.csv").read_text())))
    assert len(rows) == 18 + 6
    assert all(r["computed"] == "" for r in rows)
    half_even = run("tables", "--exact-only", "--rounding", "half-even").stdout
    assert "0.1667" in half_even


def test_tables_with_bem(tmp_path):
    run("tables", "--level", "1", "--step", "0.25", "--out", str(tmp_path))
    rows = list(csv.DictReader(io.StringIO((tmp_path / "tables.csv").read_text())))
    assert {r["table"] for r in rows} == {"1", "2", "3"}
    assert sum(r["table"] == "3" for r in rows) == 4
    assert all(float(r["relative_error"]) < 0.1 for r in rows)
    assert "Table 3" in (tmp_path / "tables.txt").read_text()


def test_convergence_spectral(tmp_path):
    out = tmp_path / "conv.csv"
    run("convergence", "--method", "spectral", "-a", "1", "-b", "1", "--density", "one", "--sweep", "0:30",
        "--out", str(out))
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert [int(r["N"]) for r in rows] == list(range(31))
    errors = np.array([float(r["relative_error"]) for r in rows])
    values = np.array([float(r["value"]) for r in rows])
    # odd degrees carry no m = 0 terms, so only even steps change the sum
    assert np.all(np.diff(errors[::2]) < 0)
    assert np.all(np.diff(errors) <= 0)
    assert np.all(values < 4 / 3)


def test_convergence_bem():
    proc = run("convergence", "--method", "bem", "-a", "1", "-b", "1", "--density", "one", "--sweep", "0:4",
               "--format", "jsonl")
    rows = jsonl(proc.stdout)
    errors = [r["relative_error"] for r in rows]
    assert [r["level"] for r in rows] == [0, 1, 2, 3, 4]
    assert all(x > y for x, y in zip(errors, errors[1:]))
    assert errors[-1] < 1e-2
    # regression baseline
    assert errors == pytest.approx([0.14649707083456, 0.03807968000136, 0.00960496413120, 0.00240458332405, 0.00060146189927],
                                   rel=1e-6)


def test_mesh_command(tmp_path):
    out = tmp_path / "m.txt"
    run("mesh", "-a", "1.5", "-b", "0.5", "--level", "2", "--out", str(out))
    assert read_mesh(out) == generate(Ellipse(1.5, 0.5), 2)
    assert run("mesh", "-a", "1.5", "-b", "0.5", "--level", "2").stdout == out.read_text()


def test_byte_identical_runs(tmp_path):
    args = ["energy", "--method", "analytic", "spectral", "bem", "-a", "1.2", "-b", "0.5", "--alpha", "1,-2,0.5",
            "--level", "2", "-N", "12"]
    first, second = run(*args).stdout, run(*args).stdout
    assert hashlib.sha256(first.encode()).digest() == hashlib.sha256(second.encode()).digest()
