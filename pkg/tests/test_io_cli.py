import io
import json
import subprocess
import sys

import numpy as np
import pytest

from gsd.cli import main
from gsd.core import GsdParams, ScoreSample, gsd_sample
from gsd.gof import global_pvalue_test
from gsd.io import DataError, Dataset, parse_scores_csv, write_scores_csv
from gsd.pipeline import MODELS, run_batch


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


# -- parsing -----------------------------------------------------------------

def test_parse_long():
    data = parse_scores_csv(io.StringIO("pvs_id,subject_id,score\np1,s1,3\np1,s2,4\n"))
    assert len(data) == 1
    (sample,) = data.samples
    assert sample.id == "p1"
    np.testing.assert_array_equal(sample.scores, [3, 4])


def test_parse_wide():
    data = parse_scores_csv(io.StringIO("pvs_id,a,b,c,d\np1,3,4,4,5\np2,1,2,,\n"), format="wide")
    np.testing.assert_array_equal(data.samples[0].scores, [3, 4, 4, 5])
    np.testing.assert_array_equal(data.samples[1].scores, [1, 2])


@pytest.mark.parametrize("text, fmt, row", [
    ("pvs_id,subject_id,score\np1,s1,3\np1,s2,6\n", "long", "row 3"),
    ("pvs_id,subject_id,score\np1,s1,x\n", "long", "row 2"),
    ("pvs_id,subject_id,score\np1,s1,2.5\n", "long", "row 2"),
    ("pvs_id,subject_id,score\np1,s1\n", "long", "row 2"),
    ("pvs_id,a,b\np1,3,4\np1,2,2\n", "wide", "row 3"),
    ("pvs_id,a,b\np1,3,0\n", "wide", "row 2"),
])
def test_parse_errors_name_the_row(text, fmt, row):
    with pytest.raises(DataError, match=row):
        parse_scores_csv(io.StringIO(text), format=fmt)


def test_parse_empty_and_header_only():
    with pytest.raises(DataError):
        parse_scores_csv(io.StringIO(""))
    with pytest.raises(DataError):
        parse_scores_csv(io.StringIO("pvs_id,subject_id,score\n"))


def test_parse_mixed_m():
    text = "pvs_id,subject_id,score,M\np1,s1,3,5\np2,s1,3,7\n"
    with pytest.raises(DataError, match="mixed M"):
        parse_scores_csv(io.StringIO(text))


def test_parse_other_scale():
    data = parse_scores_csv(io.StringIO("pvs_id,subject_id,score\np1,s1,7\n"), M=7)
    assert data.M == 7 and data.samples[0].M == 7


def test_dataset_invariants():
    with pytest.raises(DataError):
        Dataset([ScoreSample([1], id="a"), ScoreSample([2], id="a")])
    with pytest.raises(DataError):
        Dataset([ScoreSample([1], M=5, id="a"), ScoreSample([2], M=7, id="b")], M=5)


@pytest.mark.parametrize("fmt", ["long", "wide"])
def test_write_parse_round_trip(fmt):
    samples = [gsd_sample(GsdParams(2.2, 0.6), n, seed=n, id=f"p{n}") for n in (5, 9, 24)]
    out = io.StringIO()
    write_scores_csv(samples, out, format=fmt)
    back = parse_scores_csv(io.StringIO(out.getvalue()), format=fmt)
    for a, b in zip(samples, back.samples):
        assert a.id == b.id
        np.testing.assert_array_equal(np.sort(a.scores), np.sort(b.scores))


# -- batch pipeline -------------------------------------------------------------

def small_dataset():
    samples = [gsd_sample(GsdParams(3.2, 0.7), 24, seed=i, id=f"p{i}") for i in range(6)]
    samples.append(ScoreSample([1] * 24, id="constant"))
    return Dataset(samples)


def test_batch_rows_and_global_consistency():
    report = run_batch(small_dataset(), alpha=0.05)
    assert len(report.rows) == 7 * 3
    assert {r.model for r in report.rows} == set(MODELS)
    for model in MODELS:
        pvalues = [r.p_value for r in report.rows if r.model == model and r.p_value is not None]
        test = global_pvalue_test(pvalues, 0.05)
        section = report.global_tests[model]
        assert section["n_tests"] == test.n_tests
        assert section["n_below_alpha"] == test.n_below_alpha
        assert section["p_value"] == pytest.approx(test.p_value, rel=1e-8)
    constant = {r.model: r for r in report.rows if r.id == "constant"}
    assert "degenerate" in constant["GSD"].flags
    assert "degenerate" in constant["QNormal"].flags and constant["QNormal"].p_value is None
    assert "degenerate" in constant["Normal"].flags


def test_batch_single_sample_and_empty():
    report = run_batch(Dataset([gsd_sample(GsdParams(3, 0.5), 24, seed=1, id="only")]))
    assert report.global_tests["GSD"]["n_tests"] == 1
    with pytest.raises(ValueError):
        run_batch(Dataset([]))


def test_batch_report_serialization():
    report = run_batch(small_dataset())
    data = json.loads(report.to_json())
    assert len(data["rows"]) == 21 and data["config"]["alpha"] == 0.05
    lines = report.to_csv().splitlines()
    assert lines[0] == "id,n,model,psi_hat,rho_or_sigma_hat,loglik,chi2,df,p_value,flags"
    assert len(lines) == 22


# -- command line -------------------------------------------------------------------

def test_cli_pmf(capsys):
    assert main(["pmf", "--psi", "3", "--rho", "1"]) == 0
    lines = capsys.readouterr().out.split()
    assert "3:1.0" in lines and lines[0] == "1:0.0"


def test_cli_usage_errors(capsys):
    assert main(["pmf", "--psi", "7", "--rho", "1"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["pmf", "--psi", "3"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_cli_data_errors(tmp_path, capsys):
    bad = write(tmp_path, "bad.csv", "pvs_id,subject_id,score\np1,s1,9\n")
    assert main(["fit", "--input", bad]) == 3
    assert "row 2" in capsys.readouterr().err
    assert main(["fit", "--input", str(tmp_path / "missing.csv")]) == 3
    empty = write(tmp_path, "empty.csv", "pvs_id,subject_id,score\n")
    assert main(["batch", "--input", empty]) == 3


def test_cli_fit_flags_degenerate(tmp_path, capsys):
    path = write(tmp_path, "c.csv", "pvs_id,a,b,c\nones,1,1,1\n")
    assert main(["fit", "--input", path, "--format", "wide", "--model", "gsd"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["params"] == {"psi": 1.0, "rho": 1.0}
    assert record["flags"] == ["degenerate"]
    assert main(["fit", "--input", path, "--format", "wide", "--model", "normal"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["params"] is None and record["flags"] == ["degenerate"]


def test_cli_sample_round_trip(tmp_path, capsys):
    out = str(tmp_path / "s.csv")
    args = ["sample", "--psi", "2.7", "--rho", "0.5", "--n", "24", "--samples", "3", "--seed", "4"]
    assert main(args + ["--output", out]) == 0
    first = open(out).read()
    assert main(args + ["--output", out]) == 0
    assert open(out).read() == first
    data = parse_scores_csv(out)
    assert [s.n for s in data.samples] == [24, 24, 24]


def test_cli_gof(tmp_path, capsys):
    path = write(tmp_path, "g.csv", "pvs_id,a,b,c,d,e,f\np1,2,3,3,3,4,5\n")
    assert main(["gof", "--input", path, "--format", "wide"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert 0 <= record["p_value"] <= 1
    assert sum(record["observed"]) == 6


def test_cli_batch_writes_json_and_csv(tmp_path, capsys):
    data = write(tmp_path, "d.csv", "pvs_id,a,b,c,d\np1,2,3,3,4\np2,1,1,5,5\n")
    prefix = str(tmp_path / "report")
    assert main(["batch", "--input", data, "--format", "wide", "--output", prefix]) == 0
    report = json.load(open(prefix + ".json"))
    assert report["global"]["GSD"]["n_tests"] == 2
    assert open(prefix + ".csv").read().count("\n") == 7


def test_cli_simstudy_byte_identical(tmp_path):
    design = write(tmp_path, "d.toml",
                   'n_values = [6]\npsi_grid = [2.0, 3.5]\nrho_grid = [0.4]\nrepetitions = 2\n')
    outs = []
    for name in ("a.csv", "b.csv"):
        path = str(tmp_path / name)
        assert main(["simstudy", "--design", design, "--seed", "7", "--output", path]) == 0
        outs.append(open(path, "rb").read())
    assert outs[0] == outs[1]
    assert outs[0].count(b"\n") == 5
    bad = write(tmp_path, "bad.toml", "repetitions = 0\n")
    assert main(["simstudy", "--design", bad]) == 2


def test_cli_curves(capsys):
    assert main(["curves", "--sigma", "1", "--points", "9"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "sigma_o,psi_o,psi_u,sigma_u_sq"
    rows = {float(line.split(",")[1]): line.split(",") for line in lines[1:]}
    assert float(rows[3.0][2]) == pytest.approx(3.0, abs=1e-9)
    assert main(["curves", "--kind", "ceiling", "--points", "5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "psi_o,sigma_o_sq,sigma_u_sq"
    psi_o, v_max, su = map(float, lines[3].split(","))
    assert psi_o == 3.0 and v_max == 4.0 and su < 4.0


def test_console_script_exit_code(tmp_path):
    result = subprocess.run([sys.executable, "-m", "gsd.cli", "pmf", "--psi", "2.5", "--rho", "1"],
                            capture_output=True, text=True)
    assert result.returncode == 0
    assert "2:0.5" in result.stdout.split()
    result = subprocess.run([sys.executable, "-m", "gsd.cli", "nope"], capture_output=True, text=True)
    assert result.returncode == 2


def test_cli_batch_separates_gsd_from_normal(tmp_path):
    # 1000 PVSs of 24 answers: psi spread over the scale, rho from a prior
    # concentrated near 0.86, as in a typical quality-rating dataset
    rng = np.random.default_rng(2024)
    psis = rng.uniform(1.3, 4.7, 1000)
    rhos = np.clip(rng.normal(0.86, 0.071, 1000), 1e-4, 1.0)
    seeds = np.random.SeedSequence(2024).spawn(1000)
    samples = [gsd_sample(GsdParams(p, r), 24, seed=s, id=f"p{i}")
               for i, (p, r, s) in enumerate(zip(psis, rhos, seeds))]
    path = tmp_path / "sim.csv"
    with open(path, "w", newline="") as handle:
        write_scores_csv(samples, handle)
    prefix = str(tmp_path / "out")
    assert main(["batch", "--input", str(path), "--output", prefix]) == 0
    report = json.load(open(prefix + ".json"))["global"]
    assert report["GSD"]["n_tests"] == 1000
    assert report["GSD"]["p_value"] > 0.5
    assert report["Normal"]["p_value"] < 0.01
