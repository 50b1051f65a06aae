import csv
import hashlib
import json
import math

import numpy as np
import pytest

from ggnlib.cli import EXIT_CODES, build_parser, main
from ggnlib.ggn import GgnParams
from ggnlib.gof import empirical_density
from ggnlib.models import FittedModel
from ggnlib.sampling import StreamSpec, ggn_sample


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def datafile(tmp_path):
    x = ggn_sample(GgnParams(1.0, 0.5, 1.5, 2.0), 400, StreamSpec(5)).values
    p = tmp_path / "x.txt"
    p.write_text("".join(f"{v!r}\n" for v in x.tolist()))
    return p


@pytest.fixture
def fit_report(tmp_path, datafile, capsys):
    rep = tmp_path / "fit.json"
    code, _, _ = run(capsys, "fit", datafile, "--report", rep)
    assert code == 0
    return rep


def test_sample_five_lines_and_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for path in (a, b):
        code, _, _ = run(capsys, "sample", "--count", 5, "--seed", 9, "--a", 2, "--out", path)
        assert code == 0
    lines = a.read_text().splitlines()
    assert len(lines) == 5 and all(math.isfinite(float(v)) for v in lines)
    assert a.read_bytes() == b.read_bytes()
    env = json.loads((tmp_path / "a.txt.json").read_text())
    assert env["schema_version"] == "1" and env["command"] == "sample"
    assert env["payload"]["output"]["sha256"] == hashlib.sha256(a.read_bytes()).hexdigest()


def test_fit_ggn_converges(datafile, capsys):
    code, out, _ = run(capsys, "fit", datafile, "--format", "json")
    assert code == 0
    env = json.loads(out)
    fit = env["payload"]["models"][0]["model"]["fit"]
    assert fit["converged"] and fit["model_tag"] == "GGN"
    assert list(env["inputs"].values())[0] == hashlib.sha256(datafile.read_bytes()).hexdigest()


def test_fit_beta_support_error_names_line(tmp_path, capsys):
    p = tmp_path / "b.txt"
    p.write_text("value\n0.2\n0.5\n1.2\n0.7\n0.4\n0.3\n")
    code, _, err = run(capsys, "fit", p, "--model", "beta")
    assert code == 3
    assert f"{p}:4" in err and "1.2" in err


def test_fit_all_ordered_by_aic(datafile, capsys):
    code, out, _ = run(capsys, "fit", datafile, "--model", "all", "--gof", "--support", "auto",
                       "--format", "json")
    assert code == 0
    entries = json.loads(out)["payload"]["models"]
    aic = [e["gof"]["aic"] for e in entries]
    assert len(entries) == 3 and aic == sorted(aic)
    for e in entries:
        k = e["gof"]["k_params"] if "k_params" in e["gof"] else len(e["model"]["fit"]["estimates"])
        ll = FittedModel.from_dict(e["model"]).loglik
        assert e["gof"]["aic"] == pytest.approx(2 * k - 2 * ll, rel=1e-12)


def test_fit_all_skips_unsupported(datafile, capsys):
    code, out, _ = run(capsys, "fit", datafile, "--model", "all")
    assert code == 0
    assert "note: beta skipped" in out


def test_parse_error_cites_line(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("1.0\n2.0\nthree\n")
    code, _, err = run(capsys, "fit", p)
    assert code == 2 and f"{p}:3" in err


def test_missing_file_is_io_error(tmp_path, capsys):
    code, _, err = run(capsys, "fit", tmp_path / "nope.txt")
    assert code == 5 and "nope.txt" in err


def test_gof_self_test_zero(datafile, capsys):
    code, out, _ = run(capsys, "gof", datafile, "--self-test", "--format", "json")
    assert code == 0
    pay = json.loads(out)["payload"]
    assert pay["d_kl"] == 0 and pay["d_chi2"] == 0
    assert pay["d_ks"] <= 1 / 400


def test_gof_statistics_finite_and_stable(datafile, fit_report, capsys):
    outs = []
    for _ in range(2):
        code, out, _ = run(capsys, "gof", datafile, "--model-report", fit_report, "--format", "json")
        assert code == 0
        outs.append(out)
    assert hashlib.sha256(outs[0].encode()).digest() == hashlib.sha256(outs[1].encode()).digest()
    pay = json.loads(outs[0])["payload"]
    keys = ("d_kl", "d_chi2", "d_ks", "w_star", "a_star", "aic", "aicc", "bic")
    assert all(math.isfinite(pay[k]) for k in keys)
    assert "binning" in pay


def test_plotdata(tmp_path, datafile, fit_report, capsys):
    out = tmp_path / "plot.csv"
    code, _, _ = run(capsys, "plotdata", datafile, "--model-report", fit_report, "--out", out)
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["x", "empirical_density", "fitted_density"]
    grid = np.array([[float(v) for v in r] for r in rows[1:]])
    assert grid.shape == (200, 3)
    assert np.trapezoid(grid[:, 2], grid[:, 0]) == pytest.approx(1.0, abs=0.01)
    model = FittedModel.from_dict(json.loads(fit_report.read_text())["payload"]["models"][0]["model"])
    np.testing.assert_allclose(model.cdf(grid[[0, -1], 0]), [0.001, 0.999], atol=1e-9)
    x = np.array([float(v) for v in datafile.read_text().split()])
    hist = empirical_density(x)
    inside = 0
    for xv, ev in grid[:, :2]:
        if hist.edges[0] <= xv <= hist.edges[-1]:
            j = min(np.searchsorted(hist.edges, xv, side="right") - 1, hist.bins - 1)
            assert ev == hist.density[j]
            inside += 1
        else:
            assert ev == 0.0
    assert inside > 150


def test_study_csv_rows(tmp_path, capsys):
    plan = tmp_path / "plan.json"
    plan.write_text(json.dumps({"scenarios": [{"s": 1, "a": 2}, {"s": 2, "a": 2}],
                                "sample_sizes": [25, 49], "replications": 2, "base_seed": 1}))
    out = tmp_path / "study.csv"
    code, _, _ = run(capsys, "study", plan, "--csv", out)
    assert code == 0
    assert len(out.read_text().splitlines()) == 1 + 2 * 2


def test_moments_json(capsys):
    code, out, _ = run(capsys, "moments", "--s", 2, "--a", 1, "--order", 2, "--no-series", "--format", "json")
    assert code == 0
    rows = json.loads(out)["payload"]["moments"]
    assert rows[0]["quadrature"] == pytest.approx(0.0, abs=1e-10)
    assert rows[1]["quadrature"] == pytest.approx(0.5, rel=1e-9)


def test_moments_pole_reported(capsys):
    # integer a has no series weights; the quadrature row is still emitted
    code, out, err = run(capsys, "moments", "--a", 2, "--order", 1, "--format", "json")
    assert code == 4 and "convergence" in err
    (row,) = json.loads(out)["payload"]["moments"]
    assert "pole" in row["series_error"] and math.isfinite(row["quadrature"])


def test_exit_codes_documented(capsys):
    text = build_parser().format_help()
    for code, meaning in EXIT_CODES.items():
        assert f"{code}" in text and meaning in text
    code, _, _ = run(capsys, "fit")
    assert code == 2
    code, _, _ = run(capsys, "sample", "--count", 3, "--s", -1, "--out", "unused")
    assert code == 3
