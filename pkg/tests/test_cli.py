import json

import numpy as np
import pytest

from stablefit.cli import main
from stablefit.dataio import load_series_csv


@pytest.fixture
def price_csv(tmp_path, rng_np):
    path = tmp_path / "prices.csv"
    prices = 100.0 * np.exp(np.cumsum(rng_np.normal(0, 0.01, size=400)))
    path.write_text("CAC\n" + "\n".join(repr(float(p)) for p in prices) + "\n")
    return path


def test_simulate_writes_csv_and_record(tmp_path):
    out = tmp_path / "draws.csv"
    rec = tmp_path / "rec.json"
    code = main([
        "--record", str(rec), "simulate", "--alpha", "1.5", "--beta", "0.5",
        "--sigma", "1.0", "--mu0", "0.0", "--n", "500", "--seed", "3",
        "--out", str(out),
    ])
    assert code == 0
    draws = load_series_csv(out, "value")
    assert draws.size == 500
    record = json.loads(rec.read_text())
    assert record["command"] == "simulate"
    assert record["seed"] == 3


def test_simulate_is_replayable(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (out1, out2):
        main(["--record", str(tmp_path / "r.json"), "simulate", "--alpha", "1.2",
              "--n", "100", "--seed", "9", "--out", str(out)])
    assert out1.read_bytes() == out2.read_bytes()


def test_returns_subcommand(tmp_path, price_csv):
    out = tmp_path / "ret.csv"
    code = main(["--record", str(tmp_path / "r.json"), "returns",
                 "--input", str(price_csv), "--column", "CAC", "--out", str(out)])
    assert code == 0
    rets = load_series_csv(out, "CAC")
    assert rets.size == 399


def test_pdf_subcommand(tmp_path):
    out = tmp_path / "pdf.csv"
    code = main(["--record", str(tmp_path / "r.json"), "pdf", "--alpha", "1.5",
                 "--beta", "0.5", "--from", "-3", "--to", "3", "--points", "31",
                 "--K", "40", "--seed", "1", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "y,density"
    assert len(lines) == 32
    dens = np.array([float(ln.split(",")[1]) for ln in lines[1:]])
    assert (dens >= 0).all()


def test_fit_sq_prints_row_and_records(tmp_path, price_csv, capsys):
    rec = tmp_path / "rec.json"
    code = main(["--record", str(rec), "fit", "--input", str(price_csv),
                 "--column", "CAC", "--method", "sq", "--seed", "5"])
    assert code == 0
    out = capsys.readouterr().out
    assert "alpha" in out and "loglik" in out and "sq" in out
    record = json.loads(rec.read_text())
    assert record["method"] == "sq"
    assert set(record["config"]) == {"K", "N", "N0", "M", "M0", "beta_grid",
                                     "alpha_min", "cdf_sample_size", "seed"}
    assert 0 < record["estimate"]["alpha"] <= 2


def test_fit_em_smoke(tmp_path, price_csv):
    rec = tmp_path / "rec.json"
    code = main(["--record", str(rec), "fit", "--input", str(price_csv),
                 "--column", "CAC", "--method", "em",
                 "--alpha0", "1.5", "--beta0", "0.0", "--sigma0", "0.01", "--mu0", "0.0",
                 "--K", "25", "--N", "4", "--N0", "2", "--M", "4", "--M0", "2",
                 "--seed", "11"])
    assert code == 0
    record = json.loads(rec.read_text())
    assert record["config"]["N"] == 4
    assert record["init"] == [1.5, 0.0, 0.01, 0.0]
    assert 0 < record["estimate"]["alpha"] <= 2


def test_study_desk_scale(tmp_path):
    grid = tmp_path / "grid.json"
    grid.write_text(
        '{"alphas": [1.5], "betas": [0.0], "sigmas": [1.0], "n": 60,'
        ' "replicates": 2, "methods": ["sq", "cf"], "seed": 4,'
        ' "cfg": {"K": 20, "N": 3, "N0": 1, "M": 3, "M0": 1}}'
    )
    outdir = tmp_path / "study"
    code = main(["--record", str(tmp_path / "r.json"), "study",
                 "--grid", str(grid), "--out", str(outdir)])
    assert code == 0
    assert (outdir / "rmse.csv").exists()
    assert (outdir / "plot_sigma0.csv").exists()
