import csv
import json
import logging

import numpy as np
import pytest

from twdp_phase.cli import EXIT_DOMAIN, EXIT_NUMERIC, main


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_pdf_writes_csv_and_manifest(tmp_path):
    assert main(["pdf", "--K", "5", "--Gamma", "0.5", "--grid-points", "91", "--out-dir", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "pdf.csv")
    assert len(rows) == 91 and set(rows[0]) == {"phi_rad", "density"}
    man = json.loads((tmp_path / "pdf.csv.manifest.json").read_text())
    assert set(man) == {"command", "params_json", "seed", "tool_version"}
    assert json.loads(man["params_json"])["K"] == 5.0


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("TWDP_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["pdf", "--K", "0", "--grid-points", "11"]) == 0
    assert (tmp_path / "env" / "pdf.csv").exists()


def test_config_file_and_flag_priority(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"K": 3.0, "Gamma": 0.2, "grid_points": 21}))
    assert main(["pdf", "--config", str(cfg), "--Gamma", "0.9", "--out-dir", str(tmp_path)]) == 0
    opts = json.loads(json.loads((tmp_path / "pdf.csv.manifest.json").read_text())["params_json"])
    assert (opts["K"], opts["Gamma"], opts["grid_points"]) == (3.0, 0.9, 21)


def test_manifest_replay_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["pdf", "--K", "4", "--Gamma", "1", "--grid-points", "31", "--out-dir", str(a)]) == 0
    assert main(["pdf", "--config", str(a / "pdf.csv.manifest.json"), "--out-dir", str(b)]) == 0
    assert (a / "pdf.csv").read_bytes() == (b / "pdf.csv").read_bytes()


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"Kay": 1}))
    assert main(["pdf", "--config", str(cfg), "--out-dir", str(tmp_path)]) == EXIT_DOMAIN


def test_domain_error_exit(tmp_path, capsys):
    assert main(["pdf", "--K", "-1", "--out-dir", str(tmp_path)]) == EXIT_DOMAIN
    assert "error" in capsys.readouterr().err



def test_closed_form_above_cap_is_domain_error(tmp_path):
    assert main(["pdf", "--method", "closed", "--K", "40", "--out-dir", str(tmp_path)]) == EXIT_DOMAIN


def test_numeric_exit_code(tmp_path, monkeypatch):
    from twdp_phase import cli
    from twdp_phase.errors import NumericError

    def boom(*a, **k):
        raise NumericError("no convergence", None, "triple_term")

    monkeypatch.setattr(cli, "phase_pdf_closed", boom)
    assert main(["pdf", "--method", "closed", "--K", "2", "--grid-points", "5", "--out-dir", str(tmp_path)]) == EXIT_NUMERIC


def test_bounds_table(tmp_path):
    assert main(["bounds", "--out-dir", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "bounds.csv")
    assert len(rows) == 61
    last = rows[-1]
    assert float(last["K"]) == 60 and float(last["nu"]) == 30
    assert (last["m_min"], last["m_max"], last["n_terms"]) == ("10", "49", "40")


def test_bounds_nu_range(tmp_path):
    assert main(["bounds", "--nu-range", "1", "4", "4", "--out-dir", str(tmp_path)]) == 0
    assert [float(r["nu"]) for r in _rows(tmp_path / "bounds.csv")] == [1, 2, 3, 4]


def test_pe_and_oracle_files(tmp_path):
    args = ["pe", "--Gamma", "0", "--M", "2", "--K-grid", "1", "2", "--rician-oracle", "--out-dir", str(tmp_path)]
    assert main(args) == 0
    lines = (tmp_path / "pe_M2.csv").read_text().splitlines()
    assert lines[0].startswith("# ") and lines[1] == "K,Pe"
    a = np.loadtxt(tmp_path / "pe_M2.csv", delimiter=",", skiprows=2)
    b = np.loadtxt(tmp_path / "pe_rician_M2.csv", delimiter=",", skiprows=2)
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_mc_warning_and_report(tmp_path, caplog, capsys):
    with caplog.at_level(logging.WARNING, logger="twdp_phase"):
        assert main(["mc", "--n-samples", "5000", "--n-bins", "16", "--out-dir", str(tmp_path)]) == 0
    assert any("loose" in r.message for r in caplog.records)
    report = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert set(report) == {"max_abs_deviation", "statistical_bound"}
    assert json.loads((tmp_path / "mc_histogram.csv.manifest.json").read_text())["seed"] == 0


def test_mc_reproducible(tmp_path):
    for d in ("a", "b"):
        assert main(["mc", "--n-samples", "3000", "--seed", "5", "--n-bins", "8", "--out-dir", str(tmp_path / d)]) == 0
    assert (tmp_path / "a" / "mc_histogram.csv").read_bytes() == (tmp_path / "b" / "mc_histogram.csv").read_bytes()


def test_geosim_exports(tmp_path):
    args = ["geosim", "--n-realizations", "2", "--n-bins", "16", "--out-dir", str(tmp_path)]
    assert main(args) == 0
    assert (tmp_path / "realization_000.csv").exists() and (tmp_path / "realization_001.csv").exists()
    rows = _rows(tmp_path / "realization_001.csv")
    assert len(rows) == 750 and set(rows[0]) == {"t_s", "re", "im", "envelope", "phase_rad"}
    assert len(_rows(tmp_path / "geo_histogram.csv")) == 16


def test_geosim_physical_zero_diffuse(tmp_path):
    args = ["geosim", "--physical", "--v1", "1", "--v2", "0.5", "--sigma2", "0", "--n-realizations", "1",
            "--export", "histogram", "--out-dir", str(tmp_path)]
    assert main(args) == 0
    assert set(_rows(tmp_path / "geo_histogram.csv")[0]) == {"bin_left_rad", "bin_right_rad", "density"}


def test_bad_subcommand():
    with pytest.raises(SystemExit) as exc:
        main(["nope"])
    assert exc.value.code == 2
