import csv
import json

import numpy as np
import pytest

from bhwalk.cli import EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE, main


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_ctqw_csv_schema(tmp_path):
    out = tmp_path / "walk.csv"
    code = main(["ctqw", "--sites", "9", "--tmax", "1", "--dt", "0.5",
                 "--out", str(out), "--no-plot"])
    assert code == EXIT_OK
    header, rows = read_csv(out)
    assert header[:2] == ["t", "p_1"]
    assert "p_9" in header and "spread" in header
    assert len(rows) == 3
    assert float(rows[0][header.index("p_5")]) == pytest.approx(1.0)


def test_ctqw_writes_figure(tmp_path):
    out = tmp_path / "walk.csv"
    code = main(["ctqw", "--sites", "5", "--tmax", "1", "--dt", "0.5",
                 "--out", str(out)])
    assert code == EXIT_OK
    assert (tmp_path / "walk.png").exists()


def test_ln_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["ln-sweep", "--sites", "5", "--u", "10,40", "--tmax", "1.6",
                 "--dt", "0.05", "--nmax", "3", "--out", str(out), "--no-plot"])
    assert code == EXIT_OK
    header, rows = read_csv(out)
    assert header == ["u_over_j", "t_first_max", "ln_first_max"]
    assert [float(r[0]) for r in rows] == [10.0, 40.0]


def test_json_roundtrip(tmp_path):
    out = tmp_path / "walk.json"
    code = main(["ctqw", "--sites", "5", "--tmax", "1", "--dt", "0.25",
                 "--format", "json", "--out", str(out), "--no-plot"])
    assert code == EXIT_OK
    record = json.loads(out.read_text())
    assert record["name"] == "ctqw"
    assert record["t"] == [0.0, 0.25, 0.5, 0.75, 1.0]
    # emit(parse(x)) stability: rewriting the parsed record must be identical
    assert json.loads(json.dumps(record)) == record


def test_ground_state_record(tmp_path):
    out = tmp_path / "gs.json"
    code = main(["ground-state", "--sites", "5", "--nbar", "1", "--u", "100",
                 "--nmax", "3", "--format", "json", "--out", str(out), "--no-plot"])
    assert code == EXIT_OK
    rec = json.loads(out.read_text())
    assert rec["ln_outer"] == pytest.approx(0.0, abs=1e-6)
    assert len(rec["occupations"]) == 5


def test_sdq_subcommand(tmp_path):
    out = tmp_path / "sdq.csv"
    code = main(["sdq", "--scenario", "fig5", "--u", "0", "--tmax", "1",
                 "--dt", "0.5", "--out", str(out), "--no-plot"])
    assert code == EXIT_OK
    header, rows = read_csv(out)
    for col in ("p", "ln", "p_ln", "pop_10"):
        assert col in header
    assert float(rows[0][header.index("p")]) == pytest.approx(1.0)


def test_infeasible_exit_code(tmp_path, capsys):
    code = main(["transport", "--sites", "41", "--nbar", "2", "--u", "10",
                 "--tmax", "1", "--out", str(tmp_path / "x.csv"), "--no-plot"])
    assert code == EXIT_INFEASIBLE
    assert "exceeds" in capsys.readouterr().err


def test_unknown_flag_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["ctqw", "--bogus"])
    assert exc.value.code == EXIT_USAGE


def test_unknown_subcommand_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_USAGE


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("sites = 7\ntmax = 1.0\ndt = 0.5  # comment\n")
    out = tmp_path / "walk.csv"
    # config sets sites=7; the flag overrides tmax
    code = main(["--config", str(cfg), "ctqw", "--tmax", "0.5",
                 "--out", str(out), "--no-plot"])
    assert code == EXIT_OK
    header, rows = read_csv(out)
    assert "p_7" in header and "p_8" not in header
    assert float(rows[-1][0]) == pytest.approx(0.5)


def test_cotunnel_subcommand(tmp_path):
    out = tmp_path / "co.csv"
    code = main(["cotunnel", "--sites", "5", "--u", "0", "--tmax", "1",
                 "--dt", "0.5", "--out", str(out), "--no-plot"])
    assert code == EXIT_OK
    header, rows = read_csv(out)
    assert "spread" in header
    assert float(rows[0][header.index("n_3")]) == pytest.approx(2.0)


def test_validate_subcommand(capsys):
    code = main(["validate", "--no-plot"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "[PASS]" in out and "[FAIL]" not in out
