"""Tests for the grid CSV format and the JSON-report command line."""

import json
import subprocess
import sys

import numpy as np
import pytest

from slgeo import cli, gridio


def _run_cli(args):
    proc = subprocess.run([sys.executable, "-c",
                           "import sys; from slgeo.cli import main; "
                           "sys.exit(main(sys.argv[1:]))"] + list(args),
                          capture_output=True, text=True)
    return proc


def test_grid_round_trip_bitwise(tmp_path):
    rng = np.random.default_rng(0)
    vals = rng.standard_normal((33, 33))
    mask = rng.random((33, 33)) > 0.3
    vals[~mask] = np.nan
    fld = gridio.GridField(vals, -1.0, -1.0, 1 / 16, 1 / 16, mask=mask)
    path = tmp_path / "field.csv"
    gridio.write_grid(path, fld)
    back = gridio.read_grid(path)
    assert np.array_equal(fld.values[mask], back.values[back.mask])
    assert np.array_equal(mask, back.mask)
    assert back.hx == fld.hx and back.x0 == fld.x0


def test_grid_mask_interior_count(tmp_path):
    vals = np.arange(25, dtype=float).reshape(5, 5)
    mask = np.zeros((5, 5), dtype=bool)
    mask[1:4, 1:4] = True
    vals[~mask] = np.nan
    fld = gridio.GridField(vals, 0.0, 0.0, 0.5, 0.5, mask=mask)
    path = tmp_path / "small.csv"
    gridio.write_grid(path, fld)
    back = gridio.read_grid(path)
    assert int(back.mask.sum()) == 9


def test_malformed_header_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# not-a-grid-header\n1,2\n")
    with pytest.raises(gridio.GridFormatError):
        gridio.read_grid(path)


def test_cli_reports_are_deterministic():
    args = ["--no-timing", "verify", "--example", "hl-cone",
            "--samples", "200", "--seed", "4"]
    p1 = _run_cli(args)
    p2 = _run_cli(args)
    assert p1.returncode == 0
    assert p1.stdout == p2.stdout
    report = json.loads(p1.stdout)
    assert report["status"] == "pass"
    assert "timing" not in report


def test_cli_shared_flags_after_subcommand(tmp_path):
    out = tmp_path / "report.json"
    p = _run_cli(["moduli-dim", "--vars", "5", "--degrees", "5",
                  "--no-timing", "--out", str(out)])
    assert p.returncode == 0
    report = json.loads(out.read_text())
    assert report["dimension"] == 101


def test_cli_exit_codes():
    # usage error -> 2
    p = _run_cli(["verify"])
    assert p.returncode == 2
    # unknown example name -> 2
    p = _run_cli(["verify", "--example", "nope"])
    assert p.returncode == 2


def test_cli_index_report():
    p = _run_cli(["--no-timing", "index", "--gram", "l0"])
    assert p.returncode == 0
    report = json.loads(p.stdout)
    assert report["index"] == 6


def test_cli_point_cloud_artifact(tmp_path):
    csv = tmp_path / "cloud.csv"
    p = _run_cli(["--no-timing", "fibration", "--a", "0.5", "--b", "0.2",
                  "--out-csv", str(csv)])
    assert p.returncode == 0
    report = json.loads(p.stdout)
    assert str(csv) in report["artifacts"]
    header = csv.read_text().splitlines()[0]
    assert header == "x1,x2,x3,x4,x5,x6"


def test_report_envelope_failure_lists_checks():
    rep = cli.Report("demo", {})
    rep.check("good", 0.0, 1.0)
    rep.check("bad", 2.0, 1.0)
    code = rep.finish(no_timing=True)
    assert code == 1
    assert rep.envelope["status"] == "fail"
    assert rep.envelope["failing"] == ["bad"]
