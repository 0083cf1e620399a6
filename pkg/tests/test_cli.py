import json

import numpy as np
import pytest

from blockspec.blocks import standard_library
from blockspec.cli import main


@pytest.fixture
def std_config(tmp_path):
    def make(name, **params):
        config = {"library": standard_library().to_dict(), **params}
        path = tmp_path / name
        path.write_text(json.dumps(config))
        return path

    return make


def test_scan_outputs(std_config, tmp_path):
    cfg = std_config("scan.json", lambda_min=0.0, lambda_max=4.0, grid=400,
                     output_dir=str(tmp_path / "out"))
    assert main(["scan", str(cfg)]) == 0
    csv_text = (tmp_path / "out" / "bands.csv").read_text()
    assert csv_text.startswith("# config_hash=")
    assert "version=" in csv_text.splitlines()[0]
    rows = [line.split(",") for line in csv_text.splitlines()[2:] if line]
    assert [r[2] for r in rows] == [
        "InSpectrum", "CertifiedGap", "InSpectrum", "CertifiedGap"
    ]
    endpoints = [float(rows[0][0])] + [float(r[1]) for r in rows]
    np.testing.assert_allclose(endpoints, [0, 1, 2, 3, 4], atol=1e-10)
    bands = json.loads((tmp_path / "out" / "bands.json").read_text())
    assert bands["config_hash"] == csv_text.split("config_hash=")[1].split()[0]


def test_scan_repeat_runs_bit_identical(std_config, tmp_path):
    cfg = std_config("scan.json", grid=64, output_dir=str(tmp_path / "a"))
    assert main(["scan", str(cfg)]) == 0
    first = (tmp_path / "a" / "bands.csv").read_bytes()
    assert main(["scan", str(cfg), "--output-dir", str(tmp_path / "b")]) == 0
    assert (tmp_path / "b" / "bands.csv").read_bytes() == first


def test_spectrum_rows_and_flags(std_config, tmp_path):
    out = tmp_path / "out"
    cfg = std_config("spec.json", M=60, seeds=[1, 0], output_dir=str(out))
    assert main(["spectrum", str(cfg)]) == 0
    lines = (out / "spectrum.csv").read_text().splitlines()
    assert lines[1] == "seed,M,index,lambda,distance_to_sigma,flag"
    body = [l.split(",") for l in lines[2:] if l]
    seeds = [int(r[0]) for r in body]
    assert seeds == sorted(seeds)  # ordered by seed regardless of config order
    assert all(r[5] == "0" for r in body)
    summary = json.loads((out / "spectrum.json").read_text())
    assert summary["rows"] == len(body)
    assert summary["flagged"] == 0


def test_spectrum_empty_run(std_config, tmp_path):
    out = tmp_path / "out"
    cfg = std_config("spec.json", M=0, seeds=[0], output_dir=str(out))
    assert main(["spectrum", str(cfg)]) == 0
    lines = (out / "spectrum.csv").read_text().splitlines()
    assert len([l for l in lines if l]) == 2  # meta comment + header only


def test_spectrum_threads_deterministic(std_config, tmp_path):
    cfg = std_config("spec.json", M=40, seeds=[0, 1, 2])
    assert main(["spectrum", str(cfg), "--output-dir", str(tmp_path / "a"),
                 "--threads", "3"]) == 0
    assert main(["spectrum", str(cfg), "--output-dir", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "spectrum.csv").read_text() == (
        tmp_path / "b" / "spectrum.csv"
    ).read_text()


def test_edge_standard_library_empty(std_config, tmp_path):
    out = tmp_path / "out"
    cfg = std_config(
        "edge.json",
        sequence={"iid": {"m": 800, "seed": 3}},
        lambda_min=0.0,
        lambda_max=4.0,
        grid=40,
        output_dir=str(out),
    )
    assert main(["edge", str(cfg)]) == 0
    data = json.loads((out / "edge_modes.json").read_text())
    assert data["modes"] == []


def test_edge_fixture_finds_mode(tmp_path):
    out = tmp_path / "out"
    cfg = tmp_path / "edge.json"
    cfg.write_text(json.dumps({
        "fixture": True, "grid": 120, "output_dir": str(out),
        "lambda_min": 0.0, "lambda_max": 4.0,
    }))
    assert main(["edge", str(cfg)]) == 0
    data = json.loads((out / "edge_modes.json").read_text())
    assert len(data["modes"]) == 1
    mode = data["modes"][0]
    assert mode["residual"] <= 1e-6
    assert 0 < mode["decay_rate"] < 1
    vec_lines = (out / mode["eigenvector_csv"]).read_text().splitlines()
    assert vec_lines[1] == "index,value"
    assert len(vec_lines) == 402


def test_edge_uncertified_gap_is_config_error(std_config, tmp_path):
    cfg = std_config(
        "edge.json",
        sequence={"iid": {"m": 400, "seed": 0}},
        gap=[0.4, 0.6],
        output_dir=str(tmp_path / "out"),
    )
    assert main(["edge", str(cfg)]) == 2


def test_sample_outputs(std_config, tmp_path):
    out = tmp_path / "out"
    cfg = std_config("sample.json", M=25, seeds=[5], output_dir=str(out))
    assert main(["sample", str(cfg)]) == 0
    data = json.loads((out / "samples.json").read_text())
    assert data["sequences"][0]["num_blocks"] == 25
    lines = (out / "samples.csv").read_text().splitlines()
    assert len([l for l in lines if l]) == 2 + 25


def test_malformed_config_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert main(["scan", str(bad)]) == 2
    missing = tmp_path / "missing.json"
    assert main(["scan", str(missing)]) == 2
    nolib = tmp_path / "nolib.json"
    nolib.write_text("{}")
    assert main(["scan", str(nolib)]) == 2


def test_grid_two_minimal_run(std_config, tmp_path):
    out = tmp_path / "out"
    cfg = std_config("scan.json", lambda_min=1.2, lambda_max=1.4, grid=2,
                     output_dir=str(out))
    assert main(["scan", str(cfg)]) == 0
    lines = (out / "bands.csv").read_text().splitlines()
    assert len([l for l in lines if l]) >= 3
