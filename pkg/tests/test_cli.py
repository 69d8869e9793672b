import csv
import json
import os

import numpy as np
import pytest

from quenchlab.cli import EXIT_CONFIG, EXIT_OK, EXIT_RESOURCE, load_config, main


def run(args, tmp_path, extra=()):
    return main(args + ["--output-dir", str(tmp_path), "--no-plots"] + list(extra))


def read_csv(path):
    with open(path) as f:
        return list(csv.DictReader(f))


BASE = ["--set", "model.L=6", "--set", "grid.points=11", "--set", "grid.t_max=5.0"]


def test_unknown_override_rejected(tmp_path):
    assert run(["quench", "--set", "model.bogus=1"], tmp_path) == EXIT_CONFIG


def test_bad_config_file(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("model = 3\n")
    assert run(["quench", str(bad)], tmp_path) == EXIT_CONFIG


def test_profile_sets_default_r():
    cfg = load_config(None, ["experiment.profile=full"])
    assert cfg["ensemble"]["R"] == 400
    cfg = load_config(None, ["experiment.profile=ci"])
    assert cfg["ensemble"]["R"] == 50


def test_resource_cap_exit_code(tmp_path):
    assert run(["quench", "--set", "model.L=15"], tmp_path) == EXIT_RESOURCE


def test_quench_outputs(tmp_path):
    assert run(["quench"] + BASE, tmp_path) == EXIT_OK
    rows = read_csv(tmp_path / "quench.csv")
    assert len(rows) == 11
    meta = json.loads((tmp_path / "quench.json").read_text())
    assert meta["schema_version"] == 1
    assert meta["config"]["model"]["L"] == 6
    assert meta["max_norm_deviation"] < 1e-9
    # retained sector probabilities are there and near-normalized at t=0
    pq_cols = [k for k in rows[0] if k.startswith("P_Q")]
    total0 = sum(float(rows[0][k]) for k in pq_cols)
    assert total0 == pytest.approx(1.0, abs=1e-6)


def test_quench_reproducibility(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    out1.mkdir(), out2.mkdir()
    assert run(["quench"] + BASE, out1) == EXIT_OK
    assert run(["quench"] + BASE, out2) == EXIT_OK
    assert (out1 / "quench.csv").read_text() == (out2 / "quench.csv").read_text()


def test_spectrum_outputs(tmp_path):
    assert run(["spectrum"] + BASE, tmp_path) == EXIT_OK
    rows = read_csv(tmp_path / "spectrum.csv")
    assert len(rows) == 64
    weights = np.array([float(r["weight"]) for r in rows])
    assert weights.sum() == pytest.approx(1.0, abs=1e-9)
    energies = np.array([float(r["E"]) for r in rows])
    assert np.all(np.diff(energies) >= 0)


def test_nscaling_outputs(tmp_path):
    args = ["nscaling", "--set", "nscaling.L_values=[4,6]",
            "--set", "nscaling.gamma_values=[0.9]"]
    assert run(args, tmp_path) == EXIT_OK
    rows = read_csv(tmp_path / "nscaling.csv")
    assert [int(r["L"]) for r in rows] == [4, 6]
    assert all(int(r["N"]) >= 1 for r in rows)


def test_disorder_requires_disordered_family(tmp_path):
    assert run(["disorder"] + BASE, tmp_path) == EXIT_CONFIG


def test_disorder_r1_w0_matches_quench(tmp_path):
    # degenerate ensemble: one realization, no disorder -> same dynamics
    quench_dir = tmp_path / "q"
    dis_dir = tmp_path / "d"
    quench_dir.mkdir(), dis_dir.mkdir()
    fam = ["--set", "model.family='u1_disordered'", "--set", "model.W=1e-300"]
    assert run(["quench"] + BASE + fam, quench_dir) == EXIT_OK
    assert run(["disorder"] + BASE + fam + ["--set", "ensemble.R=1"], dis_dir) == EXIT_OK
    q_rows = read_csv(quench_dir / "quench.csv")
    d_rows = read_csv(dis_dir / "disorder.csv")
    for qr, dr in zip(q_rows, d_rows):
        assert qr["t"] == dr["t"]
        for key, val in qr.items():
            if key.startswith("P_Q"):
                assert dr[key] == val       # bit-for-bit
        assert dr["S_half"] == qr["S_half"]
    meta = json.loads((dis_dir / "disorder.json").read_text())
    assert meta["mean_N"] == pytest.approx(round(meta["mean_N"]))


def test_train_outputs(tmp_path):
    args = ["train", "--set", "model.L=4", "--set", "initial.kind='AF'",
            "--set", "circuit.n_layers=1", "--set", "circuit.max_iterations=5",
            "--set", "circuit.patience=3"]
    assert run(args, tmp_path) == EXIT_OK
    rows = read_csv(tmp_path / "train_history.csv")
    assert len(rows) >= 1
    params = json.loads((tmp_path / "train_parameters.json").read_text())
    assert len(params["theta"]) == 1 * (3 * 4 + 3)
    assert 0.0 <= params["final_P"] <= 1.0 + 1e-12


def test_bounds_outputs(tmp_path):
    assert run(["bounds"] + BASE, tmp_path) == EXIT_OK
    rows = read_csv(tmp_path / "bounds.csv")
    assert len(rows) == 11
    margins = [float(r["margin"]) for r in rows]
    assert min(margins) >= -1e-9
    meta = json.loads((tmp_path / "bounds.json").read_text())
    assert 0.0 <= meta["delta"] <= 1.0


def test_plots_rendered(tmp_path):
    assert main(["quench"] + BASE + ["--output-dir", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "quench.png").exists()


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("QUENCHLAB_OUTDIR", str(tmp_path))
    assert main(["quench"] + BASE + ["--no-plots"]) == EXIT_OK
    assert (tmp_path / "quench.csv").exists()


def test_csv_floats_round_trip(tmp_path):
    assert run(["quench"] + BASE, tmp_path) == EXIT_OK
    rows = read_csv(tmp_path / "quench.csv")
    for r in rows[:3]:
        for v in r.values():
            assert repr(float(v)) == v
