"""Command-line workbench: pipelines, reports, exit codes, determinism."""

import json

import numpy as np
import pytest

import stratwave as sw
from stratwave import io as sio
from stratwave.cli import main
from stratwave.generators import spec_to_json
from conftest import two_profile_spec


def write_spec(tmp_path, dim=1, group=None):
    obj = spec_to_json(two_profile_spec(dim))
    obj["group"] = group or {"kind": "abelian", "d": dim}
    obj["density"] = 1.0
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(obj))
    return path


def write_params(tmp_path, **overrides):
    params = {"M_max": 64, "L_max": 4, "eps_conv": 1e-8, "T_div": 5.0,
              "eps_stable": 1e-9, "tail": 8, "mode": "strict"}
    params.update(overrides)
    path = tmp_path / "params.json"
    path.write_text(json.dumps(params))
    return path


def test_generate_then_decompose(tmp_path):
    spec = write_spec(tmp_path)
    params = write_params(tmp_path)
    snaps = tmp_path / "snaps.jsonl"
    assert main(["generate", "--spec", str(spec), "--out", str(snaps),
                 "--report", str(tmp_path / "gen.json")]) == 0
    report_path = tmp_path / "dec.json"
    assert main(["decompose", "--in", str(snaps), "--params", str(params),
                 "--report", str(report_path)]) == 0
    report = json.loads(report_path.read_text())
    assert report["nu"] == 2
    assert report["M_eff"] == 4
    assert set(report["inputs"]) == {"snapshots", "params"}
    assert all(len(d) == 64 for d in report["inputs"].values())  # sha256 hex
    escapes = {p["escape"] for p in report["profiles"]}
    assert escapes == {"scale", "core"}


def test_decompose_deterministic(tmp_path):
    spec = write_spec(tmp_path)
    params = write_params(tmp_path)
    snaps = tmp_path / "snaps.jsonl"
    main(["generate", "--spec", str(spec), "--out", str(snaps)])
    r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
    main(["decompose", "--in", str(snaps), "--params", str(params), "--report", str(r1)])
    main(["decompose", "--in", str(snaps), "--params", str(params), "--report", str(r2)])
    assert r1.read_bytes() == r2.read_bytes()


def test_verify_window(tmp_path):
    report = tmp_path / "w.json"
    assert main(["verify-window", "--J", "8", "--grid-points", "512",
                 "--report", str(report)]) == 0
    obj = json.loads(report.read_text())
    assert obj["pass"] is True
    assert obj["max_partition_deviation"] <= 1e-12
    assert main(["verify-window", "--narrow", "--report", str(report)]) == 0
    assert json.loads(report.read_text())["max_partition_deviation"] == 0.0


def test_verify_frame(tmp_path):
    blank = sw.GridFunction(1, 8.0, np.zeros(128, dtype=complex))
    nu = blank.freq_axis()
    spec = np.exp(-8.0 * (np.abs(nu) - 2.0) ** 2).astype(complex)
    from stratwave.transform import grid_ifft
    f = grid_ifft(blank, spec)
    grid = tmp_path / "f.grid"
    sio.write_grid(grid, f)
    report = tmp_path / "frame.json"
    assert main(["verify-frame", "--grid", str(grid), "--narrow",
                 "--density", "1.0", "--p", "2.0", "--jmin", "0", "--jmax", "4",
                 "--report", str(report)]) == 0
    obj = json.loads(report.read_text())
    assert obj["corrected_rel_error"] <= 1e-5
    assert obj["frame_iterations"] <= 50


def test_norms_command(tmp_path):
    g = sw.abelian(1)
    gs = sw.preset_sampling_set(g, 1.0)
    c = sw.CoefficientField(group=g, sampling=gs,
                            entries={sw.AtomIndex(0, (0,)): 3.0 + 0j,
                                     sw.AtomIndex(1, (1,)): 4.0 + 0j},
                            normalization=sw.L1_ATOMS)
    path = tmp_path / "c.jsonl"
    sio.write_field(path, c)
    report = tmp_path / "n.json"
    assert main(["norms", "--in", str(path), "--s", "0.0", "--p", "2.0",
                 "--q", "2.0", "--report", str(report)]) == 0
    obj = json.loads(report.read_text())
    assert obj["discrete_besov_norm"] == pytest.approx(np.sqrt(17.0))
    assert obj["sobolev_seq_norm"] == pytest.approx(np.sqrt(17.0))


def write_track(tmp_path, name, js, gammas):
    path = tmp_path / name
    path.write_text(json.dumps({"group": {"kind": "abelian", "d": 1}, "beta": 1.0,
                                "js": js, "gammas": gammas}))
    return path


def test_classify_command(tmp_path):
    n = 16
    a = write_track(tmp_path, "a.json", [0] * n, [[0]] * n)
    b = write_track(tmp_path, "b.json", [0] * n, [[3 * k] for k in range(n)])
    report = tmp_path / "v.json"
    assert main(["classify", "--a", str(a), "--b", str(b),
                 "--report", str(report)]) == 0
    assert json.loads(report.read_text())["verdict"] == "CoreOrthogonal"
    wobble = write_track(tmp_path, "w.json", [0] * n,
                         [[int(2 * np.cos(k))] for k in range(n)])
    assert main(["classify", "--a", str(a), "--b", str(wobble),
                 "--report", str(report)]) == 2
    assert json.loads(report.read_text())["verdict"] == "Undecided"


def test_exit_code_io_error(tmp_path):
    params = write_params(tmp_path)
    assert main(["decompose", "--in", str(tmp_path / "missing.jsonl"),
                 "--params", str(params)]) == 3


def test_exit_code_validation(tmp_path):
    spec = write_spec(tmp_path)
    snaps = tmp_path / "snaps.jsonl"
    main(["generate", "--spec", str(spec), "--out", str(snaps)])
    bad_params = write_params(tmp_path, tail=64)  # longer than the horizon
    assert main(["decompose", "--in", str(snaps), "--params", str(bad_params)]) == 1
    bad_mode = write_params(tmp_path, mode="yolo")
    assert main(["decompose", "--in", str(snaps), "--params", str(bad_mode)]) == 1


def test_exit_code_undecidable(tmp_path):
    g = sw.abelian(1)
    gs = sw.preset_sampling_set(g, 1.0)
    per_n = [{sw.AtomIndex(0, (0,)): 1.0 + 0j,
              sw.AtomIndex(0, (3 + int(np.round(1.4 * np.cos(3 * n))),)): 0.5 + 0j}
             for n in range(16)]
    snaps = sw.SequenceSnapshots(
        group=g, sampling=gs, n_values=tuple(range(16)),
        fields=tuple(sw.CoefficientField(group=g, sampling=gs, entries=e,
                                         normalization=sw.lp_atoms(2.0))
                     for e in per_n))
    path = tmp_path / "snaps.jsonl"
    sio.write_snapshots(path, snaps)
    params = write_params(tmp_path)
    assert main(["decompose", "--in", str(path), "--params", str(params)]) == 2


def test_generate_invalid_spec_exit(tmp_path):
    path = tmp_path / "spec.json"
    obj = spec_to_json(two_profile_spec(1))
    obj["group"] = {"kind": "abelian", "d": 1}
    obj["kind"] = "sideways"
    path.write_text(json.dumps(obj))
    assert main(["generate", "--spec", str(path),
                 "--out", str(tmp_path / "o.jsonl")]) == 1
