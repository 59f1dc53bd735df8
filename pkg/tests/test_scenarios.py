import math
import os

import pytest
from numpy.testing import assert_allclose

from dirsim.antenna import DirectionalAntenna, FoliumPattern
from dirsim.cli import main as cli_main
from dirsim.config import ConfigDocument, parse_config
from dirsim.propagation import free_space_path_loss_db
from dirsim.scenarios import ScenarioError
from dirsim.scenarios.bench import run_bench, run_repetition
from dirsim.scenarios.bench import resolve_config as resolve_bench
from dirsim.scenarios.mesh import run_mesh
from dirsim.scenarios.pattern_sweep import run_pattern_sweep
from dirsim.units import mw_to_dbm


def small_sweep_doc(orbits=3, duration=3.6):
    doc = ConfigDocument()
    doc.set("duration", duration)
    doc.set("beaconInterval", 0.1)
    doc.set("orbits", orbits)
    return doc


def test_pattern_sweep_rows_match_closed_form():
    out = run_pattern_sweep(small_sweep_doc())
    rows = out["rows"]
    assert len(rows) == 36 * 3
    antenna = DirectionalAntenna(
        family=FoliumPattern(1.0, 3.0),
        beam_width_deg=40.0,
        main_lobe_gain_db=15.0,
        side_lobe_gain_db=-5.0,
        orientation_deg=90.0,
    )
    ptx_dbm = mw_to_dbm(40.0)
    for angle, radius, prx, received in rows:
        expected = (
            ptx_dbm
            + antenna.gain_db(angle)
            - free_space_path_loss_db(radius, 2.4e9, 2.0)
            + 0.0
        )
        assert_allclose(prx, expected, rtol=0, atol=1e-9)
        assert received == 1


def test_pattern_sweep_is_deterministic():
    a = run_pattern_sweep(small_sweep_doc(orbits=2, duration=1.8))
    b = run_pattern_sweep(small_sweep_doc(orbits=2, duration=1.8))
    assert a["rows"] == b["rows"]


def test_pattern_sweep_csv_layout(tmp_path):
    out = run_pattern_sweep(small_sweep_doc(orbits=1, duration=0.5), out_dir=str(tmp_path))
    path = out["csv_path"]
    assert os.path.basename(path) == "pattern.csv"
    lines = open(path).read().splitlines()
    header = [line for line in lines if line.startswith("#")]
    body = [line for line in lines if not line.startswith("#")]
    assert header  # resolved config is embedded
    assert any("ap.antenna.beamWidth" in line for line in header)
    assert body[0] == "angle_deg,radius_m,prx_dbm,received"
    assert len(body) == 1 + len(out["rows"])
    first = body[1].split(",")
    assert first[0] == repr(out["rows"][0][0])
    assert first[2] == repr(out["rows"][0][2])


def mesh_doc(**overrides):
    doc = ConfigDocument()
    doc.set("duration", 0.4)
    doc.set("relays", 2)
    for key, value in overrides.items():
        doc.set(key, value)
    return doc


def test_mesh_single_hop_baseline():
    out = run_mesh(mesh_doc(relays=0, duration=1.0), "omni", seed=0)
    assert out["delivered"] > 100
    assert out["total_losses"] == 0
    assert out["relay_collisions"] == []
    assert_allclose(out["throughput_bps"], out["delivered"] * 1000 / 1.0)


def test_mesh_two_relay_chain_delivers_both_modes():
    for mode in ("omni", "directional"):
        out = run_mesh(mesh_doc(), mode, seed=1)
        assert out["mode"] == mode
        assert out["delivered"] > 0, mode
        # 2 relays: six radios total, client1/left1/right1/left2/right2/client2
        assert len(out["rows"]) == 6
        assert len(out["relay_collisions"]) == 2


def test_mesh_zero_offered_load():
    out = run_mesh(mesh_doc(packetInterval=100.0), "omni", seed=0)
    assert out["delivered"] == 0
    assert out["throughput_bps"] == 0.0
    assert out["total_losses"] == 0


def test_mesh_windowed_source_and_reverse_stream():
    # A delivery-clocked window starves if its packets can be dropped,
    # so windowed runs raise the retry cap.
    doc = mesh_doc(
        windowPackets=2, reverseWindowPackets=2, maxRetries=100, duration=0.6
    )
    out = run_mesh(doc, "omni", seed=3)
    assert out["delivered"] > 0
    assert out["delivered_reverse"] > 0
    assert out["total_losses"] == 0


def test_mesh_deterministic_per_seed():
    a = run_mesh(mesh_doc(), "omni", seed=7)
    b = run_mesh(mesh_doc(), "omni", seed=7)
    assert a["rows"] == b["rows"]
    assert a["throughput_bps"] == b["throughput_bps"]


def test_mesh_csv_has_summary_row(tmp_path):
    out = run_mesh(mesh_doc(relays=0, duration=0.2), "omni", seed=0, out_dir=str(tmp_path))
    lines = open(out["csv_path"]).read().splitlines()
    body = [line for line in lines if not line.startswith("#")]
    assert body[0] == "radio_id,sent,received,collisions,losses"
    assert body[-1].startswith("throughput_bps,")


def test_mesh_rejects_bad_inputs():
    with pytest.raises(ScenarioError):
        run_mesh(mesh_doc(), "diagonal", seed=0)
    with pytest.raises(ScenarioError):
        run_mesh(mesh_doc(relays=-1), "omni", seed=0)


def bench_doc(**overrides):
    doc = ConfigDocument()
    doc.set("hosts", 4)
    doc.set("duration", 10.0)
    doc.set("mobilityTick", 2.5)
    doc.set("probeInterval", 2.5)
    for key, value in overrides.items():
        doc.set(key, value)
    return resolve_bench(doc)


def test_bench_repetition_counts_events():
    out = run_repetition(bench_doc(), procedure=3, seed=0)
    assert out["moves"] == 4 * 4
    assert out["transmits"] == 4 * 4
    assert out["neighbor_wall_ms"] > 0.0
    assert out["total_wall_ms"] >= out["neighbor_wall_ms"]


def test_bench_brute_force_recompute_identity():
    out = run_repetition(bench_doc(), procedure=2, seed=0)
    assert out["recompute_count"] == out["moves"] + out["transmits"] + 1


def test_bench_zero_repeats_writes_header_only(tmp_path):
    out = run_bench(bench_doc(), procedure=1, repeats=0, out_dir=str(tmp_path))
    assert out["rows"] == []
    lines = open(out["csv_path"]).read().splitlines()
    body = [line for line in lines if not line.startswith("#")]
    assert body == ["procedure,repetition,neighbor_wall_ms,total_wall_ms"]


def test_bench_rows_per_repetition(tmp_path):
    out = run_bench(bench_doc(duration=5.0), procedure=1, repeats=2, out_dir=str(tmp_path))
    assert [(p, r) for p, r, _, _ in out["rows"]] == [(1, 0), (1, 1)]
    lines = open(out["csv_path"]).read().splitlines()
    body = [line for line in lines if not line.startswith("#")]
    assert len(body) == 3


# -- command line -----------------------------------------------------------


def write_config(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_cli_validate_config_ok(tmp_path, capsys):
    path = write_config(tmp_path, "ok.ini", "hosts = 4\nduration = 1s\n")
    assert cli_main(["validate-config", path]) == 0
    assert "2 entries ok" in capsys.readouterr().out


def test_cli_validate_config_error(tmp_path, capsys):
    path = write_config(tmp_path, "bad.ini", "hosts = 4\ntransmitterPower = 10deg\n")
    assert cli_main(["validate-config", path]) == 2
    err = capsys.readouterr().err
    assert "config error" in err
    assert "line 2" in err


def test_cli_missing_config_file(tmp_path, capsys):
    assert cli_main(["validate-config", str(tmp_path / "absent.ini")]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_repo_configs_validate():
    root = os.path.join(os.path.dirname(__file__), "..", "configs")
    for name in ("pattern.ini", "mesh.ini", "bench.ini"):
        assert cli_main(["validate-config", os.path.join(root, name)]) == 0


def test_cli_pattern_sweep(tmp_path, capsys):
    cfg = write_config(
        tmp_path, "sweep.ini", "duration = 0.5s\nbeaconInterval = 100ms\norbits = 1\n"
    )
    code = cli_main(["pattern-sweep", "--config", cfg, "--out", str(tmp_path)])
    assert code == 0
    assert os.path.exists(tmp_path / "pattern.csv")
    assert "5 rows" in capsys.readouterr().out


def test_cli_mesh(tmp_path, capsys):
    cfg = write_config(tmp_path, "mesh.ini", "duration = 0.2s\nrelays = 1\n")
    code = cli_main(
        ["mesh", "--config", cfg, "--mode", "directional", "--seed", "2", "--out", str(tmp_path)]
    )
    assert code == 0
    assert os.path.exists(tmp_path / "mesh.csv")
    assert "throughput" in capsys.readouterr().out


def test_cli_mesh_scenario_error(tmp_path, capsys):
    cfg = write_config(tmp_path, "mesh.ini", "relays = -3\n")
    code = cli_main(["mesh", "--config", cfg, "--mode", "omni", "--out", str(tmp_path)])
    assert code == 3
    assert "scenario error" in capsys.readouterr().err


def test_cli_bench_header_only(tmp_path, capsys):
    cfg = write_config(tmp_path, "bench.ini", "hosts = 2\nduration = 1s\n")
    code = cli_main(
        ["bench", "--config", cfg, "--procedure", "2", "--repeats", "0", "--out", str(tmp_path)]
    )
    assert code == 0
    assert "0 repetitions" in capsys.readouterr().out
