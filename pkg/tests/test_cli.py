import json
import subprocess
import sys

import numpy as np
import pytest

from splinegabor.cli import main
from splinegabor.plotdata import plot_emit


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    assert "bench" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["windows", "dump", "--help"],
    ["duals", "build", "--help"],
    ["check", "duality", "--help"],
    ["signals", "dump", "--help"],
    ["bench", "amse", "--help"],
    ["plot", "emit", "--help"],
])
def test_leaf_help_lists_global_flags(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    text = capsys.readouterr().out
    assert exc.value.code == 0
    for flag in ("--quad-step", "--out", "--seed"):
        assert flag in text


@pytest.mark.parametrize("argv", [
    ["windows", "dump", "--window", "b2", "--bogus"],
    ["windows", "dump", "--window", "b9"],
    ["check", "duality", "--window", "b2", "--dual", "nope"],
    ["windows"],
])
def test_usage_errors_exit_two(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_check_duality_ok_and_fail(capsys):
    code, out, _ = run(["check", "duality", "--window", "b2", "--dual", "sym", "--b", "0.2"], capsys)
    assert code == 0 and "ok" in out
    code, out, _ = run(["check", "duality", "--window", "b3", "--dual", "iter2", "--tol", "1e-20"], capsys)
    assert code == 1 and "FAIL" in out


def test_check_duality_invalid_b_and_nmax():
    with pytest.raises(SystemExit) as exc:
        main(["check", "duality", "--window", "b2", "--dual", "sym", "--b", "0.5"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["check", "duality", "--window", "b3", "--dual", "sym", "--nmax", "1"])
    assert exc.value.code == 2


def test_windows_dump(capsys):
    code, out, _ = run(["windows", "dump", "--window", "b3", "--grid=-1.5:1.5:0.5"], capsys)
    rows = [list(map(float, r.split(","))) for r in out.strip().splitlines()[1:]]
    assert code == 0 and len(rows) == 7
    assert rows[3] == [0.0, 0.75]


def test_windows_dump_env_out(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SPLINEGABOR_OUT", str(tmp_path))
    code, out, _ = run(["windows", "dump", "--window", "eps3", "--p", "2"], capsys)
    assert code == 0 and out == ""
    assert (tmp_path / "eps3.csv").read_text().startswith("x,value\n")


def test_duals_build_writes_csv_and_metadata(tmp_path, capsys):
    code, _, _ = run(["duals", "build", "--window", "b2", "--dual", "phi-sym", "--out", str(tmp_path)], capsys)
    assert code == 0
    meta = json.loads((tmp_path / "b2_phi_k.json").read_text())
    assert meta["K"] == [-2, -1, 0, 1, 2] and meta["duality_residual"] < 1e-10 and meta["tail"] < 1e-6
    data = np.loadtxt(tmp_path / "b2_phi_k.csv", delimiter=",", skiprows=1)
    assert data[0, 0] == pytest.approx(meta["support"][0])


def test_duals_build_rejects_other_a():
    with pytest.raises(SystemExit) as exc:
        main(["duals", "build", "--window", "b2", "--dual", "sym", "--a", "0.5"])
    assert exc.value.code == 2


def test_duals_build_missing_out_dir(tmp_path, capsys):
    code, _, err = run(["duals", "build", "--window", "b2", "--dual", "sym", "--out", str(tmp_path / "x")], capsys)
    assert code == 1 and "does not exist" in err


def test_signals_dump_with_noise(capsys):
    argv = ["signals", "dump", "--kind", "Heavisine", "--count", "5", "--sigma", "0.1", "--reps", "2", "--seed", "3"]
    code, out, _ = run(argv, capsys)
    code2, out2, _ = run(argv, capsys)
    lines = out.strip().splitlines()
    assert code == 0 and out == out2
    assert lines[0] == "t,value,rep_0,rep_1" and len(lines) == 6
    assert float(lines[3].split(",")[1]) == pytest.approx(-2.0, abs=1e-12)


def test_bench_invalid_b_exits_two(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("b = 0.3\n")
    with pytest.raises(SystemExit) as exc:
        main(["bench", "amse", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert exc.value.code == 2
    assert "admissible" in capsys.readouterr().err


def test_bench_small_run_and_manifest_replay(tmp_path, capsys):
    cfg = tmp_path / "small.cfg"
    cfg.write_text("generators = B2\nduals = k, h\nsignals = Bumps\nreplications = 2\n")
    code, out, _ = run(["bench", "amse", "--config", str(cfg), "--out", str(tmp_path / "a")], capsys)
    assert code == 0 and "4 cells, 0 errored" in out
    replay = ["bench", "amse", "--config", str(tmp_path / "a" / "manifest.json"), "--out", str(tmp_path / "b")]
    assert run(replay, capsys)[0] == 0
    assert (tmp_path / "a" / "amse.csv").read_bytes() == (tmp_path / "b" / "amse.csv").read_bytes()


def test_bench_errored_cell_exit_code(tmp_path, capsys):
    cfg = tmp_path / "trunc.cfg"
    cfg.write_text("generators = B2\nduals = phi_k\nsignals = Bumps\nprofiles = clean\nj_max = 3\n")
    code, out, _ = run(["bench", "amse", "--config", str(cfg), "--out", str(tmp_path / "o")], capsys)
    assert code == 1 and "1 errored" in out


def test_seed_flag_overrides_config(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("generators = B2\nduals = k\nsignals = Bumps\nprofiles = noisy\nreplications = 2\n")
    run(["bench", "amse", "--config", str(cfg), "--out", str(tmp_path / "a")], capsys)
    run(["bench", "amse", "--config", str(cfg), "--out", str(tmp_path / "b"), "--seed", "7"], capsys)
    manifest = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert manifest["config"]["seed"] == 7
    assert (tmp_path / "a" / "amse.csv").read_text() != (tmp_path / "b" / "amse.csv").read_text()


def test_plot_emit_test_signals(tmp_path, capsys):
    code, _, _ = run(["plot", "emit", "--figure", "test-signals", "--out", str(tmp_path)], capsys)
    assert code == 0
    csvs = sorted(p.name for p in tmp_path.glob("*.csv"))
    assert csvs == ["blocks.csv", "bumps.csv", "doppler.csv", "heavisine.csv", "quadchirp.csv"]
    for name in csvs:
        assert len((tmp_path / name).read_text().strip().splitlines()) == 2049


@pytest.mark.parametrize("figure, generator", [("b2-duals", "B2"), ("b3-duals", "B3"), ("eps3-duals", "eps3")])
def test_plot_emit_dual_figures(figure, generator, tmp_path):
    paths = plot_emit(figure, tmp_path)
    names = sorted(p.name for p in paths)
    assert names == sorted(["generator.csv", "k.csv", "h.csv", "canonical.csv", "phi_k.csv", "phi_h.csv",
                            "phi_canonical.csv", "legend.txt"])
    legend = (tmp_path / "legend.txt").read_text()
    assert f"generator {generator}" in legend and f"S^-1 {generator}" in legend
    gen = np.loadtxt(tmp_path / "generator.csv", delimiter=",", skiprows=1)
    assert gen[:, 1].max() > 0.5


def test_plot_emit_missing_dir_leaves_nothing(tmp_path):
    target = tmp_path / "absent"
    with pytest.raises(FileNotFoundError):
        plot_emit("b2-duals", target)
    assert not target.exists()
    assert list(tmp_path.iterdir()) == []


def test_plot_emit_needs_out():
    with pytest.raises(SystemExit) as exc:
        main(["plot", "emit", "--figure", "b2-duals"])
    assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "splinegabor", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "splinegabor" in proc.stdout
