import json
import math
import subprocess
import sys

import numpy as np
import pytest
from scipy.signal import argrelmax, argrelmin

from oracles import brute_force_discord, damped_jc_amplitude
from pseudomode import cli, figures
from pseudomode.correlations import assemble_two_qubit
from pseudomode.figures import FigureSpec, reproduce_figure
from pseudomode.scenario import ConfigError, ScenarioConfig, run_scenario
from pseudomode.spectral import SpectralModel


def read_csv(path):
    text = path.read_bytes().decode()
    header = text.split("\n", 1)[0].split(",")
    return header, np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def rises(y):
    """Height of each trough-to-peak rise of an oscillating series."""
    peaks, troughs = argrelmax(y)[0], argrelmin(y)[0]
    return np.array([y[p] - y[troughs[troughs < p].max()] for p in peaks if (troughs < p).any()])


def sl_weak(**kw):
    base = dict(name="slw", model=SpectralModel.single_lorentzian(11.0), regime="weak")
    base.update(kw)
    return ScenarioConfig(**base)


def test_scenario_csv_format(tmp_path):
    cfg = sl_weak(time_end=2.0, samples=21, outputs=("discord", "trace_distance", "non_markovianity", "populations", "spectral_density"))
    written = run_scenario(cfg, tmp_path)
    assert sorted(p.name for p in written.values()) == sorted(f"slw_{o}.csv" for o in cfg.outputs)
    raw = written["discord"].read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    header, data = read_csv(written["discord"])
    assert header == ["omega_t", "slw"]
    assert data.shape == (21, 2)
    np.testing.assert_allclose(data[:, 0], np.linspace(0, 2, 21))
    # twelve significant digits
    assert max(len(v.lstrip("-").replace(".", "").lstrip("0").split("e")[0]) for v in raw.decode().split()[1].split(",")) <= 12
    assert read_csv(written["populations"])[0] == ["omega_t", "slw_atom_excited", "slw_total_excitation"]
    h, d = read_csv(written["spectral_density"])
    assert h == ["omega_minus_omega_c", "slw"] and d.shape == (1201, 2)
    _, nm = read_csv(written["non_markovianity"])
    assert np.all(nm[:, 1] == 0)


def test_discord_csv_matches_closed_form(tmp_path):
    cfg = sl_weak(time_end=3.0, samples=31)
    _, data = read_csv(run_scenario(cfg, tmp_path)["discord"])
    for t, qd in data[::6]:
        rho = assemble_two_qubit(math.pi / 3, damped_jc_amplitude(11.0, 1.0, t)).matrix()
        assert qd == pytest.approx(brute_force_discord(rho), abs=1e-5)


def test_theta_zero_gives_zero_discord(tmp_path):
    _, data = read_csv(run_scenario(sl_weak(theta=0.0, samples=101), tmp_path)["discord"])
    assert np.all(data[:, 1] == 0.0)


def test_config_validation():
    with pytest.raises(ConfigError):
        sl_weak(theta=4.0)
    with pytest.raises(ConfigError):
        sl_weak(time_start=5.0, time_end=1.0)
    with pytest.raises(ConfigError):
        sl_weak(samples=1)
    with pytest.raises(ConfigError):
        sl_weak(outputs=("entanglement",))
    with pytest.raises(ConfigError):
        ScenarioConfig("x", SpectralModel.single_lorentzian(1.0))
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"name": "x", "model": {"family": "SL", "gamma": 1.0}, "regime": "weak", "colour": 1})


def test_config_round_trip():
    cfg = sl_weak(detuning=0.2, outputs=("discord", "populations"))
    assert ScenarioConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_fig1a_single_above_squared(tmp_path):
    written = reproduce_figure(figures.PRESETS["fig1a"], tmp_path)
    _, sl = read_csv(written["SL"])
    _, sq = read_csv(written["SQ"])
    assert np.all(sl[1:, 1] >= sq[1:, 1])
    assert sl[0, 1] == sq[0, 1]
    svg = written["svg"].read_text()
    assert svg.startswith("<svg") and "SL" in svg and "SQ" in svg
    meta = json.loads(written["meta"].read_text())
    assert meta["figure_id"] == "fig1a" and "note" in meta


def test_fig6a_squared_swings_wider(tmp_path):
    written = reproduce_figure(figures.PRESETS["fig6a"], tmp_path)
    swings = {}
    for name in ("SL", "SQ"):
        header, d = read_csv(written[name])
        assert header == ["omega_t", name]
        swings[name] = rises(d[:, 1])
    n = min(len(swings["SL"]), len(swings["SQ"]))
    assert n >= 30
    # every trough-to-peak rise of SQ is the larger one, and SQ's persist longer
    assert np.all(swings["SQ"][:n] > swings["SL"][:n])
    assert swings["SQ"][n - 1] > 3 * swings["SL"][n - 1]
    meta = json.loads(written["meta"].read_text())
    assert float(meta["non_markovianity"]["SQ"]) > float(meta["non_markovianity"]["SL"]) > 0


def test_fig3_bundle(tmp_path):
    ids = figures.resolve("fig3")
    assert ids == ["fig3a", "fig3b"]
    for fid in ids:
        written = reproduce_figure(figures.PRESETS[fid], tmp_path)
        assert (tmp_path / fid / f"{fid}.svg").exists()
        names = {"fig3a": ("SL", "SQ"), "fig3b": ("TL", "BG")}[fid]
        for n in names:
            h, d = read_csv(written[n])
            assert h == ["omega_minus_omega_c", n]
            assert d[0, 0] == -30 and d[-1, 0] == 30
    _, bg = read_csv(tmp_path / "fig3b" / "BG.csv")
    assert bg[600, 1] == 0.0


def test_fig5_bundle(tmp_path):
    written = reproduce_figure(figures.PRESETS["fig5"], tmp_path)
    assert {"SL", "SQ", "TL", "BG", "svg", "meta"} == set(written)
    for n in ("SL", "SQ", "TL", "BG"):
        _, d = read_csv(written[n])
        assert d[0, 0] == -2 and d[-1, 0] == 2 and np.all(d[:, 1] >= 0)


def test_empty_figure_writes_nothing(tmp_path):
    spec = FigureSpec("empty", "discord", ())
    with pytest.raises(ConfigError):
        reproduce_figure(spec, tmp_path)
    assert list(tmp_path.iterdir()) == []


def test_figure_spec_rejects_mixed_grids():
    a = sl_weak(name="a")
    b = sl_weak(name="b", time_end=5.0)
    with pytest.raises(ConfigError):
        FigureSpec("mixed", "discord", (a, b))
    with pytest.raises(ConfigError):
        FigureSpec("dupes", "discord", (a, a))


def test_unknown_preset():
    with pytest.raises(ConfigError):
        figures.resolve("fig9")
    assert len(figures.resolve("all")) == 17


def test_sweep_detuning_rows(tmp_path):
    path = cli.sweep(sl_weak(samples=201), "detuning", [0.0, 0.2, 8.0], tmp_path, jobs=1)
    assert path.name == "slw_sweep_detuning.csv"
    header, data = read_csv(path)
    assert header == ["detuning", "discord_final", "non_markovianity"]
    assert data.shape == (3, 3)
    np.testing.assert_allclose(data[:, 0], [0, 0.2, 8])
    # far off resonance the weak-regime atom barely decays within t = 10
    assert data[2, 1] > data[1, 1] > 0
    assert np.all(data[:, 2] >= 0)


def test_sweep_empty_values(tmp_path):
    path = cli.sweep(sl_weak(), "gamma", [], tmp_path)
    assert path.read_text() == "gamma,discord_final,non_markovianity\n"


def test_sweep_theta_against_oracle(tmp_path):
    thetas = np.linspace(0, math.pi / 2, 8)
    path = cli.sweep(sl_weak(time_end=1.0, samples=11), "theta", thetas, tmp_path, jobs=2)
    _, data = read_csv(path)
    qd = data[:, 1]
    assert qd[0] == 0.0
    before_quarter = thetas <= math.pi / 4
    assert np.all(np.diff(qd[before_quarter]) > 0)
    b = damped_jc_amplitude(11.0, 1.0, 1.0)
    want = [brute_force_discord(assemble_two_qubit(th, b).matrix()) for th in thetas]
    np.testing.assert_allclose(qd, want, atol=1e-5)


def test_sweep_parallel_matches_serial(tmp_path):
    a = cli.sweep(sl_weak(samples=101), "w1", [], tmp_path / "a")
    cfg = ScenarioConfig("tl", SpectralModel.two_lorentzian(11.0, 1.0), regime="weak", samples=101)
    a = cli.sweep(cfg, "w1", [0.2, 0.5, 0.8], tmp_path / "a", jobs=1)
    b = cli.sweep(cfg, "w1", [0.2, 0.5, 0.8], tmp_path / "b", jobs=3)
    assert a.read_bytes() == b.read_bytes()


def test_sweep_unknown_param(tmp_path):
    with pytest.raises(ConfigError):
        cli.sweep(sl_weak(), "omega_c", [1.0], tmp_path)


def write_config(tmp_path, **kw):
    doc = sl_weak(samples=51, **kw).to_dict()
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    return path


def test_main_run_and_sweep(tmp_path, capsys):
    cfg = write_config(tmp_path, outputs=("discord", "trace_distance"))
    out = tmp_path / "o"
    assert cli.main(["run", str(cfg), "--out", str(out)]) == 0
    assert (out / "slw_discord.csv").exists() and (out / "slw_trace_distance.csv").exists()
    assert cli.main(["sweep", str(cfg), "--param", "detuning", "--values", "0,8", "--out", str(out), "--jobs", "1"]) == 0
    assert read_csv(out / "slw_sweep_detuning.csv")[1].shape == (2, 3)
    assert cli.main(["sweep", str(cfg), "--param", "detuning", "--values", "", "--out", str(out)]) == 0
    assert (out / "slw_sweep_detuning.csv").read_text().count("\n") == 1


def test_main_runs_figure_json(tmp_path, capsys):
    assert cli.main(["dump-preset", "fig3a"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert FigureSpec.from_dict(doc) == figures.PRESETS["fig3a"]
    doc["figure_id"] = "mine"
    path = tmp_path / "fig.json"
    path.write_text(json.dumps(doc))
    assert cli.main(["run", str(path), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "mine" / "mine.svg").exists()


def test_dump_all_presets(capsys):
    assert cli.main(["dump-preset", "all"]) == 0
    docs = json.loads(capsys.readouterr().out)
    assert [d["figure_id"] for d in docs] == list(figures.PRESETS)


def test_env_var_sets_output(tmp_path, monkeypatch):
    monkeypatch.setenv("PSEUDOMODE_OUT", str(tmp_path / "env"))
    assert cli.output_dir(None) == tmp_path / "env"
    assert cli.output_dir(str(tmp_path / "flag")) == tmp_path / "flag"
    monkeypatch.delenv("PSEUDOMODE_OUT")
    assert str(cli.output_dir(None)) == "out"
    monkeypatch.setenv("PSEUDOMODE_OUT", str(tmp_path / "env"))
    assert cli.main(["figure", "fig3a"]) == 0
    assert (tmp_path / "env" / "fig3a" / "fig3a.svg").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["figure", "fig9"],
        ["run", "/nonexistent/cfg.json"],
        ["dump-preset", "nope"],
    ],
)
def test_errors_exit_nonzero(argv, capsys):
    assert cli.main(argv) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("pseudomode: error:")


def test_invalid_model_in_config(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"name": "x", "model": {"family": "BG", "gamma1": 1.0, "gamma2": 2.0}, "regime": "weak"}))
    assert cli.main(["run", str(path), "--out", str(tmp_path)]) == 1
    assert "pseudomode: error:" in capsys.readouterr().err
    path.write_text("{not json")
    assert cli.main(["run", str(path), "--out", str(tmp_path)]) == 1


def test_unwritable_output(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    cfg = write_config(tmp_path)
    assert cli.main(["run", str(cfg), "--out", str(blocker / "sub")]) == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "pseudomode", "figure", "fig5", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "fig5" / "fig5.svg").exists()
    bad = subprocess.run([sys.executable, "-m", "pseudomode", "figure", "nope"], capture_output=True, text=True)
    assert bad.returncode != 0 and bad.stderr.startswith("pseudomode: error:")


def test_rerun_is_bit_identical(tmp_path):
    cfg = sl_weak(samples=201, outputs=("discord", "non_markovianity"))
    a = run_scenario(cfg, tmp_path / "a")
    b = run_scenario(cfg, tmp_path / "b")
    for k in a:
        assert a[k].read_bytes() == b[k].read_bytes()
