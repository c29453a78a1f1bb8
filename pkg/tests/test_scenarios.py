import json
import math
import os

import numpy as np
import pytest

from rcjc.cli import main as cli_main
from rcjc.scenarios import (
    ConfigError,
    PRESETS,
    load_config,
    resolve_model,
    run_comparison,
    run_sweep,
)


def cheap_cfg(**kw):
    base = {"schema": 1, "preset": "fig2a", "t_final_tau": 0.05,
            "record_samples": 21, "figures": False}
    base.update(kw)
    return base


def test_load_config_schema_and_keys():
    with pytest.raises(ConfigError, match="schema"):
        load_config({"preset": "fig2a"})
    with pytest.raises(ConfigError, match="unknown key"):
        load_config({"schema": 1, "preset": "fig2a", "bogus": 1})
    with pytest.raises(ConfigError, match="unknown preset"):
        load_config({"schema": 1, "preset": "fig9"})
    with pytest.raises(ConfigError, match="sideband"):
        load_config(cheap_cfg(sideband="purple"))
    with pytest.raises(ConfigError, match="integrator"):
        load_config(cheap_cfg(integrator="euler"))
    with pytest.raises(ConfigError, match="fock"):
        load_config(cheap_cfg(fock=[8, 4]))
    with pytest.raises(ConfigError, match="sweepable"):
        load_config(cheap_cfg(sweep={"axes": [{"path": "fock", "values": [1]}]}))
    cfg = load_config(cheap_cfg())
    assert cfg["name"] == "fig2a"
    assert cfg["n_th"] == 1e-3


def test_all_presets_resolve():
    for name in PRESETS:
        cfg = load_config({"schema": 1, "preset": name})
        rs = resolve_model(cfg)
        assert rs.tau > 0
        assert rs.spec.layout.dim >= 4


def test_resolve_fig2a_parameters():
    rs = resolve_model(load_config(cheap_cfg()))
    spec = rs.spec
    assert spec.rcs[0].lam == pytest.approx(0.1, rel=1e-12)
    assert rs.g_n == pytest.approx(2e-4, rel=1e-12)
    assert spec.delta0 == pytest.approx(-2.0, abs=1e-15)
    assert rs.tau == pytest.approx(5553.6, abs=0.1)
    assert spec.beta == pytest.approx(math.log(1001.0), rel=1e-12)


def test_resolve_fig2c_infers_mode_frequency():
    rs = resolve_model(load_config({"schema": 1, "preset": "fig2c"}))
    spec = rs.spec
    assert rs.g_n == pytest.approx(2e-3 / 12 * 8e-3, rel=1e-12)
    assert spec.nu_tilde == pytest.approx(rs.g_n / 0.1, rel=1e-12)
    assert spec.omega_tilde == pytest.approx(3 * spec.nu_tilde, rel=1e-12)


def test_resolve_fig3_second_mode():
    rs = resolve_model(load_config({"schema": 1, "preset": "fig3"}))
    rc2 = rs.spec.rcs[1]
    assert rc2.Omega == pytest.approx(rs.spec.nu_tilde, rel=1e-12)
    assert rc2.lam == pytest.approx(0.1 * rc2.Omega, rel=1e-12)
    assert math.isinf(rs.spec.beta)


def test_scaled_family_preserves_ratios():
    base = resolve_model(load_config({"schema": 1, "preset": "fig4"}))
    scaled = resolve_model(load_config({"schema": 1, "preset": "fig4_scaled"}))
    for a, b in ((base.spec.nu_tilde, scaled.spec.nu_tilde),
                 (base.spec.epsilon0, scaled.spec.epsilon0),
                 (base.spec.omega_tilde, scaled.spec.omega_tilde)):
        assert b == pytest.approx(10 * a, rel=1e-12)
    assert scaled.spec.lamb_dicke == pytest.approx(base.spec.lamb_dicke, rel=1e-12)
    r_base = base.spec.rcs[0].residual.gamma / base.spec.nu_tilde
    r_scaled = scaled.spec.rcs[0].residual.gamma / scaled.spec.nu_tilde
    assert r_scaled == pytest.approx(r_base, rel=1e-12)
    assert scaled.tau == pytest.approx(base.tau / 10, rel=1e-12)


def test_run_comparison_artifact_files(tmp_path):
    cfg = cheap_cfg(figures=True)
    art = run_comparison(cfg, out_dir=tmp_path / "run")
    for key in ("config", "timeseries", "summary", "overview_png"):
        assert art.files[key].exists()
    text = art.files["timeseries"].read_text()
    header = text.splitlines()[0].split(",")
    assert header == ["t", "n1", "sz", "purity_total", "purity_spin",
                      "entropy_spin", "min_eig", "tail", "fid", "tdist", "sigma"]
    assert len(text.splitlines()) == 22
    summary = json.loads(art.files["summary"].read_text())
    assert summary["max_infidelity"] == pytest.approx(
        art.summary["max_infidelity"], rel=1e-15)


def test_csv_determinism(tmp_path):
    a = run_comparison(cheap_cfg(), out_dir=tmp_path / "a")
    b = run_comparison(cheap_cfg(), out_dir=tmp_path / "b")
    assert (tmp_path / "a/timeseries.csv").read_bytes() == \
        (tmp_path / "b/timeseries.csv").read_bytes()
    assert (tmp_path / "a/config.json").read_bytes() == \
        (tmp_path / "b/config.json").read_bytes()


def test_summary_recomputable_from_csv(tmp_path):
    art = run_comparison(cheap_cfg(), out_dir=tmp_path / "run")
    rows = np.genfromtxt(art.files["timeseries"], delimiter=",", names=True)
    assert abs((1.0 - rows["fid"]).max() - art.summary["max_infidelity"]) < 1e-12
    assert abs(rows["purity_total"][-1]
               - art.summary["final_purity_total"]) < 1e-12
    assert abs(rows["tail"].max() - art.summary["max_tail"]) < 1e-12


def test_witness_artifact(tmp_path):
    cfg = {"schema": 1, "preset": "fig3", "t_final_tau": 0.05,
           "record_samples": 21, "figures": False}
    art = run_comparison(cfg, out_dir=tmp_path / "w")
    assert art.witness is not None
    header = art.files["witness"].read_text().splitlines()[0]
    assert header == "t,tdist_target,sigma_target,tdist_mapped,sigma_mapped"
    assert "witness_target_intervals" in art.summary
    ts_header = art.files["timeseries"].read_text().splitlines()[0]
    assert ",n2," in ts_header


def test_sweep_single_point_matches_single_run(tmp_path):
    cfg = cheap_cfg(sweep={"axes": [{"path": "n_th", "values": [1e-3]}]})
    rows = run_sweep(cfg, out_dir=tmp_path / "sweep")
    assert len(rows) == 1 and rows[0][3] is None
    single = run_comparison(cheap_cfg(n_th=1e-3), out_dir=tmp_path / "single")
    swept_csv = (tmp_path / "sweep" / rows[0][2] if False else
                 next((tmp_path / "sweep").glob("*/timeseries.csv")))
    assert swept_csv.read_bytes() == \
        (tmp_path / "single/timeseries.csv").read_bytes()


def test_sweep_parallel_matches_serial(tmp_path):
    cfg = cheap_cfg(sweep={"axes": [{"path": "n_th", "values": [1e-3, 1e-2]}]})
    run_sweep(cfg, out_dir=tmp_path / "serial", jobs=1)
    run_sweep(cfg, out_dir=tmp_path / "par", jobs=2)
    assert (tmp_path / "serial/aggregate.csv").read_bytes() == \
        (tmp_path / "par/aggregate.csv").read_bytes()


def test_sweep_thread_cap_env(tmp_path, monkeypatch):
    monkeypatch.setenv("RCJC_THREADS", "1")
    cfg = cheap_cfg(sweep={"axes": [{"path": "n_th", "values": [1e-3, 1e-2]}]})
    rows = run_sweep(cfg, out_dir=tmp_path / "capped", jobs=8)
    assert all(err is None for *_, err in rows)


def test_sweep_partial_failure_continues(tmp_path):
    # n_th = 5 needs a much larger truncation: that point fails, others go on
    cfg = cheap_cfg(sweep={"axes": [{"path": "n_th", "values": [1e-3, 5.0]}]})
    rows = run_sweep(cfg, out_dir=tmp_path / "pf")
    assert rows[0][3] is None
    assert rows[1][3] is not None and "raise the" in rows[1][3]
    agg = (tmp_path / "pf/aggregate.csv").read_text().splitlines()
    assert len(agg) == 3
    assert "nan" in agg[2]


def test_run_rejects_missing_sweep():
    with pytest.raises(ConfigError, match="no sweep"):
        run_sweep(cheap_cfg())


def test_integrator_both_records_discrepancy(tmp_path):
    cfg = cheap_cfg(integrator="both", dt=0.01, t_final_tau=0.002,
                    record_samples=5)
    art = run_comparison(cfg, write=False)
    assert art.summary["integrator_discrepancy"] < 1e-9


def test_cli_simulate_and_errors(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cheap_cfg()))
    code = cli_main(["simulate", "--config", str(cfg_path),
                     "--out", str(tmp_path / "out"), "--no-figures"])
    assert code == 0
    assert (tmp_path / "out/timeseries.csv").exists()
    out = capsys.readouterr().out
    assert "max 1-F" in out

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema": 2}))
    assert cli_main(["simulate", "--config", str(bad)]) == 1
    missing = tmp_path / "none.json"
    assert cli_main(["simulate", "--config", str(missing)]) == 1


def test_cli_numerical_guard_exit_code(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cheap_cfg(n_th=5.0)))
    assert cli_main(["simulate", "--config", str(cfg_path),
                     "--out", str(tmp_path / "out")]) == 2


def test_cli_map_spectral(capsys):
    code = cli_main(["map-spectral", "--pi-alpha", "0.02", "--gamma", "0.02",
                     "--omega0", "1.0", "--json"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["lam"] == pytest.approx(0.1, rel=1e-12)
    assert out["lamb_dicke"] == pytest.approx(0.2, rel=1e-12)
    assert out["roundtrip_max_rel_err"] < 1e-12


def test_cli_sweep(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(
        cheap_cfg(sweep={"axes": [{"path": "n_th", "values": [1e-3]}]})))
    code = cli_main(["sweep", "--config", str(cfg_path), "--out",
                     str(tmp_path / "sw"), "--jobs", "1", "--no-figures"])
    assert code == 0
    assert (tmp_path / "sw/aggregate.csv").exists()


def test_figures_rendered(tmp_path):
    cfg = {"schema": 1, "preset": "fig3", "t_final_tau": 0.05,
           "record_samples": 21, "figures": True}
    art = run_comparison(cfg, out_dir=tmp_path / "fig")
    assert art.files["overview_png"].stat().st_size > 10000
    assert art.files["witness_png"].exists()
