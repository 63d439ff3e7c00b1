import json
import math

import numpy as np
import pytest

from trihybrid import cli
from trihybrid.channel import expected_pulse_power, random_channel
from trihybrid.config import ConfigError, ExperimentConfig, config_from_mapping, load_config
from trihybrid.experiment import (
    CSV_FIELDS,
    emit_results,
    read_results,
    run_sweep,
    trial_channel,
    trial_rng,
)
from trihybrid.metrics import spectral_efficiency
from trihybrid.power import component_loss, power_consumption, transmit_power_from_input
from trihybrid.precoding import design_precoders

SMALL = dict(n_subcarriers=8, n_rx=4, n_rad=16, n_rf_hybrid=2, n_trials=3, seed=7)


def small(**kw):
    return ExperimentConfig(**{**SMALL, **kw})


class TestSweep:
    def test_fd_single_point_matches_manual_pipeline(self):
        cfg = small(architectures=("FD",), input_power_w=(0.05,), n_trials=2)
        row = run_sweep(cfg).rows[0]
        spec = cfg.architecture_spec("FD")
        noise = cfg.resolved_noise_var()
        profile = expected_pulse_power(cfg.pulse_shape())
        se = []
        for t in range(2):
            h = random_channel(np.random.default_rng([7, t]), cfg.n_paths, cfg.geometry(),
                               cfg.pulse_shape(), "expected", profile)
            pre = design_precoders(h, spec, None, 0.05, noise)
            se.append(spectral_efficiency(h, pre.effective, noise))
        assert row.se_bps_hz == pytest.approx(np.mean(se), rel=1e-12)
        p_cons = power_consumption(spec, cfg.component_catalog(), 0.05).total
        assert row.ee_bps_hz_per_w == pytest.approx(np.mean(se) / p_cons, rel=1e-12)
        assert row.se_per_subcarrier == pytest.approx(row.se_bps_hz / 8)

    def test_deterministic_bytes(self, tmp_path):
        cfg = small()
        a = emit_results(run_sweep(cfg), tmp_path / "a.csv")
        b = emit_results(run_sweep(cfg), tmp_path / "b.csv")
        assert a.read_bytes() == b.read_bytes()

    def test_parallel_matches_serial(self):
        cfg = small(architectures=("TH", "HP"))
        assert run_sweep(cfg).rows == run_sweep(cfg, n_jobs=2).rows

    def test_fd_dominates_at_equal_transmit_power(self):
        # active shifters amplify, so equal input power is not an equal budget;
        # zero every loss to compare architectures at the same radiated power
        lossless = {"ps_loss_active": 0.0, "two_way_divider_loss": 0.0}
        res = run_sweep(small(catalog=lossless))
        for r in res.rows:
            assert r.loss_db == 0.0
            assert res.row("FD", r.p_in_w).se_bps_hz >= r.se_bps_hz - 1e-9

    def test_seed_isolation_across_architecture_lists(self):
        full = run_sweep(small())
        part = run_sweep(small(architectures=("HP", "TH")))
        for r in part.rows:
            assert r == full.row(r.arch, r.p_in_w)

    def test_trial_channel_independent_of_architectures(self):
        a = trial_channel(small(), 1).per_subcarrier
        b = trial_channel(small(architectures=("DO",)), 1).per_subcarrier
        assert a.tobytes() == b.tobytes()
        assert trial_rng(7, 1).random() == np.random.default_rng([7, 1]).random()

    def test_monotone_in_input_power(self):
        res = run_sweep(small(n_trials=2))
        for arch in res.samples:
            se = res.samples[arch]  # (grid, trial), same channels at each grid point
            assert np.all(np.diff(se, axis=0) >= -1e-9)

    def test_rows_sorted_and_complete(self):
        res = run_sweep(small())
        keys = [(r.arch, r.p_in_w) for r in res.rows]
        assert keys == sorted(keys)
        assert len(keys) == 7 * 5

    def test_loss_and_power_columns(self):
        cfg = small(architectures=("TH",), input_power_w=(0.1,))
        row = run_sweep(cfg).rows[0]
        spec = cfg.architecture_spec("TH")
        loss = component_loss(spec, cfg.component_catalog())
        assert row.loss_db == pytest.approx(-1.7)
        p_tx = transmit_power_from_input(0.1, loss)
        assert row.p_cons_w == pytest.approx(
            power_consumption(spec, cfg.component_catalog(), p_tx).total)


class TestEmit:
    @pytest.fixture(scope="class")
    @classmethod
    def result(cls):
        return run_sweep(small(architectures=("TH", "FD"), input_power_w=(0.01, 0.1), n_trials=2))

    def test_csv_header_and_roundtrip(self, result, tmp_path):
        path = emit_results(result, tmp_path / "r.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(CSV_FIELDS)
        assert len(lines) == 5
        back = read_results(path)
        for rec, row in zip(back, result.rows):
            assert rec["se_bps_hz"] == row.se_bps_hz  # exact: floats written with repr
            assert rec["arch"] == row.arch and rec["seed"] == row.seed

    def test_single_row_csv(self, tmp_path):
        res = run_sweep(small(architectures=("FD",), input_power_w=(0.02,), n_trials=1))
        lines = emit_results(res, tmp_path / "one.csv").read_text().splitlines()
        assert len(lines) == 2

    def test_json_lines(self, result, tmp_path):
        path = emit_results(result, tmp_path / "r.jsonl", format="json-lines", include_stderr=True)
        recs = [json.loads(line) for line in path.read_text().splitlines()]
        assert len(recs) == 4
        assert set(recs[0]) == set(CSV_FIELDS) | {"se_stderr", "ee_stderr"}
        assert read_results(path, "json-lines") == recs

    def test_unknown_format(self, result, tmp_path):
        with pytest.raises(ValueError):
            emit_results(result, tmp_path / "x", format="xml")

    def test_unwritable(self, result, tmp_path):
        with pytest.raises(OSError):
            emit_results(result, tmp_path / "missing" / "r.csv")


class TestConfig:
    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.n_subcarriers == 128 and cfg.n_rad == 64
        assert cfg.resolved_noise_var() == pytest.approx(1 / 12800)
        assert cfg.input_power_w[0] == pytest.approx(0.01) and cfg.input_power_w[-1] == pytest.approx(0.1)
        g = cfg.geometry()
        assert (g.n_x, g.n_y) == (16, 4)

    @pytest.mark.parametrize("tree,path", [
        ({"n_subcarriers": 0}, "n_subcarriers"),
        ({"architectures": ["TH", "ZZ"]}, "architectures[1]"),
        ({"input_power_w": [0.1, -1.0]}, "input_power_w[1]"),
        ({"dma": {"attenuation": -1}}, "dma.attenuation"),
        ({"bogus": 1}, "bogus"),
        ({"power_mode": "XYZ"}, "power_mode"),
        ({"catalog": {"nope": 1}}, "catalog"),
    ])
    def test_errors_name_the_field(self, tree, path):
        with pytest.raises(ConfigError) as info:
            config_from_mapping(tree)
        assert info.value.path == path
        assert str(info.value).startswith(path)

    def test_toml_dotted_keys(self, tmp_path):
        p = tmp_path / "c.toml"
        p.write_text('n_subcarriers = 16\ndma.m = 1\ndma.feeds = 4\n'
                     'catalog.phase_shifter_kind = "passive"\narchitectures = ["TH", "FD"]\n')
        cfg = load_config(p)
        assert (cfg.n_subcarriers, cfg.dma_m, cfg.dma_feeds) == (16, 1, 4)
        assert cfg.component_catalog().phase_shifter_kind == "passive"
        assert cfg.architectures == ("TH", "FD")

    def test_missing_and_malformed(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.toml")
        bad = tmp_path / "bad.toml"
        bad.write_text("n_rx = = 3")
        with pytest.raises(ConfigError):
            load_config(bad)

    def test_explicit_noise(self):
        assert small(noise_var=0.25).resolved_noise_var() == 0.25


def write_config(tmp_path, **extra):
    lines = [f"{k} = {json.dumps(v)}" for k, v in {**SMALL, **extra}.items()]
    p = tmp_path / "cfg.toml"
    p.write_text("\n".join(lines) + "\n")
    return p


class TestCli:
    def test_success(self, tmp_path):
        out = tmp_path / "out.csv"
        rc = cli.main(["--config", str(write_config(tmp_path)), "--out", str(out),
                       "--arch", "TH,FD", "--trials", "1"])
        assert rc == 0
        recs = read_results(out)
        assert {r["arch"] for r in recs} == {"TH", "FD"}
        assert all(r["n_trials"] == 1 for r in recs)

    def test_config_error_exit_code(self, tmp_path, capsys):
        p = tmp_path / "bad.toml"
        p.write_text("n_rx = 0\n")
        assert cli.main(["--config", str(p), "--out", str(tmp_path / "o.csv")]) == 2
        assert "n_rx" in capsys.readouterr().err

    def test_unwritable_output(self, tmp_path):
        rc = cli.main(["--config", str(write_config(tmp_path)), "--out",
                       str(tmp_path / "no" / "o.csv"), "--arch", "FD", "--trials", "1"])
        assert rc == 1

    def test_env_overrides_and_flag_precedence(self, tmp_path, monkeypatch):
        cfg = write_config(tmp_path)
        monkeypatch.setenv("TRIHYBRID_SEED", "11")
        monkeypatch.setenv("TRIHYBRID_TRIALS", "2")
        out = tmp_path / "o.csv"
        assert cli.main(["--config", str(cfg), "--out", str(out), "--arch", "FD"]) == 0
        recs = read_results(out)
        assert recs[0]["seed"] == 11 and recs[0]["n_trials"] == 2
        assert cli.main(["--config", str(cfg), "--out", str(out), "--arch", "FD",
                         "--seed", "3"]) == 0
        assert read_results(out)[0]["seed"] == 3

    def test_bad_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TRIHYBRID_TRIALS", "many")
        rc = cli.main(["--config", str(write_config(tmp_path)), "--out", str(tmp_path / "o.csv")])
        assert rc == 2

    def test_power_mode_flag(self, tmp_path):
        out = tmp_path / "o.jsonl"
        rc = cli.main(["--config", str(write_config(tmp_path)), "--out", str(out),
                       "--arch", "TH", "--trials", "1", "--power-mode", "aip",
                       "--format", "json-lines"])
        assert rc == 0 and all(math.isfinite(r["se_bps_hz"]) for r in read_results(out, "json-lines"))
