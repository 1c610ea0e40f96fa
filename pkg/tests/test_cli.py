"""CLI subcommands, config parsing, CSV schema (golden file)."""
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from dipolejumps.cli import ConfigError, parse_config

DATA = Path(__file__).parent / "data"


def run_cli(*args, check=True):
    proc = subprocess.run([sys.executable, "-m", "dipolejumps.cli", *args],
                          capture_output=True, text=True)
    if check:
        assert proc.returncode == 0, proc.stderr
    return proc


def write_conf(path, **over):
    base = dict(mode="analytic", omega2=0.01, omega3=0.5, delta2=0.0,
                r_min=0.9, r_max=10.0, r_steps=40, dt_w=114, dt_dj=160)
    base.update(over)
    path.write_text("".join(f"{k} = {v}\n" for k, v in base.items()))
    return path


class TestConfig:
    def test_golden_config_parses(self):
        cfg = parse_config(str(DATA / "golden_sweep.conf"))
        assert cfg.mode == "analytic"
        assert cfg.r_steps == 5

    def test_unknown_key_rejected(self, tmp_path):
        p = write_conf(tmp_path / "c.conf")
        p.write_text(p.read_text() + "bogus = 1\n")
        with pytest.raises(ConfigError):
            parse_config(str(p))

    def test_missing_mode_keys_rejected(self, tmp_path):
        p = write_conf(tmp_path / "c.conf", mode="telegraph-mc")
        with pytest.raises(ConfigError):
            parse_config(str(p))  # total_time/seed missing

    def test_bad_grid_rejected(self, tmp_path):
        p = write_conf(tmp_path / "c.conf", r_min=5.0, r_max=1.0)
        with pytest.raises(ConfigError):
            parse_config(str(p))


class TestSweep:
    def test_golden_file(self, tmp_path):
        # frozen CSV schema: any change to columns or numeric formatting is a
        # deliberate schema bump
        out = tmp_path / "sweep.csv"
        proc = run_cli("sweep", str(DATA / "golden_sweep.conf"), "--out", str(out))
        golden = (DATA / "golden_sweep.csv").read_text()
        assert out.read_text() == golden
        summary = json.loads(proc.stdout)
        assert summary["schema"] == "dipolejumps-sweep-v1"
        assert summary["rows"] == 5

    def test_phase_flip_with_detuning(self, tmp_path):
        # double-jump rate in phase with Re C3 at zero detuning, opposite at
        # delta2 = 0.5 (sign of the correlation; the strict 0.9 bounds are in
        # the acceptance suite)
        out = tmp_path / "s.csv"
        conf = write_conf(tmp_path / "a.conf")
        s0 = json.loads(run_cli("sweep", str(conf), "--out", str(out)).stdout)
        conf2 = write_conf(tmp_path / "b.conf", delta2=0.5)
        s1 = json.loads(run_cli("sweep", str(conf2), "--out", str(out)).stdout)
        assert s0["ndj_rec3_corr"] > 0.5
        assert s1["ndj_rec3_corr"] < -0.5

    def test_n2_tracks_re_c3(self, tmp_path):
        out = tmp_path / "s.csv"
        conf = write_conf(tmp_path / "a.conf")
        s0 = json.loads(run_cli("sweep", str(conf), "--out", str(out)).stdout)
        assert s0["n2_rec3_corr"] > 0.5

    def test_untrusted_flag(self, tmp_path):
        out = tmp_path / "s.csv"
        conf = write_conf(tmp_path / "a.conf", r_min=0.3, r_max=1.0, r_steps=3)
        run_cli("sweep", str(conf), "--out", str(out))
        rows = out.read_text().strip().splitlines()[2:]
        flags = [int(r.split(",")[3]) for r in rows]
        assert flags == [1, 0, 0]  # 0.3 untrusted, 0.65 and 1.0 trusted

    def test_telegraph_mc_columns_consistent(self, tmp_path):
        out = tmp_path / "s.csv"
        conf = write_conf(tmp_path / "a.conf", mode="telegraph-mc",
                          total_time=4e6, seed=1, r_min=1.0, r_max=1.3,
                          r_steps=2)
        run_cli("sweep", str(conf), "--out", str(out), "--jobs", "2")
        # deterministic given the config, and row order independent of jobs
        out1 = tmp_path / "s1.csv"
        run_cli("sweep", str(conf), "--out", str(out1), "--jobs", "1")
        assert out.read_text() == out1.read_text()
        header, *rows = out.read_text().strip().splitlines()[1:]
        cols = header.split(",")
        assert "t1_mc" in cols and "n_dj_mc_err" in cols
        for row in rows:
            vals = dict(zip(cols, row.split(",")))
            t1 = float(vals["t1"])
            t1_mc = float(vals["t1_mc"])
            t1_err = float(vals["t1_mc_err"])
            assert abs(t1_mc - t1) < 4 * t1_err
            up = float(vals["n_dj_up_mc"])
            down = float(vals["n_dj_down_mc"])
            assert up >= 0 and down >= 0

    def test_missing_output_path_fails(self, tmp_path):
        conf = write_conf(tmp_path / "a.conf")
        proc = run_cli("sweep", str(conf), check=False)
        assert proc.returncode == 2

    def test_output_from_config_key(self, tmp_path):
        out = tmp_path / "from_config.csv"
        conf = write_conf(tmp_path / "a.conf", r_steps=3, output=str(out))
        run_cli("sweep", str(conf))
        assert out.exists()


class TestRatesCommand:
    def test_matches_library(self):
        proc = run_cli("rates", "--omega2", "0.01", "--omega3", "0.5",
                       "--re-c3", "0.1")
        data = json.loads(proc.stdout)
        assert data["first_order"]["p12"] == pytest.approx(4.5333333e-4, rel=1e-6)
        assert data["first_order"]["p01"] == pytest.approx(8e-4, rel=1e-9)
        assert data["exact"]["p21"] > 0
        assert data["telegraph"]["t0"] == pytest.approx(1250.0, rel=1e-9)

    def test_bad_params_exit_code(self):
        proc = run_cli("rates", "--omega2", "0.01", "--omega3", "-1",
                       check=False)
        assert proc.returncode == 1
        assert "error" in proc.stderr


class TestCriticalCommand:
    def test_values(self, tmp_path):
        conf = write_conf(tmp_path / "a.conf")
        data = json.loads(run_cli("critical-detunings", str(conf)).stdout)
        assert data["p12"] == pytest.approx(0.12147, abs=5e-5)
        assert data["t1"] == pytest.approx(data["p12"], abs=1e-6)
        assert abs(data["t1"] - data["t2"]) > 1e-3
        assert data["double_jump"] is not None


class TestEigsCommand:
    def test_spectrum_shape(self):
        data = json.loads(run_cli("eigs", "--omega3", "0.5",
                                  "--re-c3", "0.04", "--im-c3", "-0.23").stdout)
        eigs = np.array([complex(re, im) for re, im in data["eigenvalues"]])
        assert len(eigs) == 81
        assert np.sum(np.abs(eigs) < 1e-9) == 4
        assert eigs.real.max() < 1e-9


@pytest.mark.slow
class TestFullMcSmoke:
    def test_single_point_pipeline(self, tmp_path):
        out = tmp_path / "s.csv"
        conf = write_conf(tmp_path / "a.conf", mode="full-mc",
                          total_time=3e5, seed=7, trajectories=1,
                          r_min=5.0, r_max=5.0, r_steps=1)
        run_cli("sweep", str(conf), "--out", str(out))
        header, row = out.read_text().strip().splitlines()[1:]
        vals = dict(zip(header.split(","), row.split(",")))
        # loose 5-sigma consistency on a short run
        assert abs(float(vals["t0_mc"]) - float(vals["t0_cor"])) < \
            5 * float(vals["t0_mc_err"])
        assert float(vals["n1_mc"]) > 0
