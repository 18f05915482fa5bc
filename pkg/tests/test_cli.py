import math

import numpy as np
import pytest

from mirror_dce.circuit import CircuitParams
from mirror_dce.cli import (
    ConfigError,
    RunConfig,
    _resolve_trajectory,
    dispatch,
    main,
    parse_config,
)
from mirror_dce.constants import C_LIGHT
from mirror_dce.experiments import read_spectrum_datasets
from mirror_dce.trajectories import TrajectoryKind

TWO_PI = 2.0 * math.pi


class TestParseConfig:
    def test_empty_circuit_block_keeps_reference_defaults(self):
        cfg = parse_config("[circuit]\n")
        assert cfg.circuit == CircuitParams()
        assert cfg.circuit.I_c == 1.25e-6
        assert cfg.circuit.C_J == 90e-15
        assert cfg.circuit.Z0 == 55.0
        assert cfg.circuit.v == pytest.approx(0.4 * C_LIGHT)
        assert cfg.circuit.omega_s == pytest.approx(TWO_PI * 37.3e9)

    def test_full_document(self):
        cfg = parse_config(
            """
[run]
command = spectrum

[trajectory]
kind = sa
abar_target = 20e18
fd = 14.6e9

[circuit]
ic = 1.0e-6
ej0_ratio = 0.15

[physics]
t = 0.025
nmax = 2

[output]
path = out.csv
format = split
"""
        )
        assert cfg.command == "spectrum"
        assert cfg.kind is TrajectoryKind.SA
        assert cfg.abar_target == 20e18
        assert cfg.omega_d == pytest.approx(TWO_PI * 14.6e9)
        assert cfg.circuit.I_c == 1.0e-6
        assert cfg.circuit.EJ0_ratio == 0.15
        assert cfg.circuit.C_J == 90e-15  # untouched default
        assert cfg.temperature == 0.025
        assert cfg.n_max == 2
        assert cfg.out_path == "out.csv"
        assert cfg.out_format == "split"

    def test_both_acceleration_forms_rejected(self):
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config("[trajectory]\na = 1e18\nabar_target = 2e18\n")

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match=r"unknown section \[detector\]"):
            parse_config("[detector]\nkind = x\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match=r"unknown key \[circuit\] lc"):
            parse_config("[circuit]\nlc = 3\n")

    def test_bad_number_identified(self):
        with pytest.raises(ConfigError, match=r"\[trajectory\] fd"):
            parse_config("[trajectory]\nfd = fast\n")

    def test_nonpositive_value_rejected(self):
        with pytest.raises(ConfigError, match="positive"):
            parse_config("[circuit]\nic = -2e-6\n")

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigError, match="sm|sa|aua"):
            parse_config("[trajectory]\nkind = circular\n")

    def test_aua_target_resolves_to_parameter(self):
        cfg = parse_config(
            "[trajectory]\nkind = aua\nabar_target = 20e18\nfd = 14.6e9\n"
        )
        p = _resolve_trajectory(cfg)
        assert p.A == 20e18
        assert p.kind is TrajectoryKind.AUA


class TestDispatchValidation:
    def test_missing_kind(self):
        cfg = RunConfig(command="traj", omega_d=1e11, A=1e18, out_path="x.csv")
        with pytest.raises(ConfigError, match="kind"):
            dispatch(cfg)

    def test_missing_acceleration(self):
        cfg = RunConfig(
            command="traj", kind=TrajectoryKind.SA, omega_d=1e11, out_path="x.csv"
        )
        with pytest.raises(ConfigError, match="exactly one"):
            dispatch(cfg)

    def test_unknown_figure(self):
        cfg = RunConfig(command="reproduce", figure="fig99")
        with pytest.raises(ConfigError, match="unknown figure"):
            dispatch(cfg)


class TestCommands:
    def test_traj_writes_worldline_csv(self, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        rc = main(
            [
                "traj", "--kind", "aua", "--abar", "20e18", "--fd", "14.6e9",
                "--points", "64", "--out", str(out),
            ]
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "# mirror-dce v1"
        header_idx = next(i for i, ln in enumerate(lines) if not ln.startswith("#"))
        assert lines[header_idx] == "t,tau,z,alpha_dir"
        assert len(lines) == header_idx + 1 + 64

    def test_drive_writes_coefficients(self, tmp_path):
        out = tmp_path / "drive.csv"
        rc = main(
            [
                "drive", "--kind", "sm", "--abar", "9.054e17", "--fd", "18e9",
                "--nmax", "3", "--out", str(out),
            ]
        )
        assert rc == 0
        rows = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
        assert rows[0] == "n,a_n,b_n,magnitude,trajectory"
        assert len(rows) == 4

    def test_flux_two_column_waveform(self, tmp_path):
        out = tmp_path / "flux.csv"
        rc = main(
            [
                "flux", "--kind", "sm", "--abar", "9.054e17", "--fd", "18e9",
                "--points", "32", "--periods", "2", "--out", str(out),
            ]
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t,phi_ext"
        assert len(lines) == 1 + 64

    def test_spectrum_with_no_harmonics_is_dark(self, tmp_path):
        out = tmp_path / "dark.csv"
        rc = main(
            [
                "spectrum", "--kind", "sm", "--A", "1e15", "--fd", "18e9",
                "--nmax", "0", "--T", "0", "--points", "16", "--out", str(out),
            ]
        )
        assert rc == 0
        (ds,) = read_spectrum_datasets(out)
        np.testing.assert_array_equal(ds.n_out, 0.0)

    def test_spectrum_matches_direct_evaluation(self, tmp_path, reference_circuit):
        out = tmp_path / "spec.csv"
        rc = main(
            [
                "spectrum", "--kind", "sm", "--abar", "9.054e17", "--fd", "18e9",
                "--T", "0.025", "--points", "32", "--out", str(out),
            ]
        )
        assert rc == 0
        (ds,) = read_spectrum_datasets(out)
        assert ds.temperature == 0.025
        assert len(ds.x) == 32
        assert np.all(ds.n_out > 0.0)  # thermal floor everywhere

    def test_sweep_over_abar(self, tmp_path):
        cfg = tmp_path / "bias.ini"
        cfg.write_text("[circuit]\nej0_ratio = 0.1\n")
        out = tmp_path / "sweep.csv"
        rc = main(
            [
                "sweep", "--config", str(cfg), "--kind", "aua", "--axis", "abar",
                "--min", "5e18", "--max", "3e19", "--points", "7",
                "--fd", "14.6e9", "--w", "7.3e9", "--out", str(out),
            ]
        )
        assert rc == 0
        (ds,) = read_spectrum_datasets(out)
        assert len(ds.x) == 7
        assert np.all(np.diff(ds.n_out) > 0.0)  # monotone in abar

    def test_params_prints_resolved_table(self, capsys):
        rc = main(["params", "--kind", "sa", "--abar", "20e18"])
        assert rc == 0
        table = capsys.readouterr().out
        assert "omega_d/2pi [GHz]" in table
        assert "14.6" in table
        assert "E_J0/E_J" in table
        alpha_row = next(
            ln for ln in table.splitlines() if ln.startswith("A [m/s^2]")
        )
        alpha = float(alpha_row.split()[-1])
        assert alpha == pytest.approx(13.725e18, rel=0.01)

    def test_reproduce_fig2(self, tmp_path, capsys):
        rc = main(["reproduce", "fig2", "--out", str(tmp_path)])
        assert rc == 0
        printed = capsys.readouterr().out.strip().splitlines()
        assert len(printed) == 1
        text = (tmp_path / "fig2_fourier.csv").read_text()
        assert "sa" in text and "aua" in text

    def test_identical_configs_give_identical_bytes(self, tmp_path):
        args = [
            "spectrum", "--kind", "sm", "--abar", "9.054e17", "--fd", "18e9",
            "--T", "0.025", "--points", "24",
        ]
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.ini"
        cfg.write_text(
            "[trajectory]\nkind = sa\nabar_target = 20e18\nfd = 14.6e9\n"
            "[circuit]\nej0_ratio = 0.1002\n"
            "[physics]\nt = 0\nnmax = 3\n"
        )
        out = tmp_path / "out.csv"
        rc = main(
            [
                "spectrum", "--config", str(cfg), "--T", "0.05",
                "--points", "12", "--out", str(out),
            ]
        )
        assert rc == 0
        (ds,) = read_spectrum_datasets(out)
        assert ds.temperature == 0.05  # flag wins over config

    def test_error_exit_code_and_message(self, tmp_path, capsys):
        rc = main(["spectrum", "--kind", "sm", "--out", str(tmp_path / "x.csv")])
        assert rc == 1
        assert "mirror-dce: error" in capsys.readouterr().err

    def test_no_command_prints_help(self, capsys):
        assert main([]) == 2
        assert "usage" in capsys.readouterr().out.lower()
