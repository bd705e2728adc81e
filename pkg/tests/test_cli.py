"""End-to-end CLI tests: exit codes, CSV schemas, config layering, units."""

import csv
import math

import pytest

from stcmmimo.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, main
from stcmmimo.coupling import DipoleArraySpec, coupling_matrix, mutual_impedance, self_impedance


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def run(argv, tmp_path):
    return main([*argv, "--out-dir", str(tmp_path)])


class TestCouplingMatrixCommand:
    def test_two_element_matrix_matches_library(self, tmp_path, capsys):
        rc = run(["coupling-matrix", "--elements", "2", "--spacing", "0.5"], tmp_path)
        assert rc == EXIT_OK
        rows = read_csv(tmp_path / "coupling_matrix.csv")
        assert rows[0] == ["m", "n", "re", "im"]
        assert len(rows) == 5
        expected = coupling_matrix(DipoleArraySpec(2, 0.5)).entries
        for row in rows[1:]:
            m, n = int(row[0]), int(row[1])
            assert complex(float(row[2]), float(row[3])) == pytest.approx(
                expected[m, n], abs=1e-12
            )
        assert "condition estimate" in capsys.readouterr().out

    def test_decoupled_matrix_is_near_identity(self, tmp_path):
        rc = run(["coupling-matrix", "--elements", "4", "--spacing", "1000"], tmp_path)
        assert rc == EXIT_OK
        for row in read_csv(tmp_path / "coupling_matrix.csv")[1:]:
            m, n = int(row[0]), int(row[1])
            value = complex(float(row[2]), float(row[3]))
            assert abs(value - (1.0 if m == n else 0.0)) < 1e-2

    def test_odd_element_count_exits_2(self, tmp_path, capsys):
        rc = run(["coupling-matrix", "--elements", "3", "--spacing", "0.5"], tmp_path)
        assert rc == EXIT_VALIDATION
        assert "even" in capsys.readouterr().err

    def test_singular_load_exits_3(self, tmp_path, capsys):
        # load chosen so (Z + Z_L I) has a zero eigenvalue for M=2, d=0.5
        z_l = -(self_impedance() + mutual_impedance(0.5))
        arg = f"{z_l.real!r}{z_l.imag:+}j".replace("+-", "-")
        rc = run(
            ["coupling-matrix", "--elements", "2", "--spacing", "0.5", f"--z-l={arg}"],
            tmp_path,
        )
        assert rc == EXIT_NUMERICAL
        assert "singular" in capsys.readouterr().err

    def test_meter_units_convert_at_default_2ghz(self, tmp_path):
        wavelength_m = 299792458.0 / 2e9
        rc = run(
            [
                "coupling-matrix", "--elements", "2",
                "--spacing", repr(0.5 * wavelength_m), "--units", "meters",
            ],
            tmp_path,
        )
        assert rc == EXIT_OK
        rows = read_csv(tmp_path / "coupling_matrix.csv")
        expected = coupling_matrix(DipoleArraySpec(2, 0.5)).entries
        got = complex(float(rows[1][2]), float(rows[1][3]))
        assert got == pytest.approx(expected[0, 0], abs=1e-9)

    def test_missing_elements_exits_2(self, tmp_path):
        rc = run(["coupling-matrix", "--spacing", "0.5"], tmp_path)
        assert rc == EXIT_VALIDATION


class TestBerSweepCommand:
    def test_smoke_run_schema(self, tmp_path):
        rc = run(
            [
                "ber-sweep", "--elements", "4", "--spacing", "0.5",
                "--snr-list", "0,10", "--trials", "1", "--plot-script",
            ],
            tmp_path,
        )
        assert rc == EXIT_OK
        rows = read_csv(tmp_path / "sweep.csv")
        assert rows[0] == ["sweep_value", "snr_db", "ber", "ci_low", "ci_high"]
        assert len(rows) == 3
        assert (tmp_path / "ber_snr.csv").is_file()
        assert (tmp_path / "plot_sweep.gp").is_file()

    def test_spacing_sweep_writes_per_point_files(self, tmp_path):
        rc = run(
            [
                "ber-sweep", "--sweep", "spacing", "--elements", "4",
                "--spacing", "0.5", "--spacing-list", "0.2,0.6",
                "--snr-list", "0", "--trials", "50",
            ],
            tmp_path,
        )
        assert rc == EXIT_OK
        assert (tmp_path / "ber_spacing_0.2.csv").is_file()
        assert (tmp_path / "ber_spacing_0.6.csv").is_file()
        assert len(read_csv(tmp_path / "sweep.csv")) == 3

    def test_elements_sweep_requires_geometry(self, tmp_path):
        rc = run(
            ["ber-sweep", "--sweep", "elements", "--elements", "4", "--m-list", "4,8"],
            tmp_path,
        )
        assert rc == EXIT_VALIDATION

    def test_elements_sweep_with_aperture(self, tmp_path):
        rc = run(
            [
                "ber-sweep", "--sweep", "elements", "--elements", "4",
                "--m-list", "4,8", "--total-length", "4",
                "--snr-list", "0", "--trials", "100",
            ],
            tmp_path,
        )
        assert rc == EXIT_OK
        rows = read_csv(tmp_path / "sweep.csv")
        assert [r[0] for r in rows[1:]] == ["4.0", "8.0"]

    def test_decoupling_limit_matches_coupling_off(self, tmp_path):
        args = [
            "ber-sweep", "--elements", "4", "--spacing", "1000",
            "--snr-list", "0", "--trials", "4000",
        ]
        assert run(args, tmp_path) == EXIT_OK
        on = float(read_csv(tmp_path / "sweep.csv")[1][2])
        assert run([*args, "--no-coupling"], tmp_path) == EXIT_OK
        off = float(read_csv(tmp_path / "sweep.csv")[1][2])
        bits = 4000 * 4
        se = math.sqrt(on * (1 - on) / bits + off * (1 - off) / bits)
        assert abs(on - off) <= 3 * se


class TestOptimizeCommand:
    def test_degenerate_interval_echoes_candidate(self, tmp_path, capsys):
        rc = run(
            [
                "optimize", "--interval", "80,82", "--step", "50",
                "--total-length", "30", "--trials", "50",
            ],
            tmp_path,
        )
        assert rc == EXIT_OK
        out = capsys.readouterr().out
        assert "optimal antenna count: 80" in out
        rows = read_csv(tmp_path / "optimize_trace.csv")
        assert rows[0] == ["iteration", "candidate_m", "spacing_wavelengths", "avg_ber"]
        # trace argmin equals the printed optimum
        data = [(float(r[3]), int(r[1])) for r in rows[1:]]
        assert min(data)[1] == 80

    def test_missing_interval_exits_2(self, tmp_path):
        rc = run(["optimize", "--step", "50", "--total-length", "30"], tmp_path)
        assert rc == EXIT_VALIDATION


class TestSelectionCompareCommand:
    def test_styles_statistically_indistinguishable(self, tmp_path):
        rc = run(
            [
                "selection-compare", "--elements", "8", "--spacing", "0.5",
                "--snr-list", "0", "--trials", "4000", "--seed", "2",
            ],
            tmp_path,
        )
        assert rc == EXIT_OK
        rows = read_csv(tmp_path / "selection_compare.csv")
        assert rows[0] == [
            "snr_db",
            "ber_style1",
            "ber_style2",
            "ci_low_style1",
            "ci_high_style1",
            "ci_low_style2",
            "ci_high_style2",
        ]
        b1, b2 = float(rows[1][1]), float(rows[1][2])
        bits = 4000 * 4
        se = math.sqrt(b1 * (1 - b1) / bits + b2 * (1 - b2) / bits)
        assert abs(b1 - b2) <= 3 * se


class TestConfigFile:
    def test_file_values_used_and_flags_override(self, tmp_path):
        cfg = tmp_path / "exp.ini"
        cfg.write_text(
            "[array]\nelements = 4\nspacing = 0.5\n"
            "[sim]\nsnr_db = 0\ntrials = 5\nseed = 7\n",
            encoding="utf-8",
        )
        rc = run(["ber-sweep", "--config", str(cfg)], tmp_path)
        assert rc == EXIT_OK
        rows = read_csv(tmp_path / "ber_snr.csv")
        assert int(rows[1][3]) == 5 * 4  # bits_total from file trials

        rc = run(["ber-sweep", "--config", str(cfg), "--trials", "3"], tmp_path)
        assert rc == EXIT_OK
        rows = read_csv(tmp_path / "ber_snr.csv")
        assert int(rows[1][3]) == 3 * 4  # flag overrides file

    def test_missing_config_file_exits_2(self, tmp_path):
        rc = run(["ber-sweep", "--config", str(tmp_path / "nope.ini")], tmp_path)
        assert rc == EXIT_VALIDATION

    def test_out_dir_env_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("STCM_OUT_DIR", str(tmp_path / "envdir"))
        rc = main(
            ["coupling-matrix", "--elements", "2", "--spacing", "0.5"]
        )
        assert rc == EXIT_OK
        assert (tmp_path / "envdir" / "coupling_matrix.csv").is_file()


def test_determinism_across_worker_counts(tmp_path):
    base = [
        "ber-sweep", "--elements", "8", "--spacing", "0.4",
        "--snr-list", "0,5", "--trials", "5000", "--seed", "3",
    ]
    d1 = tmp_path / "w1"
    d2 = tmp_path / "w2"
    assert main([*base, "--workers", "1", "--out-dir", str(d1)]) == EXIT_OK
    assert main([*base, "--workers", "3", "--out-dir", str(d2)]) == EXIT_OK
    assert (d1 / "sweep.csv").read_bytes() == (d2 / "sweep.csv").read_bytes()
