import numpy as np
import pytest

from supcast.cli import (
    CSV_COLUMNS,
    Config,
    ConfigError,
    build_parser,
    cmd_run,
    main,
    parse_config,
)


def parse_run(argv):
    return parse_config(build_parser().parse_args(["run", *argv]))


class TestParseConfig:
    def test_defaults_match_reference_setup(self):
        cfg = parse_run(["--synthetic", "moving-pattern"])
        assert cfg.beta == 0.5
        assert cfg.gop == 4
        assert cfg.chunks_per_side == 8
        assert cfg.eta == 2.0
        assert cfg.width == 352 and cfg.height == 288
        assert cfg.users_per_zone == 5
        assert cfg.near_radius == (100.0, 500.0)
        assert cfg.far_radius == (500.0, 900.0)
        assert cfg.p_chunk == 1.0

    def test_beta_zero_rejected(self):
        with pytest.raises(ConfigError, match="beta"):
            parse_run(["--synthetic", "moving-pattern", "--beta", "0"])

    def test_beta_override(self):
        cfg = parse_run(["--synthetic", "moving-pattern", "--beta", "0.25"])
        assert cfg.beta == 0.25

    def test_source_required(self):
        with pytest.raises(ConfigError, match="source"):
            parse_run([])

    def test_config_file_and_flag_precedence(self, tmp_path):
        cfile = tmp_path / "exp.cfg"
        cfile.write_text("synthetic=moving-pattern\nbeta=0.25\nsnr=5,10\n# comment\n")
        cfg = parse_run(["--config", str(cfile)])
        assert cfg.beta == 0.25 and cfg.snr == (5.0, 10.0)
        cfg2 = parse_run(["--config", str(cfile), "--beta", "0.75"])
        assert cfg2.beta == 0.75  # flag wins over file

    def test_unknown_config_key_rejected(self, tmp_path):
        cfile = tmp_path / "bad.cfg"
        cfile.write_text("bandwidth=12\n")
        with pytest.raises(ConfigError, match="bandwidth"):
            parse_run(["--config", str(cfile)])

    def test_flag_source_overrides_file_source(self, tmp_path):
        cfile = tmp_path / "exp.cfg"
        cfile.write_text("synthetic=moving-pattern\n")
        cfg = parse_run(["--config", str(cfile), "--input", "clip.yuv"])
        assert cfg.input == "clip.yuv" and cfg.synthetic is None

    def test_indivisible_grid_rejected(self):
        with pytest.raises(ConfigError, match="divisible"):
            parse_run(["--synthetic", "moving-pattern", "--width", "100"])

    def test_unknown_scheme_rejected(self):
        with pytest.raises(ConfigError, match="scheme"):
            parse_run(["--synthetic", "moving-pattern", "--schemes", "betacast"])


def fast_args(tmp_path, extra=()):
    return [
        "run",
        "--synthetic", "moving-pattern",
        "--width", "64", "--height", "64",
        "--gop", "2", "--chunks-per-side", "4",
        "--snr", "10,20",
        "--schemes", "supcast_bl,softcast",
        "--seeds", "0",
        "--out", str(tmp_path / "out.csv"),
        *extra,
    ]


class TestCmdRun:
    def test_row_count_and_header(self, tmp_path):
        rc = main(fast_args(tmp_path))
        assert rc == 0
        lines = (tmp_path / "out.csv").read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + 2 * 2 * 1 * 10

    def test_rerun_is_byte_identical(self, tmp_path):
        main(fast_args(tmp_path))
        first = (tmp_path / "out.csv").read_bytes()
        main(fast_args(tmp_path))
        assert (tmp_path / "out.csv").read_bytes() == first

    def test_master_seed_changes_output(self, tmp_path):
        main(fast_args(tmp_path))
        first = (tmp_path / "out.csv").read_bytes()
        main(fast_args(tmp_path, extra=["--master-seed", "9"]))
        assert (tmp_path / "out.csv").read_bytes() != first

    def test_lf_line_endings(self, tmp_path):
        main(fast_args(tmp_path))
        raw = (tmp_path / "out.csv").read_bytes()
        assert b"\r" not in raw and raw.endswith(b"\n")

    def test_clamp_flag_accepted(self, tmp_path):
        rc = main(fast_args(tmp_path, extra=["--clamp-pixels"]))
        assert rc == 0

    def test_missing_input_file_is_runtime_error(self, tmp_path, capsys):
        rc = main(
            [
                "run", "--input", str(tmp_path / "nope.yuv"),
                "--out", str(tmp_path / "o.csv"),
            ]
        )
        assert rc == 1
        assert "not found" in capsys.readouterr().err

    def test_usage_error_exit_code(self, tmp_path, capsys):
        rc = main(fast_args(tmp_path, extra=["--beta", "0"]))
        assert rc == 2
        assert "usage error" in capsys.readouterr().err

    def test_argparse_rejects_unknown_flag_with_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--frobnicate"])
        assert exc.value.code == 2

    def test_raw_input_end_to_end(self, tmp_path):
        rng = np.random.default_rng(0)
        clip = rng.integers(0, 256, size=2 * 64 * 64, dtype=np.uint8).tobytes()
        src = tmp_path / "clip.yuv"
        src.write_bytes(clip)
        rc = main(
            [
                "run", "--input", str(src), "--width", "64", "--height", "64",
                "--gop", "2", "--chunks-per-side", "4", "--snr", "15",
                "--schemes", "supcast_bl", "--out", str(tmp_path / "o.csv"),
            ]
        )
        assert rc == 0
        assert (tmp_path / "o.csv").exists()

    def test_scheme_gap_at_high_snr(self, tmp_path):
        # comparison rerun: paired seeds, 25 dB, CIF moving pattern
        out = tmp_path / "gap.csv"
        rc = main(
            [
                "run", "--synthetic", "moving-pattern", "--snr", "25",
                "--schemes", "supcast_bl,softcast", "--seeds", "0,1,2,3",
                "--out", str(out),
            ]
        )
        assert rc == 0
        rows = out.read_text().splitlines()[1:]
        by_scheme = {"supcast_bl": [], "softcast": []}
        for line in rows:
            parts = line.split(",")
            by_scheme[parts[0]].append(float(parts[7]))
        gap = np.mean(by_scheme["supcast_bl"]) - np.mean(by_scheme["softcast"])
        assert gap >= 1.0


class TestCmdVerify:
    def test_fast_suites_pass(self, capsys):
        rc = main(["verify", "matching", "power", "--fast"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "PASS" in out and "FAIL" not in out

    def test_unknown_suite_rejected(self):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "sorcery"])
        assert exc.value.code == 2
