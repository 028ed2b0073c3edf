"""Command-line interface tests, driven through main(argv)."""

import numpy as np
import pytest

from fftpipe.cli import EXIT_OK, EXIT_USAGE, main
from fftpipe.fixedpoint import FixedFormat
from fftpipe.frames import read_frames, write_frames, FrameSet
from fftpipe.metrics import rademacher_frames, sqnr_frames_db

Q11 = FixedFormat(12, 11)


def _write_impulse(path, amplitude=1024):
    rows = [f"{amplitude} 0"] + ["0 0"] * 127
    path.write_text("# N=128 format=Q1.11 order=natural\n" + "\n".join(rows) + "\n")


# ---------------------------------------------------------------------------
# transform


def test_transform_impulse(tmp_path, capsys):
    src = tmp_path / "in.txt"
    dst = tmp_path / "out.txt"
    _write_impulse(src)
    assert main(["transform", "--in", str(src), "--out", str(dst)]) == EXIT_OK
    stdout = capsys.readouterr().out
    assert "frames=1" in stdout
    assert "format=Q1.11" in stdout
    assert "throughput_samples_per_cycle=4.0" in stdout

    lines = dst.read_text().splitlines()
    assert lines[0] == "# N=128 format=Q1.11 order=bitrev"
    # impulse spreads flat: 1024 halved once per stage lands on raw 8
    assert lines[1:] == ["8 0"] * 128


def test_transform_deterministic_bytes(tmp_path, capsys):
    src = tmp_path / "in.txt"
    rng = np.random.default_rng(0)
    frames = FrameSet(128, Q11, "natural",
                      rng.integers(-1024, 1024, (3, 128)),
                      rng.integers(-1024, 1024, (3, 128)))
    write_frames(src, frames)
    out1, out2 = tmp_path / "a.txt", tmp_path / "b.txt"
    assert main(["transform", "--in", str(src), "--out", str(out1)]) == EXIT_OK
    assert main(["transform", "--in", str(src), "--out", str(out2)]) == EXIT_OK
    capsys.readouterr()
    assert out1.read_bytes() == out2.read_bytes()


def test_transform_natural_order_output(tmp_path, capsys):
    src, dst = tmp_path / "in.txt", tmp_path / "out.txt"
    _write_impulse(src)
    rc = main(["transform", "--in", str(src), "--out", str(dst),
               "--order", "natural"])
    capsys.readouterr()
    assert rc == EXIT_OK
    out = read_frames(dst)
    assert out.order == "natural"
    assert out.re[0].tolist() == [8] * 128


def test_transform_float_reference_reports_sqnr(tmp_path, capsys):
    src = tmp_path / "in.txt"
    ref = tmp_path / "ref.txt"
    re, im = rademacher_frames(4, Q11, seed=9)
    write_frames(src, FrameSet(128, Q11, "natural", re, im))
    rc = main(["transform", "--in", str(src), "--out", str(ref), "--float"])
    assert rc == EXIT_OK
    stdout = capsys.readouterr().out
    line = next(ln for ln in stdout.splitlines() if ln.startswith("sqnr_db="))
    got = float(line.partition("=")[2])
    want = float(np.mean(sqnr_frames_db(re, im, Q11)))
    assert abs(got - want) < 0.01
    assert read_frames(ref).fmt is None  # float reference file


def test_transform_parse_error_exits_usage(tmp_path, capsys):
    src = tmp_path / "bad.txt"
    src.write_text("# N=128 format=Q1.11\n0 0\n9999 0\n")
    rc = main(["transform", "--in", str(src), "--out", str(tmp_path / "o.txt")])
    assert rc == EXIT_USAGE
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "line 3" in err


def test_missing_file_exits_usage(tmp_path, capsys):
    rc = main(["transform", "--in", str(tmp_path / "nope.txt"),
               "--out", str(tmp_path / "o.txt")])
    capsys.readouterr()
    assert rc == EXIT_USAGE


def test_unknown_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(["frobnicate"])
    capsys.readouterr()
    assert exc_info.value.code == EXIT_USAGE


# ---------------------------------------------------------------------------
# sqnr


def test_sqnr_subcommand(capsys):
    assert main(["sqnr", "--frames", "20", "--seed", "5"]) == EXIT_OK
    first = capsys.readouterr().out
    assert "mean" in first and "dB" in first
    assert "num_frames=20" in first
    assert main(["sqnr", "--frames", "20", "--seed", "5"]) == EXIT_OK
    assert capsys.readouterr().out == first  # same seed, same digits


def test_sqnr_sweep(capsys):
    assert main(["sqnr", "--frames", "5", "--sweep"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "at 10-bit" in out and "at 16-bit" in out
    steps = [ln for ln in out.splitlines() if ln.startswith("step ")]
    assert len(steps) == 6
    for ln in steps:
        gain = float(ln.split("+")[1].split()[0])
        assert 4.5 < gain < 7.5  # word-length law visible even at 5 frames


# ---------------------------------------------------------------------------
# report


def test_report_contents(capsys):
    assert main(["report"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "processing elements: 28" in out
    assert ("totals: processing_elements=28 add_sub=64 constant_add_sub=34 "
            "multipliers=16 delay_elements=712") in out
    assert ("stage 4 (base 16): path1: w4-trivial {0,4} | path2: w16-shared "
            "{1,5} | path3: w8-csd {2,6} | path4: w16-shared {3,7}") in out
    assert "# out == 473 * x" in out
    assert "# out == 181 * x" in out
    assert "norm_power_delta" in out


# ---------------------------------------------------------------------------
# verify


def test_verify_all_checks_pass(capsys):
    assert main(["verify", "--frames", "6", "--seed", "1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "11/11 checks passed" in out
    assert out.count("PASS") == 11
    assert "FAIL" not in out
