"""Frame-file format tests: header parsing, roundtrips, error reporting."""

import numpy as np
import pytest

from fftpipe.fixedpoint import FixedFormat
from fftpipe.frames import (
    ORDER_BITREV,
    ORDER_NATURAL,
    FrameParseError,
    FrameSet,
    format_label,
    frameset_from_complex,
    parse_format_label,
    read_frames,
    write_frames,
)

Q11 = FixedFormat(12, 11)


def test_parse_format_label():
    fmt = parse_format_label("Q1.11")
    assert (fmt.word_length, fmt.frac_bits) == (12, 11)
    fmt = parse_format_label("Q4.8")
    assert (fmt.word_length, fmt.frac_bits) == (12, 8)
    assert parse_format_label("float") is None
    for bad in ("Q0.12", "Q1.11.2", "q1.11", "Q1,11", "int12"):
        with pytest.raises(ValueError):
            parse_format_label(bad)


def test_format_label_roundtrip():
    assert format_label(None) == "float"
    assert parse_format_label(format_label(Q11)) == Q11


def test_fixed_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    re = rng.integers(-2048, 2048, size=(3, 128))
    im = rng.integers(-2048, 2048, size=(3, 128))
    frames = FrameSet(128, Q11, ORDER_NATURAL, re, im)
    path = tmp_path / "a.txt"
    write_frames(path, frames)
    back = read_frames(path)
    assert back.fmt == Q11
    assert back.order == ORDER_NATURAL
    assert back.n_frames == 3
    assert np.array_equal(back.re, re) and np.array_equal(back.im, im)
    assert back.re.dtype == np.int64


def test_float_roundtrip_exact(tmp_path):
    # repr-based writing keeps float64 values bit-exact through the file
    rng = np.random.default_rng(1)
    vals = rng.standard_normal((2, 128)) + 1j * rng.standard_normal((2, 128))
    frames = frameset_from_complex(vals, None, ORDER_BITREV)
    path = tmp_path / "f.txt"
    write_frames(path, frames)
    back = read_frames(path)
    assert back.fmt is None
    assert back.order == ORDER_BITREV
    assert np.array_equal(back.to_complex(), vals)


def test_frameset_from_complex_quantizes():
    frames = frameset_from_complex(np.full((1, 128), 0.5 + 0.25j), Q11)
    assert frames.is_fixed
    assert int(frames.re[0, 0]) == 1024
    assert int(frames.im[0, 0]) == 512
    assert frames.to_complex()[0, 0] == 0.5 + 0.25j


def test_frameset_validation():
    with pytest.raises(ValueError):
        FrameSet(128, Q11, "scrambled", np.zeros((1, 128)), np.zeros((1, 128)))
    with pytest.raises(ValueError):
        FrameSet(128, Q11, ORDER_NATURAL, np.zeros((1, 64)), np.zeros((1, 64)))
    with pytest.raises(ValueError):
        FrameSet(128, Q11, ORDER_NATURAL, np.zeros((1, 128)), np.zeros((2, 128)))


def _write(tmp_path, text):
    path = tmp_path / "in.txt"
    path.write_text(text)
    return path


def test_blank_lines_and_extra_comments_ignored(tmp_path):
    body = "\n".join("0 0" for _ in range(4))
    path = _write(tmp_path,
                  f"# N=4 format=Q1.11 order=natural\n\n# a note\n{body}\n\n")
    frames = read_frames(path)
    assert frames.n_frames == 1
    assert frames.n_points == 4


def test_header_defaults(tmp_path):
    path = _write(tmp_path, "# N=2\n0.5 0.0\n-0.5 1.0\n")
    frames = read_frames(path)
    assert frames.fmt is None
    assert frames.order == ORDER_NATURAL


@pytest.mark.parametrize(
    "text,line_no,needle",
    [
        ("0 0\n", 1, "data before header"),
        ("# format=Q1.11\n0 0\n", 1, "missing N="),
        ("# N=abc\n0 0\n", 1, "bad N value"),
        ("# N=0\n0 0\n", 1, "bad N value"),
        ("# N=4 order=weird\n0 0\n", 1, "order must be one of"),
        ("# N=4 format=Q9\n0 0\n", 1, "unrecognized sample format"),
        ("# N=2 format=Q1.11\n0 0\n1 2 3\n", 3, "pair"),
        ("# N=2 format=Q1.11\n0 0\nx 0\n", 3, "integer raw samples"),
        ("# N=2 format=Q1.11\n0 0\n5000 0\n", 3, "outside"),
        ("# N=2 format=float\n0.5 oops\n", 2, "bad float sample"),
        ("# N=2 format=float\nnan 0\n", 2, "non-finite"),
        ("# N=4 format=Q1.11\n0 0\n0 0\n0 0\n", 4, "not a multiple of N=4"),
    ],
)
def test_parse_errors_carry_line_numbers(tmp_path, text, line_no, needle):
    path = _write(tmp_path, text)
    with pytest.raises(FrameParseError) as exc_info:
        read_frames(path)
    assert exc_info.value.line_no == line_no
    assert needle in str(exc_info.value)
    assert f"line {line_no}:" in str(exc_info.value)


def test_empty_file_errors(tmp_path):
    with pytest.raises(FrameParseError, match="missing header"):
        read_frames(_write(tmp_path, ""))
    with pytest.raises(FrameParseError, match="no sample data"):
        read_frames(_write(tmp_path, "# N=4 format=float\n"))


def test_multi_frame_split(tmp_path):
    body = "\n".join(f"{i} {-i}" for i in range(8))
    path = _write(tmp_path, f"# N=4 format=Q1.11 order=bitrev\n{body}\n")
    frames = read_frames(path)
    assert frames.n_frames == 2
    assert frames.re[1].tolist() == [4, 5, 6, 7]
    assert frames.im[0].tolist() == [0, -1, -2, -3]
