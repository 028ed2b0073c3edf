"""Sample frames and the text frame-file format.

A frame file carries one or more equal-length frames of complex samples:

    # N=128 format=Q1.11 order=natural
    <re> <im>
    ...

Fixed-point files (``format=Qi.f``) store raw two's-complement integers, one
sample per line.  Float files (``format=float``) store decimal values.  Blank
lines and extra ``#`` comment lines are ignored; everything else must be a
pair of numbers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fixedpoint import FixedFormat

ORDER_NATURAL = "natural"
ORDER_BITREV = "bitrev"
ORDERS = (ORDER_NATURAL, ORDER_BITREV)


class FrameParseError(ValueError):
    """Malformed frame file; carries the 1-based offending line number."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


def parse_format_label(label: str) -> FixedFormat | None:
    """"Q1.11" -> FixedFormat(12, 11); "float" -> None."""
    if label == "float":
        return None
    if label.startswith("Q") and label.count(".") == 1:
        int_part, _, frac_part = label[1:].partition(".")
        if int_part.isdigit() and frac_part.isdigit():
            i, f = int(int_part), int(frac_part)
            if i >= 1:
                return FixedFormat(word_length=i + f, frac_bits=f)
    raise ValueError(f"unrecognized sample format {label!r}")


def format_label(fmt: FixedFormat | None) -> str:
    return "float" if fmt is None else fmt.describe()


@dataclass
class FrameSet:
    """Frames as parallel (frames, n_points) component arrays.

    Fixed-point sets hold int64 raw values in `fmt`; float sets (fmt None)
    hold float64 sample values.
    """

    n_points: int
    fmt: FixedFormat | None
    order: str
    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}, got {self.order!r}")
        self.re = np.atleast_2d(self.re)
        self.im = np.atleast_2d(self.im)
        if self.re.shape != self.im.shape:
            raise ValueError("re/im shape mismatch")
        if self.re.ndim != 2 or self.re.shape[1] != self.n_points:
            raise ValueError(
                f"expected (frames, {self.n_points}) arrays, got {self.re.shape}"
            )

    @property
    def n_frames(self) -> int:
        return self.re.shape[0]

    @property
    def is_fixed(self) -> bool:
        return self.fmt is not None

    def to_complex(self) -> np.ndarray:
        """Sample values as complex128, dequantized when fixed-point."""
        if self.fmt is None:
            return self.re.astype(np.float64) + 1j * self.im.astype(np.float64)
        ulp = self.fmt.ulp
        return self.re * ulp + 1j * (self.im * ulp)


def frameset_from_complex(values, fmt: FixedFormat | None,
                          order: str = ORDER_NATURAL) -> FrameSet:
    """Build a FrameSet from complex values, quantizing if fmt is fixed."""
    values = np.atleast_2d(np.asarray(values, dtype=np.complex128))
    if fmt is None:
        return FrameSet(values.shape[1], None, order,
                        values.real.copy(), values.imag.copy())
    from .fixedpoint import quantize_array

    return FrameSet(values.shape[1], fmt, order,
                    quantize_array(values.real, fmt),
                    quantize_array(values.imag, fmt))


def _parse_header(line: str, line_no: int) -> tuple[int, FixedFormat | None, str]:
    fields = {}
    for tok in line[1:].split():
        key, sep, val = tok.partition("=")
        if not sep:
            raise FrameParseError(f"malformed header token {tok!r}", line_no)
        fields[key] = val
    try:
        n_points = int(fields["N"])
    except KeyError:
        raise FrameParseError("header missing N=", line_no) from None
    except ValueError:
        raise FrameParseError(f"bad N value {fields['N']!r}", line_no) from None
    if n_points < 1:
        raise FrameParseError(f"bad N value {n_points}", line_no)
    try:
        fmt = parse_format_label(fields.get("format", "float"))
    except ValueError as exc:
        raise FrameParseError(str(exc), line_no) from None
    order = fields.get("order", ORDER_NATURAL)
    if order not in ORDERS:
        raise FrameParseError(f"order must be one of {ORDERS}, got {order!r}", line_no)
    return n_points, fmt, order


def read_frames(path) -> FrameSet:
    """Parse a frame file; FrameParseError pinpoints the offending line."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()

    header = None
    re_vals: list = []
    im_vals: list = []
    for line_no, raw_line in enumerate(lines, start=1):
        line = raw_line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header is None:
                header = _parse_header(line, line_no)
            continue
        if header is None:
            raise FrameParseError("data before header line", line_no)
        toks = line.split()
        if len(toks) != 2:
            raise FrameParseError(
                f"expected 're im' pair, got {len(toks)} fields", line_no)
        n_points, fmt, _ = header
        if fmt is not None:
            try:
                re_raw, im_raw = int(toks[0]), int(toks[1])
            except ValueError:
                raise FrameParseError(
                    f"fixed-point file needs integer raw samples, got {line!r}",
                    line_no) from None
            for v in (re_raw, im_raw):
                if not fmt.min_raw <= v <= fmt.max_raw:
                    raise FrameParseError(
                        f"raw value {v} outside {fmt.describe()} range "
                        f"[{fmt.min_raw}, {fmt.max_raw}]", line_no)
            re_vals.append(re_raw)
            im_vals.append(im_raw)
        else:
            try:
                re_f, im_f = float(toks[0]), float(toks[1])
            except ValueError:
                raise FrameParseError(f"bad float sample {line!r}", line_no) from None
            if not (np.isfinite(re_f) and np.isfinite(im_f)):
                raise FrameParseError("non-finite sample", line_no)
            re_vals.append(re_f)
            im_vals.append(im_f)

    if header is None:
        raise FrameParseError("missing header line (# N=... format=... order=...)")
    n_points, fmt, order = header
    if not re_vals:
        raise FrameParseError("file contains no sample data")
    if len(re_vals) % n_points:
        raise FrameParseError(
            f"sample count {len(re_vals)} is not a multiple of N={n_points} "
            "(incomplete final frame)", len(lines))
    shape = (len(re_vals) // n_points, n_points)
    dtype = np.int64 if fmt is not None else np.float64
    return FrameSet(n_points, fmt, order,
                    np.array(re_vals, dtype=dtype).reshape(shape),
                    np.array(im_vals, dtype=dtype).reshape(shape))


def write_frames(path, frames: FrameSet) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# N={frames.n_points} format={format_label(frames.fmt)} "
                 f"order={frames.order}\n")
        if frames.is_fixed:
            for fr in range(frames.n_frames):
                for re_raw, im_raw in zip(frames.re[fr], frames.im[fr]):
                    fh.write(f"{int(re_raw)} {int(im_raw)}\n")
        else:
            for fr in range(frames.n_frames):
                for re_v, im_v in zip(frames.re[fr], frames.im[fr]):
                    fh.write(f"{float(re_v)!r} {float(im_v)!r}\n")
