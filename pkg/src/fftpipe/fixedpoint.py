"""Two's-complement fixed-point arithmetic with explicit rounding and overflow.

Values are stored as integer multiples of 2**-frac_bits inside a signed word
of word_length bits.  All helpers work on plain Python ints as well as numpy
integer arrays, so the same rounding logic serves both the scalar streaming
model and the vectorized dataflow model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

ROUND_TRUNCATE = "truncate"
ROUND_HALF_AWAY = "round-half-away-from-zero"
ROUND_HALF_EVEN = "round-half-even"
ROUNDING_MODES = (ROUND_TRUNCATE, ROUND_HALF_AWAY, ROUND_HALF_EVEN)

OVERFLOW_SATURATE = "saturate"
OVERFLOW_WRAP = "wrap"
OVERFLOW_MODES = (OVERFLOW_SATURATE, OVERFLOW_WRAP)


@dataclass(frozen=True)
class FixedFormat:
    """Signed fixed-point format: word_length total bits, frac_bits fractional."""

    word_length: int = 12
    frac_bits: int = 11
    rounding: str = ROUND_HALF_EVEN
    overflow: str = OVERFLOW_SATURATE

    def __post_init__(self):
        if not 2 <= self.word_length <= 60:
            raise ValueError(f"word_length out of range: {self.word_length}")
        if not 0 <= self.frac_bits < self.word_length:
            raise ValueError(f"frac_bits out of range: {self.frac_bits}")
        if self.rounding not in ROUNDING_MODES:
            raise ValueError(f"unknown rounding mode: {self.rounding!r}")
        if self.overflow not in OVERFLOW_MODES:
            raise ValueError(f"unknown overflow mode: {self.overflow!r}")

    @property
    def scale(self) -> int:
        return 1 << self.frac_bits

    @property
    def min_raw(self) -> int:
        return -(1 << (self.word_length - 1))

    @property
    def max_raw(self) -> int:
        return (1 << (self.word_length - 1)) - 1

    @property
    def ulp(self) -> float:
        return 1.0 / self.scale

    def describe(self) -> str:
        """Q notation, integer part includes the sign bit."""
        return f"Q{self.word_length - self.frac_bits}.{self.frac_bits}"


def shift_round(v, s: int, mode: str):
    """Round v / 2**s to an integer under the given mode.

    Works on ints and numpy integer arrays.  truncate floors (drops bits,
    two's-complement style), the half modes resolve exact .5 remainders.
    """
    if s <= 0:
        return v if s == 0 else v * (1 << -s)
    if mode == ROUND_TRUNCATE:
        return v >> s
    half = 1 << (s - 1)
    if mode == ROUND_HALF_AWAY:
        if isinstance(v, np.ndarray):
            return np.where(v >= 0, (v + half) >> s, -((-v + half) >> s))
        return (v + half) >> s if v >= 0 else -((-v + half) >> s)
    # round-half-even: bump the floor quotient when remainder > half,
    # or remainder == half and the quotient is odd
    q = v >> s
    r = v & ((1 << s) - 1)
    inc = (r > half) | ((r == half) & ((q & 1) == 1))
    if isinstance(v, np.ndarray):
        return q + inc.astype(q.dtype)
    return q + int(inc)


def wrap_raw(v, word_length: int):
    """Two's-complement wraparound into word_length bits."""
    span = 1 << word_length
    offset = 1 << (word_length - 1)
    return ((v + offset) & (span - 1)) - offset


def apply_overflow(v, fmt: FixedFormat):
    """Clamp or wrap an integer (array) into the format's raw range."""
    if fmt.overflow == OVERFLOW_WRAP:
        return wrap_raw(v, fmt.word_length)
    if isinstance(v, np.ndarray):
        return np.clip(v, fmt.min_raw, fmt.max_raw)
    if v > fmt.max_raw:
        return fmt.max_raw
    if v < fmt.min_raw:
        return fmt.min_raw
    return v


def count_overflows(v, fmt: FixedFormat) -> int:
    """Number of elements that fall outside the representable raw range."""
    if isinstance(v, np.ndarray):
        return int(np.count_nonzero((v > fmt.max_raw) | (v < fmt.min_raw)))
    return int(v > fmt.max_raw or v < fmt.min_raw)


def round_real(x, mode: str) -> int:
    """Round a float or Fraction to an integer under the given mode."""
    if mode == ROUND_TRUNCATE:
        return math.floor(x)
    if mode == ROUND_HALF_AWAY:
        return math.floor(x + Fraction(1, 2)) if x >= 0 else -math.floor(-x + Fraction(1, 2))
    return round(x)  # both float and Fraction round half-to-even


@dataclass(frozen=True)
class Fx:
    """One fixed-point number: integer raw value plus its format."""

    raw: int
    fmt: FixedFormat

    def __post_init__(self):
        if not self.fmt.min_raw <= self.raw <= self.fmt.max_raw:
            raise ValueError(f"raw {self.raw} outside {self.fmt.describe()} range")

    @property
    def value(self) -> float:
        return self.raw / self.fmt.scale

    @property
    def exact(self) -> Fraction:
        return Fraction(self.raw, self.fmt.scale)

    def __repr__(self):
        return f"Fx({self.raw}, {self.fmt.describe()}, {self.value:+.6f})"


@dataclass(frozen=True)
class CFx:
    """Complex fixed-point sample, both components in the same format."""

    re: Fx
    im: Fx

    def __post_init__(self):
        if self.re.fmt != self.im.fmt:
            raise ValueError("re/im format mismatch")

    @property
    def fmt(self) -> FixedFormat:
        return self.re.fmt

    @property
    def value(self) -> complex:
        return complex(self.re.value, self.im.value)


def quantize(value, fmt: FixedFormat) -> Fx:
    """Quantize a real number (float or Fraction) into the format."""
    if isinstance(value, Fraction):
        raw = round_real(value * fmt.scale, fmt.rounding)
    else:
        raw = round_real(float(value) * fmt.scale, fmt.rounding)
    return Fx(int(apply_overflow(raw, fmt)), fmt)


def quantize_complex(value: complex, fmt: FixedFormat) -> CFx:
    return CFx(quantize(value.real, fmt), quantize(value.imag, fmt))


def quantize_array(values: np.ndarray, fmt: FixedFormat) -> np.ndarray:
    """Vectorized quantize of a float array to int64 raw values."""
    x = np.asarray(values, dtype=np.float64) * fmt.scale
    if fmt.rounding == ROUND_TRUNCATE:
        raw = np.floor(x)
    elif fmt.rounding == ROUND_HALF_AWAY:
        raw = np.where(x >= 0, np.floor(x + 0.5), -np.floor(-x + 0.5))
    else:
        raw = np.round(x)  # numpy rounds half to even
    return apply_overflow(raw.astype(np.int64), fmt)


def dequantize_array(raw: np.ndarray, fmt: FixedFormat) -> np.ndarray:
    return np.asarray(raw, dtype=np.float64) / fmt.scale


def _check_same_fmt(a: Fx, b: Fx):
    if a.fmt != b.fmt:
        raise ValueError(f"format mismatch: {a.fmt.describe()} vs {b.fmt.describe()}")


def fx_add(a: Fx, b: Fx) -> Fx:
    _check_same_fmt(a, b)
    return Fx(int(apply_overflow(a.raw + b.raw, a.fmt)), a.fmt)


def fx_sub(a: Fx, b: Fx) -> Fx:
    _check_same_fmt(a, b)
    return Fx(int(apply_overflow(a.raw - b.raw, a.fmt)), a.fmt)


def fx_neg(a: Fx) -> Fx:
    # negating the most negative raw value overflows by one ulp
    return Fx(int(apply_overflow(-a.raw, a.fmt)), a.fmt)


def fx_mul(a: Fx, b: Fx, out_fmt: FixedFormat | None = None) -> Fx:
    """Multiply with a single rounding of the exact product."""
    out_fmt = out_fmt or a.fmt
    prod = a.raw * b.raw  # exact, frac = a.frac + b.frac
    shift = a.fmt.frac_bits + b.fmt.frac_bits - out_fmt.frac_bits
    raw = shift_round(prod, shift, out_fmt.rounding)
    return Fx(int(apply_overflow(raw, out_fmt)), out_fmt)


def cfx_mul(a: CFx, w: CFx, out_fmt: FixedFormat | None = None) -> CFx:
    """Complex multiply: exact integer cross products, one rounding per component."""
    out_fmt = out_fmt or a.fmt
    shift = a.fmt.frac_bits + w.fmt.frac_bits - out_fmt.frac_bits
    acc_re = a.re.raw * w.re.raw - a.im.raw * w.im.raw
    acc_im = a.re.raw * w.im.raw + a.im.raw * w.re.raw
    rr = shift_round(acc_re, shift, out_fmt.rounding)
    ri = shift_round(acc_im, shift, out_fmt.rounding)
    return CFx(
        Fx(int(apply_overflow(rr, out_fmt)), out_fmt),
        Fx(int(apply_overflow(ri, out_fmt)), out_fmt),
    )
