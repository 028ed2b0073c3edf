"""Stage-by-stage flowgraph of the grouped-radix decimation-in-frequency FFT.

A transform of 2**n points runs as n butterfly stages; stage s pairs rows
that differ in bit n - s, and the output at row r is the transform bin
bit-reverse(r).  Stages are organized in groups (the default 128-point plan
uses groups of 3 and 4 stages) so that most inter-stage rotations collapse to
small twiddle bases:

* inside a group, before its last stage, the accumulated output bits u and
  the next row bit to be consumed meet in a rotation by W_(2^(t+1))^(u*bit)
* the last stage of a non-final group applies the full deferred twiddle
  W_M^(u * low_bits) for the group's sub-transform size M
* the final group instead applies each stage's decimation twiddle
  immediately: after its stage t, W_(2^(rem+1))^(bit * low_bits) with rem
  low bits remaining, so twiddle bases shrink toward the output

For the default plan this yields twiddle bases 4, 8, 128, 16, 8, 4, none.

`fft_float` runs the flowgraph in double precision with exact twiddles;
`fft_fixed` runs it bit-for-bit as the hardware pipeline does: exact integer
butterflies, optional halving per stage, and single-rounding coefficient
rotations.  `naive_dft` is the direct O(N^2) reference.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .fixedpoint import (
    FixedFormat,
    apply_overflow,
    count_overflows,
    shift_round,
)
from .rotators import CoeffConfig, unit_coefficients


def bit_reverse(value: int, n_bits: int) -> int:
    out = 0
    for _ in range(n_bits):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def bitrev_permutation(n_points: int) -> np.ndarray:
    n_bits = n_points.bit_length() - 1
    return np.array([bit_reverse(k, n_bits) for k in range(n_points)])


def bit_reverse_order(x) -> np.ndarray:
    """Permute the last axis by index bit reversal (an involution)."""
    x = np.asarray(x)
    n = x.shape[-1]
    if n < 1 or n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    return x[..., bitrev_permutation(n)]


@dataclass(frozen=True)
class StagePlan:
    """One butterfly stage plus the rotation applied right after it."""

    index: int                  # 1-based position in the cascade
    pair_bit: int               # butterfly partner differs in this row bit
    twiddle_base: int           # 1 means no rotation after this stage
    exponents: tuple[int, ...]  # per-row exponent of W_twiddle_base

    @property
    def butterfly_stride(self) -> int:
        return 1 << self.pair_bit

    @property
    def has_rotation(self) -> bool:
        return self.twiddle_base > 1

    def exponent(self, row: int) -> int:
        return self.exponents[row]

    def twiddle(self, row: int):
        from .rotators import TwiddleExponent

        return TwiddleExponent(max(self.twiddle_base, 1), self.exponents[row])


@dataclass(frozen=True)
class DecompositionPlan:
    n_points: int
    group_factors: tuple[int, ...]
    stages: tuple[StagePlan, ...]

    @property
    def n_bits(self) -> int:
        return self.n_points.bit_length() - 1

    @property
    def n_stages(self) -> int:
        return len(self.stages)

    def stage(self, index: int) -> StagePlan:
        if not 1 <= index <= len(self.stages):
            raise ValueError(f"stage index {index} out of range")
        return self.stages[index - 1]

    @property
    def twiddle_bases(self) -> tuple[int, ...]:
        return tuple(st.twiddle_base for st in self.stages)


def _bit(r: int, i: int) -> int:
    return (r >> i) & 1


def _group_stage_exponents(n: int, offset: int, k: int, t: int,
                           final: bool) -> tuple[int, list[int]]:
    """Twiddle base and per-row exponents after group stage t (1-based)."""
    n_points = 1 << n
    if final:
        rem = n - offset - t  # row bits not yet consumed
        base = 1 << (rem + 1)
        low = (1 << rem) - 1
        ms = [_bit(r, rem) * (r & low) for r in range(n_points)]
    elif t < k:
        base = 1 << (t + 1)
        nxt = n - 1 - offset - t  # bit the next stage will consume
        ms = []
        for r in range(n_points):
            u = 0
            for i in range(t):
                u |= _bit(r, n - 1 - offset - i) << i
            ms.append(u * _bit(r, nxt))
    else:
        base = 1 << (n - offset)  # this group's sub-transform size
        low = (1 << (n - offset - k)) - 1
        ms = []
        for r in range(n_points):
            u = 0
            for i in range(k):
                u |= _bit(r, n - 1 - offset - i) << i
            ms.append((u * (r & low)) % base)
    if not any(ms):
        base = 1
    return base, ms


def build_plan(n_points: int = 128,
               group_factors: tuple[int, ...] = (3, 4)) -> DecompositionPlan:
    """Stage plan for a grouped-radix decimation-in-frequency transform."""
    if n_points < 2 or n_points & (n_points - 1):
        raise ValueError(f"n_points must be a power of two >= 2, got {n_points}")
    n = n_points.bit_length() - 1
    factors = tuple(int(k) for k in group_factors)
    if any(k < 1 for k in factors) or sum(factors) != n:
        raise ValueError(
            f"group factors {factors} must be positive and sum to {n}")
    stages = []
    offset = 0
    for g, k in enumerate(factors):
        final = g == len(factors) - 1
        for t in range(1, k + 1):
            index = offset + t
            base, ms = _group_stage_exponents(n, offset, k, t, final)
            stages.append(StagePlan(index, n - index, base, tuple(ms)))
        offset += k
    return DecompositionPlan(n_points, factors, tuple(stages))


@functools.lru_cache(maxsize=None)
def default_plan() -> DecompositionPlan:
    return build_plan(128, (3, 4))


# ---------------------------------------------------------------------------
# reference transforms


def naive_dft(x) -> np.ndarray:
    """Direct O(N^2) DFT, X[k] = sum_r x[r] exp(-2j pi r k / N)."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    rk = np.outer(np.arange(n), np.arange(n))
    w = np.exp(-2j * np.pi * rk / n)
    return x @ w


def _lo_rows(n_points: int, pair_bit: int) -> np.ndarray:
    rows = np.arange(n_points)
    return rows[(rows >> pair_bit) & 1 == 0]


def fft_float(x, plan: DecompositionPlan | None = None,
              output_order: str = "bitrev") -> np.ndarray:
    """Run the staged flowgraph in doubles with exact twiddles (gain N).

    Output comes in bit-reversed bin order, the cascade's native order;
    pass output_order="natural" to reorder.
    """
    plan = plan or default_plan()
    x = np.asarray(x, dtype=np.complex128)
    single = x.ndim == 1
    y = np.array(np.atleast_2d(x), copy=True)
    if y.shape[1] != plan.n_points:
        raise ValueError(f"expected {plan.n_points}-point frames, got {y.shape[1]}")
    for st in plan.stages:
        lo = _lo_rows(plan.n_points, st.pair_bit)
        hi = lo + (1 << st.pair_bit)
        a, b = y[:, lo].copy(), y[:, hi]
        y[:, lo] = a + b
        y[:, hi] = a - b
        if st.has_rotation:
            tw = np.exp(-2j * np.pi * np.array(st.exponents) / st.twiddle_base)
            y *= tw
    y = _reorder(y, plan, output_order)
    return y[0] if single else y


def _reorder(y: np.ndarray, plan: DecompositionPlan, output_order: str) -> np.ndarray:
    if output_order == "bitrev":
        return y
    if output_order == "natural":
        return y[:, bitrev_permutation(plan.n_points)]
    raise ValueError(f"output_order must be 'natural' or 'bitrev', got {output_order!r}")


# ---------------------------------------------------------------------------
# scaling policy


@dataclass(frozen=True)
class ScalingPolicy:
    """Which stages halve their butterfly outputs before rotation."""

    stages: frozenset = field(default_factory=frozenset)
    label: str | None = field(default=None, compare=False)

    @classmethod
    def none(cls) -> "ScalingPolicy":
        return cls(frozenset(), "none")

    @classmethod
    def per_stage(cls, n_stages: int) -> "ScalingPolicy":
        return cls(frozenset(range(1, n_stages + 1)), "per-stage")

    @classmethod
    def parse(cls, spec: str, n_stages: int) -> "ScalingPolicy":
        """"none", "per-stage", or comma-separated stage indices like "1,2,5"."""
        if spec == "none":
            return cls.none()
        if spec == "per-stage":
            return cls.per_stage(n_stages)
        try:
            stages = frozenset(int(tok) for tok in spec.split(",") if tok.strip())
        except ValueError:
            raise ValueError(f"bad scaling spec {spec!r}") from None
        if any(not 1 <= s <= n_stages for s in stages):
            raise ValueError(f"scaling stages {sorted(stages)} outside 1..{n_stages}")
        return cls(stages)

    @property
    def gain_log2(self) -> int:
        """log2 of the factor restoring full transform gain."""
        return len(self.stages)

    def scales(self, stage_index: int) -> bool:
        return stage_index in self.stages

    def describe(self) -> str:
        if self.label:
            return self.label
        if not self.stages:
            return "none"
        return ",".join(str(s) for s in sorted(self.stages))


# ---------------------------------------------------------------------------
# fixed-point transform (golden model for the streaming pipeline)


def stage_coeff_tables(plan: DecompositionPlan, cfg: CoeffConfig):
    """Per-stage (wr, wi, frac) integer rotation tables at a common shift.

    Each row's coefficients come from the same constants the specialized
    rotator datapaths use, rescaled exactly (left shifts) to one shared
    fraction per stage so the whole stage rotates in one vector operation.
    """
    tables = []
    for st in plan.stages:
        if not st.has_rotation:
            tables.append(None)
            continue
        per_row = [unit_coefficients(st.twiddle_base, m, cfg) for m in st.exponents]
        frac = max(f for _, _, f in per_row)
        wr = np.array([w << (frac - f) for w, _, f in per_row], dtype=np.int64)
        wi = np.array([w << (frac - f) for _, w, f in per_row], dtype=np.int64)
        tables.append((wr, wi, frac))
    return tables


@dataclass(frozen=True)
class StageOverflow:
    stage: int
    butterfly: int
    rotator: int


@dataclass(frozen=True)
class FixedRunStats:
    """Bookkeeping from one fixed-point run over a batch of frames."""

    n_frames: int
    scaling: ScalingPolicy
    per_stage: tuple[StageOverflow, ...]

    @property
    def total_overflows(self) -> int:
        return sum(s.butterfly + s.rotator for s in self.per_stage)

    @property
    def gain_log2(self) -> int:
        return self.scaling.gain_log2


@dataclass(frozen=True)
class FixedResult:
    re: np.ndarray
    im: np.ndarray
    stats: FixedRunStats

    def to_complex(self, fmt: FixedFormat) -> np.ndarray:
        return self.re * fmt.ulp + 1j * (self.im * fmt.ulp)


def fft_fixed(re, im, fmt: FixedFormat,
              plan: DecompositionPlan | None = None,
              coeffs: CoeffConfig | None = None,
              scaling: ScalingPolicy | str = "per-stage",
              output_order: str = "bitrev") -> FixedResult:
    """Bit-accurate staged transform over raw integer component arrays.

    re/im are int64 arrays shaped (frames, n_points) or (n_points,); outputs
    use the same raw encoding.  Each stage does exact integer butterflies,
    optional halving, then coefficient rotation with one rounding and one
    overflow check per component.
    """
    plan = plan or default_plan()
    if coeffs is None:
        coeffs = CoeffConfig.for_format(fmt)
    if isinstance(scaling, str):
        scaling = ScalingPolicy.parse(scaling, plan.n_stages)
    max_frac = max(coeffs.w8_frac, coeffs.w16_frac, coeffs.tw_frac)
    if fmt.word_length + max_frac + 2 > 63:
        raise ValueError(
            f"word_length {fmt.word_length} with {max_frac} coefficient bits "
            "would overflow 64-bit accumulators")

    re = np.asarray(re, dtype=np.int64)
    im = np.asarray(im, dtype=np.int64)
    single = re.ndim == 1
    re = np.array(np.atleast_2d(re), copy=True)
    im = np.array(np.atleast_2d(im), copy=True)
    if re.shape != im.shape or re.shape[1] != plan.n_points:
        raise ValueError(f"expected (frames, {plan.n_points}) raw arrays")
    for comp in (re, im):
        if comp.size and not (fmt.min_raw <= comp.min()
                              and comp.max() <= fmt.max_raw):
            raise ValueError(f"input raw values outside {fmt.describe()} range")

    tables = stage_coeff_tables(plan, coeffs)
    per_stage = []
    for st, table in zip(plan.stages, tables):
        lo = _lo_rows(plan.n_points, st.pair_bit)
        hi = lo + (1 << st.pair_bit)
        for comp in (re, im):
            a, b = comp[:, lo].copy(), comp[:, hi]
            comp[:, lo] = a + b
            comp[:, hi] = a - b
        if scaling.scales(st.index):
            re = shift_round(re, 1, fmt.rounding)
            im = shift_round(im, 1, fmt.rounding)
        bf_ovf = count_overflows(re, fmt) + count_overflows(im, fmt)
        re = apply_overflow(re, fmt)
        im = apply_overflow(im, fmt)
        rot_ovf = 0
        if table is not None:
            wr, wi, frac = table
            acc_re = re * wr - im * wi
            acc_im = re * wi + im * wr
            re = shift_round(acc_re, frac, fmt.rounding)
            im = shift_round(acc_im, frac, fmt.rounding)
            rot_ovf = count_overflows(re, fmt) + count_overflows(im, fmt)
            re = apply_overflow(re, fmt)
            im = apply_overflow(im, fmt)
        per_stage.append(StageOverflow(st.index, int(bf_ovf), int(rot_ovf)))

    re = _reorder(re, plan, output_order)
    im = _reorder(im, plan, output_order)
    if single:
        re, im = re[0], im[0]
    stats = FixedRunStats(re.shape[0] if not single else 1, scaling,
                          tuple(per_stage))
    return FixedResult(re, im, stats)
