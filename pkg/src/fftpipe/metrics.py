"""Quantitative evaluation: SQNR harness, hardware cost census, normalization.

Three independent instruments live here:

* the SQNR experiment: random ±1 frames through the fixed-point flow graph
  against a double-precision reference, reported per frame and aggregated;
* the cost census: add/sub units, constant-multiplier adders, general
  multipliers and delay registers per stage and path of the architecture;
* technology normalization of published area/power figures so designs in
  different process nodes can be compared, with computed-vs-published
  deltas reported rather than forced into agreement.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .fixedpoint import FixedFormat, dequantize_array, quantize_array
from .flowgraph import DecompositionPlan, ScalingPolicy, default_plan, fft_fixed, fft_float
from .pipeline import ArchitecturePlan, build_architecture, delay_elements
from .rotators import CoeffConfig, KIND_TW, KIND_W8, KIND_W16, kind_cost

# Amplitude used for the ±1 test pattern when quantized into the format.
# 3/8 is exactly representable for every format with >= 3 fractional bits,
# so the inputs carry no quantization error of their own, and it leaves
# enough headroom that per-stage halving keeps saturation events at zero
# for the default 12-bit format.
INPUT_SCALE = 0.375


# ---------------------------------------------------------------------------
# SQNR experiment


@dataclass(frozen=True)
class SqnrReport:
    """Aggregate of per-frame SQNR measurements (dB)."""

    num_frames: int
    word_length: int
    scaling: str
    mean_sqnr_db: float
    min_sqnr_db: float
    max_sqnr_db: float
    seed: int
    num_skipped_frames: int = 0

    def describe(self) -> str:
        return (f"SQNR over {self.num_frames} frames at {self.word_length}-bit "
                f"({self.scaling} scaling, seed {self.seed}): "
                f"mean {self.mean_sqnr_db:.2f} dB, "
                f"min {self.min_sqnr_db:.2f}, max {self.max_sqnr_db:.2f}")

    def key_values(self) -> str:
        return "\n".join([
            f"num_frames={self.num_frames}",
            f"word_length={self.word_length}",
            f"scaling={self.scaling}",
            f"mean_sqnr_db={self.mean_sqnr_db:.6f}",
            f"min_sqnr_db={self.min_sqnr_db:.6f}",
            f"max_sqnr_db={self.max_sqnr_db:.6f}",
            f"seed={self.seed}",
            f"num_skipped_frames={self.num_skipped_frames}",
        ])


def rademacher_frames(num_frames: int, fmt: FixedFormat, seed: int,
                      n_points: int = 128):
    """Raw fixed-point frames with re/im uniformly ±INPUT_SCALE."""
    rng = np.random.default_rng(seed)
    signs_re = rng.integers(0, 2, size=(num_frames, n_points)) * 2 - 1
    signs_im = rng.integers(0, 2, size=(num_frames, n_points)) * 2 - 1
    re = quantize_array(signs_re * INPUT_SCALE, fmt)
    im = quantize_array(signs_im * INPUT_SCALE, fmt)
    return re, im


def sqnr_frames_db(re_raw, im_raw, fmt: FixedFormat,
                   scaling: ScalingPolicy | str = "per-stage",
                   plan: DecompositionPlan | None = None) -> np.ndarray:
    """Per-frame SQNR of the fixed-point transform against float reference.

    SQNR = 10 log10(sum |X_ref|^2 / sum |X_fix * g - X_ref|^2) with g the
    analytic gain of the scaling policy (2^stages_halved), so the error
    term isolates arithmetic rounding, not deliberate rescaling.  Frames
    with zero reference energy come back as +inf; callers decide whether
    to skip them.
    """
    plan = plan or default_plan()
    if isinstance(scaling, str):
        scaling = ScalingPolicy.parse(scaling, plan.n_stages)
    re_raw = np.atleast_2d(np.asarray(re_raw, dtype=np.int64))
    im_raw = np.atleast_2d(np.asarray(im_raw, dtype=np.int64))
    result = fft_fixed(re_raw, im_raw, fmt, plan=plan, scaling=scaling)
    fix = result.to_complex(fmt) * float(2 ** result.stats.gain_log2)
    x = dequantize_array(re_raw, fmt) + 1j * dequantize_array(im_raw, fmt)
    ref = fft_float(x, plan=plan)
    signal = np.sum(np.abs(ref) ** 2, axis=1)
    noise = np.sum(np.abs(fix - ref) ** 2, axis=1)
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.where(noise > 0, signal / noise, np.inf))


def measure_sqnr(num_frames: int = 10000, fmt: FixedFormat | None = None,
                 scaling: ScalingPolicy | str = "per-stage", seed: int = 0,
                 plan: DecompositionPlan | None = None) -> SqnrReport:
    """Run the random ±1 pattern experiment and aggregate per-frame SQNR."""
    fmt = fmt or FixedFormat()
    plan = plan or default_plan()
    if isinstance(scaling, str):
        scaling = ScalingPolicy.parse(scaling, plan.n_stages)
    re, im = rademacher_frames(num_frames, fmt, seed, plan.n_points)
    db = sqnr_frames_db(re, im, fmt, scaling, plan)
    keep = np.isfinite(db)  # zero-energy frames cannot occur with +-1 inputs
    skipped = int(np.sum(~keep))
    db = db[keep]
    return SqnrReport(
        num_frames=num_frames,
        word_length=fmt.word_length,
        scaling=scaling.describe(),
        mean_sqnr_db=float(np.mean(db)),
        min_sqnr_db=float(np.min(db)),
        max_sqnr_db=float(np.max(db)),
        seed=seed,
        num_skipped_frames=skipped,
    )


def sweep_wordlengths(word_lengths=(10, 12, 14, 16), num_frames: int = 1000,
                      seed: int = 0,
                      scaling: ScalingPolicy | str = "per-stage") -> tuple:
    """measure_sqnr at Q1.(w-1) for each word length, same seed and frames."""
    return tuple(
        measure_sqnr(num_frames, FixedFormat(w, w - 1), scaling, seed)
        for w in word_lengths)


# ---------------------------------------------------------------------------
# hardware cost census


@dataclass(frozen=True)
class StagePathCost:
    """Datapath resources of one processing element (stage, path)."""

    stage: int
    path: int  # 1-based
    rotator_kind: str
    add_sub: int           # butterfly + rotator datapath add/sub units
    constant_add_sub: int  # adders inside shift-and-add constant networks
    multipliers: int       # general-purpose real multipliers


@dataclass(frozen=True)
class CostReport:
    rows: tuple[StagePathCost, ...]
    delay_elements: tuple[tuple[int, int], ...]  # (stage, complex words)
    total_add_sub: int
    total_constant_add_sub: int
    total_multipliers: int
    total_delay_elements: int

    @property
    def n_processing_elements(self) -> int:
        return len(self.rows)

    def describe(self) -> str:
        lines = ["stage path kind          add/sub const-add/sub mult"]
        for r in self.rows:
            lines.append(f"{r.stage:5d} {r.path:4d} {r.rotator_kind:<13s} "
                         f"{r.add_sub:7d} {r.constant_add_sub:13d} "
                         f"{r.multipliers:4d}")
        lines.append("stage delay-elements (complex words)")
        for stage, n in self.delay_elements:
            lines.append(f"{stage:5d} {n:d}")
        lines.append(
            f"totals: processing_elements={self.n_processing_elements} "
            f"add_sub={self.total_add_sub} "
            f"constant_add_sub={self.total_constant_add_sub} "
            f"multipliers={self.total_multipliers} "
            f"delay_elements={self.total_delay_elements}")
        return "\n".join(lines)

    def key_values(self) -> str:
        lines = []
        for r in self.rows:
            key = f"stage{r.stage}.path{r.path}"
            lines.append(f"{key}.kind={r.rotator_kind}")
            lines.append(f"{key}.add_sub={r.add_sub}")
            lines.append(f"{key}.constant_add_sub={r.constant_add_sub}")
            lines.append(f"{key}.multipliers={r.multipliers}")
        for stage, n in self.delay_elements:
            lines.append(f"stage{stage}.delay_elements={n}")
        lines.append(f"total.add_sub={self.total_add_sub}")
        lines.append(f"total.constant_add_sub={self.total_constant_add_sub}")
        lines.append(f"total.multipliers={self.total_multipliers}")
        lines.append(f"total.delay_elements={self.total_delay_elements}")
        return "\n".join(lines)


def cost_census(arch: ArchitecturePlan | None = None,
                cfg: CoeffConfig | None = None) -> CostReport:
    """Per-PE resource counts for the architecture.

    Each PE is a half-butterfly (2 real add/sub, computing the sum one
    cycle and the difference the next) plus the path's rotator.  Rotator
    arithmetic splits into datapath add/sub (the combine stage of a
    general multiply), constant-network adders (shift-and-add recipes),
    and general real multipliers (direct-form complex multiply: 4
    multipliers, 2 add/sub).
    """
    arch = arch or build_architecture()
    cfg = cfg or CoeffConfig()
    rows = []
    for stage_cfg in arch.stages:
        for p in range(arch.n_paths):
            kind = stage_cfg.rotator_kinds[p]
            mults, add_sub = kind_cost(kind, cfg)
            rows.append(StagePathCost(
                stage=stage_cfg.stage_index,
                path=p + 1,
                rotator_kind=kind,
                add_sub=2 + (add_sub if kind == KIND_TW else 0),
                constant_add_sub=add_sub if kind in (KIND_W8, KIND_W16) else 0,
                multipliers=mults,
            ))
    delays = tuple(sorted(delay_elements(arch).items()))
    return CostReport(
        rows=tuple(rows),
        delay_elements=delays,
        total_add_sub=sum(r.add_sub for r in rows),
        total_constant_add_sub=sum(r.constant_add_sub for r in rows),
        total_multipliers=sum(r.multipliers for r in rows),
        total_delay_elements=sum(n for _, n in delays),
    )


# ---------------------------------------------------------------------------
# technology normalization


@dataclass(frozen=True)
class DesignRecord:
    """Published implementation facts for one design; None marks absent data."""

    label: str
    tech_nm: float
    voltage_v: float
    area_mm2: float | None = None
    power_mw: float | None = None
    power_sample_rate_msps: float | None = None
    gate_count: int | None = None

    def __post_init__(self):
        if self.tech_nm <= 0:
            raise ValueError("tech_nm must be positive")
        if self.voltage_v <= 0:
            raise ValueError("voltage_v must be positive")


def normalize_area(d: DesignRecord, ref_tech_nm: float = 90.0) -> float | None:
    """Area scaled to the reference node: A / (tech/ref)^2; None if absent."""
    if d.area_mm2 is None:
        return None
    return d.area_mm2 / (d.tech_nm / ref_tech_nm) ** 2


def normalize_power(d: DesignRecord, target_msps: float = 440.0,
                    ref_tech_nm: float = 90.0,
                    ref_voltage: float = 1.0) -> float | None:
    """Power at the target throughput in the reference process.

    The published figure is first scaled linearly to target_msps, then
    divided by (tech/ref) * (V/ref)^2.  None when power or its sample
    rate is not published.
    """
    if d.power_mw is None or d.power_sample_rate_msps is None:
        return None
    scaled = d.power_mw * target_msps / d.power_sample_rate_msps
    return scaled / ((d.tech_nm / ref_tech_nm) * (d.voltage_v / ref_voltage) ** 2)


@dataclass(frozen=True)
class ComparisonRow:
    """DesignRecord plus the published quantities we try to reproduce."""

    record: DesignRecord
    role: str  # this-design | comparison
    architecture: str
    n_paths: int
    word_length_bits: int | None = None
    clock_mhz: float | None = None
    published_norm_area_mm2: float | None = None
    published_norm_power_mw: float | None = None
    sqnr_db: float | None = None


def _opt_float(s: str) -> float | None:
    return float(s) if s.strip() else None


def _opt_int(s: str) -> int | None:
    return int(s) if s.strip() else None


def load_comparison_designs(path=None) -> tuple[ComparisonRow, ...]:
    """Rows of the packaged comparison table (or a file in the same layout)."""
    if path is None:
        ref = resources.files("fftpipe").joinpath("data/comparison_designs.csv")
        text = ref.read_text(encoding="utf-8")
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    rows = []
    for rec in csv.DictReader(text.splitlines()):
        record = DesignRecord(
            label=rec["label"],
            tech_nm=float(rec["tech_nm"]),
            voltage_v=float(rec["voltage_v"]),
            area_mm2=_opt_float(rec["area_mm2"]),
            power_mw=_opt_float(rec["power_mw"]),
            power_sample_rate_msps=_opt_float(rec["power_sample_rate_msps"]),
            gate_count=_opt_int(rec["gate_count"]),
        )
        rows.append(ComparisonRow(
            record=record,
            role=rec["role"],
            architecture=rec["architecture"],
            n_paths=int(rec["n_paths"]),
            word_length_bits=_opt_int(rec["word_length_bits"]),
            clock_mhz=_opt_float(rec["clock_mhz"]),
            published_norm_area_mm2=_opt_float(rec["published_norm_area_mm2"]),
            published_norm_power_mw=_opt_float(rec["published_norm_power_mw"]),
            sqnr_db=_opt_float(rec["sqnr_db"]),
        ))
    return tuple(rows)


def _fmt_opt(v, digits=3) -> str:
    return "-" if v is None else f"{v:.{digits}f}"


def comparison_report(rows=None, target_msps: float = 440.0) -> str:
    """Computed vs published normalized area/power with explicit deltas.

    Published cells that our normalization cannot reproduce are shown
    with their delta; nothing is adjusted to force agreement.
    """
    rows = rows if rows is not None else load_comparison_designs()
    lines = [
        f"normalized comparison (reference node 90 nm / 1.0 V, "
        f"power at {target_msps:g} MS/s)",
        "label            norm-area  published  delta    "
        "norm-power published  delta",
    ]
    kv = []
    for row in rows:
        d = row.record
        area = normalize_area(d)
        power = normalize_power(d, target_msps=target_msps)
        da = (None if area is None or row.published_norm_area_mm2 is None
              else area - row.published_norm_area_mm2)
        dp = (None if power is None or row.published_norm_power_mw is None
              else power - row.published_norm_power_mw)
        flag = ""
        if dp is not None and abs(dp) > 0.05:
            flag = "  <- delta exceeds 0.05 mW; published value not reproduced"
        lines.append(
            f"{d.label:<16s} {_fmt_opt(area):>9s}  {_fmt_opt(row.published_norm_area_mm2):>9s}  "
            f"{_fmt_opt(da):>7s}  {_fmt_opt(power):>9s}  "
            f"{_fmt_opt(row.published_norm_power_mw):>9s}  {_fmt_opt(dp):>7s}{flag}")
        key = f"design.{d.label}"
        for name, val in (("norm_area_mm2", area),
                          ("published_norm_area_mm2", row.published_norm_area_mm2),
                          ("norm_area_delta", da),
                          ("norm_power_mw", power),
                          ("published_norm_power_mw", row.published_norm_power_mw),
                          ("norm_power_delta", dp)):
            if val is not None:
                kv.append(f"{key}.{name}={val:.6f}")
    return "\n".join(lines + kv)
