"""Bit- and cycle-accurate simulator of a 4-path streaming 128-point FFT.

The package models a grouped radix-2^3/2^4 decimation-in-frequency flow
graph mapped onto four serial paths with one sample per path per cycle:

* exact fixed-point arithmetic primitives (fixedpoint),
* rotator datapaths from trivial quarter-turns to shift-and-add constant
  multipliers and table-driven general rotators (rotators),
* the reference flow graph in float and fixed point (flowgraph),
* a cycle-accurate streaming engine with schedules, latency and
  utilization accounting (pipeline),
* SQNR measurement, hardware cost census, and technology normalization
  of published comparison designs (metrics),
* frame-file I/O (frames), a CLI (cli), and a scikit-learn transformer
  facade (estimator).
"""

from .fixedpoint import (
    CFx,
    FixedFormat,
    Fx,
    OVERFLOW_SATURATE,
    OVERFLOW_WRAP,
    ROUND_HALF_AWAY,
    ROUND_HALF_EVEN,
    ROUND_TRUNCATE,
    apply_overflow,
    dequantize_array,
    quantize,
    quantize_array,
    quantize_complex,
    shift_round,
)
from .rotators import (
    AllocationError,
    BoundRotator,
    CoeffConfig,
    CsdOp,
    CsdRecipe,
    KIND_NONE,
    KIND_TW,
    KIND_W4,
    KIND_W8,
    KIND_W16,
    SasForm,
    TwiddleExponent,
    csd_recipe,
    kind_cost,
    kind_for_exponents,
    mrot_order,
    sas_decompose,
    w16_shared_recipes,
    w8_csd_recipe,
)
from .flowgraph import (
    DecompositionPlan,
    FixedResult,
    ScalingPolicy,
    StagePlan,
    bit_reverse,
    bit_reverse_order,
    build_plan,
    default_plan,
    fft_fixed,
    fft_float,
    naive_dft,
)
from .frames import (
    FrameParseError,
    FrameSet,
    ORDER_BITREV,
    ORDER_NATURAL,
    frameset_from_complex,
    read_frames,
    write_frames,
)
from .pipeline import (
    AllocationReport,
    ArchitecturePlan,
    Pipeline,
    PipelineRun,
    Schedule,
    ScheduleError,
    StageConfig,
    StreamEvent,
    StreamProtocolError,
    UtilizationReport,
    build_architecture,
    check_allocation,
    delay_elements,
    dump_trace,
    run_frames,
    table_allocation_histogram,
)
from .metrics import (
    ComparisonRow,
    CostReport,
    DesignRecord,
    INPUT_SCALE,
    SqnrReport,
    comparison_report,
    cost_census,
    load_comparison_designs,
    measure_sqnr,
    normalize_area,
    normalize_power,
    rademacher_frames,
    sqnr_frames_db,
    sweep_wordlengths,
)
from .estimator import FixedPointFFT

__version__ = "0.1.0"

__all__ = [
    "AllocationError",
    "AllocationReport",
    "ArchitecturePlan",
    "BoundRotator",
    "CFx",
    "CoeffConfig",
    "ComparisonRow",
    "CostReport",
    "CsdOp",
    "CsdRecipe",
    "DecompositionPlan",
    "DesignRecord",
    "FixedFormat",
    "FixedPointFFT",
    "FixedResult",
    "FrameParseError",
    "FrameSet",
    "Fx",
    "INPUT_SCALE",
    "KIND_NONE",
    "KIND_TW",
    "KIND_W4",
    "KIND_W8",
    "KIND_W16",
    "ORDER_BITREV",
    "ORDER_NATURAL",
    "OVERFLOW_SATURATE",
    "OVERFLOW_WRAP",
    "Pipeline",
    "PipelineRun",
    "ROUND_HALF_AWAY",
    "ROUND_HALF_EVEN",
    "ROUND_TRUNCATE",
    "SasForm",
    "ScalingPolicy",
    "Schedule",
    "ScheduleError",
    "SqnrReport",
    "StageConfig",
    "StagePlan",
    "StreamEvent",
    "StreamProtocolError",
    "TwiddleExponent",
    "UtilizationReport",
    "apply_overflow",
    "bit_reverse",
    "bit_reverse_order",
    "build_architecture",
    "build_plan",
    "check_allocation",
    "comparison_report",
    "cost_census",
    "csd_recipe",
    "default_plan",
    "delay_elements",
    "dequantize_array",
    "dump_trace",
    "fft_fixed",
    "fft_float",
    "frameset_from_complex",
    "kind_cost",
    "kind_for_exponents",
    "load_comparison_designs",
    "measure_sqnr",
    "mrot_order",
    "naive_dft",
    "normalize_area",
    "normalize_power",
    "quantize",
    "quantize_array",
    "quantize_complex",
    "rademacher_frames",
    "read_frames",
    "run_frames",
    "sas_decompose",
    "shift_round",
    "sqnr_frames_db",
    "sweep_wordlengths",
    "table_allocation_histogram",
    "w16_shared_recipes",
    "w8_csd_recipe",
    "write_frames",
]
