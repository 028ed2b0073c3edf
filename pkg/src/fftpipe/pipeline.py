"""Cycle-accurate model of the 4-path serial-streaming 128-point transform.

The machine is a chain of stations:

    input -> BF1 -> ROT1 -> BF2 -> ... -> BF6 -> ROT6 -> BF7 -> output

Each station owns a frame-periodic schedule, a bijection between the 128
flow-graph rows and (path, slot) positions with slot in [0, 32).  Row r of
frame f is due at station k at absolute cycle phase[k] + 32 f + slot_k(r).
Phases are the smallest offsets that let every sample leave its previous
station (schedule slot + station latency + one transfer cycle) before it is
due; samples waiting in between stand for the delay/reordering registers of
the serial commutators, which are modeled as delay-plus-permutation, not as
register netlists.

Butterfly stations receive a pair on one path in consecutive cycles (the
bit-clear row on the even slot), emit sum then difference two cycles later,
and keep their two real add/sub units busy every steady-state cycle.  The
rotation points of stages 1-3 share the butterfly layout; stages 4-6 rotate
mid-commutator on the path-interleaved layout (path = row mod 4), which is
what concentrates each twiddle exponent class onto a fixed path.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .fixedpoint import FixedFormat, Fx, CFx, apply_overflow, shift_round
from .flowgraph import DecompositionPlan, ScalingPolicy, default_plan
from .rotators import (
    BoundRotator,
    CoeffConfig,
    KIND_NONE,
    KIND_W4,
    KIND_W8,
    KIND_W16,
    KIND_TW,
    angle_class,
    kind_for_exponents,
)

N_PATHS = 4
FRAME_CYCLES = 32  # 128 rows / 4 paths, one sample per path per cycle


class StreamProtocolError(RuntimeError):
    """Input events violated the one-sample-per-path-per-cycle serial order."""


class ScheduleError(RuntimeError):
    """A station schedule is not a bijection or breaks the pairing discipline."""


# Contracted per-path exponent sets at the allocation stages.  Path q owns
# the exponents congruent to q mod 4 of whatever the stage's base offers;
# the identity exponent is a bypass allowed on every path.
TABLE_ALLOCATION = {
    4: (frozenset({0, 4}), frozenset({1, 5}), frozenset({2, 6}), frozenset({3, 7})),
    5: (frozenset({0}), frozenset({1}), frozenset({2}), frozenset({3})),
    6: (frozenset({0}), frozenset({0}), frozenset({0}), frozenset({1})),
}

_UNIFORM_KINDS = {4: KIND_W4, 8: KIND_W8, 16: KIND_W16}


@dataclass(frozen=True)
class Schedule:
    """Frame-periodic placement of rows onto (path, slot) stream positions."""

    name: str
    path_of: tuple[int, ...]
    slot_of: tuple[int, ...]

    def __post_init__(self):
        n = len(self.path_of)
        seen = set(zip(self.path_of, self.slot_of))
        if len(seen) != n or len(self.slot_of) != n:
            raise ScheduleError(f"schedule {self.name} is not a bijection")
        if any(not 0 <= s < FRAME_CYCLES for s in self.slot_of):
            raise ScheduleError(f"schedule {self.name} has slots outside a frame")
        if any(not 0 <= p < N_PATHS for p in self.path_of):
            raise ScheduleError(f"schedule {self.name} has bad path indices")

    def position(self, row: int) -> tuple[int, int]:
        return self.path_of[row], self.slot_of[row]

    def row_at(self, path: int, slot: int) -> int:
        # 128 entries; linear scan is fine for construction-time checks
        for r in range(len(self.path_of)):
            if self.path_of[r] == path and self.slot_of[r] == slot:
                return r
        raise ScheduleError(f"no row at ({path}, {slot}) in {self.name}")


def _remove_bit(value: int, bit: int) -> int:
    low = value & ((1 << bit) - 1)
    return ((value >> (bit + 1)) << bit) | low


def butterfly_schedule(stage_index: int, n_points: int = 128) -> Schedule:
    """Pairs differing in the stage's bit sit on one path in adjacent cycles."""
    n_bits = n_points.bit_length() - 1
    b = n_bits - stage_index
    pairs_per_path = n_points // (2 * N_PATHS)
    paths, slots = [], []
    for r in range(n_points):
        pair_id = _remove_bit(r, b)
        paths.append(pair_id // pairs_per_path)
        slots.append(2 * (pair_id % pairs_per_path) + ((r >> b) & 1))
    return Schedule(f"butterfly-{stage_index}", tuple(paths), tuple(slots))


def interleave_schedule(n_points: int = 128) -> Schedule:
    """Row r on path r mod 4: each path sees one exponent residue class."""
    paths = tuple(r % N_PATHS for r in range(n_points))
    slots = tuple(r // N_PATHS for r in range(n_points))
    return Schedule("interleave", paths, slots)


def io_schedule(n_points: int = 128) -> Schedule:
    """Boundary convention: sample i on path i // 32 at cycle i mod 32."""
    paths = tuple(r // FRAME_CYCLES for r in range(n_points))
    slots = tuple(r % FRAME_CYCLES for r in range(n_points))
    return Schedule("io", paths, slots)


@dataclass(frozen=True)
class StageConfig:
    """Per-path rotator contract of one stage."""

    stage_index: int
    twiddle_base: int
    rotator_kinds: tuple[str, ...]
    allocated_exponents: tuple[frozenset, ...]


@dataclass(frozen=True)
class ArchitecturePlan:
    n_points: int
    n_paths: int
    plan: DecompositionPlan
    stages: tuple[StageConfig, ...]
    butterfly_schedules: tuple[Schedule, ...]
    rotation_schedules: tuple[Schedule | None, ...]
    input_schedule: Schedule
    output_schedule: Schedule
    fault: str | None = None

    def stage(self, index: int) -> StageConfig:
        return self.stages[index - 1]

    def permutation_schedule(self, stage_index: int,
                             point: str = "butterfly") -> Schedule:
        if point == "butterfly":
            return self.butterfly_schedules[stage_index - 1]
        if point == "rotation":
            sched = self.rotation_schedules[stage_index - 1]
            if sched is None:
                raise ValueError(f"stage {stage_index} has no rotation point")
            return sched
        raise ValueError(f"point must be 'butterfly' or 'rotation', got {point!r}")


FAULTS = ("misroute-stage5",)


def build_architecture(plan: DecompositionPlan | None = None,
                       fault: str | None = None) -> ArchitecturePlan:
    """Architecture instance for the (128, [3, 4]) plan.

    fault="misroute-stage5" rotates the stage-5 mid-commutator path
    assignment by one path; the stream still flows and produces correct
    numbers (rotators fall back to full-precision coefficients), but
    check_allocation reports the off-contract rotations.
    """
    plan = plan or default_plan()
    if plan.n_points != 128 or tuple(plan.group_factors) != (3, 4):
        raise ValueError("the streaming architecture is built for the "
                         "(128, [3, 4]) plan")
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}; available: {FAULTS}")

    bf_scheds = tuple(butterfly_schedule(s) for s in range(1, 8))
    rot_scheds: list[Schedule | None] = []
    for st in plan.stages:
        if not st.has_rotation:
            rot_scheds.append(None)
        elif st.index <= 3:
            rot_scheds.append(bf_scheds[st.index - 1])
        else:
            rot_scheds.append(interleave_schedule())
    if fault == "misroute-stage5":
        orig = rot_scheds[4]
        rot_scheds[4] = Schedule("interleave-misrouted",
                                 tuple((p + 1) % N_PATHS for p in orig.path_of),
                                 orig.slot_of)

    stages = []
    for st, rs in zip(plan.stages, rot_scheds):
        if rs is None:
            kinds = (KIND_NONE,) * N_PATHS
            allocated = (frozenset({0}),) * N_PATHS
        else:
            executed = [set() for _ in range(N_PATHS)]
            for r in range(plan.n_points):
                executed[rs.path_of[r]].add(st.exponents[r])
            if st.index in TABLE_ALLOCATION:
                allocated = TABLE_ALLOCATION[st.index]
                if fault is None:
                    for p in range(N_PATHS):
                        got = {m for m in executed[p] if m}
                        want = {m for m in allocated[p] if m}
                        if got != want:
                            raise ScheduleError(
                                f"stage {st.index} path {p + 1} executes "
                                f"{sorted(got)}, allocation demands {sorted(want)}")
                kinds = tuple(kind_for_exponents(st.twiddle_base, allocated[p])
                              for p in range(N_PATHS))
            else:
                allocated = tuple(frozenset(e) for e in executed)
                kinds = (_UNIFORM_KINDS.get(st.twiddle_base, KIND_TW),) * N_PATHS
        stages.append(StageConfig(st.index, st.twiddle_base, kinds, allocated))

    return ArchitecturePlan(
        n_points=plan.n_points,
        n_paths=N_PATHS,
        plan=plan,
        stages=tuple(stages),
        butterfly_schedules=bf_scheds,
        rotation_schedules=tuple(rot_scheds),
        input_schedule=io_schedule(),
        output_schedule=io_schedule(),
        fault=fault,
    )


# ---------------------------------------------------------------------------
# streaming engine


@dataclass(frozen=True)
class StreamEvent:
    """One complex sample on one path at one cycle (paths are 1-based)."""

    path: int
    cycle: int
    sample: CFx
    frame_id: int


class TraceEntry(NamedTuple):
    cycle: int
    path: int  # 1-based
    stage: int
    event: str  # bf-sum | bf-diff | rotate
    re: int
    im: int
    exponent: int | None


def dump_trace(entries) -> str:
    """One `cycle path stage event raw_re raw_im exponent` line per entry."""
    lines = ["# cycle path stage event raw_re raw_im exponent"]
    for e in entries:
        m = "-" if e.exponent is None else str(e.exponent)
        lines.append(f"{e.cycle} {e.path} {e.stage} {e.event} {e.re} {e.im} {m}")
    return "\n".join(lines)


class _Station:
    __slots__ = ("index", "kind", "stage", "schedule", "latency", "phase")

    def __init__(self, index, kind, stage, schedule, latency):
        self.index = index
        self.kind = kind      # source | butterfly | rotate | sink
        self.stage = stage    # 1..7, 0 for source/sink
        self.schedule = schedule
        self.latency = latency
        self.phase = 0


def _build_stations(arch: ArchitecturePlan) -> list[_Station]:
    """Station chain with the smallest causal phases.

    Phase recurrence: a row leaves the previous station at
    phase + slot + latency and takes one transfer cycle, so the next
    station's phase is the max over rows of that leave time + 1 minus the
    row's local slot.
    """
    stations = [_Station(0, "source", 0, arch.input_schedule, 0)]
    for st in arch.plan.stages:
        stations.append(_Station(
            len(stations), "butterfly", st.index,
            arch.butterfly_schedules[st.index - 1], 2))
        rs = arch.rotation_schedules[st.index - 1]
        if rs is not None:
            stations.append(_Station(len(stations), "rotate", st.index, rs, 1))
    stations.append(_Station(len(stations), "sink", 0, arch.output_schedule, 0))
    n = arch.n_points
    for prev, cur in zip(stations, stations[1:]):
        cur.phase = max(
            prev.phase + prev.schedule.slot_of[r] + prev.latency + 1
            - cur.schedule.slot_of[r]
            for r in range(n))
    return stations


def delay_elements(arch: ArchitecturePlan) -> dict[int, int]:
    """Complex-word delay registers per stage, derived from the schedules.

    For the hop into each station, row r is stored for
    d_r = land_r - leave_r - 1 cycles (a 1-cycle transfer needs no
    register).  Steady-state frames repeat every 32 cycles, so the
    register count for the hop is the peak over the 32 cycle classes of
    the number of simultaneously stored samples.  Each hop is charged to
    the stage of its downstream station; the hop into the sink is charged
    to the last stage.
    """
    stations = _build_stations(arch)
    per_stage: dict[int, int] = {st.index: 0 for st in arch.plan.stages}
    last_stage = arch.plan.n_stages
    for prev, cur in zip(stations, stations[1:]):
        occupancy = [0] * FRAME_CYCLES
        for r in range(arch.n_points):
            leave = prev.phase + prev.schedule.slot_of[r] + prev.latency
            land = cur.phase + cur.schedule.slot_of[r]
            d = land - leave - 1
            if d < 0:
                raise ScheduleError("non-causal hop in station chain")
            full, part = divmod(d, FRAME_CYCLES)
            start = (leave + 1) % FRAME_CYCLES
            for c in range(FRAME_CYCLES):
                occupancy[c] += full + (1 if (c - start) % FRAME_CYCLES < part else 0)
        stage = cur.stage if cur.kind != "sink" else last_stage
        per_stage[stage] += max(occupancy)
    return per_stage


class Pipeline:
    """Single-writer streaming engine; one step() call is one clock cycle."""

    def __init__(self, arch: ArchitecturePlan, fmt: FixedFormat,
                 coeffs: CoeffConfig | None = None,
                 scaling: ScalingPolicy | str = "per-stage",
                 trace: bool = False):
        self.arch = arch
        self.fmt = fmt
        self.coeffs = coeffs or CoeffConfig.for_format(fmt)
        if isinstance(scaling, str):
            scaling = ScalingPolicy.parse(scaling, arch.plan.n_stages)
        self.scaling = scaling
        self.trace: list[TraceEntry] | None = [] if trace else None
        self._stations = _build_stations(arch)

        self._rotators: dict[int, list[BoundRotator]] = {}
        for cfg in arch.stages:
            if arch.rotation_schedules[cfg.stage_index - 1] is None:
                continue
            self._rotators[cfg.stage_index] = [
                BoundRotator(cfg.rotator_kinds[p], cfg.twiddle_base,
                             cfg.allocated_exponents[p], fmt, self.coeffs)
                for p in range(N_PATHS)]

        self._exponents = {st.index: st.exponents for st in arch.plan.stages}
        self._pair_bit = {st.index: st.pair_bit for st in arch.plan.stages}

        self.cycle = 0
        self._calendar: dict[int, list] = defaultdict(list)
        self._pending = 0
        self._stash: dict[tuple[int, int], tuple] = {}
        self._last_input_cycle = [-1] * N_PATHS
        self.rotation_counts: Counter = Counter()  # (stage, path0, m) -> count
        self._busy: dict[int, Counter] = defaultdict(Counter)  # station -> cycle
        self._first_out: dict[int, int] = {}  # frame -> cycle
        self._first_in: dict[int, int] = {}

    # -- public timing facts ------------------------------------------------

    @property
    def latency_cycles(self) -> int:
        """Fixed offset between a frame's input slots and its output slots."""
        return self._stations[-1].phase

    @property
    def pending(self) -> int:
        return self._pending

    # -- event plumbing -----------------------------------------------------

    def _schedule(self, station: _Station, frame: int, row: int,
                  re: int, im: int) -> None:
        land = station.phase + FRAME_CYCLES * frame + station.schedule.slot_of[row]
        self._calendar[land].append((station.index, frame, row, re, im))
        self._pending += 1

    def _inject_raw(self, path0: int, frame: int, slot: int,
                    re: int, im: int) -> None:
        # io schedule inverse: sample index = 32 * path + slot
        row = FRAME_CYCLES * path0 + slot
        self._first_in.setdefault(frame, self.cycle)
        self._schedule(self._stations[1], frame, row, re, im)

    def step(self, inputs: Sequence[StreamEvent] = ()) -> list[StreamEvent]:
        """Advance one clock; feed due input events, collect due outputs."""
        seen_paths = set()
        for ev in inputs:
            if not 1 <= ev.path <= N_PATHS:
                raise StreamProtocolError(f"path {ev.path} outside 1..{N_PATHS}")
            if ev.cycle != self.cycle:
                raise StreamProtocolError(
                    f"event for cycle {ev.cycle} fed at cycle {self.cycle}")
            if ev.path in seen_paths:
                raise StreamProtocolError(
                    f"two events on path {ev.path} at cycle {ev.cycle}")
            seen_paths.add(ev.path)
            if ev.cycle <= self._last_input_cycle[ev.path - 1]:
                raise StreamProtocolError("events out of serial order")
            slot = ev.cycle - FRAME_CYCLES * ev.frame_id
            if not 0 <= slot < FRAME_CYCLES:
                raise StreamProtocolError(
                    f"cycle {ev.cycle} is not inside frame {ev.frame_id} "
                    f"(frames start every {FRAME_CYCLES} cycles)")
            if ev.sample.fmt != self.fmt:
                raise StreamProtocolError("sample format differs from pipeline's")
            self._last_input_cycle[ev.path - 1] = ev.cycle
            self._inject_raw(ev.path - 1, ev.frame_id, slot,
                             ev.sample.re.raw, ev.sample.im.raw)
        out = []
        for path0, frame, row, re, im in self._advance():
            out.append(StreamEvent(
                path=path0 + 1, cycle=self.cycle - 1,
                sample=CFx(Fx(re, self.fmt), Fx(im, self.fmt)), frame_id=frame))
        return out

    # -- the clock ----------------------------------------------------------

    def _advance(self) -> list[tuple]:
        """Process everything due now; returns raw sink arrivals."""
        now = self.cycle
        events = self._calendar.pop(now, ())
        outputs = []
        if events:
            self._pending -= len(events)
            events = sorted(events)
        for st_idx, frame, row, re, im in events:
            station = self._stations[st_idx]
            if station.kind == "butterfly":
                self._butterfly(station, frame, row, re, im, now)
            elif station.kind == "rotate":
                self._rotate(station, frame, row, re, im, now)
            else:  # sink
                path0 = station.schedule.path_of[row]
                self._first_out.setdefault(frame, now)
                outputs.append((path0, frame, row, re, im))
        self.cycle = now + 1
        return outputs

    def _butterfly(self, station, frame, row, re, im, now) -> None:
        bit = self._pair_bit[station.stage]
        path0 = station.schedule.path_of[row]
        key = (station.index, path0)
        if (row >> bit) & 1 == 0:
            if key in self._stash:
                raise ScheduleError(f"pairing clash at stage {station.stage}")
            self._stash[key] = (frame, row, re, im)
            return
        try:
            pframe, prow, pre, pim = self._stash.pop(key)
        except KeyError:
            raise ScheduleError(
                f"stage {station.stage} got diff-row {row} with no partner"
            ) from None
        if pframe != frame or prow != (row & ~(1 << bit)):
            raise ScheduleError(f"mispaired rows {prow}/{row} at stage {station.stage}")
        fmt, mode = self.fmt, self.fmt.rounding
        halve = self.scaling.scales(station.stage)
        sum_re, sum_im = pre + re, pim + im
        diff_re, diff_im = pre - re, pim - im
        if halve:
            sum_re = shift_round(sum_re, 1, mode)
            sum_im = shift_round(sum_im, 1, mode)
            diff_re = shift_round(diff_re, 1, mode)
            diff_im = shift_round(diff_im, 1, mode)
        sum_re = apply_overflow(sum_re, fmt)
        sum_im = apply_overflow(sum_im, fmt)
        diff_re = apply_overflow(diff_re, fmt)
        diff_im = apply_overflow(diff_im, fmt)
        # 2 add/sub units: sum this cycle, difference the next
        busy = self._busy[station.index]
        busy[now] += 1
        busy[now + 1] += 1
        if self.trace is not None:
            self.trace.append(TraceEntry(now, path0 + 1, station.stage,
                                         "bf-sum", sum_re, sum_im, None))
            self.trace.append(TraceEntry(now + 1, path0 + 1, station.stage,
                                         "bf-diff", diff_re, diff_im, None))
        nxt = self._stations[station.index + 1]
        self._schedule(nxt, frame, prow, sum_re, sum_im)
        self._schedule(nxt, frame, row, diff_re, diff_im)

    def _rotate(self, station, frame, row, re, im, now) -> None:
        stage = station.stage
        path0 = station.schedule.path_of[row]
        m = self._exponents[stage][row]
        rot = self._rotators[stage][path0]
        re2, im2 = rot.rotate_raw(re, im, m)
        self.rotation_counts[(stage, path0, m)] += 1
        if rot.kind == KIND_TW or angle_class(rot.base, m) >= 8:
            self._busy[station.index][now] += 1
        if self.trace is not None:
            self.trace.append(TraceEntry(now, path0 + 1, stage, "rotate",
                                         re2, im2, m))
        self._schedule(self._stations[station.index + 1], frame, row, re2, im2)

    # -- reporting ----------------------------------------------------------

    def utilization_report(self, n_frames: int) -> "UtilizationReport":
        bf_util, rot_util = [], []
        for station in self._stations:
            if station.kind not in ("butterfly", "rotate"):
                continue
            busy = self._busy.get(station.index)
            if not busy:
                ratio = 0.0
            else:
                span = max(busy) - min(busy) + 1
                ratio = sum(busy.values()) / (N_PATHS * span)
            if station.kind == "butterfly":
                bf_util.append(ratio)
            else:
                rot_util.append(ratio)
        # align rotator ratios to stages (insert 0.0 where no rotation point)
        aligned, it = [], iter(rot_util)
        for st in self.arch.plan.stages:
            if self.arch.rotation_schedules[st.index - 1] is None:
                aligned.append(0.0)
            else:
                aligned.append(next(it))
        per_frame = [self._first_out[f] - self._first_in[f]
                     for f in sorted(self._first_out)]
        total = self.latency_cycles + FRAME_CYCLES * n_frames
        return UtilizationReport(
            latency_cycles=self.latency_cycles,
            n_frames=n_frames,
            total_cycles=total,
            throughput_samples_per_cycle=(
                self.arch.n_points * n_frames / (FRAME_CYCLES * n_frames)),
            butterfly_utilization=tuple(bf_util),
            rotator_utilization=tuple(aligned),
            per_frame_latency=tuple(per_frame),
        )


@dataclass(frozen=True)
class UtilizationReport:
    """Measured timing and hardware-occupancy facts from one streaming run.

    Butterfly utilization counts the two real add/sub units of each
    half-butterfly (sum one cycle, difference the next).  Rotator
    utilization counts cycles where multiplier datapaths do arithmetic:
    every sample for general rotators, the 45-degree-family exponents for
    the constant-multiplier kinds; trivial quarter-turns are wiring.
    """

    latency_cycles: int
    n_frames: int
    total_cycles: int
    throughput_samples_per_cycle: float
    butterfly_utilization: tuple[float, ...]
    rotator_utilization: tuple[float, ...]
    per_frame_latency: tuple[int, ...]


@dataclass(frozen=True)
class PipelineRun:
    """Outputs and bookkeeping of run_frames (rows in bit-reversed order)."""

    re: np.ndarray
    im: np.ndarray
    report: UtilizationReport
    rotation_counts: Counter
    trace: list[TraceEntry] | None


def run_frames(arch: ArchitecturePlan, re, im, fmt: FixedFormat,
               coeffs: CoeffConfig | None = None,
               scaling: ScalingPolicy | str = "per-stage",
               trace: bool = False) -> PipelineRun:
    """Stream frames back-to-back through a fresh pipeline.

    re/im are raw int64 arrays shaped (frames, 128) in natural sample order.
    Output arrays hold row-major (bit-reversed bin) order, matching
    fft_fixed(..., output_order="bitrev") bit for bit.
    """
    re = np.atleast_2d(np.asarray(re, dtype=np.int64))
    im = np.atleast_2d(np.asarray(im, dtype=np.int64))
    if re.shape != im.shape or re.shape[1] != arch.n_points:
        raise ValueError(f"expected (frames, {arch.n_points}) raw arrays")
    n_frames = re.shape[0]
    pipe = Pipeline(arch, fmt, coeffs=coeffs, scaling=scaling, trace=trace)
    out_re = np.zeros_like(re)
    out_im = np.zeros_like(im)
    re_list = re.tolist()  # plain ints keep the hot loop exact and fast
    im_list = im.tolist()
    seen = 0
    expected = n_frames * arch.n_points
    feed_cycles = FRAME_CYCLES * n_frames
    while seen < expected:
        now = pipe.cycle
        if now < feed_cycles:
            frame, slot = divmod(now, FRAME_CYCLES)
            frame_re, frame_im = re_list[frame], im_list[frame]
            for p in range(N_PATHS):
                row = FRAME_CYCLES * p + slot
                pipe._inject_raw(p, frame, slot, frame_re[row], frame_im[row])
        for path0, frame, row, r_raw, i_raw in pipe._advance():
            out_re[frame, row] = r_raw
            out_im[frame, row] = i_raw
            seen += 1
        if now > feed_cycles + pipe.latency_cycles + FRAME_CYCLES and not pipe.pending:
            raise ScheduleError("pipeline drained without emitting all samples")
    return PipelineRun(out_re, out_im, pipe.utilization_report(n_frames),
                       pipe.rotation_counts, pipe.trace)


# ---------------------------------------------------------------------------
# allocation checking


@dataclass(frozen=True)
class AllocationViolation:
    stage: int
    path: int  # 1-based
    exponent: int
    count: int


@dataclass(frozen=True)
class AllocationReport:
    violations: tuple[AllocationViolation, ...]
    histograms: dict

    @property
    def ok(self) -> bool:
        return not self.violations


def check_allocation(arch: ArchitecturePlan, rotation_counts: Counter) -> AllocationReport:
    """Verify executed rotations against each path's allocated exponent set.

    rotation_counts maps (stage, path0, exponent) to execution count, as
    collected by Pipeline/run_frames.  Exponent 0 is a bypass, legal on
    every path; anything else must be in the stage/path allocation.
    Histograms collect nonzero executed exponents per (stage, path).
    """
    violations = []
    histograms: dict = {}
    for (stage, path0, m), count in sorted(rotation_counts.items()):
        if m:
            histograms.setdefault((stage, path0 + 1), Counter())[m] += count
        allowed = arch.stage(stage).allocated_exponents[path0]
        if m and m not in allowed:
            violations.append(AllocationViolation(stage, path0 + 1, m, count))
    return AllocationReport(tuple(violations), histograms)


def table_allocation_histogram(arch: ArchitecturePlan, n_frames: int = 1) -> dict:
    """Expected nonzero rotation counts per (stage, path) for clean runs."""
    expect: dict = {}
    for stage_index in (4, 5, 6):
        sched = arch.rotation_schedules[stage_index - 1]
        exps = arch.plan.stage(stage_index).exponents
        for r in range(arch.n_points):
            m = exps[r]
            if m:
                key = (stage_index, sched.path_of[r] + 1)
                expect.setdefault(key, Counter())[m] += n_frames
    return expect
