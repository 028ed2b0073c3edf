"""Streaming architecture tests.

The bit-exactness oracle is the staged reference model (itself tested
against a naive DFT), schedules are checked against closed-form
path/slot maps recomputed here, and the exponent-allocation contract is
checked both positively and through a deliberate misrouting fault.
"""

import numpy as np
import pytest

from fftpipe.fixedpoint import CFx, FixedFormat, Fx
from fftpipe.flowgraph import build_plan, fft_fixed
from fftpipe.pipeline import (
    FAULTS,
    FRAME_CYCLES,
    AllocationViolation,
    Pipeline,
    Schedule,
    ScheduleError,
    StreamEvent,
    StreamProtocolError,
    build_architecture,
    butterfly_schedule,
    check_allocation,
    delay_elements,
    dump_trace,
    interleave_schedule,
    io_schedule,
    run_frames,
    table_allocation_histogram,
)
from fftpipe.rotators import KIND_NONE, KIND_TW, KIND_W4, KIND_W8, KIND_W16

Q11 = FixedFormat(12, 11)


def _random_raw(n_frames, seed, fmt=Q11, lo=-1024, hi=1025):
    rng = np.random.default_rng(seed)
    return (rng.integers(lo, hi, (n_frames, 128)),
            rng.integers(lo, hi, (n_frames, 128)))


# ---------------------------------------------------------------------------
# schedules


def test_schedule_validation():
    ok = Schedule("ok", (0, 0, 1, 1), (0, 1, 0, 1))
    assert ok.position(2) == (1, 0)
    assert ok.row_at(1, 1) == 3
    with pytest.raises(ScheduleError, match="bijection"):
        Schedule("dup", (0, 0, 1, 1), (0, 1, 0, 0))
    with pytest.raises(ScheduleError, match="slots"):
        Schedule("slot", (0, 0, 1, 1), (0, 1, 0, 32))
    with pytest.raises(ScheduleError, match="path"):
        Schedule("path", (0, 0, 1, 4), (0, 1, 0, 1))
    with pytest.raises(ScheduleError, match="no row"):
        ok.row_at(3, 9)


def test_butterfly_schedule_closed_form():
    # stage s pairs rows across bit 7-s; dropping that bit names the pair,
    # the bit picks the first/second cycle of the two-cycle slot
    for s in range(1, 8):
        sched = butterfly_schedule(s)
        bit = 7 - s
        for r in range(128):
            partner = ((r >> (bit + 1)) << bit) | (r & ((1 << bit) - 1))
            b = (r >> bit) & 1
            assert sched.path_of[r] == partner // 16
            assert sched.slot_of[r] == 2 * (partner % 16) + b


def test_io_and_interleave_schedules():
    io = io_schedule()
    il = interleave_schedule()
    for r in range(128):
        assert (io.path_of[r], io.slot_of[r]) == (r // 32, r % 32)
        assert (il.path_of[r], il.slot_of[r]) == (r % 4, r // 4)


# ---------------------------------------------------------------------------
# architecture construction


def test_build_architecture_default():
    arch = build_architecture()
    assert arch.n_points == 128 and arch.n_paths == 4
    assert arch.fault is None
    assert arch.plan.twiddle_bases == (4, 8, 128, 16, 8, 4, 1)


def test_build_architecture_rejects_other_plans():
    with pytest.raises(ValueError):
        build_architecture(build_plan(128, (7,)))
    with pytest.raises(ValueError, match="misroute-stage5"):
        build_architecture(fault="unknown-fault")
    assert "misroute-stage5" in FAULTS


def test_rotator_kind_census():
    arch = build_architecture()
    want = {
        1: (KIND_W4,) * 4,
        2: (KIND_W8,) * 4,
        3: (KIND_TW,) * 4,
        4: (KIND_W4, KIND_W16, KIND_W8, KIND_W16),
        5: (KIND_NONE, KIND_W8, KIND_W4, KIND_W8),
        6: (KIND_NONE, KIND_NONE, KIND_NONE, KIND_W4),
        7: (KIND_NONE,) * 4,
    }
    for s, kinds in want.items():
        assert arch.stage(s).rotator_kinds == kinds, s


def test_allocated_exponent_sets():
    arch = build_architecture()
    assert arch.stage(4).allocated_exponents == (
        frozenset({0, 4}), frozenset({1, 5}), frozenset({2, 6}), frozenset({3, 7}))
    assert arch.stage(5).allocated_exponents == (
        frozenset({0}), frozenset({1}), frozenset({2}), frozenset({3}))
    assert arch.stage(6).allocated_exponents == (
        frozenset({0}), frozenset({0}), frozenset({0}), frozenset({1}))
    # early stages run one rotator per path over whatever the rows carry
    for s in (1, 2, 3):
        sched = arch.rotation_schedules[s - 1]
        exps = arch.plan.stage(s).exponents
        for q in range(4):
            executed = {exps[r] for r in range(128) if sched.path_of[r] == q}
            assert executed <= arch.stage(s).allocated_exponents[q] | {0}


# ---------------------------------------------------------------------------
# streamed transform vs reference model


@pytest.mark.parametrize("word_length", [12, 16])
def test_pipeline_matches_reference_model(word_length):
    fmt = FixedFormat(word_length, word_length - 1)
    arch = build_architecture()
    hi = fmt.max_raw // 2
    re, im = _random_raw(20, word_length, fmt, -hi, hi + 1)
    run = run_frames(arch, re, im, fmt)
    ref = fft_fixed(re, im, fmt)
    assert np.array_equal(run.re, ref.re)
    assert np.array_equal(run.im, ref.im)


def test_pipeline_full_scale_saturating_inputs_still_match():
    re, im = _random_raw(5, 99, lo=-2048, hi=2048)
    arch = build_architecture()
    run = run_frames(arch, re, im, Q11, scaling="none")
    ref = fft_fixed(re, im, Q11, scaling="none")
    assert np.array_equal(run.re, ref.re)
    assert np.array_equal(run.im, ref.im)


def test_timing_report():
    arch = build_architecture()
    re, im = _random_raw(6, 3)
    run = run_frames(arch, re, im, Q11)
    rep = run.report
    assert len(set(rep.per_frame_latency)) == 1  # constant latency
    assert rep.latency_cycles == rep.per_frame_latency[0]
    assert rep.total_cycles == rep.latency_cycles + FRAME_CYCLES * 6
    assert rep.throughput_samples_per_cycle == 4.0
    assert rep.butterfly_utilization == (1.0,) * 7
    assert rep.rotator_utilization[2] == 1.0       # general rotators never idle
    assert rep.rotator_utilization[0] == 0.0       # quarter-turns are wiring
    assert rep.rotator_utilization[5] == 0.0
    assert rep.rotator_utilization[6] == 0.0


def test_latency_independent_of_data():
    arch = build_architecture()
    for seed in (0, 1):
        re, im = _random_raw(2, seed)
        run = run_frames(arch, re, im, Q11)
        assert run.report.latency_cycles == Pipeline(arch, Q11).latency_cycles


def test_rotation_event_totals():
    arch = build_architecture()
    re, im = _random_raw(3, 4)
    run = run_frames(arch, re, im, Q11)
    by_stage = {}
    for (stage, _path, _m), n in run.rotation_counts.items():
        by_stage[stage] = by_stage.get(stage, 0) + n
    assert by_stage == {s: 128 * 3 for s in range(1, 7)}  # stage 7 has none


# ---------------------------------------------------------------------------
# step-level protocol


def _event(_unused, path, cycle, frame_id, re_raw=0, im_raw=0, fmt=Q11):
    return StreamEvent(path=path, cycle=cycle, frame_id=frame_id,
                       sample=CFx(Fx(re_raw, fmt), Fx(im_raw, fmt)))


def test_step_protocol_errors():
    arch = build_architecture()

    def fresh():
        # a rejected batch may already have fed earlier events in the list,
        # so every scenario gets an untouched pipeline
        return Pipeline(arch, Q11)

    with pytest.raises(StreamProtocolError, match="path"):
        fresh().step([_event(None, 5, 0, 0)])
    with pytest.raises(StreamProtocolError, match="cycle 3"):
        fresh().step([_event(None, 1, 3, 0)])
    with pytest.raises(StreamProtocolError, match="two events on path"):
        fresh().step([_event(None, 1, 0, 0), _event(None, 1, 0, 0)])
    with pytest.raises(StreamProtocolError, match="not inside frame"):
        fresh().step([_event(None, 1, 0, 1)])
    with pytest.raises(StreamProtocolError, match="format"):
        fresh().step([_event(None, 1, 0, 0, fmt=FixedFormat(12, 8))])


def test_step_rejects_replayed_cycle_on_same_path():
    pipe = Pipeline(build_architecture(), Q11)
    try:
        pipe.step([_event(None, 1, 0, 0), _event(None, 1, 0, 0)])
    except StreamProtocolError:
        pass  # first copy of the event was already consumed
    assert pipe.cycle == 0
    with pytest.raises(StreamProtocolError, match="serial order"):
        pipe.step([_event(None, 1, 0, 0)])


def test_idle_steps_advance_clock():
    pipe = Pipeline(build_architecture(), Q11)
    assert pipe.cycle == 0
    assert pipe.step() == []
    assert pipe.step() == []
    assert pipe.cycle == 2
    assert pipe.pending == 0


def test_manual_stepping_reproduces_batch_run():
    arch = build_architecture()
    re, im = _random_raw(2, 5)
    want = run_frames(arch, re, im, Q11)

    pipe = Pipeline(arch, Q11)
    got_re = np.zeros_like(want.re)
    got_im = np.zeros_like(want.im)
    seen = 0
    while seen < 256:
        now = pipe.cycle
        inputs = []
        if now < 64:
            frame, slot = divmod(now, FRAME_CYCLES)
            for p in range(4):
                row = FRAME_CYCLES * p + slot
                inputs.append(_event(pipe, p + 1, now, frame,
                                     int(re[frame, row]), int(im[frame, row])))
        for ev in pipe.step(inputs):
            slot = ev.cycle - pipe.latency_cycles - FRAME_CYCLES * ev.frame_id
            row = FRAME_CYCLES * (ev.path - 1) + slot
            got_re[ev.frame_id, row] = ev.sample.re.raw
            got_im[ev.frame_id, row] = ev.sample.im.raw
            seen += 1
    assert np.array_equal(got_re, want.re)
    assert np.array_equal(got_im, want.im)
    assert pipe.pending == 0


def test_trace_dump_format():
    arch = build_architecture()
    re, im = _random_raw(1, 6)
    run = run_frames(arch, re, im, Q11, trace=True)
    text = dump_trace(run.trace)
    lines = text.splitlines()
    assert lines[0] == "# cycle path stage event raw_re raw_im exponent"
    assert len(lines) == 1 + len(run.trace)
    events = set()
    for line in lines[1:]:
        toks = line.split()
        assert len(toks) == 7
        assert 1 <= int(toks[1]) <= 4
        assert 1 <= int(toks[2]) <= 7
        events.add(toks[3])
        if toks[3] != "rotate":
            assert toks[6] == "-"  # butterflies carry no exponent
    assert events == {"bf-sum", "bf-diff", "rotate"}


# ---------------------------------------------------------------------------
# exponent allocation


def test_allocation_clean_run():
    arch = build_architecture()
    re, im = _random_raw(3, 7)
    run = run_frames(arch, re, im, Q11)
    report = check_allocation(arch, run.rotation_counts)
    assert report.ok
    assert report.violations == ()
    # the audit histograms cover every stage; the contract table pins 4..6
    observed = {k: dict(v) for k, v in report.histograms.items() if k[0] >= 4}
    assert observed == table_allocation_histogram(arch, 3)


def test_table_allocation_histogram_closed_form():
    # stage 4 splits the eight 16th-turn exponents two per path, stage 5
    # pins each 8th-turn exponent to its own path, stage 6 needs a single
    # quarter-turn on the last path
    hist = table_allocation_histogram(build_architecture(), 2)
    want = {
        (4, 1): {4: 16},
        (4, 2): {1: 16, 5: 16},
        (4, 3): {2: 16, 6: 16},
        (4, 4): {3: 16, 7: 16},
        (5, 2): {1: 32},
        (5, 3): {2: 32},
        (5, 4): {3: 32},
        (6, 4): {1: 64},
    }
    assert hist == want


def test_misroute_fault_detected_but_stream_correct():
    arch = build_architecture(fault="misroute-stage5")
    re, im = _random_raw(2, 8)
    run = run_frames(arch, re, im, Q11)

    # outputs stay bit-exact: the misrouted rotators fall back to full
    # coefficient math, so only the allocation audit can see the fault
    ref = fft_fixed(re, im, Q11)
    assert np.array_equal(run.re, ref.re)
    assert np.array_equal(run.im, ref.im)

    report = check_allocation(arch, run.rotation_counts)
    assert not report.ok
    got = {(v.stage, v.path, v.exponent, v.count) for v in report.violations}
    assert got == {(5, 1, 3, 32), (5, 3, 1, 32), (5, 4, 2, 32)}
    assert all(isinstance(v, AllocationViolation) for v in report.violations)


# ---------------------------------------------------------------------------
# storage census


def test_delay_elements_census():
    arch = build_architecture()
    depths = delay_elements(arch)
    assert depths == delay_elements(build_architecture())  # deterministic
    assert set(depths) == set(range(1, 8))
    assert all(v >= 0 for v in depths.values())
    # commutator stages that reshape the whole frame dominate the storage
    assert depths[4] > depths[2]
    assert sum(depths.values()) == 712
