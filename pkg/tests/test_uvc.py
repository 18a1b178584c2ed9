from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import SPLITMIX_SEED0_FIRST, random_pixels, splitmix64_stream
from ispverif.tlm import Command, Component, Environment, GenericPayload, Status, TargetSocket, Verdict, bind, run_phases
from ispverif.uvc import (
    ControlBusBfm,
    Frame,
    GapPolicy,
    SplitMix64,
    StreamAgent,
    StreamBeat,
    StreamMonitor,
    random_frame,
)


def test_splitmix_known_value():
    assert SplitMix64(0).next() == SPLITMIX_SEED0_FIRST
    assert SplitMix64(0).next() & 0xFF == 0xAF


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**64 - 1))
def test_splitmix_matches_oracle(seed):
    rng = SplitMix64(seed)
    assert [rng.next() for _ in range(8)] == splitmix64_stream(seed, 8)
    assert rng.steps == 8


def test_random_frame_matches_oracle():
    f = random_frame(SplitMix64(42), 8, 8)
    assert f.pixels == random_pixels(42, 64)


def test_between_bounds():
    rng = SplitMix64(3)
    vals = [rng.between(-2, 2) for _ in range(500)]
    assert set(vals) == {-2, -1, 0, 1, 2}


def _loopback(frames, gaps=GapPolicy(), width=4, height=3):
    env = Environment("env")
    agent = StreamAgent("agent", env, period=10, gaps=gaps, gap_seed=5)
    monitor = StreamMonitor("mon", env, width, height)
    agent.driver.beat_ap.subscribe(monitor.observe)
    log = agent.driver.record_beats()

    class Top(Component):
        def run_phase(self):
            yield from agent.send(frames).wait()

    Top("top", env)
    outcome = run_phases(env, max_time=10**7, drain_time=0)
    return monitor, log, outcome


def test_driver_one_beat_per_cycle_and_monitor_reassembles():
    frames = [random_frame(SplitMix64(s), 4, 3) for s in (1, 2)]
    monitor, log, outcome = _loopback(frames)
    assert outcome.verdict is Verdict.PASS
    assert monitor.frames == frames
    times = [t for t, _ in log]
    # 12 beats, one per 10 ns, plus one idle cycle between frames.
    assert times[:12] == list(range(0, 120, 10))
    assert times[12] == 120
    assert [b.sof for _, b in log].count(True) == 2 and log[11][1].eof


def test_gaps_change_timing_not_data():
    frames = [random_frame(SplitMix64(9), 4, 3)]
    monitor, log, _ = _loopback(frames, GapPolicy.random(0, 3))
    assert monitor.frames == frames
    deltas = {b - a for (a, _), (b, _) in zip(log, log[1:])}
    assert deltas <= {10, 20, 30, 40} and len(deltas) > 1


def test_monitor_errors():
    env = Environment("env")
    mon = StreamMonitor("mon", env, 2, 2)
    mon.observe(StreamBeat(1, False, False))
    mon.observe(StreamBeat(1, True, False))
    mon.observe(StreamBeat(2, False, True))
    for i in range(5):
        mon.observe(StreamBeat(i, i == 0, i == 4))
    assert [e.code for e in mon.errors] == ["MISSING_SOF", "SHORT_FRAME", "LONG_FRAME"]
    assert mon.frames == []


def test_control_bfm_serialises_and_times_accesses():
    env = Environment("env")
    store = {}

    def target(p, delay):
        if p.command is Command.WRITE:
            store[p.address] = p.value
        else:
            p.value = store.get(p.address, 0)
        p.status = Status.OK
        return delay + 3

    bfm = ControlBusBfm("bfm", env, period=10)
    bind(bfm.socket, TargetSocket("t", target))
    results = []

    class A(Component):
        def run_phase(self):
            results.append((yield from bfm.write(0x10, 7)))

    class B(Component):
        def run_phase(self):
            results.append((yield from bfm.read(0x10)))

    A("a", env)
    B("b", env)
    run_phases(env, max_time=1000)
    assert results == [Status.OK, (7, Status.OK)]
    assert [(a.start, a.end) for a in bfm.accesses] == [(0, 13), (13, 26)]


def test_frame_validation():
    import pytest
    with pytest.raises(ValueError):
        Frame(2, 2, b"\x00" * 3)
    f = Frame.from_rows([[1, 2], [3, 4]])
    assert f.at(1, 1) == 4 and f.rows() == [b"\x01\x02", b"\x03\x04"]
