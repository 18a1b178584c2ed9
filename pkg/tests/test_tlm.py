import pytest

from ispverif.errors import TestbenchFatal
from ispverif.tlm import (
    AnalysisPort,
    Command,
    Component,
    Environment,
    GenericPayload,
    InitiatorSocket,
    ListSequence,
    Phase,
    SequenceItem,
    Sequencer,
    Status,
    TargetSocket,
    Verdict,
    bind,
    run_phases,
)


def _ok_target(payload, delay):
    payload.status = Status.OK
    if not payload.is_write:
        payload.value = 0x1234
    return delay + 5


def test_payload_little_endian_value():
    p = GenericPayload.write(0x10, 0xA1B2C3D4)
    assert p.data == bytes([0xD4, 0xC3, 0xB2, 0xA1])
    assert p.value == 0xA1B2C3D4
    assert p.command is Command.WRITE
    snap = p.snapshot()
    assert snap.value == 0xA1B2C3D4 and snap.length == 4


def test_b_transport_round_trip():
    init = InitiatorSocket("i")
    bind(init, TargetSocket("t", _ok_target))
    p, delay = init.b_transport(GenericPayload.read(0), 3)
    assert p.status is Status.OK and p.value == 0x1234 and delay == 8


@pytest.mark.parametrize("handler, code", [
    (lambda p, d: d, "INCOMPLETE_RESPONSE"),
    (lambda p, d: (setattr(p, "status", Status.OK), d - 1)[1], "DELAY_DECREASED"),
])
def test_target_contract_violations_are_fatal(handler, code):
    init = InitiatorSocket("i")
    bind(init, TargetSocket("t", handler))
    with pytest.raises(TestbenchFatal) as exc:
        init.b_transport(GenericPayload.read(0), 2)
    assert exc.value.code == code


def test_unbound_and_double_bind():
    init = InitiatorSocket("i")
    with pytest.raises(TestbenchFatal) as exc:
        init.b_transport(GenericPayload.read(0))
    assert exc.value.code == "UNBOUND_SOCKET"
    bind(init, TargetSocket("t", _ok_target))
    with pytest.raises(TestbenchFatal) as exc:
        bind(init, TargetSocket("t2", _ok_target))
    assert exc.value.code == "DOUBLE_BIND"


def test_reused_payload_rejected():
    init = InitiatorSocket("i")
    bind(init, TargetSocket("t", _ok_target))
    p, _ = init.b_transport(GenericPayload.read(0))
    with pytest.raises(TestbenchFatal) as exc:
        init.b_transport(p)
    assert exc.value.code == "BAD_PAYLOAD"


class _Worker(Component):
    def __init__(self, name, parent, duration, log):
        super().__init__(name, parent)
        self.duration = duration
        self.log = log

    def build_phase(self):
        self.log.append(("build", self.full_name))

    def run_phase(self):
        self.raise_objection()
        yield self.kernel.wait(self.duration)
        self.drop_objection()


def test_phases_order_and_drain():
    log = []
    env = Environment("env")
    _Worker("a", env, 100, log)
    _Worker("b", env, 300, log)
    outcome = run_phases(env, max_time=10_000, drain_time=50)
    assert outcome.verdict is Verdict.PASS
    assert outcome.end_time == 350
    assert outcome.phase_trace == [Phase.BUILD, Phase.CONNECT, Phase.RUN, Phase.EXTRACT, Phase.CHECK, Phase.REPORT]
    assert log == [("build", "env.a"), ("build", "env.b")]


def test_timeout_when_objection_held():
    env = Environment("env")
    _Worker("slow", env, 5000, [])
    outcome = run_phases(env, max_time=1000)
    assert outcome.verdict is Verdict.TIMEOUT and outcome.end_time == 1000


def test_component_error_fails_test():
    class Bad(Component):
        def check_phase(self):
            self.error("NOPE", "always")

    env = Environment("env")
    Bad("bad", env)
    outcome = run_phases(env, max_time=1000)
    assert outcome.verdict is Verdict.FAIL
    assert [e.code for e in outcome.errors] == ["NOPE"]


def test_duplicate_child_name():
    env = Environment("env")
    Component("x", env)
    with pytest.raises(TestbenchFatal) as exc:
        Component("x", env)
    assert exc.value.code == "DUP_NAME"


def test_unmatched_drop_is_fatal():
    env = Environment("env")
    c = Component("c", env)
    with pytest.raises(TestbenchFatal) as exc:
        c.drop_objection()
    assert exc.value.code == "UNMATCHED_DROP"


def test_analysis_port_fanout():
    ap = AnalysisPort()
    got = []
    ap.subscribe(got.append)
    ap.subscribe(lambda x: got.append(x * 10))
    ap.publish(2)
    assert got == [2, 20]


class _Driver(Component):
    def __init__(self, name, parent, seqr, log):
        super().__init__(name, parent)
        self.seqr = seqr
        seqr.connect_driver(self)
        self.log = log

    def run_phase(self):
        while True:
            item = yield from self.seqr.get_next_item()
            yield self.kernel.wait(10)
            self.log.append((self.kernel.now, item.payload))
            self.seqr.item_done()


def test_sequencer_runs_sequences_in_order():
    env = Environment("env")
    log = []
    seqr = Sequencer("seqr", env)
    _Driver("drv", env, seqr, log)

    class Starter(Component):
        def run_phase(self):
            self.raise_objection()
            h1 = seqr.start(ListSequence([SequenceItem("n", i) for i in range(3)]))
            h2 = seqr.start(ListSequence([SequenceItem("n", 9)]))
            yield from h2.wait()
            assert h1.finished and h1.items_sent == 3
            self.drop_objection()

    Starter("starter", env)
    outcome = run_phases(env, max_time=10_000, drain_time=0)
    assert outcome.verdict is Verdict.PASS
    assert log == [(10, 0), (20, 1), (30, 2), (40, 9)]


def test_empty_sequence_finishes_immediately():
    env = Environment("env")
    seqr = Sequencer("seqr", env)
    _Driver("drv", env, seqr, [])
    handle = seqr.start(ListSequence([]))
    assert handle.finished
