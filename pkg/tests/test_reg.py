from hypothesis import given, settings
from hypothesis import strategies as st

from harness import random_frontdoor_ops
from ispverif.reg import Access, AddressMap, FieldSpec, RegisterSpec, field_update
from ispverif.tlm import BusTransaction, Command, Status


def _oracle(access, cur, wr, width=4):
    out = 0
    for b in range(width):
        c, w = (cur >> b) & 1, (wr >> b) & 1
        if access in ("RW", "WO"):
            v = w
        elif access == "RO":
            v = c
        else:  # W1C
            v = 0 if w else c
        out |= v << b
    return out


def test_field_update_truth_tables_exhaustive_4bit():
    for access in Access:
        for cur in range(16):
            for wr in range(16):
                assert field_update(access, cur, wr) == _oracle(access.value, cur, wr), (access, cur, wr)


def _status_reg():
    return RegisterSpec("STATUS", 0x40, (
        FieldSpec("busy", 0, 1, Access.RO, 0),
        FieldSpec("done", 1, 1, Access.W1C, 0),
        FieldSpec("cmd", 4, 4, Access.WO, 0),
        FieldSpec("data", 8, 8, Access.RW, 0x5A),
    ))


def test_register_predictions():
    reg = _status_reg()
    assert reg.reset == 0x5A00
    cur = 0x5A03  # busy=1, done=1
    after = reg.predict_write(cur, 0x0000_12F2)
    assert after & 1 == 1          # RO kept
    assert after & 2 == 0          # W1C cleared
    assert (after >> 8) & 0xFF == 0x12
    # A read updates readable fields but a WO field keeps its mirror value.
    mirrored = reg.predict_read(0x00F0, 0x0000_3300)
    assert (mirrored >> 4) & 0xF == 0xF
    assert (mirrored >> 8) & 0xFF == 0x33


def test_explicit_prediction_from_monitor(amap):
    from ispverif.reg import RegBlock
    block = RegBlock(amap, auto_predict=False, mem_reset={"GAMMA_LUT": list(range(256))})
    block.predict(BusTransaction(Command.WRITE, 0x0C, 0x0000_0200, 4, Status.OK))
    block.predict(BusTransaction(Command.WRITE, 0x404, 0x77, 4, Status.OK))
    block.predict(BusTransaction(Command.WRITE, 0x08, 0x99, 4, Status.ADDRESS_ERROR))
    assert block.mirror("GAIN") == 0x200
    assert block.mem_mirrors["GAMMA_LUT"][1] == 0x77
    assert block.mirror("BLACK_LEVEL") == 0


def test_mirror_tracks_peek_after_random_frontdoor_ops(amap):
    assert random_frontdoor_ops(amap, 300, seed=5) == []


def test_mirror_check_reports_field_mismatch(amap):
    from ispverif.isp.dut import ReferenceWrapper
    from ispverif.reg import RegBlock
    from ispverif.tlm import Component, Environment, bind, run_phases
    from ispverif.uvc import ControlBusBfm

    env = Environment("env")
    dut = ReferenceWrapper("dut", env)
    bfm = ControlBusBfm("bfm", env)
    bind(bfm.socket, dut.target)
    block = RegBlock(amap, adapter=bfm, backdoor=dut.backdoor)
    reports = []

    class T(Component):
        def run_phase(self):
            yield from block.write("GAIN", 0x180)
            block.poke("GAIN", 0x1FF)  # back door leaves the mirror stale
            reports.append((yield from block.mirror_check("GAIN")))
            reports.append((yield from block.mirror_check("CTRL")))

    T("t", env)
    run_phases(env, max_time=10_000)
    stale, clean = reports
    assert not stale.passed
    assert [(m.field, m.expected, m.actual) for m in stale.mismatches] == [("gain", 0x180, 0x1FF)]
    assert clean.passed


def test_address_map_lookup(amap):
    assert amap.register_at(0x0C).name == "GAIN"
    assert amap.memory_at(0x7FC).name == "GAMMA_LUT"
    assert amap.register_at(0x44) is None and not amap.is_mapped(0x44)
    assert len(amap.registers) == 15 and len(amap.memories) == 1


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(list(Access)), st.integers(1, 8), st.data())
def test_field_update_stays_in_width(access, width, data):
    cur = data.draw(st.integers(0, (1 << width) - 1))
    wr = data.draw(st.integers(0, (1 << width) - 1))
    assert 0 <= field_update(access, cur, wr) < 1 << width
