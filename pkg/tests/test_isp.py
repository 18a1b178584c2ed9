import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harness import run_stand_in
from oracles import pipeline_output, pipeline_stages, random_pixels
from ispverif.errors import ConfigError
from ispverif.isp import (
    IDENTITY_LUT,
    FaultSpec,
    IspConfig,
    Stage,
    ref_process_frame,
    shipped_faults,
    stage_black_level,
    stage_conv,
    stage_gain,
    stage_gamma,
)
from ispverif.isp import regs as R
from ispverif.isp.regs import RegisterBank, decode_config, encode_config
from ispverif.tb.params import random_isp_config
from ispverif.tlm import GenericPayload, Status
from ispverif.uvc import Frame, SplitMix64, random_frame


def test_black_level_examples():
    assert stage_black_level(16, 16) == 0
    assert stage_black_level(10, 16) == 0
    assert stage_black_level(200, 16) == 184


def test_gain_examples():
    assert all(stage_gain(p, 0x100) == p for p in range(256))
    assert stage_gain(100, 0x180) == (100 * 384) // 256 == 150
    assert stage_gain(255, 0xFFFF) == 255


def test_gamma_examples():
    assert stage_gamma(77, IDENTITY_LUT) == 77
    assert stage_gamma(5, bytes(255 - i for i in range(256))) == 250
    assert stage_gamma(200, bytes([7] * 256)) == 7


def test_conv_identity_and_derived_examples():
    f = random_frame(SplitMix64(1), 5, 4)
    assert stage_conv(f, (0, 0, 0, 0, 1, 0, 0, 0, 0), 0) == f
    const = Frame(4, 4, bytes([64] * 16))
    expect = pipeline_output(IspConfig(4, 4, conv_en=True, kernel=(1,) * 9, shift=3), const.pixels)
    assert set(expect) == {72}
    assert stage_conv(const, (1,) * 9, 3).pixels == expect
    grid = Frame.from_rows([[10, 20, 30], [40, 50, 60], [70, 80, 90]])
    assert stage_conv(grid, (1,) * 9, 0).at(1, 1) == 255  # 450 clamps


def test_negative_sums_floor_and_clamp():
    f = Frame.from_rows([[0, 0, 0], [0, 3, 0], [0, 0, 0]])
    out = stage_conv(f, (0, 0, 0, 0, -1, 0, 0, 0, 0), 1)
    assert out.at(1, 1) == 0  # -3 >> 1 == -2, clamped
    out = stage_conv(f, (0, 0, 0, 0, 5, 0, 0, 0, 0), 1)
    assert out.at(1, 1) == 7


@pytest.mark.parametrize("all_stages", [False, True])
def test_identity_configs(all_stages):
    f = random_frame(SplitMix64(8), 9, 7)
    assert ref_process_frame(IspConfig.identity(9, 7, all_stages), f) == f


def test_pipe_disabled_and_dimension_mismatch():
    f = random_frame(SplitMix64(8), 4, 4)
    assert ref_process_frame(IspConfig(4, 4, pipe_en=False), f) is None
    with pytest.raises(ConfigError) as exc:
        ref_process_frame(IspConfig(5, 4), f)
    assert exc.value.code == "DIMENSION_MISMATCH"


def test_invalid_config_rejected():
    with pytest.raises(ConfigError):
        IspConfig(2, 8).validate()
    with pytest.raises(ConfigError):
        IspConfig(8, 8, shift=8).validate()


configs = st.builds(
    lambda seed, w, h: random_isp_config(SplitMix64(seed), w, h),
    st.integers(0, 2**32), st.integers(3, 12), st.integers(3, 12))


@settings(max_examples=60, deadline=None)
@given(configs, st.integers(0, 2**32))
def test_reference_equals_oracle_composition(cfg, seed):
    pixels = random_pixels(seed, cfg.width * cfg.height)
    out = ref_process_frame(cfg, Frame(cfg.width, cfg.height, pixels))
    assert out.pixels == pipeline_output(cfg, pixels)
    # Purity: a second call gives the same answer.
    assert ref_process_frame(cfg, Frame(cfg.width, cfg.height, pixels)) == out


def test_per_pixel_stages_in_range_exhaustive():
    p = np.arange(256)
    for bl in range(256):
        v = [stage_black_level(int(x), bl) for x in p]
        assert min(v) >= 0 and max(v) <= 255
    for g in list(range(0, 0x10000, 257)) + [0xFFFF]:
        v = [stage_gain(int(x), g) for x in p]
        assert min(v) >= 0 and max(v) <= 255


# -- register bank -----------------------------------------------------------

def _access(bank, cmd, addr, value=0):
    p = GenericPayload.write(addr, value) if cmd == "w" else GenericPayload.read(addr)
    bank.bus_access(p)
    return p


def test_register_bank_reset_and_policies():
    bank = RegisterBank()
    assert _access(bank, "r", R.GAIN).value == 0x100
    assert _access(bank, "r", R.KERNEL[4]).value == 1
    assert _access(bank, "r", R.LUT_BASE + 4 * 77).value == 77
    _access(bank, "w", R.CTRL, 0xFFFF_FFFF)
    assert _access(bank, "r", R.CTRL).value == 0x1F
    bank.set_status(busy=True, frame_done=True)
    _access(bank, "w", R.STATUS, 0xFFFF_FFFF)          # busy is RO, frame_done W1C
    assert _access(bank, "r", R.STATUS).value == R.STATUS_BUSY
    assert _access(bank, "r", 0x44).status is Status.ADDRESS_ERROR
    assert _access(bank, "r", 0x2).status is Status.GENERIC_ERROR


def test_dropped_counter_saturates():
    bank = RegisterBank()
    for _ in range(300):
        bank.count_drop()
    assert (bank.peek(R.STATUS) >> 8) & 0xFF == 0xFF


@settings(max_examples=60, deadline=None)
@given(configs)
def test_encode_decode_bijection(cfg):
    regs, lut = encode_config(cfg)
    assert decode_config(regs, lut) == cfg
    assert list(regs)[-1] == R.CTRL


# -- stand-in DUT -------------------------------------------------------------

def test_stand_in_matches_reference_small_sweep():
    rng = SplitMix64(2024)
    pairs = []
    for _ in range(12):
        w, h = rng.between(3, 20), rng.between(3, 20)
        pairs.append((random_isp_config(rng, w, h), random_frame(rng, w, h)))
    for cfg, frame in pairs:
        out, outcome = run_stand_in([(cfg, frame)])
        assert outcome.verdict.value == "PASS", outcome.errors
        assert out == [ref_process_frame(cfg, frame)]


def test_stand_in_config_latched_at_sof():
    from ispverif.isp.dut import StagedPipeline
    from ispverif.tlm import Component, Environment, run_phases
    from ispverif.uvc import StreamAgent, StreamMonitor

    env = Environment("env")
    dut = StagedPipeline("dut", env)
    agent = StreamAgent("agent", env)
    mon = StreamMonitor("mon", env, 8, 8)
    agent.driver.beat_ap.subscribe(dut.stream_in)
    dut.out_ap.subscribe(mon.observe)
    cfg = IspConfig(8, 8, gain_en=True, gain=0x80)
    regs, _ = encode_config(cfg)
    for off, v in regs.items():
        dut.backdoor.poke(off, v)
    frame = random_frame(SplitMix64(4), 8, 8)

    class Top(Component):
        def run_phase(self):
            self.raise_objection()
            agent.send([frame])
            yield self.kernel.wait(300)  # mid-frame
            p = GenericPayload.write(R.GAIN, 0x300)
            dut.target.handler(p, 0)
            yield self.kernel.wait(2000)
            self.drop_objection()

    Top("top", env)
    run_phases(env, max_time=10**6)
    assert mon.frames == [ref_process_frame(cfg, frame)]
    assert dut.backdoor.peek(R.GAIN) == 0x300


def test_stand_in_drops_when_pipe_disabled():
    cfg = IspConfig(4, 4, pipe_en=False)
    frame = random_frame(SplitMix64(1), 4, 4)
    out, _ = run_stand_in([(cfg, frame), (cfg, frame)])
    assert out == []


@pytest.mark.parametrize("name", sorted(shipped_faults()))
def test_shipped_fault_matches_oracle_injection(name):
    fault = shipped_faults()[name]
    cfg = IspConfig(16, 16, bl_en=True, gain_en=True, gamma_en=True, conv_en=True, black_level=8,
                    gain=0x140, lut=bytes(255 - i for i in range(256)), kernel=(1, 2, 1, 2, 4, 2, 1, 2, 1), shift=4)
    frame = random_frame(SplitMix64(77), 16, 16)
    out, _ = run_stand_in([(cfg, frame)], fault=fault)
    expected = pipeline_output(cfg, frame.pixels, (fault.stage.value, fault.xor_mask, fault.pixel_index))
    assert out[0].pixels == expected
    assert expected != pipeline_output(cfg, frame.pixels)


def test_shipped_faults_cover_every_stage():
    faults = shipped_faults()
    assert len(faults) == 8
    assert {f.stage for f in faults.values()} == set(Stage)
    assert faults["gain_lsb_all"] == FaultSpec(Stage.GAIN, 0x01, None, "gain_lsb_all")


def test_oracle_stage_diff_is_the_mask():
    cfg = IspConfig(5, 5, bl_en=True, gain_en=True, black_level=3, gain=0x120)
    px = random_pixels(3, 25)
    clean = pipeline_stages(cfg, px)
    faulty = pipeline_stages(cfg, px, ("BL", 0x10, 7))
    assert clean["BL"][1][2] ^ faulty["BL"][1][2] == 0x10
