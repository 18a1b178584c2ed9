"""Testbench assembly: host or CPU programming path around either DUT kind."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from ispverif import vri
from ispverif.errors import ConfigError, TestbenchFatal
from ispverif.ipxact import DutKind, PathKind, TbConfig
from ispverif.isp import regs
from ispverif.isp.dut import IspDut, ReferenceWrapper, StagedPipeline
from ispverif.isp.faults import FaultSpec
from ispverif.isp.pipeline import IspConfig, ref_process_frame
from ispverif.platform.clocks import ClockGen, ResetGen
from ispverif.platform.cpu import Cpu
from ispverif.platform.interconnect import (
    ISP_BASE,
    ISP_SIZE,
    MEM_BASE,
    MEM_SIZE,
    VRI_BASE,
    VRI_SIZE,
    Interconnect,
    Memory,
)
from ispverif.platform.program import TestProgram
from ispverif.reg.block import RegBlock
from ispverif.reg.model import AddressMap
from ispverif.sim.kernel import Kernel, ProcessBody
from ispverif.tb.programs import VRI_INSTANCES
from ispverif.tb.scoreboard import Scoreboard
from ispverif.tlm.component import Component, Environment, TestOutcome, run_phases
from ispverif.tlm.payload import Status, bind
from ispverif.uvc.control import ControlBusBfm
from ispverif.uvc.stream import Frame, StreamAgent, StreamMonitor

LUT_NAME = "GAMMA_LUT"


@dataclass
class TestPlan:
    """What a run drives: stimulus frames plus either host configs or a CPU program.

    On the host path ``configs[i]`` is programmed before frame ``i`` (the last
    entry repeats). On the CPU path the frames are the VRI stimulus source.
    """

    __test__ = False

    name: str
    frames: list[Frame]
    configs: list[IspConfig] = field(default_factory=list)
    program: Optional[TestProgram] = None
    fault: Optional[FaultSpec] = None


@dataclass(frozen=True)
class Prediction:
    frame: Frame
    config: IspConfig
    expected: Optional[Frame]


class ReferencePredictor(Component):
    """Stimulus tee to the golden model.

    The configuration is decoded from the register-model mirrors when a frame
    starts, which is the same instant the DUT latches its own copy.
    """

    def __init__(self, name: str, parent: Component, regblock: RegBlock, scoreboard: Scoreboard):
        super().__init__(name, parent)
        self.regblock = regblock
        self.scoreboard = scoreboard
        self.predictions: list[Prediction] = []

    def write(self, frame: Frame) -> None:
        mirrors = self.regblock.map.mirrors
        cfg = regs.decode_named(mirrors, self.regblock.mem_mirrors[LUT_NAME])
        if not cfg.pipe_en:
            self.predictions.append(Prediction(frame, cfg, None))
            return
        try:
            cfg.validate()
            out = ref_process_frame(cfg, frame)
        except TestbenchFatal as exc:
            self.error("PREDICT_FAILED", exc.message)
            self.predictions.append(Prediction(frame, cfg, None))
            return
        self.predictions.append(Prediction(frame, cfg, out))
        self.scoreboard.write_expected(out)


class HostProgrammer(Component):
    """Built-in programming sequence driving the register model's front door."""

    def __init__(self, name: str, parent: Component, regblock: RegBlock, agent: StreamAgent,
                 reset: ResetGen, plan: TestPlan):
        super().__init__(name, parent)
        self.regblock = regblock
        self.agent = agent
        self.reset = reset
        self.plan = plan

    def program(self, cfg: IspConfig) -> ProcessBody:
        values, lut = regs.encode_config(cfg)
        for off, value in values.items():
            if off != regs.CTRL:
                yield from self._write(regs.REGISTER_NAMES[off], value)
        for i, v in enumerate(lut):
            status = yield from self.regblock.write_mem(LUT_NAME, i, v)
            self._check(status, f"{LUT_NAME}[{i}]")
        yield from self._write("CTRL", values[regs.CTRL])

    def _write(self, reg: str, value: int) -> ProcessBody:
        status = yield from self.regblock.write(reg, value)
        self._check(status, reg)

    def _check(self, status: Status, what: str) -> None:
        if status is not Status.OK:
            raise TestbenchFatal("HOST_BUS_ERROR", f"write {what}: {status.value}")

    def run_phase(self) -> ProcessBody:
        self.raise_objection()
        yield from self.reset.wait_release()
        configs = self.plan.configs
        previous = None
        for i, frame in enumerate(self.plan.frames):
            cfg = configs[min(i, len(configs) - 1)]
            if cfg != previous:
                yield from self.program(cfg)
                previous = cfg
            handle = self.agent.send([frame], name=f"frame{i}")
            yield from handle.wait()
            if cfg.pipe_en:
                while True:
                    value, status = yield from self.regblock.read("STATUS")
                    self._check(status, "STATUS (read)")
                    if value & regs.STATUS_FRAME_DONE:
                        break
                yield from self._write("STATUS", regs.STATUS_FRAME_DONE)
        self.drop_objection()


class Testbench(Environment):
    __test__ = False

    def __init__(self, config: TbConfig, amap: AddressMap, plan: TestPlan,
                 trace: Optional[Callable[[str], object]] = None):
        super().__init__("tb", Kernel(trace=trace))
        self.config = config
        self.plan = plan
        self.amap = copy.deepcopy(amap)
        w, h = config.frame_width, config.frame_height

        self.clock = ClockGen("clock", self)
        self.reset = ResetGen("reset", self)
        self.bus = Interconnect("bus", self)
        self.memory = Memory("memory", self, MEM_SIZE)

        if config.dut_kind is DutKind.STAGED_PIPELINE:
            self.dut: IspDut = StagedPipeline("dut", self, self.clock.period, fault=plan.fault)
        else:
            if plan.fault is not None:
                raise ConfigError("FAULT_NEEDS_STAGED", "faults can only be injected into the staged pipeline")
            self.dut = ReferenceWrapper("dut", self, self.clock.period)

        self.agent = StreamAgent("stim", self, self.clock.period)
        self.out_monitor = StreamMonitor("out_monitor", self, w, h)
        self.scoreboard = Scoreboard("scoreboard", self)

        self.bus.add_target("isp", ISP_BASE, ISP_SIZE, self.dut.target)
        self.bus.add_target("memory", MEM_BASE, MEM_SIZE, self.memory.target)

        # Mirrors follow whatever initiator drives the bus.
        self.regblock = RegBlock(self.amap, backdoor=self.dut.backdoor, auto_predict=False,
                                 mem_reset={LUT_NAME: regs.RESET_LUT})
        self.bus.ap.subscribe(self.regblock.predict)
        self.predictor = ReferencePredictor("predictor", self, self.regblock, self.scoreboard)

        self.agent.driver.beat_ap.subscribe(self.dut.stream_in)
        self.agent.driver.frame_ap.subscribe(self.predictor.write)
        self.dut.out_ap.subscribe(self.out_monitor.observe)
        self.out_monitor.ap.subscribe(self.scoreboard.write_observed)
        self.reset.on_reset(self.dut.reset)
        self.reset.on_reset(self.regblock.reset)

        self.cpu: Optional[Cpu] = None
        self.vri: Optional[vri.VriBlock] = None
        self.host: Optional[HostProgrammer] = None
        if config.path_kind is PathKind.CPU:
            if plan.program is None:
                raise ConfigError("NO_PROGRAM", "CPU path needs a test program")
            self.vri = vri.VriBlock("vri", self, VRI_INSTANCES)
            self.bus.add_target("vri", VRI_BASE, VRI_SIZE, self.vri.target)
            check_program(plan.program, self.amap, self.bus, w, h)
            self.vri.bind_service(0, self.agent, vri.ListFrameSource(plan.frames, w, h))
            self.cpu = Cpu("cpu", self, plan.program, reset=self.reset, period=self.clock.period)
            bind(self.cpu.socket, self.bus.initiator_port("cpu"))
        else:
            if not plan.configs:
                raise ConfigError("NO_CONFIG", "host path needs at least one ISP configuration")
            for cfg in plan.configs:
                if (cfg.width, cfg.height) != (w, h):
                    raise ConfigError("FRAME_SIZE_CONFLICT",
                                      f"ISP config is {cfg.width}x{cfg.height}, testbench is {w}x{h}")
            self.host_bfm = ControlBusBfm("host_bfm", self, self.clock.period)
            bind(self.host_bfm.socket, self.bus.initiator_port("host"))
            self.regblock.adapter = self.host_bfm
            self.host = HostProgrammer("host", self, self.regblock, self.agent, self.reset, plan)

    def run(self) -> TestOutcome:
        return run_phases(self, self.config.max_time, self.config.drain_time)

    def dump(self) -> dict[str, object]:
        return self.regblock.dump()


def check_program(program: TestProgram, amap: AddressMap, bus: Interconnect, width: int, height: int) -> None:
    """Reject programs that touch unmapped addresses or program the wrong frame size."""
    problems: list[str] = []
    frame_size = ISP_BASE + amap.base + amap.register("FRAME_SIZE").offset
    for cmd in program.commands:
        addr = cmd.address
        if addr is None:
            continue
        hit = bus.route(addr)
        if hit is None:
            problems.append(f"line {cmd.line}: 0x{addr:08X} is not routed")
            continue
        target, local = hit
        if target == "isp" and not amap.is_mapped(local - amap.base):
            problems.append(f"line {cmd.line}: ISP offset 0x{local:X} is not in the register map")
        elif target == "vri" and (local // vri.STRIDE >= VRI_INSTANCES
                                  or local % vri.STRIDE not in vri.REGISTER_OFFSETS):
            problems.append(f"line {cmd.line}: VRI offset 0x{local:X} is not a VRI register")
        if cmd.op == "W" and addr == frame_size and cmd.args[1] != (height << 16) | width:
            problems.append(f"line {cmd.line}: FRAME_SIZE 0x{cmd.args[1]:X} does not match "
                            f"the configured {width}x{height} frame")
    if problems:
        raise ConfigError("PROGRAM_MISMATCH", "; ".join(problems))


def build_env(config: TbConfig, amap: AddressMap, plan: TestPlan,
              trace: Optional[Callable[[str], object]] = None) -> Testbench:
    return Testbench(config, amap, plan, trace)


def expected_frames(plan_configs: Sequence[IspConfig], frames: Sequence[Frame]) -> list[Frame]:
    """Golden outputs for a host plan, computed outside the simulation."""
    out = []
    for i, frame in enumerate(frames):
        result = ref_process_frame(plan_configs[min(i, len(plan_configs) - 1)], frame)
        if result is not None:
            out.append(result)
    return out
