"""Generic processor model: a command interpreter running a test program."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from ispverif.platform.clocks import ResetGen
from ispverif.platform.program import ProgramCommand, TestProgram
from ispverif.sim.kernel import ProcessBody
from ispverif.tlm.component import Component
from ispverif.tlm.payload import Status
from ispverif.uvc.control import ControlBusBfm


class FailureKind(str, enum.Enum):
    MISMATCH = "MISMATCH"
    TIMEOUT = "TIMEOUT"
    BUS_ERROR = "BUS_ERROR"


@dataclass(frozen=True)
class CpuResult:
    passed: bool
    failed_line: Optional[int] = None
    failure_kind: Optional[FailureKind] = None
    detail: str = ""


class _Stop(Exception):
    def __init__(self, result: CpuResult):
        self.result = result


class Cpu(Component):
    """Executes a :class:`TestProgram` after reset release, then goes passive.

    The CPU holds an objection while it runs. A failing E/P command or a bus
    error ends the program and is recorded as a component error.
    """

    def __init__(self, name: str, parent: Optional[Component], program: TestProgram,
                 reset: Optional[ResetGen] = None, period: int = 10):
        super().__init__(name, parent)
        self.program = program
        self.reset = reset
        self.period = period
        self.bfm = ControlBusBfm("bfm", self, period)
        self.result: Optional[CpuResult] = None
        self.reads: list[tuple[int, int, int]] = []  # (line, addr, value)
        self.passive = False
        self.end_time: Optional[int] = None

    @property
    def socket(self):
        return self.bfm.socket

    def run_phase(self) -> ProcessBody:
        self.raise_objection()
        if self.reset is not None:
            yield from self.reset.wait_release()
        try:
            for cmd in self.program.commands:
                if cmd.op == "END":
                    break
                yield from self._execute(cmd)
            self.result = CpuResult(True)
        except _Stop as stop:
            self.result = stop.result
            self.error(f"CPU_{stop.result.failure_kind.value}",
                       f"line {stop.result.failed_line}: {stop.result.detail}")
        self.passive = True
        self.end_time = self.kernel.now
        self.drop_objection()

    def _read(self, cmd: ProgramCommand) -> ProcessBody:
        addr = cmd.args[0]
        value, status = yield from self.bfm.read(addr)
        if status is not Status.OK:
            raise _Stop(CpuResult(False, cmd.line, FailureKind.BUS_ERROR,
                                  f"{cmd.op} 0x{addr:08X}: {status.value}"))
        self.reads.append((cmd.line, addr, value))
        return value

    def _execute(self, cmd: ProgramCommand) -> ProcessBody:
        op = cmd.op
        if op == "W":
            addr, data = cmd.args
            status = yield from self.bfm.write(addr, data)
            if status is not Status.OK:
                raise _Stop(CpuResult(False, cmd.line, FailureKind.BUS_ERROR,
                                      f"W 0x{addr:08X}: {status.value}"))
        elif op == "R":
            yield from self._read(cmd)
        elif op == "E":
            _, mask, expect = cmd.args
            value = yield from self._read(cmd)
            if value & mask != expect & mask:
                raise _Stop(CpuResult(False, cmd.line, FailureKind.MISMATCH,
                                      f"read 0x{value:08X} & 0x{mask:08X} != 0x{expect:08X}"))
        elif op == "P":
            _, mask, expect, timeout = cmd.args
            start = self.kernel.now
            while True:
                value = yield from self._read(cmd)
                if value & mask == expect & mask:
                    break
                if (self.kernel.now - start) // self.period >= timeout:
                    raise _Stop(CpuResult(False, cmd.line, FailureKind.TIMEOUT,
                                          f"no match after {timeout} cycles, last 0x{value:08X}"))
        elif op == "D":
            yield self.kernel.wait(cmd.args[0] * self.period)
