"""Virtual Register Interface: memory-mapped command blocks for data UVCs.

Each UVC instance ``i`` owns a 0x40-byte block at ``base + 0x40 * i``::

    +0x00 CMD     write dispatches a command
    +0x04 STATUS  0 IDLE, 1 BUSY, 2 DONE, 3 ERROR (read only)
    +0x10 PARAM0  ..
    +0x1C PARAM3

Commands: 1 SEND_RANDOM_FRAME (seed = PARAM1:PARAM0), 2 SEND_STIMULUS_FRAME
(index = PARAM0), 3 QUERY_FRAMES_SENT (count -> PARAM3, rejected writes ->
PARAM2). A CMD write while BUSY is ignored and counted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Protocol

from ispverif.errors import ConfigError
from ispverif.sim.kernel import ProcessBody
from ispverif.tlm.component import Component
from ispverif.tlm.payload import GenericPayload, Status, TargetSocket
from ispverif.uvc.prng import SplitMix64
from ispverif.uvc.stream import Frame, FrameSequence, StreamAgent, random_frame

STRIDE = 0x40
CMD = 0x00
STATUS = 0x04
PARAM0, PARAM1, PARAM2, PARAM3 = 0x10, 0x14, 0x18, 0x1C
_PARAMS = (PARAM0, PARAM1, PARAM2, PARAM3)
REGISTER_OFFSETS = (CMD, STATUS, *_PARAMS)


class VriStatus(enum.IntEnum):
    IDLE = 0
    BUSY = 1
    DONE = 2
    ERROR = 3


class VriCommand(enum.IntEnum):
    SEND_RANDOM_FRAME = 1
    SEND_STIMULUS_FRAME = 2
    QUERY_FRAMES_SENT = 3


class FrameSource(Protocol):
    width: int
    height: int

    def frame(self, index: int) -> Frame: ...


class ListFrameSource:
    def __init__(self, frames: list[Frame], width: int, height: int):
        self.frames = frames
        self.width = width
        self.height = height

    def frame(self, index: int) -> Frame:
        return self.frames[index]


@dataclass
class _Instance:
    index: int
    agent: Optional[StreamAgent] = None
    source: Optional[FrameSource] = None
    status: VriStatus = VriStatus.IDLE
    cmd: int = 0
    params: list[int] = field(default_factory=lambda: [0, 0, 0, 0])
    frames_sent: int = 0
    rejected: int = 0
    status_trace: list[VriStatus] = field(default_factory=lambda: [VriStatus.IDLE])


def symbols(base: int, instances: int) -> dict[str, int]:
    """Program symbols ``VRI<i>_CMD`` etc. at absolute addresses."""
    out = {}
    for i in range(instances):
        b = base + STRIDE * i
        out[f"VRI{i}_CMD"] = b + CMD
        out[f"VRI{i}_STATUS"] = b + STATUS
        for n, off in enumerate(_PARAMS):
            out[f"VRI{i}_PARAM{n}"] = b + off
    return out


class VriBlock(Component):
    def __init__(self, name: str, parent: Optional[Component] = None, instances: int = 4):
        super().__init__(name, parent)
        self.instances = [_Instance(i) for i in range(instances)]
        self.target = TargetSocket(f"{name}.target", self._transport)

    def bind_service(self, instance: int, agent: StreamAgent, source: FrameSource) -> None:
        inst = self._instance(instance)
        if inst is None:
            raise ConfigError("BAD_INSTANCE", f"{self.full_name} has no instance {instance}")
        if inst.agent is not None:
            raise ConfigError("DOUBLE_BIND", f"{self.full_name} instance {instance} already bound")
        inst.agent = agent
        inst.source = source

    def _instance(self, index: int) -> Optional[_Instance]:
        return self.instances[index] if 0 <= index < len(self.instances) else None

    def status(self, instance: int) -> VriStatus:
        return self.instances[instance].status

    def status_trace(self, instance: int) -> list[VriStatus]:
        return list(self.instances[instance].status_trace)

    def _set(self, inst: _Instance, status: VriStatus) -> None:
        inst.status = status
        inst.status_trace.append(status)

    # -- bus target ----------------------------------------------------------

    def _transport(self, payload: GenericPayload, delay: int) -> int:
        addr = payload.address
        inst = self._instance(addr // STRIDE)
        reg = addr % STRIDE
        if len(payload.data) != 4 or addr % 4:
            payload.status = Status.GENERIC_ERROR
        elif inst is None or reg not in REGISTER_OFFSETS:
            payload.status = Status.ADDRESS_ERROR
        else:
            payload.status = Status.OK
            if payload.is_write:
                if reg == CMD:
                    self._dispatch(inst, payload.value)
                elif reg != STATUS:
                    inst.params[_PARAMS.index(reg)] = payload.value
            elif reg == CMD:
                payload.value = inst.cmd
            elif reg == STATUS:
                payload.value = int(inst.status)
            else:
                payload.value = inst.params[_PARAMS.index(reg)]
        return delay

    def _dispatch(self, inst: _Instance, code: int) -> None:
        if inst.status is VriStatus.BUSY:
            inst.rejected += 1
            return
        inst.cmd = code
        self._set(inst, VriStatus.BUSY)
        if inst.agent is None:
            self._set(inst, VriStatus.ERROR)
            return
        if code == VriCommand.QUERY_FRAMES_SENT:
            inst.params[3] = inst.frames_sent
            inst.params[2] = inst.rejected
            self._set(inst, VriStatus.DONE)
            return
        if code == VriCommand.SEND_RANDOM_FRAME:
            seed = (inst.params[1] << 32) | inst.params[0]
            frame = random_frame(SplitMix64(seed), inst.source.width, inst.source.height)
        elif code == VriCommand.SEND_STIMULUS_FRAME:
            try:
                frame = inst.source.frame(inst.params[0])
            except IndexError:
                self._set(inst, VriStatus.ERROR)
                return
        else:
            self._set(inst, VriStatus.ERROR)
            return
        handle = inst.agent.sequencer.start(FrameSequence([frame], name=f"vri{inst.index}"))
        self.kernel.spawn(self._complete(inst, handle), f"{self.full_name}.vri{inst.index}")

    def _complete(self, inst: _Instance, handle) -> ProcessBody:
        yield from handle.wait()
        inst.frames_sent += 1
        self._set(inst, VriStatus.DONE)
