"""Control-bus initiator BFM for 32-bit register traffic."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ispverif.sim.kernel import Lock, ProcessBody
from ispverif.tlm.component import AnalysisPort, Component
from ispverif.tlm.payload import Command, GenericPayload, InitiatorSocket, Status


@dataclass(frozen=True)
class BusAccess:
    start: int
    end: int
    command: Command
    address: int
    value: int
    status: Status


class ControlBusBfm(Component):
    """Serialised blocking reads and writes.

    Each access holds the bus for one clock cycle plus whatever latency the
    target annotates. Concurrent callers queue in call order.
    """

    def __init__(self, name: str, parent: Optional[Component] = None, period: int = 10):
        super().__init__(name, parent)
        self.socket = InitiatorSocket(f"{name}.socket")
        self.period = period
        self.ap = AnalysisPort(f"{name}.ap")
        self.accesses: list[BusAccess] = []
        self._lock: Optional[Lock] = None

    def _transfer(self, payload: GenericPayload) -> ProcessBody:
        kernel = self.kernel
        if self._lock is None:
            self._lock = Lock(kernel, f"{self.full_name}.lock")
        yield from self._lock.acquire()
        start = kernel.now
        try:
            _, latency = self.socket.b_transport(payload, 0)
            yield kernel.wait(self.period + latency)
        finally:
            self._lock.release()
        self.accesses.append(BusAccess(start, kernel.now, payload.command, payload.address,
                                       payload.value, payload.status))
        self.ap.publish(payload.snapshot())
        return payload

    def write(self, addr: int, data: int) -> ProcessBody:
        payload = yield from self._transfer(GenericPayload.write(addr, data))
        return payload.status

    def read(self, addr: int) -> ProcessBody:
        payload = yield from self._transfer(GenericPayload.read(addr))
        return payload.value, payload.status
