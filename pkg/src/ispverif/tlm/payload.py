"""Generic memory-mapped payload and blocking-transport sockets."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

from ispverif.errors import TestbenchFatal


class Command(enum.Enum):
    READ = "READ"
    WRITE = "WRITE"


class Status(enum.Enum):
    INCOMPLETE = "INCOMPLETE"
    OK = "OK"
    ADDRESS_ERROR = "ADDRESS_ERROR"
    GENERIC_ERROR = "GENERIC_ERROR"


class GenericPayload:
    """A read or write of 1-8 bytes at a byte address.

    Data is little-endian. Targets fill ``data`` in place on reads and set
    ``status``; the length never changes.
    """

    __slots__ = ("command", "address", "data", "status")

    def __init__(self, command: Command, address: int, data: bytes | bytearray):
        if not 1 <= len(data) <= 8:
            raise ValueError(f"payload length {len(data)} outside 1..8")
        self.command = command
        self.address = address
        self.data = bytearray(data)
        self.status = Status.INCOMPLETE

    @classmethod
    def write(cls, address: int, value: int, length: int = 4) -> "GenericPayload":
        return cls(Command.WRITE, address, (value & ((1 << 8 * length) - 1)).to_bytes(length, "little"))

    @classmethod
    def read(cls, address: int, length: int = 4) -> "GenericPayload":
        return cls(Command.READ, address, bytes(length))

    @property
    def value(self) -> int:
        return int.from_bytes(self.data, "little")

    @value.setter
    def value(self, v: int) -> None:
        n = len(self.data)
        self.data[:] = (v & ((1 << 8 * n) - 1)).to_bytes(n, "little")

    @property
    def is_write(self) -> bool:
        return self.command is Command.WRITE

    def snapshot(self) -> "BusTransaction":
        return BusTransaction(self.command, self.address, self.value, len(self.data), self.status)

    def __repr__(self) -> str:
        return (f"GenericPayload({self.command.value}, 0x{self.address:08X}, "
                f"0x{self.value:0{2 * len(self.data)}X}, {self.status.value})")


@dataclass(frozen=True)
class BusTransaction:
    """Immutable record of a completed transport, for analysis subscribers."""

    command: Command
    address: int
    value: int
    length: int
    status: Status


TransportHandler = Callable[[GenericPayload, int], int]


class TargetSocket:
    """Receives blocking transports; ``handler(payload, delay)`` returns the new delay."""

    def __init__(self, name: str, handler: TransportHandler):
        self.name = name
        self.handler = handler
        self.bound_to: Optional[InitiatorSocket] = None


class InitiatorSocket:
    def __init__(self, name: str):
        self.name = name
        self.target: Optional[TargetSocket] = None

    def b_transport(self, payload: GenericPayload, delay: int = 0) -> tuple[GenericPayload, int]:
        if self.target is None:
            raise TestbenchFatal("UNBOUND_SOCKET", f"transport on unbound socket {self.name}")
        if payload.status is not Status.INCOMPLETE:
            raise TestbenchFatal("BAD_PAYLOAD", f"{self.name}: payload issued with status {payload.status.value}")
        length = len(payload.data)
        new_delay = self.target.handler(payload, delay)
        if payload.status is Status.INCOMPLETE:
            raise TestbenchFatal("INCOMPLETE_RESPONSE", f"{self.target.name} left payload INCOMPLETE")
        if len(payload.data) != length:
            raise TestbenchFatal("LENGTH_CHANGED", f"{self.target.name} changed payload length")
        if new_delay < delay:
            raise TestbenchFatal("DELAY_DECREASED", f"{self.target.name} returned delay {new_delay} < {delay}")
        return payload, new_delay


def bind(initiator: InitiatorSocket, target: TargetSocket) -> None:
    if initiator.target is not None:
        raise TestbenchFatal("DOUBLE_BIND", f"initiator {initiator.name} already bound")
    if target.bound_to is not None:
        raise TestbenchFatal("DOUBLE_BIND", f"target {target.name} already bound")
    initiator.target = target
    target.bound_to = initiator
