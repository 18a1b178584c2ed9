"""Front-door and back-door access over an :class:`AddressMap`."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

from ispverif.errors import TestbenchFatal
from ispverif.reg.model import REG_BYTES, REG_MASK, Access, AddressMap, MemRef, RegRef
from ispverif.sim.kernel import ProcessBody
from ispverif.tlm.payload import BusTransaction, Command, Status


class BusAdapter(Protocol):
    def write(self, addr: int, data: int) -> ProcessBody: ...

    def read(self, addr: int) -> ProcessBody: ...


class Backdoor(Protocol):
    """Direct access to DUT storage at map-relative byte offsets."""

    def peek(self, offset: int) -> int: ...

    def poke(self, offset: int, value: int) -> None: ...


@dataclass
class FieldMismatch:
    field: str
    expected: int
    actual: int


@dataclass
class MirrorCheckReport:
    register: str
    passed: bool
    mismatches: list[FieldMismatch] = field(default_factory=list)
    bus_status: Status = Status.OK

    def __str__(self) -> str:
        if self.passed:
            return f"{self.register}: mirror ok"
        if self.bus_status is not Status.OK:
            return f"{self.register}: bus {self.bus_status.value}"
        parts = ", ".join(f"{m.field} exp=0x{m.expected:X} act=0x{m.actual:X}" for m in self.mismatches)
        return f"{self.register}: {parts}"


class RegBlock:
    """Register model bound to a bus adapter and, optionally, a back-door hook.

    With ``auto_predict`` the mirror follows this block's own front-door
    traffic. Environments that snoop the bus instead call :meth:`predict` from
    a monitor and turn auto-prediction off.
    """

    def __init__(self, amap: AddressMap, adapter: Optional[BusAdapter] = None,
                 backdoor: Optional[Backdoor] = None, auto_predict: bool = True,
                 mem_reset: Optional[dict[str, Sequence[int]]] = None):
        self.map = amap
        self.adapter = adapter
        self.backdoor = backdoor
        self.auto_predict = auto_predict
        self._mem_reset = {k: list(v) for k, v in (mem_reset or {}).items()}
        self.mem_mirrors: dict[str, list[int]] = {}
        self.reset()

    def reset(self) -> None:
        self.map.reset_mirrors()
        self.mem_mirrors = {
            m.name: list(self._mem_reset.get(m.name, [0] * m.words)) for m in self.map.memories
        }

    def mirror(self, reg: RegRef) -> int:
        return self.map.mirrors[self.map.register(reg).name]

    def _addr(self, offset: int) -> int:
        return self.map.base + offset

    def _need_adapter(self) -> BusAdapter:
        if self.adapter is None:
            raise TestbenchFatal("NO_ADAPTER", f"map {self.map.name} has no bus adapter")
        return self.adapter

    def _need_backdoor(self) -> Backdoor:
        if self.backdoor is None:
            raise TestbenchFatal("NO_BACKDOOR", f"map {self.map.name} has no back-door hook")
        return self.backdoor

    # -- front door (process context) --------------------------------------

    def write(self, reg: RegRef, value: int) -> ProcessBody:
        spec = self.map.register(reg)
        status = yield from self._need_adapter().write(self._addr(spec.offset), value & REG_MASK)
        if self.auto_predict and status is Status.OK:
            self.map.mirrors[spec.name] = spec.predict_write(self.map.mirrors[spec.name], value)
        return status

    def read(self, reg: RegRef) -> ProcessBody:
        spec = self.map.register(reg)
        value, status = yield from self._need_adapter().read(self._addr(spec.offset))
        if self.auto_predict and status is Status.OK:
            self.map.mirrors[spec.name] = spec.predict_read(self.map.mirrors[spec.name], value)
        return value, status

    def write_mem(self, mem: MemRef, index: int, value: int) -> ProcessBody:
        spec = self.map.memory(mem)
        self._check_index(spec.name, spec.words, index)
        status = yield from self._need_adapter().write(self._addr(spec.offset + REG_BYTES * index), value & REG_MASK)
        if self.auto_predict and status is Status.OK:
            self.mem_mirrors[spec.name][index] = value & REG_MASK
        return status

    def read_mem(self, mem: MemRef, index: int) -> ProcessBody:
        spec = self.map.memory(mem)
        self._check_index(spec.name, spec.words, index)
        value, status = yield from self._need_adapter().read(self._addr(spec.offset + REG_BYTES * index))
        if self.auto_predict and status is Status.OK:
            self.mem_mirrors[spec.name][index] = value
        return value, status

    def mirror_check(self, reg: RegRef) -> ProcessBody:
        spec = self.map.register(reg)
        expected = self.map.mirrors[spec.name]
        value, status = yield from self._need_adapter().read(self._addr(spec.offset))
        if status is not Status.OK:
            return MirrorCheckReport(spec.name, False, bus_status=status)
        mismatches = [
            FieldMismatch(f.name, f.extract(expected), f.extract(value))
            for f in spec.fields
            if f.access in (Access.RO, Access.RW) and f.extract(expected) != f.extract(value)
        ]
        return MirrorCheckReport(spec.name, not mismatches, mismatches)

    @staticmethod
    def _check_index(name: str, words: int, index: int) -> None:
        if not 0 <= index < words:
            raise IndexError(f"{name}[{index}] outside 0..{words - 1}")

    # -- back door (zero time, never touches mirrors) ----------------------

    def peek(self, reg: RegRef) -> int:
        return self._need_backdoor().peek(self.map.register(reg).offset)

    def poke(self, reg: RegRef, value: int) -> None:
        self._need_backdoor().poke(self.map.register(reg).offset, value & REG_MASK)

    def peek_mem(self, mem: MemRef, index: int) -> int:
        spec = self.map.memory(mem)
        self._check_index(spec.name, spec.words, index)
        return self._need_backdoor().peek(spec.offset + REG_BYTES * index)

    def poke_mem(self, mem: MemRef, index: int, value: int) -> None:
        spec = self.map.memory(mem)
        self._check_index(spec.name, spec.words, index)
        self._need_backdoor().poke(spec.offset + REG_BYTES * index, value & REG_MASK)

    def dump(self) -> dict[str, object]:
        """Back-door snapshot of every register and memory word."""
        out: dict[str, object] = {r.name: self.peek(r) for r in self.map.registers}
        for m in self.map.memories:
            out[m.name] = [self.peek_mem(m, i) for i in range(m.words)]
        return out

    # -- explicit prediction from a bus monitor ------------------------------

    def predict(self, txn: BusTransaction) -> None:
        if txn.status is not Status.OK:
            return
        offset = txn.address - self.map.base
        spec = self.map.register_at(offset)
        if spec is not None:
            current = self.map.mirrors[spec.name]
            if txn.command is Command.WRITE:
                self.map.mirrors[spec.name] = spec.predict_write(current, txn.value)
            else:
                self.map.mirrors[spec.name] = spec.predict_read(current, txn.value)
            return
        mem = self.map.memory_at(offset)
        if mem is not None:
            self.mem_mirrors[mem.name][(offset - mem.offset) // REG_BYTES] = txn.value & REG_MASK
