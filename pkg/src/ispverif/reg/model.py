"""Register, field and memory descriptions with mirrored values."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

REG_BYTES = 4
REG_BITS = 32
REG_MASK = 0xFFFF_FFFF


class Access(str, enum.Enum):
    RO = "RO"
    RW = "RW"
    WO = "WO"
    W1C = "W1C"


def field_update(access: Access, current: int, written: int) -> int:
    """New field value after a bus write of ``written`` onto ``current``."""
    if access is Access.RW or access is Access.WO:
        return written
    if access is Access.RO:
        return current
    if access is Access.W1C:
        return current & ~written
    raise ValueError(f"unknown access policy {access!r}")


@dataclass(frozen=True)
class FieldSpec:
    name: str
    lsb: int
    width: int
    access: Access
    reset: int = 0

    @property
    def mask(self) -> int:
        return ((1 << self.width) - 1) << self.lsb

    @property
    def value_mask(self) -> int:
        return (1 << self.width) - 1

    def extract(self, reg_value: int) -> int:
        return (reg_value >> self.lsb) & self.value_mask

    def insert(self, reg_value: int, value: int) -> int:
        return (reg_value & ~self.mask) | ((value & self.value_mask) << self.lsb)


@dataclass(frozen=True)
class RegisterSpec:
    name: str
    offset: int
    fields: tuple[FieldSpec, ...] = ()

    @property
    def reset(self) -> int:
        value = 0
        for f in self.fields:
            value = f.insert(value, f.reset)
        return value

    def mask_of(self, *policies: Access) -> int:
        m = 0
        for f in self.fields:
            if f.access in policies:
                m |= f.mask
        return m

    def field(self, name: str) -> FieldSpec:
        for f in self.fields:
            if f.name == name:
                return f
        raise KeyError(f"{self.name} has no field {name!r}")

    def predict_write(self, current: int, written: int) -> int:
        """Mirror value after a successful bus write."""
        value = 0
        for f in self.fields:
            value = f.insert(value, field_update(f.access, f.extract(current), f.extract(written)))
        return value

    def predict_read(self, current: int, read: int) -> int:
        """Mirror value after a successful bus read; WO fields keep their prediction."""
        value = 0
        for f in self.fields:
            src = current if f.access is Access.WO else read
            value = f.insert(value, f.extract(src))
        return value


@dataclass(frozen=True)
class MemorySpec:
    name: str
    offset: int
    size: int

    @property
    def words(self) -> int:
        return self.size // REG_BYTES


RegRef = Union[str, RegisterSpec]
MemRef = Union[str, MemorySpec]


@dataclass(eq=False)
class AddressMap:
    """A flat map of registers and memories with one mirror value per register.

    Equality is structural and ignores mirror contents.
    """

    base: int = 0
    registers: list[RegisterSpec] = field(default_factory=list)
    memories: list[MemorySpec] = field(default_factory=list)
    name: str = "map"
    mirrors: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._by_name = {r.name: r for r in self.registers}
        self._by_offset = {r.offset: r for r in self.registers}
        self._mems = {m.name: m for m in self.memories}
        if not self.mirrors:
            self.reset_mirrors()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AddressMap):
            return NotImplemented
        return (self.name, self.base, self.registers, self.memories) == (
            other.name, other.base, other.registers, other.memories)

    def reset_mirrors(self) -> None:
        self.mirrors = {r.name: r.reset for r in self.registers}

    def register(self, ref: RegRef) -> RegisterSpec:
        name = ref.name if isinstance(ref, RegisterSpec) else ref
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"no register {name!r} in map {self.name}") from None

    def memory(self, ref: MemRef) -> MemorySpec:
        name = ref.name if isinstance(ref, MemorySpec) else ref
        try:
            return self._mems[name]
        except KeyError:
            raise KeyError(f"no memory {name!r} in map {self.name}") from None

    def register_at(self, offset: int) -> Optional[RegisterSpec]:
        return self._by_offset.get(offset)

    def memory_at(self, offset: int) -> Optional[MemorySpec]:
        for m in self.memories:
            if m.offset <= offset < m.offset + m.size:
                return m
        return None

    def is_mapped(self, offset: int) -> bool:
        return self.register_at(offset & ~3) is not None or self.memory_at(offset) is not None

    def ranges(self) -> Iterable[tuple[int, int, str]]:
        """(start, end_exclusive, name) for every mapped byte range."""
        for r in self.registers:
            yield r.offset, r.offset + REG_BYTES, r.name
        for m in self.memories:
            yield m.offset, m.offset + m.size, m.name
