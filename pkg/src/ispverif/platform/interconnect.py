"""Address-routing interconnect and a word-addressed memory model."""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Optional

from ispverif.errors import ConfigError
from ispverif.tlm.component import AnalysisPort, Component
from ispverif.tlm.payload import GenericPayload, InitiatorSocket, Status, TargetSocket, bind

ISP_BASE, ISP_SIZE = 0x0000_0000, 0x1000
VRI_BASE, VRI_SIZE = 0x0000_1000, 0x1000
MEM_BASE, MEM_SIZE = 0x1000_0000, 0x1_0000


@dataclass(frozen=True)
class Route:
    base: int
    size: int
    name: str

    @property
    def end(self) -> int:
        return self.base + self.size


class RouteTable:
    """Disjoint address ranges; lookup is a binary search over sorted bases."""

    def __init__(self, routes: list[Route] = ()):
        self._routes: list[Route] = []
        self._bases: list[int] = []
        for r in routes:
            self.add(r)

    def add(self, route: Route) -> None:
        if route.size <= 0:
            raise ConfigError("BAD_ROUTE", f"{route.name}: size {route.size}")
        for r in self._routes:
            if route.base < r.end and r.base < route.end:
                raise ConfigError("OVERLAP", f"route {route.name} overlaps {r.name}")
        self._routes.append(route)
        self._routes.sort(key=lambda r: r.base)
        self._bases = [r.base for r in self._routes]

    def lookup(self, addr: int) -> Optional[Route]:
        i = bisect_right(self._bases, addr) - 1
        if i >= 0 and addr < self._routes[i].end:
            return self._routes[i]
        return None

    def __iter__(self):
        return iter(self._routes)


@dataclass(frozen=True)
class RoutedTransaction:
    time: int
    initiator: str
    target: str
    command: str
    address: int
    value: int
    status: str


class Interconnect(Component):
    """Routes each transport to the range containing its address, rebased to a local offset.

    Every completed transport is published on ``ap`` with its global address.
    """

    def __init__(self, name: str, parent: Optional[Component] = None):
        super().__init__(name, parent)
        self.table = RouteTable()
        self._outs: dict[str, InitiatorSocket] = {}
        self._ins: dict[str, TargetSocket] = {}
        self.ap = AnalysisPort(f"{name}.ap")
        self.log: list[RoutedTransaction] = []

    def add_target(self, name: str, base: int, size: int, target: TargetSocket) -> None:
        self.table.add(Route(base, size, name))
        out = InitiatorSocket(f"{self.name}.{name}")
        bind(out, target)
        self._outs[name] = out

    def initiator_port(self, name: str) -> TargetSocket:
        """A fresh target socket for an initiator to bind to."""
        if name in self._ins:
            raise ConfigError("DUP_NAME", f"initiator port {name} exists")
        sock = TargetSocket(f"{self.name}.{name}", lambda p, d, n=name: self._transport(n, p, d))
        self._ins[name] = sock
        return sock

    def route(self, addr: int) -> Optional[tuple[str, int]]:
        r = self.table.lookup(addr)
        if r is None:
            return None
        return r.name, addr - r.base

    def _transport(self, initiator: str, payload: GenericPayload, delay: int) -> int:
        addr = payload.address
        route = self.table.lookup(addr)
        if route is None:
            payload.status = Status.ADDRESS_ERROR
            target = "-"
        else:
            target = route.name
            payload.address = addr - route.base
            try:
                _, delay = self._outs[route.name].b_transport(payload, delay)
            finally:
                payload.address = addr
        snap = payload.snapshot()
        self.log.append(RoutedTransaction(self.kernel.now, initiator, target, snap.command.value,
                                          addr, snap.value, snap.status.value))
        self.ap.publish(snap)
        return delay


class Memory(Component):
    """Word-aligned backing store; never-written words read as zero."""

    def __init__(self, name: str, parent: Optional[Component] = None, size: int = MEM_SIZE):
        super().__init__(name, parent)
        self.size = size
        self.words: dict[int, int] = {}
        self.target = TargetSocket(f"{name}.target", self.mem_access)

    def mem_access(self, payload: GenericPayload, delay: int = 0) -> int:
        addr = payload.address
        if addr % 4 or len(payload.data) != 4:
            payload.status = Status.GENERIC_ERROR
        elif not 0 <= addr < self.size:
            payload.status = Status.ADDRESS_ERROR
        else:
            if payload.is_write:
                self.words[addr] = payload.value
            else:
                payload.value = self.words.get(addr, 0)
            payload.status = Status.OK
        return delay
