"""Sequences, sequence items and the sequencer/driver handshake."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Optional

from ispverif.errors import TestbenchFatal
from ispverif.sim.kernel import Notification, ProcessBody
from ispverif.tlm.component import Component


@dataclass(frozen=True)
class SequenceItem:
    kind: str
    payload: Any


class Sequence:
    """Subclasses override :meth:`body` to generate items."""

    def __init__(self, name: str = "seq"):
        self.name = name

    def body(self) -> Iterable[SequenceItem]:
        return ()


class ListSequence(Sequence):
    def __init__(self, items: Iterable[SequenceItem], name: str = "list_seq"):
        super().__init__(name)
        self._items = list(items)

    def body(self) -> Iterable[SequenceItem]:
        return iter(self._items)


class SequenceHandle:
    def __init__(self, seq: Sequence, done: Notification):
        self.sequence = seq
        self.done = done
        self.finished = False
        self.items_sent = 0

    def wait(self) -> ProcessBody:
        if not self.finished:
            yield self.done.wait()


class _Running:
    __slots__ = ("handle", "items", "lookahead")

    def __init__(self, handle: SequenceHandle, items: Iterator[SequenceItem], lookahead: Optional[SequenceItem]):
        self.handle = handle
        self.items = items
        self.lookahead = lookahead


class Sequencer(Component):
    """Hands items to exactly one driver, one sequence at a time, FIFO."""

    def __init__(self, name: str, parent: Optional[Component] = None):
        super().__init__(name, parent)
        self._queue: deque[_Running] = deque()
        self._available: Optional[Notification] = None
        self._outstanding: Optional[_Running] = None
        self.driver: Optional[Component] = None

    def connect_driver(self, driver: Component) -> None:
        if self.driver is not None:
            raise TestbenchFatal("DOUBLE_BIND", f"{self.full_name} already has a driver")
        self.driver = driver

    @property
    def busy(self) -> bool:
        return bool(self._queue) or self._outstanding is not None

    def start(self, seq: Sequence) -> SequenceHandle:
        if self.driver is None:
            raise TestbenchFatal("NO_DRIVER", f"{self.full_name} has no driver")
        kernel = self.kernel
        handle = SequenceHandle(seq, kernel.notification(f"{self.full_name}.{seq.name}.done"))
        items = iter(seq.body())
        first = next(items, None)
        if first is None and not self.busy:
            handle.finished = True
            return handle
        self.raise_objection()
        self._queue.append(_Running(handle, items, first))
        if self._available is None:
            self._available = kernel.notification(f"{self.full_name}.available")
        self._available.notify()
        return handle

    def _finish(self, running: _Running) -> None:
        running.handle.finished = True
        running.handle.done.notify()
        self.drop_objection()

    def _next_item(self) -> Optional[SequenceItem]:
        while self._queue:
            running = self._queue[0]
            if running.lookahead is not None:
                item, running.lookahead = running.lookahead, None
                self._outstanding = running
                return item
            item = next(running.items, None)
            if item is not None:
                self._outstanding = running
                return item
            self._queue.popleft()
            self._finish(running)
        return None

    def get_next_item(self) -> ProcessBody:
        """Block until an item is available and return it (use with ``yield from``)."""
        if self._outstanding is not None:
            raise TestbenchFatal("ITEM_NOT_DONE", f"{self.full_name}: get_next_item before item_done")
        while True:
            item = self._next_item()
            if item is not None:
                return item
            if self._available is None:
                self._available = self.kernel.notification(f"{self.full_name}.available")
            yield self._available.wait()

    def item_done(self) -> None:
        running = self._outstanding
        if running is None:
            raise TestbenchFatal("ITEM_NOT_OUTSTANDING", f"{self.full_name}: item_done without an item")
        self._outstanding = None
        running.handle.items_sent += 1
        # Retire the sequence now if it has nothing left, so waiters see completion
        # without needing another driver pull.
        if running.lookahead is None:
            nxt = next(running.items, None)
            if nxt is None:
                self._queue.remove(running)
                self._finish(running)
            else:
                running.lookahead = nxt
