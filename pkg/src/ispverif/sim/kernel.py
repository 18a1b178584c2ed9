"""Deterministic discrete-event simulation kernel.

Time is an integer count of nanoseconds. Events are ordered by
``(fire_time, seq)`` where ``seq`` is a global insertion counter, so events
scheduled for the same instant run in FIFO order.

Processes are plain Python generators. A process suspends by yielding one of
the wait objects produced by :meth:`Kernel.wait`, :meth:`Kernel.wait_for` or
a :class:`Process` (join)::

    def body():
        yield kernel.wait(5)
        yield kernel.wait_for(note)

Sub-routines compose with ``yield from`` and return values normally.
"""

from __future__ import annotations

import enum
import heapq
from typing import Any, Callable, Generator, Optional

from ispverif.errors import TestbenchFatal

ProcessBody = Generator[Any, Any, Any]


class StopReason(enum.Enum):
    EXHAUSTED = "EXHAUSTED"
    LIMIT = "LIMIT"
    STOPPED = "STOPPED"


class EventHandle:
    __slots__ = ("fire_time", "seq", "action", "label", "state")

    PENDING, FIRED, CANCELLED = 0, 1, 2

    def __init__(self, fire_time: int, seq: int, action: Callable[[], Any], label: str):
        self.fire_time = fire_time
        self.seq = seq
        self.action = action
        self.label = label
        self.state = EventHandle.PENDING

    @property
    def pending(self) -> bool:
        return self.state == EventHandle.PENDING

    def __repr__(self) -> str:
        return f"EventHandle(t={self.fire_time}, seq={self.seq}, label={self.label!r})"


class _Delay:
    __slots__ = ("delay",)

    def __init__(self, delay: int):
        self.delay = delay


class _WaitFor:
    __slots__ = ("notification",)

    def __init__(self, notification: "Notification"):
        self.notification = notification


class Notification:
    """A named synchronisation point that processes can wait on."""

    def __init__(self, kernel: "Kernel", name: str = "notification"):
        self.kernel = kernel
        self.name = name
        self._waiters: list[Process] = []

    @property
    def waiters(self) -> tuple["Process", ...]:
        return tuple(self._waiters)

    def wait(self) -> _WaitFor:
        return self.kernel.wait_for(self)

    def notify(self) -> None:
        """Resume every current waiter at the current time, in suspension order."""
        waiters, self._waiters = self._waiters, []
        for proc in waiters:
            self.kernel.schedule(proc._resume, 0, label=proc.name)


class Process:
    """A cooperative process wrapping a generator body."""

    def __init__(self, kernel: "Kernel", body: ProcessBody, name: str):
        self.kernel = kernel
        self.name = name
        self._body = body
        self.finished = False
        self.result: Any = None
        self.done = Notification(kernel, f"{name}.done")

    def _resume(self, value: Any = None) -> None:
        kernel = self.kernel
        outer = kernel._current
        kernel._current = self
        try:
            cmd = self._body.send(value)
        except StopIteration as stop:
            self.finished = True
            self.result = stop.value
            self.done.notify()
            return
        finally:
            kernel._current = outer
        self._suspend(cmd)

    def _suspend(self, cmd: Any) -> None:
        if isinstance(cmd, _Delay):
            self.kernel.schedule(self._resume, cmd.delay, label=self.name)
        elif isinstance(cmd, _WaitFor):
            cmd.notification._waiters.append(self)
        elif isinstance(cmd, Process):
            if cmd.finished:
                self.kernel.schedule(self._resume, 0, label=self.name)
            else:
                cmd.done._waiters.append(self)
        else:
            raise TestbenchFatal("BAD_YIELD", f"process {self.name} yielded {cmd!r}")

    def __repr__(self) -> str:
        return f"Process({self.name!r}, finished={self.finished})"


class Kernel:
    """Single-threaded event scheduler.

    ``trace``, when given, is called with one ``"<time> <seq> <label>"`` line
    per fired event.
    """

    def __init__(self, trace: Optional[Callable[[str], Any]] = None):
        self._now = 0
        self._seq = 0
        self._queue: list[tuple[int, int, EventHandle]] = []
        self._current: Optional[Process] = None
        self._stop = False
        self.trace = trace

    @property
    def now(self) -> int:
        return self._now

    @property
    def current_process(self) -> Optional[Process]:
        return self._current

    def pending_events(self) -> int:
        return sum(1 for _, _, h in self._queue if h.pending)

    def schedule(self, action: Callable[[], Any], delay: int = 0, label: str = "") -> EventHandle:
        if delay < 0:
            raise TestbenchFatal("NEGATIVE_DELAY", f"delay {delay} for {label!r}")
        handle = EventHandle(self._now + delay, self._seq, action, label)
        self._seq += 1
        heapq.heappush(self._queue, (handle.fire_time, handle.seq, handle))
        return handle

    def cancel(self, handle: EventHandle) -> bool:
        if handle.state != EventHandle.PENDING:
            return False
        handle.state = EventHandle.CANCELLED
        return True

    def stop(self) -> None:
        """Ask :meth:`run` to return after the current event."""
        self._stop = True

    def run(self, limit: Optional[int] = None) -> StopReason:
        queue = self._queue
        trace = self.trace
        self._stop = False
        while queue:
            fire_time, seq, handle = queue[0]
            if handle.state == EventHandle.CANCELLED:
                heapq.heappop(queue)
                continue
            if limit is not None and fire_time > limit:
                self._now = limit
                return StopReason.LIMIT
            heapq.heappop(queue)
            self._now = fire_time
            handle.state = EventHandle.FIRED
            if trace is not None:
                trace(f"{fire_time} {seq} {handle.label}")
            handle.action()
            if self._stop:
                self._stop = False
                return StopReason.STOPPED
        return StopReason.EXHAUSTED

    # -- processes -----------------------------------------------------

    def spawn(self, body: ProcessBody, name: str = "process") -> Process:
        proc = Process(self, body, name)
        self.schedule(proc._resume, 0, label=name)
        return proc

    def _require_process(self, what: str) -> None:
        if self._current is None:
            raise TestbenchFatal("WAIT_OUTSIDE_PROCESS", f"{what} called outside a process")

    def wait(self, delay: int) -> _Delay:
        self._require_process("wait")
        if delay < 0:
            raise TestbenchFatal("NEGATIVE_DELAY", f"wait({delay})")
        return _Delay(delay)

    def wait_for(self, notification: Notification) -> _WaitFor:
        self._require_process("wait_for")
        return _WaitFor(notification)

    def notification(self, name: str = "notification") -> Notification:
        return Notification(self, name)


class Lock:
    """FIFO mutex for processes; ownership passes directly to the next waiter."""

    def __init__(self, kernel: Kernel, name: str = "lock"):
        self.kernel = kernel
        self.name = name
        self.locked = False
        self._queue: list[Notification] = []

    def acquire(self) -> ProcessBody:
        if not self.locked:
            self.locked = True
            return
        turn = Notification(self.kernel, f"{self.name}.turn")
        self._queue.append(turn)
        yield self.kernel.wait_for(turn)

    def release(self) -> None:
        if self._queue:
            self._queue.pop(0).notify()
        else:
            self.locked = False

