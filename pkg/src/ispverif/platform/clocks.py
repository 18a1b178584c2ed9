"""Clock and reset generators."""

from __future__ import annotations

from typing import Callable, Optional

from ispverif.errors import ConfigError
from ispverif.sim.kernel import Notification, ProcessBody
from ispverif.tlm.component import Component

DEFAULT_PERIOD = 10
DEFAULT_RESET_DURATION = 100


class ClockGen(Component):
    """A clock described by its period; consumers wait whole cycles.

    No per-edge events are generated, which keeps long idle stretches free.
    """

    def __init__(self, name: str, parent: Optional[Component] = None, period: int = DEFAULT_PERIOD):
        super().__init__(name, parent)
        if period <= 0:
            raise ConfigError("BAD_CLOCK", f"clock period {period} must be > 0")
        self.period = period

    def cycles(self, n: int = 1):
        return self.kernel.wait(n * self.period)

    def cycle_of(self, time: int) -> int:
        return time // self.period


class ResetGen(Component):
    """Asserts reset once at t=0 for ``duration`` and then releases it."""

    def __init__(self, name: str, parent: Optional[Component] = None, duration: int = DEFAULT_RESET_DURATION):
        super().__init__(name, parent)
        if duration < 0:
            raise ConfigError("BAD_RESET", f"reset duration {duration} < 0")
        self.duration = duration
        self.asserted = False
        self.released = False
        self.release_time: Optional[int] = None
        self._hooks: list[Callable[[], None]] = []
        self._released_note: Optional[Notification] = None

    def on_reset(self, hook: Callable[[], None]) -> None:
        self._hooks.append(hook)

    def _note(self) -> Notification:
        if self._released_note is None:
            self._released_note = self.kernel.notification(f"{self.full_name}.released")
        return self._released_note

    def run_phase(self) -> ProcessBody:
        self.asserted = True
        for hook in self._hooks:
            hook()
        yield self.kernel.wait(self.duration)
        self.asserted = False
        self.released = True
        self.release_time = self.kernel.now
        self._note().notify()

    def wait_release(self) -> ProcessBody:
        if not self.released:
            yield self._note().wait()
