"""Component hierarchy, phasing, objections and analysis ports."""

from __future__ import annotations

import enum
import types
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Optional

from ispverif.errors import TestbenchFatal
from ispverif.sim.kernel import EventHandle, Kernel, StopReason

DEFAULT_DRAIN_TIME = 1000


class Phase(enum.Enum):
    BUILD = 0
    CONNECT = 1
    RUN = 2
    EXTRACT = 3
    CHECK = 4
    REPORT = 5


class Verdict(enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    TIMEOUT = "TIMEOUT"


@dataclass(frozen=True)
class ComponentError:
    component: str
    code: str
    message: str
    time: int

    def as_dict(self) -> dict[str, Any]:
        return {"component": self.component, "code": self.code, "message": self.message, "time": self.time}


class AnalysisPort:
    """One-to-many broadcast. Subscribers run synchronously in subscription order.

    Published items are expected to be immutable (frozen dataclasses, bytes,
    tuples); mutable payloads are snapshotted by their publishers.
    """

    def __init__(self, name: str = "ap"):
        self.name = name
        self._subscribers: list[Callable[[Any], Any]] = []

    def subscribe(self, callback: Callable[[Any], Any]) -> None:
        self._subscribers.append(callback)

    def publish(self, item: Any) -> None:
        for cb in self._subscribers:
            cb(item)

    def __len__(self) -> int:
        return len(self._subscribers)


class Component:
    def __init__(self, name: str, parent: Optional["Component"] = None):
        if not name or "." in name:
            raise TestbenchFatal("BAD_NAME", f"invalid component name {name!r}")
        self.name = name
        self.parent = parent
        self.children: list[Component] = []
        self.errors: list[ComponentError] = []
        if parent is not None:
            if any(c.name == name for c in parent.children):
                raise TestbenchFatal("DUP_NAME", f"{parent.full_name}.{name} already exists")
            parent.children.append(self)

    @property
    def full_name(self) -> str:
        if self.parent is None:
            return self.name
        return f"{self.parent.full_name}.{self.name}"

    @property
    def root(self) -> "Environment":
        node = self
        while node.parent is not None:
            node = node.parent
        if not isinstance(node, Environment):
            raise TestbenchFatal("NO_ENVIRONMENT", f"{self.full_name} is not under an Environment")
        return node

    @property
    def kernel(self) -> Kernel:
        return self.root.kernel

    def walk(self) -> Iterator["Component"]:
        yield self
        for child in self.children:
            yield from child.walk()

    def error(self, code: str, message: str = "") -> None:
        """Record a non-fatal error; it turns the test into a FAIL at CHECK."""
        try:
            now = self.kernel.now
        except TestbenchFatal:
            now = 0
        self.errors.append(ComponentError(self.full_name, code, message, now))

    def raise_objection(self) -> None:
        self.root.objections.raise_(self)

    def drop_objection(self) -> None:
        self.root.objections.drop(self)

    # Phase hooks. run_phase may be a generator function, in which case it is
    # spawned as a kernel process at the start of RUN.
    def build_phase(self) -> None:
        pass

    def connect_phase(self) -> None:
        pass

    def run_phase(self) -> Any:
        return None

    def extract_phase(self) -> None:
        pass

    def check_phase(self) -> None:
        pass

    def report_phase(self) -> None:
        pass


class Objections:
    """Global end-of-test counter with per-component bookkeeping."""

    def __init__(self, env: "Environment"):
        self.env = env
        self.count = 0
        self.per_component: dict[str, int] = {}
        self.drain_time = DEFAULT_DRAIN_TIME
        self._end: Optional[EventHandle] = None
        self.armed = False

    def raise_(self, comp: Component) -> None:
        self.per_component[comp.full_name] = self.per_component.get(comp.full_name, 0) + 1
        self.count += 1
        if self._end is not None:
            self.env.kernel.cancel(self._end)
            self._end = None

    def drop(self, comp: Component) -> None:
        held = self.per_component.get(comp.full_name, 0)
        if held == 0:
            raise TestbenchFatal("UNMATCHED_DROP", f"{comp.full_name} dropped an objection it never raised")
        self.per_component[comp.full_name] = held - 1
        self.count -= 1
        if self.count == 0 and self.armed:
            self._schedule_end()

    def _schedule_end(self) -> None:
        kernel = self.env.kernel
        self._end = kernel.schedule(kernel.stop, self.drain_time, label="objections.drain")


class Environment(Component):
    """Root of a component tree; owns the kernel and the objection counter."""

    def __init__(self, name: str, kernel: Optional[Kernel] = None):
        self._kernel = kernel if kernel is not None else Kernel()
        self.objections = Objections(self)
        super().__init__(name, None)

    @property
    def root(self) -> "Environment":
        return self

    @property
    def kernel(self) -> Kernel:
        return self._kernel


@dataclass
class TestOutcome:
    __test__ = False

    verdict: Verdict
    end_time: int
    errors: list[ComponentError] = field(default_factory=list)
    phase_trace: list[Phase] = field(default_factory=list)
    fatal: Optional[TestbenchFatal] = None


def _walk_phase(root: Component, phase: Phase) -> None:
    # Children created inside a parent's build_phase are visited after it.
    hook = {
        Phase.BUILD: "build_phase",
        Phase.CONNECT: "connect_phase",
        Phase.EXTRACT: "extract_phase",
        Phase.CHECK: "check_phase",
        Phase.REPORT: "report_phase",
    }[phase]
    stack = [root]
    while stack:
        comp = stack.pop()
        getattr(comp, hook)()
        stack.extend(reversed(comp.children))


def run_phases(root: Environment, max_time: int, drain_time: int = DEFAULT_DRAIN_TIME) -> TestOutcome:
    """Run BUILD, CONNECT, RUN, EXTRACT, CHECK and REPORT on ``root``."""
    kernel = root.kernel
    trace: list[Phase] = []
    fatal: Optional[TestbenchFatal] = None
    timed_out = False
    root.objections.drain_time = drain_time
    try:
        for phase in (Phase.BUILD, Phase.CONNECT):
            trace.append(phase)
            _walk_phase(root, phase)

        trace.append(Phase.RUN)
        for comp in list(root.walk()):
            body = comp.run_phase()
            if isinstance(body, types.GeneratorType):
                kernel.spawn(body, f"{comp.full_name}.run")
        root.objections.armed = True
        if root.objections.count == 0:
            # Cancelled again by the first raise_ of a starting process.
            root.objections._schedule_end()
        reason = kernel.run(limit=max_time)
        # An exhausted queue with objections still held can never finish.
        if reason is StopReason.LIMIT or (reason is StopReason.EXHAUSTED and root.objections.count > 0):
            timed_out = True

        for phase in (Phase.EXTRACT, Phase.CHECK):
            trace.append(phase)
            _walk_phase(root, phase)
    except TestbenchFatal as exc:
        fatal = exc
    finally:
        root.objections.armed = False

    trace.append(Phase.REPORT)
    try:
        _walk_phase(root, Phase.REPORT)
    except TestbenchFatal as exc:
        fatal = fatal or exc

    errors = [e for comp in root.walk() for e in comp.errors]
    end_time = max_time if timed_out else kernel.now
    if timed_out:
        verdict = Verdict.TIMEOUT
    elif fatal is not None or errors:
        verdict = Verdict.FAIL
    else:
        verdict = Verdict.PASS
    return TestOutcome(verdict, end_time, errors, trace, fatal)
