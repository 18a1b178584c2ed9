"""Streaming data UVC: frames, beats, driver, monitor and agent."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ispverif.errors import ConfigError
from ispverif.sim.kernel import ProcessBody
from ispverif.tlm.component import AnalysisPort, Component
from ispverif.tlm.sequence import Sequence as TlmSequence
from ispverif.tlm.sequence import SequenceHandle, SequenceItem, Sequencer
from ispverif.uvc.prng import SplitMix64

SHORT_FRAME = "SHORT_FRAME"
LONG_FRAME = "LONG_FRAME"
MISSING_SOF = "MISSING_SOF"


@dataclass(frozen=True)
class Frame:
    width: int
    height: int
    pixels: bytes

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"frame dimensions {self.width}x{self.height}")
        if len(self.pixels) != self.width * self.height:
            raise ValueError(f"{len(self.pixels)} pixels for a {self.width}x{self.height} frame")
        if not isinstance(self.pixels, bytes):
            object.__setattr__(self, "pixels", bytes(self.pixels))

    def at(self, x: int, y: int) -> int:
        return self.pixels[y * self.width + x]

    def rows(self) -> list[bytes]:
        w = self.width
        return [self.pixels[y * w:(y + 1) * w] for y in range(self.height)]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "Frame":
        return cls(len(rows[0]), len(rows), bytes(v for row in rows for v in row))


@dataclass(frozen=True, slots=True)
class StreamBeat:
    data: int
    sof: bool
    eof: bool


def frame_beats(frame: Frame) -> list[StreamBeat]:
    last = len(frame.pixels) - 1
    return [StreamBeat(p, i == 0, i == last) for i, p in enumerate(frame.pixels)]


@dataclass(frozen=True)
class GapPolicy:
    """Idle cycles inserted between consecutive beats of a frame."""

    min_gap: int = 0
    max_gap: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.min_gap <= self.max_gap:
            raise ValueError(f"gap policy needs 0 <= min <= max, got {self.min_gap}, {self.max_gap}")

    @classmethod
    def none(cls) -> "GapPolicy":
        return cls(0, 0)

    @classmethod
    def random(cls, min_gap: int, max_gap: int) -> "GapPolicy":
        return cls(min_gap, max_gap)

    @property
    def is_none(self) -> bool:
        return self.max_gap == 0


def random_frame(rng: SplitMix64, width: int, height: int) -> Frame:
    """Row-major frame whose pixels are the low bytes of successive PRNG outputs."""
    return Frame(width, height, bytes(rng.next() & 0xFF for _ in range(width * height)))


# -- sequences ---------------------------------------------------------------

def frame_item(frame: Frame) -> SequenceItem:
    return SequenceItem("frame", frame)


class FrameSequence(TlmSequence):
    def __init__(self, frames: Iterable[Frame], name: str = "frames"):
        super().__init__(name)
        self.frames = list(frames)

    def body(self):
        return (frame_item(f) for f in self.frames)


class RandomFrameSequence(TlmSequence):
    """``count`` frames drawn from one fresh splitmix64 stream seeded with ``seed``."""

    def __init__(self, seed: int, width: int, height: int, count: int = 1, name: str = "random_frames"):
        super().__init__(name)
        self.seed, self.width, self.height, self.count = seed, width, height, count

    def body(self):
        rng = SplitMix64(self.seed)
        for _ in range(self.count):
            yield frame_item(random_frame(rng, self.width, self.height))


# -- components ---------------------------------------------------------------

class StreamDriver(Component):
    """Pulls frames from its sequencer and emits one beat per clock cycle.

    ``frame_ap`` publishes each frame as its first beat goes out (the stimulus
    tee to the reference path); ``beat_ap`` carries the beats themselves.
    """

    def __init__(self, name: str, parent: Optional[Component], sequencer: Sequencer,
                 period: int = 10, gaps: GapPolicy = GapPolicy(), gap_seed: int = 0):
        super().__init__(name, parent)
        self.sequencer = sequencer
        sequencer.connect_driver(self)
        self.period = period
        self.gaps = gaps
        self._gap_rng = SplitMix64(gap_seed)
        self.frame_ap = AnalysisPort(f"{name}.frame_ap")
        self.beat_ap = AnalysisPort(f"{name}.beat_ap")
        self.frames_driven = 0
        self.beat_log: Optional[list[tuple[int, StreamBeat]]] = None

    def record_beats(self) -> list[tuple[int, StreamBeat]]:
        self.beat_log = []
        return self.beat_log

    def run_phase(self) -> ProcessBody:
        while True:
            item = yield from self.sequencer.get_next_item()
            yield from self.drive_frame(item.payload)
            self.sequencer.item_done()

    def drive_frame(self, frame: Frame) -> ProcessBody:
        kernel = self.kernel
        period = self.period
        gaps = self.gaps
        publish = self.beat_ap.publish
        log = self.beat_log
        self.frame_ap.publish(frame)
        last = len(frame.pixels) - 1
        for i, p in enumerate(frame.pixels):
            if i:
                gap = 0 if gaps.is_none else self._gap_rng.between(gaps.min_gap, gaps.max_gap)
                yield kernel.wait(period * (1 + gap))
            beat = StreamBeat(p, i == 0, i == last)
            if log is not None:
                log.append((kernel.now, beat))
            publish(beat)
        self.frames_driven += 1
        # The next frame starts on the following cycle.
        yield kernel.wait(period)


class StreamMonitor(Component):
    """Passive reassembly of beats into frames of the configured size."""

    def __init__(self, name: str, parent: Optional[Component], width: int, height: int):
        super().__init__(name, parent)
        self.ap = AnalysisPort(f"{name}.ap")
        self.frames: list[Frame] = []
        self.set_dimensions(width, height)
        self._buf: Optional[bytearray] = None
        self._skipping = False

    def set_dimensions(self, width: int, height: int) -> None:
        if width < 1 or height < 1:
            raise ConfigError("BAD_DIMENSIONS", f"{self.full_name}: {width}x{height}")
        self.width, self.height = width, height

    def observe(self, beat: StreamBeat) -> None:
        buf = self._buf
        if beat.sof:
            if buf is not None:
                self.error(SHORT_FRAME, f"sof after {len(buf)} beats, expected {self.width * self.height}")
            buf = self._buf = bytearray()
            self._skipping = False
        elif buf is None:
            if not self._skipping:
                self.error(MISSING_SOF, "beat outside a frame without sof")
                self._skipping = True
            return
        buf.append(beat.data)
        expected = self.width * self.height
        if beat.eof:
            self._buf = None
            if len(buf) < expected:
                self.error(SHORT_FRAME, f"eof after {len(buf)} beats, expected {expected}")
                return
            if len(buf) > expected:
                self.error(LONG_FRAME, f"eof after {len(buf)} beats, expected {expected}")
                return
            frame = Frame(self.width, self.height, bytes(buf))
            self.frames.append(frame)
            self.ap.publish(frame)
        elif len(buf) > expected:
            self.error(LONG_FRAME, f"more than {expected} beats without eof")
            self._buf = None
            self._skipping = True


class StreamAgent(Component):
    """Active agent: sequencer plus driver."""

    def __init__(self, name: str, parent: Optional[Component], period: int = 10,
                 gaps: GapPolicy = GapPolicy(), gap_seed: int = 0):
        super().__init__(name, parent)
        self.sequencer = Sequencer("sequencer", self)
        self.driver = StreamDriver("driver", self, self.sequencer, period=period, gaps=gaps, gap_seed=gap_seed)

    def send(self, frames: Iterable[Frame], name: str = "frames") -> SequenceHandle:
        return self.sequencer.start(FrameSequence(frames, name))
