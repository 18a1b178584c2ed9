"""In-order frame scoreboard."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Union

from ispverif.tlm.component import Component
from ispverif.uvc.stream import Frame

DEFAULT_MAX_RECORDS = 16


@dataclass(frozen=True)
class Mismatch:
    """One differing pixel, or a structural (dimension) mismatch with x = y = None."""

    frame: int
    x: Optional[int]
    y: Optional[int]
    expected: Union[int, str]
    actual: Union[int, str]

    @property
    def structural(self) -> bool:
        return self.x is None

    def as_dict(self) -> dict:
        return {"frame": self.frame, "x": self.x, "y": self.y, "expected": self.expected, "actual": self.actual}


def scoreboard_compare(expected: Frame, observed: Frame, frame_index: int = 0,
                       max_records: int = DEFAULT_MAX_RECORDS) -> list[Mismatch]:
    """Mismatch records for one frame pair, first mismatch first; empty on a match."""
    if (expected.width, expected.height) != (observed.width, observed.height):
        return [Mismatch(frame_index, None, None, f"{expected.width}x{expected.height}",
                         f"{observed.width}x{observed.height}")]
    if expected.pixels == observed.pixels:
        return []
    w = expected.width
    records = []
    for i, (e, a) in enumerate(zip(expected.pixels, observed.pixels)):
        if e != a:
            records.append(Mismatch(frame_index, i % w, i // w, e, a))
            if len(records) >= max_records:
                break
    return records


class Scoreboard(Component):
    """Pairs expected and observed frames by arrival order.

    An objection is held while an expected frame waits for its observed
    counterpart, so the test cannot end with output still in flight.
    """

    def __init__(self, name: str, parent: Optional[Component] = None,
                 max_records: int = DEFAULT_MAX_RECORDS):
        super().__init__(name, parent)
        self.max_records = max_records
        self._expected: deque[Frame] = deque()
        self._observed: deque[Frame] = deque()
        self.frames_compared = 0
        self.frames_matched = 0
        self.mismatches: list[Mismatch] = []

    def write_expected(self, frame: Frame) -> None:
        if self._observed:
            self._compare(frame, self._observed.popleft())
        else:
            self._expected.append(frame)
            self.raise_objection()

    def write_observed(self, frame: Frame) -> None:
        if self._expected:
            self._compare(self._expected.popleft(), frame)
            self.drop_objection()
        else:
            self._observed.append(frame)

    def _compare(self, expected: Frame, observed: Frame) -> None:
        index = self.frames_compared
        self.frames_compared += 1
        records = scoreboard_compare(expected, observed, index, self.max_records)
        if records:
            self.mismatches.extend(records)
            first = records[0]
            where = "dimensions" if first.structural else f"({first.x},{first.y})"
            self.error("FRAME_MISMATCH", f"frame {index}: first difference at {where}: "
                                         f"expected {first.expected}, actual {first.actual}")
        else:
            self.frames_matched += 1

    @property
    def pending_expected(self) -> int:
        return len(self._expected)

    @property
    def pending_observed(self) -> int:
        return len(self._observed)

    def check_phase(self) -> None:
        if self._expected or self._observed:
            self.error("FRAME_COUNT", f"{len(self._expected)} expected and {len(self._observed)} "
                                      f"observed frames left unmatched")
