"""Raw stimulus files: headerless row-major 8-bit frames, back to back."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ispverif.errors import ConfigError
from ispverif.uvc.stream import Frame

SIZE_NOT_MULTIPLE = "SIZE_NOT_MULTIPLE"


@dataclass(frozen=True)
class RawStimulus:
    width: int
    height: int
    frames: tuple[Frame, ...]

    def __len__(self) -> int:
        return len(self.frames)


def read_raw_frames(path: Path | str, width: int, height: int) -> RawStimulus:
    data = Path(path).read_bytes()
    size = width * height
    if len(data) % size:
        raise ConfigError(SIZE_NOT_MULTIPLE,
                          f"{path}: {len(data)} bytes is not a multiple of the {width}x{height} frame size {size}")
    frames = tuple(Frame(width, height, data[i:i + size]) for i in range(0, len(data), size))
    return RawStimulus(width, height, frames)


def write_raw_frames(path: Path | str, frames: list[Frame]) -> None:
    Path(path).write_bytes(b"".join(f.pixels for f in frames))
