"""Fault descriptions for the staged pipeline."""

from __future__ import annotations

import enum
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from ispverif.errors import ConfigError
from ispverif.ipxact import parse_number

ALL = None


class Stage(str, enum.Enum):
    BL = "BL"
    GAIN = "GAIN"
    GAMMA = "GAMMA"
    CONV = "CONV"


@dataclass(frozen=True)
class FaultSpec:
    """XOR ``xor_mask`` onto one stage's output at one pixel, or every pixel."""

    stage: Stage
    xor_mask: int
    pixel_index: Optional[int] = ALL
    name: str = ""

    def __post_init__(self) -> None:
        if not 0 < self.xor_mask <= 0xFF:
            raise ConfigError("BAD_FAULT", f"xor mask 0x{self.xor_mask:X} must be a nonzero byte")
        if self.pixel_index is not None and self.pixel_index < 0:
            raise ConfigError("BAD_FAULT", f"pixel index {self.pixel_index} < 0")

    def hits(self, index: int) -> bool:
        return self.pixel_index is None or self.pixel_index == index


def parse_faults(text: str) -> dict[str, FaultSpec]:
    """``<faults><fault name= stage= mask= pixel=/>...</faults>``; pixel may be ``ALL``."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ConfigError("MALFORMED", f"fault file: {exc}") from None
    faults: dict[str, FaultSpec] = {}
    for elem in root.iter("fault"):
        a = elem.attrib
        try:
            name = a["name"]
            stage = Stage(a["stage"].upper())
            mask = parse_number(a["mask"])
            pixel_raw = a.get("pixel", "ALL")
        except (KeyError, ValueError) as exc:
            raise ConfigError("BAD_FAULT", f"fault element {a}: {exc}") from None
        pixel = None if pixel_raw.upper() == "ALL" else parse_number(pixel_raw)
        if name in faults:
            raise ConfigError("BAD_FAULT", f"duplicate fault name {name!r}")
        faults[name] = FaultSpec(stage, mask, pixel, name)
    return faults


def shipped_faults() -> dict[str, FaultSpec]:
    text = resources.files("ispverif.fixtures").joinpath("faults.xml").read_text(encoding="utf-8")
    return parse_faults(text)
