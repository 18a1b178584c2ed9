"""Golden reference model of the four-stage pixel pipeline.

Stages run in the fixed order black level, gain, gamma LUT, 3x3
convolution. The scalar stage functions define the arithmetic; the frame
level reference is vectorised with numpy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ispverif.errors import ConfigError
from ispverif.uvc.stream import Frame

IDENTITY_LUT = bytes(range(256))
IDENTITY_KERNEL = (0, 0, 0, 0, 1, 0, 0, 0, 0)
UNITY_GAIN = 0x0100


@dataclass(frozen=True)
class IspConfig:
    width: int
    height: int
    pipe_en: bool = True
    bl_en: bool = False
    gain_en: bool = False
    gamma_en: bool = False
    conv_en: bool = False
    black_level: int = 0
    gain: int = UNITY_GAIN
    lut: bytes = field(default=IDENTITY_LUT)
    kernel: tuple[int, ...] = IDENTITY_KERNEL
    shift: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.lut, bytes):
            object.__setattr__(self, "lut", bytes(self.lut))
        if not isinstance(self.kernel, tuple):
            object.__setattr__(self, "kernel", tuple(self.kernel))

    def validate(self) -> None:
        problems = []
        if self.width < 3 or self.height < 3:
            problems.append(f"frame {self.width}x{self.height} smaller than 3x3")
        if not 0 <= self.shift <= 7:
            problems.append(f"shift {self.shift} outside 0..7")
        if not 0 <= self.black_level <= 0xFF:
            problems.append(f"black level {self.black_level} outside u8")
        if not 0 <= self.gain <= 0xFFFF:
            problems.append(f"gain 0x{self.gain:X} outside u16")
        if len(self.lut) != 256:
            problems.append(f"LUT has {len(self.lut)} entries")
        if len(self.kernel) != 9 or any(not -128 <= k <= 127 for k in self.kernel):
            problems.append(f"kernel {self.kernel} is not nine signed bytes")
        if problems:
            raise ConfigError("BAD_ISP_CONFIG", "; ".join(problems))

    @classmethod
    def identity(cls, width: int, height: int, all_stages: bool = False) -> "IspConfig":
        """Configuration whose output equals its input."""
        return cls(width, height, pipe_en=True, bl_en=all_stages, gain_en=all_stages,
                   gamma_en=all_stages, conv_en=all_stages)


def stage_black_level(p: int, bl: int) -> int:
    return p - bl if p > bl else 0


def stage_gain(p: int, g: int) -> int:
    v = (p * g) >> 8
    return 255 if v > 255 else v


def stage_gamma(p: int, lut: Sequence[int]) -> int:
    return lut[p]


def _clamp8(v: int) -> int:
    return 0 if v < 0 else 255 if v > 255 else v


def stage_conv(frame: Frame, kernel: Sequence[int], shift: int) -> Frame:
    """3x3 convolution with edge replication, arithmetic shift, clamp to u8."""
    w, h = frame.width, frame.height
    if w < 3 or h < 3:
        raise ConfigError("BAD_ISP_CONFIG", f"convolution needs at least 3x3, got {w}x{h}")
    px = frame.pixels
    out = bytearray(w * h)
    for y in range(h):
        for x in range(w):
            acc = 0
            for dy in (-1, 0, 1):
                yy = min(max(y + dy, 0), h - 1)
                for dx in (-1, 0, 1):
                    xx = min(max(x + dx, 0), w - 1)
                    acc += kernel[(dy + 1) * 3 + (dx + 1)] * px[yy * w + xx]
            out[y * w + x] = _clamp8(acc >> shift)
    return Frame(w, h, bytes(out))


def ref_process_frame(cfg: IspConfig, frame: Frame) -> Optional[Frame]:
    """Pure reference transform. Returns ``None`` when the pipeline is disabled."""
    if not cfg.pipe_en:
        return None
    if (frame.width, frame.height) != (cfg.width, cfg.height):
        raise ConfigError(
            "DIMENSION_MISMATCH",
            f"frame {frame.width}x{frame.height} vs configured {cfg.width}x{cfg.height}")
    cfg.validate()
    h, w = frame.height, frame.width
    a = np.frombuffer(frame.pixels, dtype=np.uint8).reshape(h, w).astype(np.int32)
    if cfg.bl_en:
        a = np.maximum(a - cfg.black_level, 0)
    if cfg.gain_en:
        a = np.minimum((a * cfg.gain) >> 8, 255)
    if cfg.gamma_en:
        a = np.frombuffer(cfg.lut, dtype=np.uint8).astype(np.int32)[a]
    if cfg.conv_en:
        padded = np.pad(a, 1, mode="edge")
        acc = np.zeros((h, w), dtype=np.int64)
        for ky in range(3):
            for kx in range(3):
                coef = cfg.kernel[ky * 3 + kx]
                if coef:
                    acc += coef * padded[ky:ky + h, kx:kx + w]
        a = np.clip(acc >> cfg.shift, 0, 255)
    return Frame(w, h, a.astype(np.uint8).tobytes())
