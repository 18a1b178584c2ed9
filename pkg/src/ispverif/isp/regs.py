"""ISP register layout and the DUT-side register bank.

The bank is the hardware view of the registers: it applies access policies
on bus writes, exposes raw storage to the back door, and lets the pipeline
update status bits directly. It is written against fixed offsets and masks,
independently of the register model.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from ispverif.isp.pipeline import IDENTITY_LUT, UNITY_GAIN, IspConfig
from ispverif.tlm.payload import GenericPayload, Status

CTRL = 0x000
FRAME_SIZE = 0x004
BLACK_LEVEL = 0x008
GAIN = 0x00C
CONV_SHIFT = 0x010
KERNEL_BASE = 0x014
STATUS = 0x040
LUT_BASE = 0x400
LUT_ENTRIES = 256
WINDOW = 0x1000

KERNEL = tuple(KERNEL_BASE + 4 * i for i in range(9))

CTRL_BL_EN = 1 << 0
CTRL_GAIN_EN = 1 << 1
CTRL_GAMMA_EN = 1 << 2
CTRL_CONV_EN = 1 << 3
CTRL_PIPE_EN = 1 << 4

STATUS_BUSY = 1 << 0
STATUS_FRAME_DONE = 1 << 1
STATUS_DROPPED_SHIFT = 8
STATUS_DROPPED_MASK = 0xFF << STATUS_DROPPED_SHIFT

REGISTER_NAMES = {
    CTRL: "CTRL", FRAME_SIZE: "FRAME_SIZE", BLACK_LEVEL: "BLACK_LEVEL", GAIN: "GAIN",
    CONV_SHIFT: "CONV_SHIFT", STATUS: "STATUS",
    **{off: f"KERNEL{i}" for i, off in enumerate(KERNEL)},
}

# offset -> (writable RW bits, write-one-to-clear bits, readable bits, reset)
_LAYOUT: dict[int, tuple[int, int, int, int]] = {
    CTRL: (0x1F, 0, 0x1F, 0),
    FRAME_SIZE: (0xFFFF_FFFF, 0, 0xFFFF_FFFF, 0),
    BLACK_LEVEL: (0xFF, 0, 0xFF, 0),
    GAIN: (0xFFFF, 0, 0xFFFF, UNITY_GAIN),
    CONV_SHIFT: (0x7, 0, 0x7, 0),
    STATUS: (0, STATUS_FRAME_DONE, STATUS_BUSY | STATUS_FRAME_DONE | STATUS_DROPPED_MASK, 0),
    **{off: (0xFF, 0, 0xFF, 1 if i == 4 else 0) for i, off in enumerate(KERNEL)},
}


def _s8(v: int) -> int:
    v &= 0xFF
    return v - 256 if v & 0x80 else v


def encode_config(cfg: IspConfig) -> tuple[dict[int, int], list[int]]:
    """Register values (by offset, STATUS excluded) and LUT words for ``cfg``."""
    ctrl = ((CTRL_BL_EN if cfg.bl_en else 0) | (CTRL_GAIN_EN if cfg.gain_en else 0)
            | (CTRL_GAMMA_EN if cfg.gamma_en else 0) | (CTRL_CONV_EN if cfg.conv_en else 0)
            | (CTRL_PIPE_EN if cfg.pipe_en else 0))
    regs = {
        FRAME_SIZE: (cfg.height << 16) | cfg.width,
        BLACK_LEVEL: cfg.black_level,
        GAIN: cfg.gain,
        CONV_SHIFT: cfg.shift,
        **{off: cfg.kernel[i] & 0xFF for i, off in enumerate(KERNEL)},
        CTRL: ctrl,
    }
    return regs, list(cfg.lut)


def decode_config(regs: Mapping[int, int], lut: Sequence[int]) -> IspConfig:
    """Inverse of :func:`encode_config`; LUT words contribute their low byte."""
    ctrl = regs[CTRL]
    size = regs[FRAME_SIZE]
    return IspConfig(
        width=size & 0xFFFF,
        height=(size >> 16) & 0xFFFF,
        pipe_en=bool(ctrl & CTRL_PIPE_EN),
        bl_en=bool(ctrl & CTRL_BL_EN),
        gain_en=bool(ctrl & CTRL_GAIN_EN),
        gamma_en=bool(ctrl & CTRL_GAMMA_EN),
        conv_en=bool(ctrl & CTRL_CONV_EN),
        black_level=regs[BLACK_LEVEL] & 0xFF,
        gain=regs[GAIN] & 0xFFFF,
        lut=bytes(w & 0xFF for w in lut),
        kernel=tuple(_s8(regs[off]) for off in KERNEL),
        shift=regs[CONV_SHIFT] & 0x7,
    )


def decode_named(values: Mapping[str, int], lut: Sequence[int]) -> IspConfig:
    """:func:`decode_config` keyed by register name (as in a register model)."""
    by_offset = {off: values[name] for off, name in REGISTER_NAMES.items() if name in values}
    return decode_config(by_offset, lut)


RESET_LUT = list(IDENTITY_LUT)


class RegisterBank:
    """Hardware register storage for the ISP window."""

    def __init__(self) -> None:
        self.regs: dict[int, int] = {}
        self.lut: list[int] = []
        self.reset()

    def reset(self) -> None:
        self.regs = {off: layout[3] for off, layout in _LAYOUT.items()}
        self.lut = list(RESET_LUT)

    # bus side
    def bus_access(self, payload: GenericPayload) -> None:
        addr = payload.address
        if len(payload.data) != 4 or addr % 4:
            payload.status = Status.GENERIC_ERROR
            return
        if LUT_BASE <= addr < LUT_BASE + 4 * LUT_ENTRIES:
            idx = (addr - LUT_BASE) // 4
            if payload.is_write:
                self.lut[idx] = payload.value
            else:
                payload.value = self.lut[idx]
            payload.status = Status.OK
            return
        layout = _LAYOUT.get(addr)
        if layout is None:
            payload.status = Status.ADDRESS_ERROR
            return
        rw, w1c, readable, _ = layout
        if payload.is_write:
            cur = self.regs[addr]
            v = payload.value
            self.regs[addr] = (cur & ~rw & ~w1c) | (v & rw) | (cur & w1c & ~v)
        else:
            payload.value = self.regs[addr] & readable
        payload.status = Status.OK

    # back door
    def peek(self, offset: int) -> int:
        if LUT_BASE <= offset < LUT_BASE + 4 * LUT_ENTRIES and offset % 4 == 0:
            return self.lut[(offset - LUT_BASE) // 4]
        if offset in self.regs:
            return self.regs[offset]
        raise KeyError(f"no ISP storage at offset 0x{offset:X}")

    def poke(self, offset: int, value: int) -> None:
        value &= 0xFFFF_FFFF
        if LUT_BASE <= offset < LUT_BASE + 4 * LUT_ENTRIES and offset % 4 == 0:
            self.lut[(offset - LUT_BASE) // 4] = value
        elif offset in self.regs:
            self.regs[offset] = value
        else:
            raise KeyError(f"no ISP storage at offset 0x{offset:X}")

    # pipeline side
    def current_config(self) -> IspConfig:
        return decode_config(self.regs, self.lut)

    def set_status(self, busy: bool | None = None, frame_done: bool | None = None) -> None:
        s = self.regs[STATUS]
        if busy is not None:
            s = (s | STATUS_BUSY) if busy else (s & ~STATUS_BUSY)
        if frame_done:
            s |= STATUS_FRAME_DONE
        self.regs[STATUS] = s

    def count_drop(self) -> None:
        s = self.regs[STATUS]
        dropped = (s & STATUS_DROPPED_MASK) >> STATUS_DROPPED_SHIFT
        if dropped < 0xFF:
            s = (s & ~STATUS_DROPPED_MASK) | ((dropped + 1) << STATUS_DROPPED_SHIFT)
        self.regs[STATUS] = s
