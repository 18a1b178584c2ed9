"""Symbols for test programs and generation of configuration programs."""

from __future__ import annotations

from importlib import resources

from ispverif import vri
from ispverif.isp import regs
from ispverif.isp.pipeline import IspConfig
from ispverif.platform.interconnect import ISP_BASE, MEM_BASE, VRI_BASE
from ispverif.platform.program import TestProgram, format_program, parse_program
from ispverif.reg.model import AddressMap

VRI_INSTANCES = 4
FRAME_TIMEOUT_CYCLES = 1_000_000


def platform_symbols(amap: AddressMap) -> dict[str, int]:
    """Register and memory names of ``amap``, VRI registers and ``MEM``, at global addresses."""
    out = {r.name: ISP_BASE + amap.base + r.offset for r in amap.registers}
    out.update({m.name: ISP_BASE + amap.base + m.offset for m in amap.memories})
    out.update(vri.symbols(VRI_BASE, VRI_INSTANCES))
    out["MEM"] = MEM_BASE
    return out


def config_program(cfg: IspConfig, frames: int, header: str = "") -> str:
    """Program text that writes ``cfg`` and then sends stimulus frames ``0..frames-1`` via VRI0.

    The register order matches the host programming sequence: parameters,
    LUT, CTRL last. Each frame is followed by a wait for frame_done and a
    W1C clear, so the final register state is the same on both paths.
    """
    values, lut = regs.encode_config(cfg)
    cmds: list[tuple[str, ...]] = []
    for off, value in values.items():
        if off != regs.CTRL:
            cmds.append(("W", regs.REGISTER_NAMES[off], f"0x{value:X}"))
    for i, v in enumerate(lut):
        cmds.append(("W", f"GAMMA_LUT+0x{4 * i:X}", f"0x{v:02X}"))
    cmds.append(("W", "CTRL", f"0x{values[regs.CTRL]:X}"))
    cmds.append(("E", "CTRL", "0x1F", f"0x{values[regs.CTRL]:X}"))
    for i in range(frames):
        cmds.append(("W", "VRI0_PARAM0", str(i)))
        cmds.append(("W", "VRI0_CMD", str(int(vri.VriCommand.SEND_STIMULUS_FRAME))))
        cmds.append(("P", "VRI0_STATUS", "0x3", f"0x{int(vri.VriStatus.DONE):X}", str(FRAME_TIMEOUT_CYCLES)))
        if cfg.pipe_en:
            cmds.append(("P", "STATUS", "0x2", "0x2", str(FRAME_TIMEOUT_CYCLES)))
            cmds.append(("W", "STATUS", "0x2"))
    cmds.append(("END",))
    return format_program(cmds, header)


def shipped_program_text(name: str) -> str:
    return resources.files("ispverif.fixtures").joinpath(name).read_text(encoding="utf-8")


def load_program(text: str, amap: AddressMap) -> TestProgram:
    return parse_program(text, platform_symbols(amap))
