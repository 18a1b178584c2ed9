"""Per-test ISP parameter files and random configurations.

A parameter file fixes everything in :class:`IspConfig` except the frame
dimensions, which always come from the testbench config::

    <isp_params>
      <enable pipe="1" bl="1" gain="1" gamma="1" conv="1"/>
      <black_level>16</black_level>
      <gain>0x0180</gain>
      <shift>4</shift>
      <kernel>1 2 1 2 4 2 1 2 1</kernel>
      <lut>0 16 23 ...</lut>          <!-- 256 values; omitted means identity -->
    </isp_params>
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from importlib import resources
from pathlib import Path
from typing import Optional

from ispverif.errors import ConfigError
from ispverif.ipxact import parse_number
from ispverif.isp.pipeline import IDENTITY_KERNEL, IDENTITY_LUT, UNITY_GAIN, IspConfig
from ispverif.uvc.prng import SplitMix64

BAD_PARAMS = "BAD_PARAMS"
_ENABLES = ("pipe", "bl", "gain", "gamma", "conv")


def _numbers(text: Optional[str], what: str) -> list[int]:
    try:
        return [parse_number(t) for t in (text or "").split()]
    except ValueError as exc:
        raise ConfigError(BAD_PARAMS, f"<{what}>: {exc}") from None


def parse_isp_params(text: str, width: int, height: int) -> IspConfig:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ConfigError(BAD_PARAMS, f"not well-formed XML: {exc}") from None
    if root.tag != "isp_params":
        raise ConfigError(BAD_PARAMS, f"root element is <{root.tag}>, expected <isp_params>")

    def scalar(name: str, default: int) -> int:
        elem = root.find(name)
        if elem is None:
            return default
        values = _numbers(elem.text, name)
        if len(values) != 1:
            raise ConfigError(BAD_PARAMS, f"<{name}> needs one value, got {len(values)}")
        return values[0]

    enable = root.find("enable")
    flags = {}
    for key in _ENABLES:
        raw = enable.get(key, "1" if key == "pipe" else "0") if enable is not None else ("1" if key == "pipe" else "0")
        if raw not in ("0", "1"):
            raise ConfigError(BAD_PARAMS, f"enable {key}={raw!r}: expected 0 or 1")
        flags[key] = raw == "1"

    kernel = tuple(_numbers(root.findtext("kernel"), "kernel")) if root.find("kernel") is not None else IDENTITY_KERNEL
    # Kernel coefficients may be written as signed values or as raw bytes.
    kernel = tuple(k - 256 if 128 <= k <= 255 else k for k in kernel)
    lut_elem = root.find("lut")
    lut = bytes(_checked_lut(_numbers(lut_elem.text, "lut"))) if lut_elem is not None else IDENTITY_LUT

    cfg = IspConfig(
        width=width,
        height=height,
        pipe_en=flags["pipe"],
        bl_en=flags["bl"],
        gain_en=flags["gain"],
        gamma_en=flags["gamma"],
        conv_en=flags["conv"],
        black_level=scalar("black_level", 0),
        gain=scalar("gain", UNITY_GAIN),
        lut=lut,
        kernel=kernel,
        shift=scalar("shift", 0),
    )
    try:
        cfg.validate()
    except ConfigError as exc:
        raise ConfigError(BAD_PARAMS, exc.message) from None
    return cfg


def _checked_lut(values: list[int]) -> list[int]:
    if len(values) != 256 or any(not 0 <= v <= 255 for v in values):
        raise ConfigError(BAD_PARAMS, f"<lut> needs 256 byte values, got {len(values)}")
    return values


def load_isp_params(path: Path | str, width: int, height: int) -> IspConfig:
    return parse_isp_params(Path(path).read_text(encoding="utf-8"), width, height)


def shipped_params(width: int, height: int) -> IspConfig:
    text = resources.files("ispverif.fixtures").joinpath("full_cfg_params.xml").read_text(encoding="utf-8")
    return parse_isp_params(text, width, height)


def serialize_isp_params(cfg: IspConfig) -> str:
    flags = " ".join(f'{k}="{int(v)}"' for k, v in zip(
        _ENABLES, (cfg.pipe_en, cfg.bl_en, cfg.gain_en, cfg.gamma_en, cfg.conv_en)))
    lut_lines = "\n".join("    " + " ".join(str(v) for v in cfg.lut[i:i + 16]) for i in range(0, 256, 16))
    return (
        "<isp_params>\n"
        f"  <enable {flags}/>\n"
        f"  <black_level>{cfg.black_level}</black_level>\n"
        f"  <gain>0x{cfg.gain:04X}</gain>\n"
        f"  <shift>{cfg.shift}</shift>\n"
        f"  <kernel>{' '.join(str(k) for k in cfg.kernel)}</kernel>\n"
        f"  <lut>\n{lut_lines}\n  </lut>\n"
        "</isp_params>\n"
    )


def random_isp_config(rng: SplitMix64, width: int, height: int) -> IspConfig:
    """A valid configuration with every field drawn from ``rng``; the pipeline is always on.

    Gain and kernel ranges are narrowed so that outputs are not mostly
    saturated, which would make mismatches less likely to show.
    """
    enables = rng.below(16)
    return IspConfig(
        width=width,
        height=height,
        pipe_en=True,
        bl_en=bool(enables & 1),
        gain_en=bool(enables & 2),
        gamma_en=bool(enables & 4),
        conv_en=bool(enables & 8),
        black_level=rng.below(256),
        gain=rng.below(0x300),
        lut=bytes(rng.below(256) for _ in range(256)),
        kernel=tuple(rng.between(-16, 16) for _ in range(9)),
        shift=rng.below(8),
    )
