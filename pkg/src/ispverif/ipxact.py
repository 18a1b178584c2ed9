"""Register-map and testbench-configuration XML.

The register map uses a small IP-XACT flavoured vocabulary::

    <memoryMap name="isp" baseAddress="0x0">
      <addressBlock name="regs" offset="0x0">
        <register name="CTRL" addressOffset="0x0" size="32">
          <field name="bl_en" bitOffset="0" bitWidth="1" access="RW" reset="0"/>
        </register>
      </addressBlock>
      <addressBlock name="GAMMA_LUT" offset="0x400" size="0x400" usage="memory"/>
    </memoryMap>

Register offsets are relative to their block. Namespaces are ignored.
"""

from __future__ import annotations

import enum
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from ispverif.reg.model import REG_BITS, REG_BYTES, Access, AddressMap, FieldSpec, MemorySpec, RegisterSpec

OVERLAP = "OVERLAP"
FIELD_OVERFLOW = "FIELD_OVERFLOW"
DUP_NAME = "DUP_NAME"
BAD_ALIGN = "BAD_ALIGN"
MALFORMED = "MALFORMED"
MISSING_ATTR = "MISSING_ATTR"
BAD_VALUE = "BAD_VALUE"

_ACCESS_ALIASES = {
    "RO": Access.RO, "READ-ONLY": Access.RO,
    "RW": Access.RW, "READ-WRITE": Access.RW,
    "WO": Access.WO, "WRITE-ONLY": Access.WO,
    "W1C": Access.W1C, "ONETOCLEAR": Access.W1C,
}


@dataclass(frozen=True)
class ValidationError:
    code: str
    detail: str

    def __str__(self) -> str:
        return f"{self.code}: {self.detail}"


class XmlConfigError(Exception):
    """Raised with every problem found in one pass."""

    def __init__(self, errors: list[ValidationError]):
        self.errors = errors
        super().__init__("; ".join(str(e) for e in errors))

    @property
    def codes(self) -> list[str]:
        return [e.code for e in self.errors]


class RegisterMapError(XmlConfigError):
    pass


class TbConfigError(XmlConfigError):
    pass


def parse_number(text: str) -> int:
    s = text.strip().replace("_", "")
    if s.lower().startswith("0x"):
        return int(s[2:], 16)
    return int(s, 10)


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1].rsplit(":", 1)[-1]


def _attrs(elem: ET.Element) -> dict[str, str]:
    return {_local(k): v for k, v in elem.attrib.items()}


def _children(elem: ET.Element, name: str) -> list[ET.Element]:
    return [c for c in elem if _local(c.tag) == name]


class _Collector:
    def __init__(self) -> None:
        self.errors: list[ValidationError] = []

    def add(self, code: str, detail: str) -> None:
        self.errors.append(ValidationError(code, detail))

    def number(self, attrs: dict[str, str], keys: tuple[str, ...], where: str,
               default: Optional[int] = None) -> Optional[int]:
        for key in keys:
            if key in attrs:
                try:
                    return parse_number(attrs[key])
                except ValueError:
                    self.add(BAD_VALUE, f"{where}: {key}={attrs[key]!r} is not a number")
                    return None
        if default is None:
            self.add(MISSING_ATTR, f"{where}: missing {'/'.join(keys)}")
        return default

    def text(self, attrs: dict[str, str], key: str, where: str) -> Optional[str]:
        if key not in attrs or not attrs[key].strip():
            self.add(MISSING_ATTR, f"{where}: missing {key}")
            return None
        return attrs[key].strip()


# -- register map ----------------------------------------------------------

def parse_register_map(text: str) -> AddressMap:
    """Parse and validate; raises :class:`RegisterMapError` listing all problems."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise RegisterMapError([ValidationError(MALFORMED, f"not well-formed XML: {exc}")]) from None

    col = _Collector()
    if _local(root.tag) != "memoryMap":
        col.add(MALFORMED, f"root element is <{_local(root.tag)}>, expected <memoryMap>")
        raise RegisterMapError(col.errors)

    top = _attrs(root)
    map_name = top.get("name", "map")
    base = col.number(top, ("baseAddress", "base", "offset"), f"memoryMap {map_name}", default=0)

    registers: list[RegisterSpec] = []
    memories: list[MemorySpec] = []
    for bi, block in enumerate(_children(root, "addressBlock")):
        battrs = _attrs(block)
        bname = battrs.get("name", f"addressBlock[{bi}]")
        boff = col.number(battrs, ("offset", "baseAddress"), f"addressBlock {bname}")
        if battrs.get("usage", "register").lower() == "memory":
            if "name" not in battrs:
                col.add(MISSING_ATTR, f"addressBlock[{bi}]: memory block missing name")
            size = col.number(battrs, ("size", "range"), f"memory {bname}")
            if boff is not None and size is not None:
                memories.append(MemorySpec(bname, boff, size))
            continue
        for ri, reg in enumerate(_children(block, "register")):
            spec = _parse_register(col, reg, ri, bname, boff or 0)
            if spec is not None:
                registers.append(spec)

    amap = AddressMap(base=base or 0, registers=registers, memories=memories, name=map_name)
    col.errors.extend(validate_map(amap))
    if col.errors:
        raise RegisterMapError(col.errors)
    return amap


def _parse_register(col: _Collector, reg: ET.Element, index: int, block: str, block_off: int) -> Optional[RegisterSpec]:
    attrs = _attrs(reg)
    name = col.text(attrs, "name", f"{block}.register[{index}]")
    where = f"register {name or index}"
    off = col.number(attrs, ("addressOffset", "offset"), where)
    size = col.number(attrs, ("size",), where, default=REG_BITS)
    if size is not None and size != REG_BITS:
        col.add(BAD_VALUE, f"{where}: size {size}, only {REG_BITS}-bit registers are supported")
    fields: list[FieldSpec] = []
    for fi, fe in enumerate(_children(reg, "field")):
        fattrs = _attrs(fe)
        fname = col.text(fattrs, "name", f"{where}.field[{fi}]")
        fwhere = f"{name}.{fname or fi}"
        lsb = col.number(fattrs, ("bitOffset", "lsb"), fwhere)
        width = col.number(fattrs, ("bitWidth", "width"), fwhere)
        reset = col.number(fattrs, ("reset",), fwhere, default=0)
        acc_text = col.text(fattrs, "access", fwhere)
        access = None
        if acc_text is not None:
            access = _ACCESS_ALIASES.get(acc_text.upper())
            if access is None:
                col.add(BAD_VALUE, f"{fwhere}: unknown access {acc_text!r}")
        if None in (fname, lsb, width, access, reset):
            continue
        fields.append(FieldSpec(fname, lsb, width, access, reset))
    if name is None or off is None:
        return None
    return RegisterSpec(name, block_off + off, tuple(fields))


def validate_map(amap: AddressMap) -> list[ValidationError]:
    """All structural problems with ``amap``; empty when valid."""
    errors: list[ValidationError] = []

    seen: dict[str, str] = {}
    for kind, name in [("register", r.name) for r in amap.registers] + [("memory", m.name) for m in amap.memories]:
        if name in seen:
            errors.append(ValidationError(DUP_NAME, f"{kind} name {name!r} used twice"))
        seen[name] = kind

    for r in amap.registers:
        if r.offset % REG_BYTES:
            errors.append(ValidationError(BAD_ALIGN, f"register {r.name} at offset 0x{r.offset:X} not 4-aligned"))
        names: set[str] = set()
        for f in r.fields:
            if f.name in names:
                errors.append(ValidationError(DUP_NAME, f"{r.name}.{f.name} defined twice"))
            names.add(f.name)
            if f.width < 1 or f.lsb < 0:
                errors.append(ValidationError(BAD_VALUE, f"{r.name}.{f.name}: lsb={f.lsb} width={f.width}"))
            elif f.lsb + f.width > REG_BITS:
                errors.append(ValidationError(
                    FIELD_OVERFLOW, f"{r.name}.{f.name}: lsb {f.lsb} + width {f.width} > {REG_BITS}"))
            if f.width >= 1 and not 0 <= f.reset < (1 << f.width):
                errors.append(ValidationError(BAD_VALUE, f"{r.name}.{f.name}: reset 0x{f.reset:X} exceeds width"))
        for i, a in enumerate(r.fields):
            for b in r.fields[i + 1:]:
                if a.width >= 1 and b.width >= 1 and a.mask & b.mask:
                    errors.append(ValidationError(OVERLAP, f"{r.name}: fields {a.name} and {b.name} overlap"))

    for m in amap.memories:
        if m.offset % REG_BYTES or m.size % REG_BYTES or m.size <= 0:
            errors.append(ValidationError(
                BAD_ALIGN, f"memory {m.name} at 0x{m.offset:X} size 0x{m.size:X} not word-aligned"))

    spans = sorted(amap.ranges())
    for i, (start, end, name) in enumerate(spans):
        for start2, end2, name2 in spans[i + 1:]:
            if start2 >= end:
                break
            errors.append(ValidationError(
                OVERLAP, f"{name} [0x{start:X},0x{end:X}) overlaps {name2} [0x{start2:X},0x{end2:X})"))
    return errors


def serialize_register_map(amap: AddressMap) -> str:
    """Write ``amap`` in the schema accepted by :func:`parse_register_map`."""
    root = ET.Element("memoryMap", name=amap.name, baseAddress=f"0x{amap.base:X}")
    block = ET.SubElement(root, "addressBlock", name="registers", offset="0x0")
    for r in amap.registers:
        re_ = ET.SubElement(block, "register", name=r.name, addressOffset=f"0x{r.offset:03X}", size=str(REG_BITS))
        for f in r.fields:
            ET.SubElement(re_, "field", name=f.name, bitOffset=str(f.lsb), bitWidth=str(f.width),
                          access=f.access.value, reset=f"0x{f.reset:X}")
    for m in amap.memories:
        ET.SubElement(root, "addressBlock", name=m.name, offset=f"0x{m.offset:X}",
                      size=f"0x{m.size:X}", usage="memory")
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"


# -- testbench configuration ---------------------------------------------

class DutKind(str, enum.Enum):
    REFERENCE_WRAPPER = "REFERENCE_WRAPPER"
    STAGED_PIPELINE = "STAGED_PIPELINE"


class PathKind(str, enum.Enum):
    HOST = "HOST"
    CPU = "CPU"


class StimulusKind(str, enum.Enum):
    RANDOM = "RANDOM"
    FILE = "FILE"


@dataclass(frozen=True)
class TbConfig:
    seed: int
    frame_width: int
    frame_height: int
    frame_count: int
    dut_kind: DutKind = DutKind.REFERENCE_WRAPPER
    path_kind: PathKind = PathKind.HOST
    stimulus: StimulusKind = StimulusKind.RANDOM
    stimulus_file: Optional[Path] = None
    program_path: Optional[Path] = None
    params_path: Optional[Path] = None
    drain_time: int = 1000
    max_time: int = 10_000_000
    report_path: Path = field(default=Path("report.json"))

    def with_(self, **changes) -> "TbConfig":
        return replace(self, **changes)


def _enum_value(col: _Collector, enum_cls, raw: Optional[str], default, where: str):
    if raw is None:
        return default
    try:
        return enum_cls(raw.strip().upper())
    except ValueError:
        col.add(BAD_VALUE, f"{where}: {raw!r} not one of {[e.value for e in enum_cls]}")
        return default


def parse_tb_config(text: str, base_dir: Optional[Path] = None) -> TbConfig:
    """Parse a ``<testbench>`` document. Relative file paths resolve against ``base_dir``."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise TbConfigError([ValidationError(MALFORMED, f"not well-formed XML: {exc}")]) from None
    col = _Collector()
    if _local(root.tag) != "testbench":
        col.add(MALFORMED, f"root element is <{_local(root.tag)}>, expected <testbench>")
        raise TbConfigError(col.errors)

    def one(name: str) -> Optional[ET.Element]:
        found = _children(root, name)
        if len(found) > 1:
            col.add(MALFORMED, f"<{name}> appears {len(found)} times")
        return found[0] if found else None

    def path(raw: Optional[str]) -> Optional[Path]:
        if raw is None or not raw.strip():
            return None
        p = Path(raw.strip())
        return p if p.is_absolute() or base_dir is None else base_dir / p

    def text_number(name: str, default: Optional[int]) -> Optional[int]:
        elem = one(name)
        if elem is None or not (elem.text or "").strip():
            if default is None:
                col.add(MISSING_ATTR, f"<{name}> is required")
            return default
        try:
            return parse_number(elem.text)
        except ValueError:
            col.add(BAD_VALUE, f"<{name}>{elem.text.strip()}</{name}> is not a number")
            return default

    seed = text_number("seed", None)
    frame = one("frame")
    fattrs = _attrs(frame) if frame is not None else {}
    if frame is None:
        col.add(MISSING_ATTR, "<frame> is required")
        width = height = count = None
    else:
        width = col.number(fattrs, ("width",), "frame")
        height = col.number(fattrs, ("height",), "frame")
        count = col.number(fattrs, ("count",), "frame")

    dut = one("dut")
    dut_kind = _enum_value(col, DutKind, _attrs(dut).get("kind") if dut is not None else None,
                           DutKind.REFERENCE_WRAPPER, "dut kind")
    pth = one("path")
    pattrs = _attrs(pth) if pth is not None else {}
    path_kind = _enum_value(col, PathKind, pattrs.get("kind"), PathKind.HOST, "path kind")
    program = path(pattrs.get("program"))
    stim = one("stimulus")
    sattrs = _attrs(stim) if stim is not None else {}
    stimulus = _enum_value(col, StimulusKind, sattrs.get("kind"), StimulusKind.RANDOM, "stimulus kind")
    stim_file = path(sattrs.get("file"))
    params = one("params")
    params_path = path(_attrs(params).get("file")) if params is not None else None
    drain = text_number("drain", 1000)
    maxtime = text_number("maxtime", 10_000_000)
    rep = one("report")
    report = Path((rep.text or "").strip()) if rep is not None and (rep.text or "").strip() else Path("report.json")

    if seed is not None and not 0 <= seed < 1 << 64:
        col.add(BAD_VALUE, f"seed {seed} outside unsigned 64-bit range")
    for label, v in (("width", width), ("height", height)):
        if v is not None and v < 3:
            col.add(BAD_VALUE, f"frame {label} {v} < 3: convolution window does not fit")
    if count is not None and count < 1:
        col.add(BAD_VALUE, f"frame count {count} < 1")
    if path_kind is PathKind.CPU and program is None:
        col.add(MISSING_ATTR, "path kind CPU requires a program attribute")
    if path_kind is PathKind.HOST and program is not None:
        col.add(BAD_VALUE, "program given but path kind is HOST")
    if stimulus is StimulusKind.FILE and stim_file is None:
        col.add(MISSING_ATTR, "stimulus kind FILE requires a file attribute")
    if drain is not None and drain < 0:
        col.add(BAD_VALUE, f"drain {drain} < 0")
    if maxtime is not None and maxtime <= 0:
        col.add(BAD_VALUE, f"maxtime {maxtime} <= 0")

    if col.errors:
        raise TbConfigError(col.errors)
    return TbConfig(seed=seed, frame_width=width, frame_height=height, frame_count=count,
                    dut_kind=dut_kind, path_kind=path_kind, stimulus=stimulus, stimulus_file=stim_file,
                    program_path=program, params_path=params_path, drain_time=drain, max_time=maxtime,
                    report_path=report)


def load_register_map(path: Path | str) -> AddressMap:
    return parse_register_map(Path(path).read_text(encoding="utf-8"))


def load_tb_config(path: Path | str) -> TbConfig:
    p = Path(path)
    return parse_tb_config(p.read_text(encoding="utf-8"), base_dir=p.parent)
