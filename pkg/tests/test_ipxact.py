from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES, TEST_FIXTURES
from ispverif.ipxact import (
    DutKind,
    PathKind,
    RegisterMapError,
    StimulusKind,
    TbConfigError,
    load_register_map,
    parse_number,
    parse_register_map,
    parse_tb_config,
    serialize_register_map,
    validate_map,
)
from ispverif.reg import Access, AddressMap, FieldSpec, MemorySpec, RegisterSpec

NEGATIVE = {
    "neg_overlap.xml": "OVERLAP",
    "neg_field_overflow.xml": "FIELD_OVERFLOW",
    "neg_misaligned.xml": "BAD_ALIGN",
    "neg_dup_name.xml": "DUP_NAME",
    "neg_malformed.xml": "MALFORMED",
    "neg_missing_attr.xml": "MISSING_ATTR",
}


def test_parse_number():
    assert parse_number("0x1F") == 31
    assert parse_number(" 42 ") == 42
    with pytest.raises(ValueError):
        parse_number("abc")


def test_shipped_map_is_valid_and_complete(amap):
    assert len(amap.registers) == 15
    assert [m.name for m in amap.memories] == ["GAMMA_LUT"]
    assert validate_map(amap) == []


def test_shipped_map_layout_is_bit_exact(amap):
    ctrl = amap.register("CTRL")
    assert [(f.name, f.lsb, f.width, f.access) for f in ctrl.fields] == [
        ("bl_en", 0, 1, Access.RW), ("gain_en", 1, 1, Access.RW), ("gamma_en", 2, 1, Access.RW),
        ("conv_en", 3, 1, Access.RW), ("pipe_en", 4, 1, Access.RW)]
    size = amap.register("FRAME_SIZE")
    assert size.offset == 0x4 and size.field("width").mask == 0xFFFF and size.field("height").mask == 0xFFFF_0000
    assert amap.register("BLACK_LEVEL").offset == 0x8
    gain = amap.register("GAIN")
    assert gain.offset == 0xC and gain.reset == 0x100 and gain.field("gain").width == 16
    assert amap.register("CONV_SHIFT").field("shift").width == 3
    for i in range(9):
        k = amap.register(f"KERNEL{i}")
        assert k.offset == 0x14 + 4 * i and k.reset == (1 if i == 4 else 0)
    status = amap.register("STATUS")
    assert status.offset == 0x40
    assert {f.name: (f.lsb, f.width, f.access) for f in status.fields} == {
        "busy": (0, 1, Access.RO), "frame_done": (1, 1, Access.W1C), "dropped": (8, 8, Access.RO)}
    lut = amap.memory("GAMMA_LUT")
    assert (lut.offset, lut.words) == (0x400, 256)


@pytest.mark.parametrize("name, code", sorted(NEGATIVE.items()))
def test_negative_fixture_yields_exactly_its_code(name, code):
    with pytest.raises(RegisterMapError) as exc:
        load_register_map(TEST_FIXTURES / name)
    assert exc.value.codes == [code]


def test_errors_are_collected_not_first_only():
    text = """<memoryMap baseAddress="0">
      <addressBlock name="b" offset="0">
        <register name="A" addressOffset="0x2"><field name="f" bitOffset="30" bitWidth="4" access="RW"/></register>
      </addressBlock></memoryMap>"""
    with pytest.raises(RegisterMapError) as exc:
        parse_register_map(text)
    assert sorted(exc.value.codes) == ["BAD_ALIGN", "FIELD_OVERFLOW"]


def test_round_trip_shipped(amap):
    assert parse_register_map(serialize_register_map(amap)) == amap


@st.composite
def address_maps(draw):
    count = draw(st.integers(1, 6))
    regs = []
    for i in range(count):
        fields = []
        lsb = 0
        for j in range(draw(st.integers(1, 4))):
            width = draw(st.integers(1, 8))
            if lsb + width > 32:
                break
            access = draw(st.sampled_from(list(Access)))
            reset = draw(st.integers(0, (1 << width) - 1))
            fields.append(FieldSpec(f"f{j}", lsb, width, access, reset))
            lsb += width + draw(st.integers(0, 3))
        regs.append(RegisterSpec(f"R{i}", 4 * i, tuple(fields)))
    mems = []
    if draw(st.booleans()):
        mems.append(MemorySpec("M", 0x100, 4 * draw(st.integers(1, 16))))
    return AddressMap(base=4 * draw(st.integers(0, 1000)), registers=regs, memories=mems, name="m")


@settings(max_examples=60, deadline=None)
@given(address_maps())
def test_serialize_parse_round_trip(amap):
    assert validate_map(amap) == []
    assert parse_register_map(serialize_register_map(amap)) == amap


# -- testbench config -------------------------------------------------------

def test_shipped_default_config():
    cfg = parse_tb_config((FIXTURES / "tb_default.xml").read_text(), FIXTURES)
    assert (cfg.seed, cfg.frame_width, cfg.frame_height, cfg.frame_count) == (1, 16, 16, 2)
    assert cfg.dut_kind is DutKind.REFERENCE_WRAPPER and cfg.path_kind is PathKind.HOST
    assert cfg.stimulus is StimulusKind.RANDOM
    assert cfg.params_path == FIXTURES / "full_cfg_params.xml"


def _tb(body: str) -> str:
    return f"<testbench><seed>3</seed>{body}</testbench>"


@pytest.mark.parametrize("body, code", [
    ('<frame width="2" height="8" count="1"/>', "BAD_VALUE"),
    ('<frame width="8" height="8" count="1"/><path kind="CPU"/>', "MISSING_ATTR"),
    ('<frame width="8" height="8" count="1"/><path kind="HOST" program="x.tp"/>', "BAD_VALUE"),
    ('<frame width="8" height="8"/>', "MISSING_ATTR"),
    ('<frame width="8" height="8" count="1"/><dut kind="RTL"/>', "BAD_VALUE"),
])
def test_tb_config_errors(body, code):
    with pytest.raises(TbConfigError) as exc:
        parse_tb_config(_tb(body))
    assert code in exc.value.codes


def test_tb_config_malformed():
    with pytest.raises(TbConfigError) as exc:
        parse_tb_config("<testbench><seed>1</seed>")
    assert exc.value.codes == ["MALFORMED"]


def test_relative_paths_resolve_against_config_dir():
    cfg = parse_tb_config(_tb('<frame width="8" height="8" count="1"/><path kind="CPU" program="p.tp"/>'),
                          Path("/some/dir"))
    assert cfg.program_path == Path("/some/dir/p.tp")
