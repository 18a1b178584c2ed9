from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ispverif.ipxact import load_tb_config, parse_register_map  # noqa: E402

FIXTURES = Path(str(resources.files("ispverif.fixtures")))
TEST_FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def amap():
    return parse_register_map((FIXTURES / "isp_regs.xml").read_text(encoding="utf-8"))


@pytest.fixture
def default_config():
    return load_tb_config(FIXTURES / "tb_default.xml")
