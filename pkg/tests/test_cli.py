import json
import subprocess
import sys

import pytest

from conftest import FIXTURES, TEST_FIXTURES
from ispverif.cli import main

DEFAULT = FIXTURES / "tb_default.xml"


def test_list_tests(capsys):
    assert main(["list-tests"]) == 0
    names = [line.split()[0] for line in capsys.readouterr().out.splitlines()]
    assert names == ["identity_host", "full_cfg_host", "full_cfg_cpu", "random_regression", "fault_detect", "swap_dut"]


def test_run_identity_passes(tmp_path):
    report = tmp_path / "r.json"
    assert main(["run", "--config", str(DEFAULT), "--test", "identity_host", "--report", str(report)]) == 0
    doc = json.loads(report.read_text())
    assert doc["test"] == "identity_host" and doc["outcome"] == "PASS" and doc["seed"] == 1


def test_run_fault_detect_exits_one_and_names_mismatch(tmp_path, capsys):
    report = tmp_path / "r.json"
    assert main(["run", "--config", str(DEFAULT), "--test", "fault_detect", "--report", str(report)]) == 1
    doc = json.loads(report.read_text())
    assert doc["outcome"] == "FAIL" and doc["mismatches"]
    first = doc["mismatches"][0]
    assert f"at ({first['x']},{first['y']})" in capsys.readouterr().out


def test_seed_override_and_trace(tmp_path):
    report = tmp_path / "r.json"
    assert main(["run", "--config", str(DEFAULT), "--test", "full_cfg_host", "--seed", "0x10",
                 "--trace", "--report", str(report)]) == 0
    assert json.loads(report.read_text())["seed"] == 16
    trace = (tmp_path / "r.trace").read_text().splitlines()
    assert trace[0].startswith("0 0 ")


def test_swap_writes_sub_reports(tmp_path):
    report = tmp_path / "swap.json"
    assert main(["run", "--config", str(DEFAULT), "--test", "swap_dut", "--report", str(report)]) == 0
    assert (tmp_path / "swap.reference_wrapper.json").exists()
    assert (tmp_path / "swap.staged_pipeline.json").exists()


def test_cpu_config_runs_as_written(tmp_path):
    assert main(["run", "--config", str(FIXTURES / "tb_cpu.xml"), "--report", str(tmp_path / "c.json")]) == 0


@pytest.mark.parametrize("args", [
    ["run", "--config", "/nonexistent/tb.xml"],
    ["run", "--config", str(DEFAULT), "--test", "nope"],
    ["run", "--config", str(DEFAULT), "--fault", "nope"],
    ["run"],
    ["frobnicate"],
])
def test_usage_and_config_errors_exit_two(args, capsys):
    try:
        code = main(args)
    except SystemExit as exc:
        code = exc.code
    assert code == 2
    assert capsys.readouterr().err


def test_bad_config_document_exits_two(tmp_path, capsys):
    cfg = tmp_path / "tb.xml"
    cfg.write_text("<testbench><seed>1</seed><frame width='2' height='8' count='1'/></testbench>")
    assert main(["run", "--config", str(cfg)]) == 2
    assert "BAD_VALUE" in capsys.readouterr().err


def test_bad_program_exits_two(tmp_path, capsys):
    (tmp_path / "p.tp").write_text("W CTRL 1\n")
    cfg = tmp_path / "tb.xml"
    cfg.write_text("<testbench><seed>1</seed><frame width='8' height='8' count='1'/>"
                   "<path kind='CPU' program='p.tp'/></testbench>")
    assert main(["run", "--config", str(cfg), "--report", str(tmp_path / "r.json")]) == 2
    assert "MISSING_END" in capsys.readouterr().err


def test_validate(capsys):
    assert main(["validate", "--regmap", str(FIXTURES / "isp_regs.xml")]) == 0
    assert main(["validate", "--regmap", str(TEST_FIXTURES / "neg_overlap.xml")]) == 1
    assert "OVERLAP" in capsys.readouterr().err
    assert main(["validate", "--regmap", "/nonexistent.xml"]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ispverif", "run", "--config", str(DEFAULT),
                           "--test", "identity_host", "--report", str(tmp_path / "r.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
