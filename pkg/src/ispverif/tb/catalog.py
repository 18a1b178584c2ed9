"""The regression catalog: named tests built from a testbench config."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from ispverif.errors import ConfigError
from ispverif.ipxact import DutKind, PathKind, StimulusKind, TbConfig
from ispverif.isp.faults import FaultSpec, shipped_faults
from ispverif.isp.pipeline import IspConfig
from ispverif.reg.model import AddressMap
from ispverif.tb.env import TestPlan, Testbench, build_env
from ispverif.tb.params import load_isp_params, random_isp_config, shipped_params
from ispverif.tb.programs import config_program, load_program
from ispverif.tb.report import Report
from ispverif.tb.stimulus import read_raw_frames
from ispverif.tlm.component import TestOutcome, Verdict
from ispverif.uvc.prng import SplitMix64
from ispverif.uvc.stream import Frame, random_frame

CATALOG = ("identity_host", "full_cfg_host", "full_cfg_cpu", "random_regression", "fault_detect", "swap_dut")
DESCRIPTIONS = {
    "identity_host": "host path, pipeline on with every stage bypassed",
    "full_cfg_host": "host path, all stages configured from the parameter file",
    "full_cfg_cpu": "CPU path, same configuration as full_cfg_host via a test program and VRI",
    "random_regression": "host path, a fresh random configuration before every frame",
    "fault_detect": "staged pipeline with an injected fault; expected to FAIL",
    "swap_dut": "full_cfg_host on both DUT kinds; reports must agree",
}
DEFAULT_FAULT = "gain_lsb_all"
CUSTOM = "custom"
# Separates the configuration stream from the frame stream for one seed.
_CONFIG_STREAM = 0xC0F1_6000_0000_0000


@dataclass
class RunResult:
    """A finished run: its report plus the testbench(es) for inspection."""

    report: Report
    benches: list[Testbench] = field(default_factory=list)
    outcomes: list[TestOutcome] = field(default_factory=list)
    trace: list[str] = field(default_factory=list)
    sub_reports: dict[str, Report] = field(default_factory=dict)

    @property
    def bench(self) -> Testbench:
        return self.benches[-1]


def stimulus_frames(config: TbConfig) -> list[Frame]:
    w, h = config.frame_width, config.frame_height
    if config.stimulus is StimulusKind.FILE:
        raw = read_raw_frames(config.stimulus_file, w, h)
        if len(raw) < config.frame_count:
            raise ConfigError("SHORT_STIMULUS", f"{config.stimulus_file} holds {len(raw)} frames, "
                                                f"config asks for {config.frame_count}")
        return list(raw.frames[:config.frame_count])
    rng = SplitMix64(config.seed)
    return [random_frame(rng, w, h) for _ in range(config.frame_count)]


def full_config(config: TbConfig) -> IspConfig:
    w, h = config.frame_width, config.frame_height
    if config.params_path is not None:
        return load_isp_params(config.params_path, w, h)
    return shipped_params(w, h)


def _program(config: TbConfig, amap: AddressMap, cfg: IspConfig):
    if config.program_path is not None:
        text = Path(config.program_path).read_text(encoding="utf-8")
    else:
        text = config_program(cfg, config.frame_count)
    return load_program(text, amap)


def make_plan(test: str, config: TbConfig, amap: AddressMap,
              fault: Optional[FaultSpec] = None) -> tuple[TbConfig, TestPlan]:
    """The effective config and plan for ``test``; ``custom`` honours the config as written."""
    w, h = config.frame_width, config.frame_height
    frames = stimulus_frames(config)
    if test == "identity_host":
        cfg = config.with_(path_kind=PathKind.HOST, program_path=None)
        return cfg, TestPlan(test, frames, [IspConfig.identity(w, h)])
    if test in ("full_cfg_host", "swap_dut"):
        cfg = config.with_(path_kind=PathKind.HOST, program_path=None)
        return cfg, TestPlan(test, frames, [full_config(config)])
    if test == "full_cfg_cpu":
        cfg = config.with_(path_kind=PathKind.CPU)
        return cfg, TestPlan(test, frames, program=_program(config, amap, full_config(config)))
    if test == "random_regression":
        rng = SplitMix64(config.seed ^ _CONFIG_STREAM)
        configs = [random_isp_config(rng, w, h) for _ in frames]
        cfg = config.with_(path_kind=PathKind.HOST, program_path=None)
        return cfg, TestPlan(test, frames, configs)
    if test == "fault_detect":
        cfg = config.with_(path_kind=PathKind.HOST, program_path=None, dut_kind=DutKind.STAGED_PIPELINE)
        return cfg, TestPlan(test, frames, [full_config(config)],
                             fault=fault or shipped_faults()[DEFAULT_FAULT])
    if test == CUSTOM:
        if config.path_kind is PathKind.CPU:
            if config.program_path is None:
                raise ConfigError("NO_PROGRAM", "CPU path needs a test program")
            return config, TestPlan(test, frames, program=_program(config, amap, full_config(config)),
                                    fault=fault)
        host = full_config(config) if config.params_path is not None else IspConfig.identity(w, h)
        return config, TestPlan(test, frames, [host], fault=fault)
    raise ConfigError("UNKNOWN_TEST", f"{test!r} is not in the catalog {list(CATALOG)}")


def _report(test: str, config: TbConfig, bench: Testbench, outcome: TestOutcome, wall_ms: int) -> Report:
    errors = [{"component": e.component, "code": e.code, "message": e.message} for e in outcome.errors]
    if outcome.fatal is not None:
        errors.append({"component": "tb", "code": outcome.fatal.code, "message": outcome.fatal.message})
    verdict = outcome.verdict
    if verdict is Verdict.PASS and bench.scoreboard.mismatches:
        verdict = Verdict.FAIL
    return Report(
        test=test,
        seed=config.seed,
        outcome=verdict.value,
        frames_compared=bench.scoreboard.frames_compared,
        mismatches=[m.as_dict() for m in bench.scoreboard.mismatches],
        component_errors=errors,
        sim_end_time=outcome.end_time,
        wall_ms=wall_ms,
    )


def _run_once(test: str, config: TbConfig, amap: AddressMap, plan: TestPlan,
              trace: Optional[Callable[[str], object]]) -> tuple[Report, Testbench, TestOutcome]:
    start = time.perf_counter()
    bench = build_env(config, amap, plan, trace)
    outcome = bench.run()
    wall_ms = round((time.perf_counter() - start) * 1000)
    return _report(test, config, bench, outcome, wall_ms), bench, outcome


def run_catalog_test(test: str, config: TbConfig, amap: AddressMap, trace: bool = False,
                     fault: Optional[FaultSpec] = None) -> RunResult:
    """Build and run one catalog test. Configuration problems raise before RUN."""
    lines: list[str] = []
    sink = lines.append if trace else None
    if test == "swap_dut":
        return _run_swap(config, amap, sink, lines, fault)
    cfg, plan = make_plan(test, config, amap, fault)
    report, bench, outcome = _run_once(test, cfg, amap, plan, sink)
    return RunResult(report, [bench], [outcome], lines)


def _run_swap(config: TbConfig, amap: AddressMap, sink, lines: list[str],
              fault: Optional[FaultSpec]) -> RunResult:
    cfg, plan = make_plan("swap_dut", config, amap)
    if fault is not None:
        raise ConfigError("FAULT_NOT_SUPPORTED", "swap_dut runs the reference wrapper, which takes no fault")
    result = RunResult(Report("swap_dut", config.seed, "PASS", 0), trace=lines)
    start = time.perf_counter()
    for kind in (DutKind.REFERENCE_WRAPPER, DutKind.STAGED_PIPELINE):
        if sink is not None:
            sink(f"# dut {kind.value}")
        report, bench, outcome = _run_once("swap_dut", cfg.with_(dut_kind=kind), amap, plan, sink)
        result.sub_reports[kind.value] = report
        result.benches.append(bench)
        result.outcomes.append(outcome)
    ref, staged = result.sub_reports.values()
    drop = ("wall_ms", "sim_end_time")
    report = result.report
    report.frames_compared = staged.frames_compared
    report.mismatches = staged.mismatches
    report.component_errors = list(staged.component_errors)
    report.sim_end_time = staged.sim_end_time
    if ref.deterministic_json(drop) != staged.deterministic_json(drop):
        report.component_errors.append({
            "component": "swap_dut", "code": "SWAP_DIFF",
            "message": f"reference wrapper {ref.outcome}, staged pipeline {staged.outcome}: reports differ",
        })
    outcomes = (ref.outcome, staged.outcome)
    if "TIMEOUT" in outcomes:
        report.outcome = "TIMEOUT"
    elif "FAIL" in outcomes or report.component_errors:
        report.outcome = "FAIL"
    report.wall_ms = round((time.perf_counter() - start) * 1000)
    return result

