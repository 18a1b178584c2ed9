"""Testbench assembly, scoreboard, stimulus files, reports and the test catalog."""

from ispverif.tb.catalog import CATALOG, RunResult, make_plan, run_catalog_test, stimulus_frames
from ispverif.tb.env import TestPlan, Testbench, build_env
from ispverif.tb.report import Report
from ispverif.tb.scoreboard import Mismatch, Scoreboard, scoreboard_compare
from ispverif.tb.stimulus import RawStimulus, read_raw_frames

__all__ = [
    "CATALOG", "Mismatch", "RawStimulus", "Report", "RunResult", "Scoreboard", "TestPlan", "Testbench",
    "build_env", "make_plan", "read_raw_frames", "run_catalog_test", "scoreboard_compare", "stimulus_frames",
]
