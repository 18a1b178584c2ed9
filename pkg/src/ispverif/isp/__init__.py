from ispverif.isp.dut import IspDut, ReferenceWrapper, StagedPipeline
from ispverif.isp.faults import FaultSpec, Stage, parse_faults, shipped_faults
from ispverif.isp.pipeline import (
    IDENTITY_KERNEL,
    IDENTITY_LUT,
    UNITY_GAIN,
    IspConfig,
    ref_process_frame,
    stage_black_level,
    stage_conv,
    stage_gain,
    stage_gamma,
)

__all__ = [
    "IDENTITY_KERNEL", "IDENTITY_LUT", "UNITY_GAIN", "FaultSpec", "IspConfig", "IspDut",
    "ReferenceWrapper", "Stage", "StagedPipeline", "parse_faults", "ref_process_frame",
    "shipped_faults", "stage_black_level", "stage_conv", "stage_gain", "stage_gamma",
]
