from ispverif.uvc.control import BusAccess, ControlBusBfm
from ispverif.uvc.prng import SplitMix64
from ispverif.uvc.stream import (
    Frame,
    FrameSequence,
    GapPolicy,
    RandomFrameSequence,
    StreamAgent,
    StreamBeat,
    StreamDriver,
    StreamMonitor,
    frame_beats,
    random_frame,
)

__all__ = [
    "BusAccess", "ControlBusBfm", "Frame", "FrameSequence", "GapPolicy", "RandomFrameSequence",
    "SplitMix64", "StreamAgent", "StreamBeat", "StreamDriver", "StreamMonitor", "frame_beats",
    "random_frame",
]
