from ispverif.tlm.component import (
    DEFAULT_DRAIN_TIME,
    AnalysisPort,
    Component,
    ComponentError,
    Environment,
    Phase,
    TestOutcome,
    Verdict,
    run_phases,
)
from ispverif.tlm.payload import (
    BusTransaction,
    Command,
    GenericPayload,
    InitiatorSocket,
    Status,
    TargetSocket,
    bind,
)
from ispverif.tlm.sequence import ListSequence, Sequence, SequenceHandle, SequenceItem, Sequencer

__all__ = [
    "DEFAULT_DRAIN_TIME", "AnalysisPort", "BusTransaction", "Command", "Component", "ComponentError",
    "Environment", "GenericPayload", "InitiatorSocket", "ListSequence", "Phase", "Sequence",
    "SequenceHandle", "SequenceItem", "Sequencer", "Status", "TargetSocket", "TestOutcome",
    "Verdict", "bind", "run_phases",
]
