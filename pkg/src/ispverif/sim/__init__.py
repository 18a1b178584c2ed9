from ispverif.sim.kernel import (
    EventHandle,
    Kernel,
    Lock,
    Notification,
    Process,
    StopReason,
)

__all__ = ["EventHandle", "Kernel", "Lock", "Notification", "Process", "StopReason"]
