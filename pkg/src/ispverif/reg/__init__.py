from ispverif.reg.block import FieldMismatch, MirrorCheckReport, RegBlock
from ispverif.reg.model import (
    REG_BYTES,
    Access,
    AddressMap,
    FieldSpec,
    MemorySpec,
    RegisterSpec,
    field_update,
)

__all__ = [
    "REG_BYTES", "Access", "AddressMap", "FieldMismatch", "FieldSpec", "MemorySpec",
    "MirrorCheckReport", "RegBlock", "RegisterSpec", "field_update",
]
