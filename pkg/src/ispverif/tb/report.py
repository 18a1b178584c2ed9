"""Test report document."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

NONDETERMINISTIC = ("wall_ms",)


@dataclass
class Report:
    test: str
    seed: int
    outcome: str
    frames_compared: int
    mismatches: list[dict[str, Any]] = field(default_factory=list)
    component_errors: list[dict[str, Any]] = field(default_factory=list)
    sim_end_time: int = 0
    wall_ms: int = 0

    def as_dict(self) -> dict[str, Any]:
        return {
            "test": self.test,
            "seed": self.seed,
            "outcome": self.outcome,
            "frames_compared": self.frames_compared,
            "mismatches": self.mismatches,
            "component_errors": self.component_errors,
            "sim_end_time": self.sim_end_time,
            "wall_ms": self.wall_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"

    def deterministic_json(self, drop: tuple[str, ...] = NONDETERMINISTIC) -> str:
        d = {k: v for k, v in self.as_dict().items() if k not in drop}
        return json.dumps(d, indent=2) + "\n"

    def write(self, path: Path | str) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")


def strip_fields(text: str, drop: tuple[str, ...] = NONDETERMINISTIC) -> str:
    """Re-serialise a report document without the given fields."""
    d = json.loads(text)
    for k in drop:
        d.pop(k, None)
    return json.dumps(d, indent=2) + "\n"
