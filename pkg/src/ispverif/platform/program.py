"""Line-oriented test programs for the processor model.

One command per line; ``#`` starts a comment. Operands are decimal, ``0x``
hex, or a symbol (optionally ``SYMBOL+offset``) from the supplied table::

    W CTRL 0x1F            # write
    R STATUS               # read
    E CTRL 0xFF 0x1F       # expect (read & mask) == value
    P STATUS 0x2 0x2 5000  # poll every cycle up to N cycles
    D 10                   # idle cycles
    END
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from ispverif.ipxact import parse_number

BAD_OPCODE = "BAD_OPCODE"
BAD_OPERAND = "BAD_OPERAND"
MISSING_END = "MISSING_END"
CODE_AFTER_END = "CODE_AFTER_END"

_ARITY = {"W": 2, "R": 1, "E": 3, "P": 4, "D": 1, "END": 0}
_ADDR_OPS = {"W", "R", "E", "P"}
U32 = 0xFFFF_FFFF


@dataclass(frozen=True)
class ProgramCommand:
    op: str
    args: tuple[int, ...]
    line: int

    @property
    def address(self) -> Optional[int]:
        return self.args[0] if self.op in _ADDR_OPS else None

    def __str__(self) -> str:
        return " ".join([self.op] + [f"0x{a:X}" for a in self.args])


@dataclass(frozen=True)
class TestProgram:
    __test__ = False

    commands: tuple[ProgramCommand, ...]

    def __len__(self) -> int:
        return len(self.commands)

    def writes(self) -> list[tuple[int, int]]:
        return [(c.args[0], c.args[1]) for c in self.commands if c.op == "W"]


@dataclass(frozen=True)
class ProgramIssue:
    code: str
    line: int
    detail: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.code}: {self.detail}"


class ProgramError(Exception):
    def __init__(self, issues: list[ProgramIssue]):
        self.issues = issues
        super().__init__("; ".join(str(i) for i in issues))

    @property
    def codes(self) -> list[str]:
        return [i.code for i in self.issues]


def _operand(token: str, symbols: Mapping[str, int]) -> int:
    base, plus, off = token.partition("+")
    if base in symbols:
        value = symbols[base] + (parse_number(off) if plus else 0)
    elif plus:
        raise ValueError(token)
    else:
        value = parse_number(token)
    if not 0 <= value <= U32:
        raise ValueError(token)
    return value


def parse_program(text: str, symbols: Optional[Mapping[str, int]] = None) -> TestProgram:
    symbols = symbols or {}
    commands: list[ProgramCommand] = []
    issues: list[ProgramIssue] = []
    end_line: Optional[int] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        op, *tokens = body.split()
        op = op.upper()
        if op not in _ARITY:
            issues.append(ProgramIssue(BAD_OPCODE, lineno, f"unknown opcode {op!r}"))
            continue
        if end_line is not None:
            issues.append(ProgramIssue(CODE_AFTER_END, lineno, f"{op} after END on line {end_line}"))
            continue
        if len(tokens) != _ARITY[op]:
            issues.append(ProgramIssue(BAD_OPERAND, lineno, f"{op} takes {_ARITY[op]} operands, got {len(tokens)}"))
            continue
        try:
            args = tuple(_operand(t, symbols) for t in tokens)
        except ValueError as exc:
            issues.append(ProgramIssue(BAD_OPERAND, lineno, f"bad operand {exc.args[0]!r}"))
            continue
        commands.append(ProgramCommand(op, args, lineno))
        if op == "END":
            end_line = lineno
    if end_line is None:
        issues.append(ProgramIssue(MISSING_END, 0, "program has no END"))
    if issues:
        raise ProgramError(issues)
    return TestProgram(tuple(commands))


def format_program(commands: list[tuple[str, ...]], header: str = "") -> str:
    """Render ``(op, operand, ...)`` tuples as program text."""
    lines = [f"# {h}" for h in header.splitlines()] if header else []
    lines += [" ".join(c) for c in commands]
    return "\n".join(lines) + "\n"
