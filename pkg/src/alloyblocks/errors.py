"""Exception types shared across the engine.

Everything user-facing derives from EngineError so the CLI and the protocol
layer can map failures onto exit codes / structured error responses without
special cases.
"""
from __future__ import annotations

from dataclasses import dataclass


class EngineError(Exception):
    """Base class for all errors raised by this package."""


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets plus line/column info for diagnostics. 1-based lines/cols."""

    start: int
    end: int
    line: int
    col: int
    end_line: int = 0
    end_col: int = 0

    def __post_init__(self):
        if self.end < self.start:
            raise ValueError("span end before start")

    def contains(self, other: "SourceSpan") -> bool:
        return self.start <= other.start and other.end <= self.end

    def describe(self) -> str:
        return f"line {self.line}, col {self.col}"


class ParseError(EngineError):
    """Syntax error. Carries at most 8 expected-token *classes*, not raw tokens."""

    MAX_EXPECTED = 8

    def __init__(self, message: str, span: SourceSpan, expected: tuple[str, ...] = ()):
        self.span = span
        self.expected = tuple(expected)[: self.MAX_EXPECTED]
        suffix = f" (expected: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{span.describe()}: {message}{suffix}")
        self.bare_message = message


class UnknownRef(EngineError):
    """An identifier that resolves to nothing in scope."""

    def __init__(self, name: str, span: SourceSpan | None = None):
        self.name = name
        self.span = span
        where = f" at {span.describe()}" if span else ""
        super().__init__(f"unknown reference '{name}'{where}")


class UnknownSig(UnknownRef):
    pass


class UnknownField(UnknownRef):
    pass


class HolesPresent(EngineError):
    def __init__(self, hole_ids: tuple[int, ...]):
        self.hole_ids = hole_ids
        super().__init__(f"model still contains holes (node ids {list(hole_ids)})")


class KindMismatch(EngineError):
    """A fragment or spliced child has the wrong grammatical kind for its slot."""


class Untypable(EngineError):
    """No completion of a partial tree can type-check."""

    def __init__(self, node_id: int):
        self.node_id = node_id
        super().__init__(f"no completion of node {node_id} can type-check")


class UnknownHole(EngineError):
    def __init__(self, hole_id):
        self.hole_id = hole_id
        super().__init__(f"no hole with id {hole_id}")


class UnknownNode(EngineError):
    def __init__(self, node_id):
        self.node_id = node_id
        super().__init__(f"no node with id {node_id}")


class UnknownBlock(EngineError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"no palette block named '{key}'")


class UnknownTarget(EngineError):
    def __init__(self, target):
        self.target = target
        super().__init__(f"no such edit target: {target!r}")


class BlockNotSelectable(EngineError):
    """Engine-side re-validation of a grayed block. Defense in depth for scripts."""

    def __init__(self, block_key: str, reason_class: str, human_reason: str):
        self.block_key = block_key
        self.reason_class = reason_class
        self.human_reason = human_reason
        super().__init__(f"block '{block_key}' not selectable here: {reason_class} ({human_reason})")


class AnchorKindMismatch(EngineError):
    def __init__(self, message: str):
        super().__init__(message)


class CannotDeleteBinder(EngineError):
    def __init__(self):
        super().__init__("quantifier variable slots cannot be deleted; rename or delete the quantifier")


class NameClash(EngineError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"name '{name}' clashes with a declaration or binder in scope")


class InvalidIdentifier(EngineError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"'{name}' is not a valid identifier")


class BudgetExceeded(EngineError):
    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"enumeration exceeded the node budget of {budget}")


class NothingToUndo(EngineError):
    def __init__(self):
        super().__init__("nothing to undo")


class NothingToRedo(EngineError):
    def __init__(self):
        super().__init__("nothing to redo")
