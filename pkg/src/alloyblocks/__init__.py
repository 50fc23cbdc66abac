"""alloyblocks: a structure-editing engine for Alloy models.

Formulas are built by inserting blocks into typed holes; every block whose
insertion admits no well-typed completion is grayed out, so syntax and type
errors are unconstructible.
"""
from .editing import (
    Anchor, DeleteSubtree, EditSession, Extend, Insert, Redo, RenameVar,
    Replace, Splice, Undo, action_from_wire, action_to_wire, dump_edit_script,
    load_edit_script, replay,
)
from .errors import EngineError, ParseError
from .model import Model, RelType, declared_type, prims
from .oracle import completion_exists, enumerate_completions
from .parser import PrintOptions, parse_fragment, parse_model, print_model, print_node
from .typesys import (
    Grayed, HoleConstraint, PossibleType, Selectable, TypeContext, TypeProblem,
    check_block, hole_constraint, possible_type, typeof,
)

__all__ = [
    "Anchor", "DeleteSubtree", "EditSession", "EngineError", "Extend",
    "Grayed", "HoleConstraint", "Insert", "Model", "ParseError",
    "PossibleType", "PrintOptions", "Redo", "RelType", "RenameVar", "Replace",
    "Selectable", "Splice", "TypeContext", "TypeProblem", "Undo",
    "action_from_wire", "action_to_wire", "check_block", "completion_exists",
    "declared_type", "dump_edit_script", "enumerate_completions",
    "hole_constraint", "load_edit_script", "parse_fragment", "parse_model",
    "possible_type", "prims", "print_model", "print_node", "replay", "typeof",
]

__version__ = "0.1.0"
