"""The structure-editing engine: insert into holes, extend at anchors, delete,
splice, replace, rename, undo/redo, palette enumeration, and edit-script
replay.

An EditSession is single-writer: actions apply serially, each producing a new
immutable snapshot; read-only queries run against the current snapshot. Node
ids are never reused, even across undo, so scripts and the UI can keep stable
references.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace as dc_replace
from typing import Iterable

from . import blocks as B
from . import model as M
from . import parser as P
from . import typesys as T
from .errors import (
    AnchorKindMismatch, BlockNotSelectable, CannotDeleteBinder, EngineError,
    InvalidIdentifier, KindMismatch, NameClash, NothingToRedo, NothingToUndo,
    UnknownHole, UnknownNode, UnknownTarget,
)
from .model import (
    EXPR, FORMULA, INT, Hole, Model, Node, Quant, SetLeaf,
)

# ---------------------------------------------------------------------------
# Targets and actions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Anchor:
    """An extension point on an existing node: the circle/square icons."""

    node_id: int
    side: str  # left | right


Target = int | Anchor  # a hole id, or an anchor


@dataclass(frozen=True)
class Insert:
    hole: int
    block: str


@dataclass(frozen=True)
class Extend:
    node: int
    side: str
    block: str


@dataclass(frozen=True)
class DeleteSubtree:
    node: int


@dataclass(frozen=True)
class Splice:
    node: int
    keep: int


@dataclass(frozen=True)
class Replace:
    node: int
    block: str


@dataclass(frozen=True)
class RenameVar:
    node: int
    name: str


@dataclass(frozen=True)
class Undo:
    pass


@dataclass(frozen=True)
class Redo:
    pass


EditAction = Insert | Extend | DeleteSubtree | Splice | Replace | RenameVar | Undo | Redo


def action_to_wire(action: EditAction) -> dict:
    match action:
        case Insert(hole=h, block=b):
            return {"action": "insert", "hole": h, "block": b}
        case Extend(node=n, side=s, block=b):
            return {"action": "extend", "node": n, "side": s, "block": b}
        case DeleteSubtree(node=n):
            return {"action": "delete", "node": n}
        case Splice(node=n, keep=k):
            return {"action": "splice", "node": n, "keep": k}
        case Replace(node=n, block=b):
            return {"action": "replace", "node": n, "block": b}
        case RenameVar(node=n, name=name):
            return {"action": "rename", "node": n, "name": name}
        case Undo():
            return {"action": "undo"}
        case Redo():
            return {"action": "redo"}
    raise TypeError(f"not an action: {action!r}")


def action_from_wire(obj: dict) -> EditAction:
    if not isinstance(obj, dict):
        raise EngineError(f"action record must be an object, got {type(obj).__name__}")
    kind = obj.get("action")
    try:
        if kind == "insert":
            return Insert(int(obj["hole"]), str(obj["block"]))
        if kind == "extend":
            side = str(obj["side"])
            if side not in ("left", "right"):
                raise EngineError(f"bad anchor side {side!r}")
            return Extend(int(obj["node"]), side, str(obj["block"]))
        if kind == "delete":
            return DeleteSubtree(int(obj["node"]))
        if kind == "splice":
            return Splice(int(obj["node"]), int(obj["keep"]))
        if kind == "replace":
            return Replace(int(obj["node"]), str(obj["block"]))
        if kind == "rename":
            return RenameVar(int(obj["node"]), str(obj["name"]))
        if kind == "undo":
            return Undo()
        if kind == "redo":
            return Redo()
    except (KeyError, ValueError, TypeError) as exc:
        raise EngineError(f"malformed {kind} action: {exc}") from exc
    raise EngineError(f"unknown action kind {kind!r}")


@dataclass(frozen=True)
class PaletteEntry:
    block: B.Block
    verdict: T.Verdict

    @property
    def status(self) -> str:
        return "Selectable" if self.verdict.ok else "Grayed"

    @property
    def reason_class(self) -> str:
        return "" if self.verdict.ok else self.verdict.reason_class

    @property
    def reason(self) -> str:
        return "" if self.verdict.ok else self.verdict.human_reason


@dataclass(frozen=True)
class ActionOutcome:
    action: EditAction
    ok: bool
    error_kind: str = ""
    reason_class: str = ""
    message: str = ""
    children_preserved: bool | None = None


# ---------------------------------------------------------------------------
# Variable naming
# ---------------------------------------------------------------------------

_VAR_CYCLE = ("x", "y", "z")


def auto_var_name(taken: Iterable[str]) -> str:
    taken = set(taken)
    i = 0
    while True:
        for base in _VAR_CYCLE:
            name = base if i == 0 else f"{base}{i}"
            if name not in taken:
                return name
        i += 1


_IDENT_OK = P.IDENT_RE


# ---------------------------------------------------------------------------
# The session
# ---------------------------------------------------------------------------

class EditSession:
    def __init__(self, model: Model):
        self.model = model
        self.ctx = T.TypeContext(model)  # sig declarations never change mid-session
        self._next_id = model.next_node_id
        self._undo: list[tuple[EditAction, Model]] = []
        self._redo: list[tuple[EditAction, Model]] = []

    # -- id allocation ------------------------------------------------------

    def _fresh(self) -> int:
        nid = self._next_id
        self._next_id += 1
        return nid

    # -- lookup ---------------------------------------------------------------

    def _locate(self, nid: int) -> tuple[M.PredDecl, Node]:
        pred = self.model.pred_of_node(nid)
        return pred, M.find_node(pred.body, nid)

    def _locate_hole(self, hole_id) -> tuple[M.PredDecl, Hole]:
        try:
            pred, node = self._locate(int(hole_id))
        except (UnknownNode, ValueError, TypeError):
            raise UnknownHole(hole_id) from None
        if not isinstance(node, Hole):
            raise UnknownHole(hole_id)
        return pred, node

    def _locate_anchor(self, anchor: Anchor) -> tuple[M.PredDecl, Node]:
        if anchor.side not in ("left", "right"):
            raise UnknownTarget(anchor)
        try:
            pred, node = self._locate(anchor.node_id)
        except UnknownNode:
            raise UnknownTarget(anchor) from None
        if isinstance(node, Hole):
            raise UnknownTarget(anchor)  # anchors never attach to holes
        if M.produced_class(node) == INT:
            raise UnknownTarget(anchor)  # int nodes expose no anchors
        return pred, node

    def _scope_names(self, body: Node, nid: int) -> tuple[str, ...]:
        return tuple(v for v, _ in M.scope_at(self.model, body, nid))

    # -- palette --------------------------------------------------------------

    def enumerate_blocks(self, target: Target) -> list[PaletteEntry]:
        """Every palette entry for the target, tagged Selectable or Grayed."""
        if isinstance(target, Anchor):
            pred, node = self._locate_anchor(target)
            anchored, side, target_id = node, target.side, target.node_id
        else:
            pred, node = self._locate_hole(target)
            anchored, side, target_id = None, None, node.nid

        body = pred.body
        scope_vars = self._scope_names(body, target_id)
        scope = T.scope_bounds_at(self.ctx, body, target_id)
        constraint = T.derive_constraint(self.ctx, body, target_id)
        entries = []
        for block in B.palette(self.model, scope_vars):
            verdict = T.check_block_at(self.ctx, body, target_id, block.key,
                                       anchored=anchored, side=side,
                                       constraint=constraint, scope=scope)
            entries.append(PaletteEntry(block, verdict))
        return entries

    def check(self, target: Target, block_key: str) -> T.Verdict:
        if isinstance(target, Anchor):
            pred, node = self._locate_anchor(target)
            B.palette_block(self.model, block_key,
                            self._scope_names(pred.body, node.nid))
            return T.check_block_at(self.ctx, pred.body, node.nid, block_key,
                                    anchored=node, side=target.side)
        pred, hole = self._locate_hole(target)
        B.palette_block(self.model, block_key,
                        self._scope_names(pred.body, hole.nid))
        return T.check_block_at(self.ctx, pred.body, hole.nid, block_key)

    # -- actions ---------------------------------------------------------------

    def _commit(self, action: EditAction, pred_name: str, new_body: Node) -> Model:
        prior = self.model
        self._undo.append((action, prior))
        self._redo.clear()
        self.model = prior.with_body(pred_name, new_body, next_node_id=self._next_id)
        return self.model

    def insert(self, hole_id: int, block_key: str) -> Model:
        pred, hole = self._locate_hole(hole_id)
        verdict = self.check(hole_id, block_key)
        if not verdict.ok:
            raise BlockNotSelectable(block_key, verdict.reason_class, verdict.human_reason)
        var = auto_var_name(self._taken_names(pred.body, hole.nid))
        template = B.make_template(block_key, self._fresh, var_name=var)
        new_body = M.replace_node(pred.body, hole.nid, template)
        return self._commit(Insert(hole_id, block_key), pred.name, new_body)

    def extend(self, anchor: Anchor, block_key: str) -> Model:
        pred, node = self._locate_anchor(anchor)
        counter = iter(range(-1, -64, -1))
        structural = B.make_template(block_key, lambda: next(counter),
                                     anchored=node, side=anchor.side)
        if structural is None:
            raise AnchorKindMismatch(
                f"block '{block_key}' cannot wrap a node from its {anchor.side} anchor")
        verdict = self.check(anchor, block_key)
        if not verdict.ok:
            raise BlockNotSelectable(block_key, verdict.reason_class, verdict.human_reason)
        var = auto_var_name(self._taken_names(pred.body, node.nid))
        template = B.make_template(block_key, self._fresh, anchored=node,
                                   side=anchor.side, var_name=var)
        new_body = M.replace_node(pred.body, node.nid, template)
        return self._commit(Extend(anchor.node_id, anchor.side, block_key),
                            pred.name, new_body)

    def _slot_class_of(self, body: Node, nid: int) -> str:
        spot = M.parent_of(body, nid)
        if spot is None:
            return FORMULA
        parent, index = spot
        return M.slot_classes(parent)[index]

    def delete_subtree(self, node_id: int) -> Model:
        pred, node = self._locate(node_id)
        hole = Hole(self._fresh(), self._slot_class_of(pred.body, node_id))
        new_body = M.replace_node(pred.body, node_id, hole)
        return self._commit(DeleteSubtree(node_id), pred.name, new_body)

    def splice(self, node_id: int, keep: int) -> Model:
        pred, node = self._locate(node_id)
        kids = M.children(node)
        if not kids:
            raise KindMismatch("splice target is not an operator application")
        if not (0 <= keep < len(kids)):
            raise KindMismatch(f"splice target has no child {keep}")
        kept = kids[keep]
        slot = self._slot_class_of(pred.body, node_id)
        got = M.produced_class(kept)
        if got != slot:
            raise KindMismatch(
                f"kept child is {got}-kinded but the surrounding slot needs {slot}")
        new_body = M.replace_node(pred.body, node_id, kept)
        if not self.ctx.possible(new_body).formula:
            raise KindMismatch("kept child cannot occupy the surrounding slot")
        return self._commit(Splice(node_id, keep), pred.name, new_body)

    def replace(self, node_id: int, block_key: str) -> tuple[Model, bool]:
        """Delete-then-insert as one undoable action; operator swaps that keep
        every operand compatible preserve the children."""
        pred, node = self._locate(node_id)
        body = pred.body
        scope_vars = self._scope_names(body, node_id)
        B.palette_block(self.model, block_key, scope_vars)
        preserved = self._swap_preserving(node, block_key)
        if preserved is not None:
            new_body = M.replace_node(body, node_id, preserved)
            if self.ctx.possible(new_body).formula:
                model = self._commit(Replace(node_id, block_key), pred.name, new_body)
                return model, True
        verdict = T.check_block_at(self.ctx, body, node_id, block_key)
        if not verdict.ok:
            raise BlockNotSelectable(block_key, verdict.reason_class, verdict.human_reason)
        var = auto_var_name(self._taken_names(body, node_id))
        template = B.make_template(block_key, self._fresh, var_name=var)
        new_body = M.replace_node(body, node_id, template)
        model = self._commit(Replace(node_id, block_key), pred.name, new_body)
        return model, False

    def _swap_preserving(self, node: Node, block_key: str) -> Node | None:
        kids = M.children(node)
        if not kids:
            return None
        counter = iter(range(-1, -64, -1))
        template = B.make_template(block_key, lambda: next(counter))
        if template is None or len(M.children(template)) != len(kids):
            return None
        if M.slot_classes(template) != tuple(M.produced_class(k) for k in kids):
            return None
        swapped = dc_replace(template, nid=self._fresh())
        if isinstance(swapped, Quant) and isinstance(node, Quant):
            swapped = dc_replace(swapped, var=node.var)
        return M.with_children(swapped, kids)

    def rename_var(self, quant_id: int, new_name: str) -> Model:
        pred, node = self._locate(quant_id)
        if not isinstance(node, Quant):
            raise UnknownNode(quant_id)
        if not _IDENT_OK.fullmatch(new_name) or new_name in P.KEYWORDS:
            raise InvalidIdentifier(new_name)
        if new_name == node.var:
            return self.model
        taken = self._taken_names(pred.body, quant_id)
        taken |= {q.var for q in M.walk(node.body) if isinstance(q, Quant)}
        if new_name in taken:
            raise NameClash(new_name)

        def rename(n: Node) -> Node:
            if isinstance(n, SetLeaf) and n.ref == node.var:
                return SetLeaf(n.nid, new_name)
            if isinstance(n, Quant) and n.var == node.var and n.nid != node.nid:
                return dc_replace(n, domain=rename(n.domain))  # inner binder shadows
            kids = tuple(rename(k) for k in M.children(n))
            return M.with_children(n, kids) if kids else n

        renamed = dc_replace(node, var=new_name, body=rename(node.body))
        new_body = M.replace_node(pred.body, quant_id, renamed)
        return self._commit(RenameVar(quant_id, new_name), pred.name, new_body)

    def _taken_names(self, body: Node, nid: int) -> set[str]:
        names = {s.name for s in self.model.sigs}
        names |= {f.name for s in self.model.sigs for f in s.fields}
        names |= {p.name for p in self.model.preds}
        names |= set(M.BUILTINS)
        names |= set(self._scope_names(body, nid))
        return names

    def undo(self) -> Model:
        if not self._undo:
            raise NothingToUndo()
        action, prior = self._undo.pop()
        self._redo.append((action, self.model))
        # ids stay fresh: the counter is never rewound
        self.model = dc_replace(prior, next_node_id=self._next_id)
        return self.model

    def redo(self) -> Model:
        if not self._redo:
            raise NothingToRedo()
        action, later = self._redo.pop()
        self._undo.append((action, self.model))
        self.model = dc_replace(later, next_node_id=self._next_id)
        return self.model

    # -- dispatch ---------------------------------------------------------------

    def apply(self, action: EditAction) -> ActionOutcome:
        children_preserved = None
        try:
            match action:
                case Insert(hole=h, block=b):
                    self.insert(h, b)
                case Extend(node=n, side=s, block=b):
                    self.extend(Anchor(n, s), b)
                case DeleteSubtree(node=n):
                    self.delete_subtree(n)
                case Splice(node=n, keep=k):
                    self.splice(n, k)
                case Replace(node=n, block=b):
                    _, children_preserved = self.replace(n, b)
                case RenameVar(node=n, name=name):
                    self.rename_var(n, name)
                case Undo():
                    self.undo()
                case Redo():
                    self.redo()
                case _:
                    raise EngineError(f"unknown action {action!r}")
        except EngineError as exc:
            reason = getattr(exc, "reason_class", "")
            return ActionOutcome(action, ok=False, error_kind=type(exc).__name__,
                                 reason_class=reason, message=str(exc))
        return ActionOutcome(action, ok=True, children_preserved=children_preserved)


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReplayResult:
    model: Model
    outcomes: tuple[ActionOutcome, ...]

    @property
    def ok(self) -> bool:
        return all(o.ok for o in self.outcomes)


def replay(initial_text: str, actions: Iterable[EditAction],
           halt_on_error: bool = False) -> ReplayResult:
    """Apply a recorded action sequence to a freshly parsed model.

    Rejections are recorded per action, never raised; `halt_on_error` stops at
    the first rejection instead of continuing.
    """
    session = EditSession(P.parse_model(initial_text))
    outcomes = []
    for action in actions:
        outcome = session.apply(action)
        outcomes.append(outcome)
        if not outcome.ok and halt_on_error:
            break
    return ReplayResult(session.model, tuple(outcomes))


def load_edit_script(text: str) -> list[EditAction]:
    """One action per line, JSON records; blank lines and # comments skipped."""
    actions = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise EngineError(f"edit script line {lineno}: bad JSON ({exc})") from exc
        actions.append(action_from_wire(obj))
    return actions


def dump_edit_script(actions: Iterable[EditAction]) -> str:
    return "\n".join(json.dumps(action_to_wire(a)) for a in actions) + "\n"
