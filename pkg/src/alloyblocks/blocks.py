"""The block palette: every insertable unit the editor offers, grouped the way
the panel displays them, plus template instantiation.

Palette contents for a given target are a pure function of (model, target,
scope). The `set` keyword appears in the palette for completeness but is a
declaration multiplicity, never an expression operator, so it is always
grayed with reason DeclarationOnly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import model as M
from .errors import UnknownBlock
from .model import (
    EXPR, FORMULA, INT, BinRel, Card, Compare, Hole, IntCompare, IntLit,
    Model, MultFormula, Node, Not, PredCall, Prime, Prop, Quant, SetLeaf,
    TempBin, TempUn, UnRel,
)

RELATIONAL = "Relational"
PROPOSITIONAL = "Propositional"
FIRST_ORDER = "FirstOrder"
LTL = "LTL"
BASIC_SET = "BasicSet"
INTEGER = "Integer"
PREDICATE = "Predicate"

CATEGORY_ORDER = (RELATIONAL, PROPOSITIONAL, FIRST_ORDER, LTL,
                  BASIC_SET, INTEGER, PREDICATE)

PALETTE_INT_LITERALS = (0, 1, 2, 3)


@dataclass(frozen=True)
class Block:
    key: str       # wire name, e.g. "op:&", "quant:all", "set:File", "int:0"
    category: str
    label: str


_RELATIONAL_UNARY = ("~", "*", "^", "!", "no", "lone", "some", "one", "set")
# !in and != are the negated comparison forms; they sit next to in/= so the
# `x !in [rhs]` construction step is a single block.
_RELATIONAL_BINARY = ("&", "+", "-", "++", "<:", ":>", ".", "->",
                      "in", "=", "!in", "!=", "<", ">", "=<", ">=")
_LTL_UNARY = ("always", "eventually", "after", "before", "historically", "once", "'")
_LTL_BINARY = ("since", "triggered", "until", "releases", ";")


def operator_blocks() -> tuple[Block, ...]:
    out = [Block(f"op:{op}", RELATIONAL, op) for op in _RELATIONAL_UNARY]
    out += [Block(f"op:{op}", RELATIONAL, op) for op in _RELATIONAL_BINARY]
    out += [Block(f"op:{op}", PROPOSITIONAL, op) for op in M.PROP_OPS]
    out += [Block(f"quant:{q}", FIRST_ORDER, q) for q in M.QUANTIFIERS]
    out += [Block(f"op:{op}", LTL, op) for op in _LTL_UNARY]
    out += [Block(f"op:{op}", LTL, op) for op in _LTL_BINARY]
    return tuple(out)


def palette(model: Model, scope_vars: tuple[str, ...] = ()) -> tuple[Block, ...]:
    out = list(operator_blocks())
    for s in model.sigs:
        out.append(Block(f"set:{s.name}", BASIC_SET, s.name))
    for s in model.sigs:
        for f in s.fields:
            out.append(Block(f"set:{f.name}", BASIC_SET, f.name))
    for v in scope_vars:
        out.append(Block(f"set:{v}", BASIC_SET, v))
    for b in M.BUILTINS:
        out.append(Block(f"set:{b}", BASIC_SET, b))
    out.append(Block("op:#", INTEGER, "#"))
    for n in PALETTE_INT_LITERALS:
        out.append(Block(f"int:{n}", INTEGER, str(n)))
    for p in model.preds:
        out.append(Block(f"pred:{p.name}", PREDICATE, p.name))
    return tuple(out)


def palette_block(model: Model, key: str, scope_vars: tuple[str, ...] = ()) -> Block:
    for b in palette(model, scope_vars):
        if b.key == key:
            return b
    if key.startswith("int:") and key[4:].lstrip("-").isdigit():
        return Block(key, INTEGER, key[4:])
    raise UnknownBlock(key)


# ---------------------------------------------------------------------------
# Templates
# ---------------------------------------------------------------------------

def hole_slots(key: str) -> tuple[str, ...]:
    """Labels of the holes a block's template introduces at a bare hole."""
    kind, _, payload = key.partition(":")
    if kind == "quant":
        return ("var", "domain", "subformula")
    if kind != "op":
        return ()
    if payload in _binary_ops():
        return ("lhs", "rhs")
    if payload == "set":
        return ()
    return ("operand",)


def _binary_ops() -> frozenset:
    return frozenset(M.BINREL_OPS) | frozenset(M.COMPARE_OPS) \
        | frozenset(M.INTCOMPARE_OPS) | frozenset(M.PROP_OPS) | frozenset(M.TEMPBIN_OPS)


def make_template(key: str, fresh: Callable[[], int],
                  anchored: Node | None = None, side: str | None = None,
                  var_name: str = "x") -> Node | None:
    """Instantiate a block at a hole (anchored=None) or wrapping an anchored
    node. Returns None when the block cannot structurally occupy the target
    (e.g. a prefix operator at a right anchor, a leaf block at any anchor).
    """
    kind, _, payload = key.partition(":")

    if kind == "set":
        return None if anchored is not None else SetLeaf(fresh(), payload)
    if kind == "pred":
        return None if anchored is not None else PredCall(fresh(), payload)
    if kind == "int":
        return None if anchored is not None else IntLit(fresh(), int(payload))
    if kind == "quant":
        if anchored is not None and side != "left":
            return None
        nid = fresh()
        domain = Hole(fresh(), EXPR)
        body = anchored if anchored is not None else Hole(fresh(), FORMULA)
        return Quant(nid, payload, var_name, domain, body)
    if kind != "op":
        raise UnknownBlock(key)

    op = payload
    if op == "set":
        return None  # declaration multiplicity only; palette grays it out

    def expr_hole():
        return Hole(fresh(), EXPR)

    def formula_hole():
        return Hole(fresh(), FORMULA)

    def int_hole():
        return Hole(fresh(), INT)

    # unary forms
    if op in M.UNREL_OPS or op in M.MULT_OPS or op in ("!",) + M.TEMPUN_OPS \
            or op in ("'", "#"):
        prefix = op != "'"
        if anchored is not None:
            if prefix and side != "left":
                return None
            if not prefix and side != "right":
                return None
            nid = fresh()
            operand = anchored
        else:
            nid = fresh()
            operand = formula_hole() if op == "!" or op in M.TEMPUN_OPS else expr_hole()
        if op in M.UNREL_OPS:
            return UnRel(nid, op, operand)
        if op in M.MULT_OPS:
            return MultFormula(nid, op, operand)
        if op == "!":
            return Not(nid, operand)
        if op in M.TEMPUN_OPS:
            return TempUn(nid, op, operand)
        if op == "'":
            return Prime(nid, operand)
        return Card(nid, operand)

    # binary forms
    if op in M.PROP_OPS or op in M.TEMPBIN_OPS:
        mk, slot = (Prop, formula_hole) if op in M.PROP_OPS else (TempBin, formula_hole)
    elif op in M.COMPARE_OPS:
        mk, slot = Compare, expr_hole
    elif op in M.INTCOMPARE_OPS:
        mk, slot = IntCompare, int_hole
    elif op in M.BINREL_OPS:
        mk, slot = BinRel, expr_hole
    else:
        raise UnknownBlock(key)

    if anchored is None:
        return mk(fresh(), op, slot(), slot())
    if side == "right":
        return mk(fresh(), op, anchored, slot())
    if side == "left":
        return mk(fresh(), op, slot(), anchored)
    return None
