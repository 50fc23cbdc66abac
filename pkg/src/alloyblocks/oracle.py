"""Brute-force ground truth for selectability, used only by tests.

`enumerate_completions` literally enumerates hole fills up to a depth and
keeps the completions that type-check. `completion_exists` answers the same
existence question through a dynamic program over achievable kinds, which is
sound because the per-operator typing rules (`TypeContext.kind_step`) depend
only on the operands' kinds, never on their shapes. Both routes judge with
the exact checker and never consult the possible-type abstraction, so they
remain an independent check on it.
"""
from __future__ import annotations

import itertools
from dataclasses import replace as dc_replace
from typing import Iterator

from . import model as M
from .errors import BudgetExceeded, EngineError
from .model import (
    FORMULA_KIND, INT_KIND, BinRel, Card, Compare, ExprKind, Hole,
    IntCompare, IntLit, Kind, Model, MultFormula, Node, Not, PredCall, Prime,
    Prop, Quant, RelType, SetLeaf, TempBin, TempUn, UnRel,
)
from .typesys import TypeContext, TypeProblem

_UNARY_FORMS = (
    [("unrel", op) for op in M.UNREL_OPS]
    + [("mult", op) for op in M.MULT_OPS]
    + [("not", "!")]
    + [("tempun", op) for op in M.TEMPUN_OPS]
    + [("card", "#"), ("prime", "'")]
)
_BINARY_FORMS = (
    [("binrel", op) for op in M.BINREL_OPS]
    + [("compare", op) for op in M.COMPARE_OPS]
    + [("intcompare", op) for op in M.INTCOMPARE_OPS]
    + [("prop", op) for op in M.PROP_OPS]
    + [("tempbin", op) for op in M.TEMPBIN_OPS]
)


def _build_unary(form: str, op: str, kid: Node) -> Node:
    if form == "unrel":
        return UnRel(0, op, kid)
    if form == "mult":
        return MultFormula(0, op, kid)
    if form == "not":
        return Not(0, kid)
    if form == "tempun":
        return TempUn(0, op, kid)
    if form == "card":
        return Card(0, kid)
    return Prime(0, kid)


def _build_binary(form: str, op: str, left: Node, right: Node) -> Node:
    if form == "binrel":
        return BinRel(0, op, left, right)
    if form == "compare":
        return Compare(0, op, left, right)
    if form == "intcompare":
        return IntCompare(0, op, left, right)
    if form == "prop":
        return Prop(0, op, left, right)
    return TempBin(0, op, left, right)


class Oracle:
    """Enumerates well-typed completions over the full palette."""

    def __init__(self, model: Model, budget: int = 200_000):
        self.model = model
        self.ctx = TypeContext(model)
        self.budget = budget
        self._spent = 0
        self._kinds_memo: dict = {}
        self._leaf_memo: dict = {}

    # -- budget ------------------------------------------------------------

    def _spend(self, n: int = 1):
        self._spent += n
        if self._spent > self.budget:
            raise BudgetExceeded(self.budget)

    # -- leaves ------------------------------------------------------------

    def _leaves(self, names: frozenset[str]) -> list[Node]:
        key = names
        if key not in self._leaf_memo:
            leaves: list[Node] = []
            for s in self.model.sigs:
                leaves.append(SetLeaf(0, s.name))
            for s in self.model.sigs:
                for f in s.fields:
                    leaves.append(SetLeaf(0, f.name))
            for v in sorted(names):
                leaves.append(SetLeaf(0, v))
            for b in M.BUILTINS:
                leaves.append(SetLeaf(0, b))
            leaves.append(IntLit(0, 0))
            for p in self.model.preds:
                leaves.append(PredCall(0, p.name))
            self._leaf_memo[key] = leaves
        return self._leaf_memo[key]

    # -- literal tree enumeration -------------------------------------------

    def trees(self, depth: int, names: frozenset[str]) -> list[Node]:
        """All palette trees of depth <= depth; a leaf has depth 1."""
        if depth <= 0:
            return []
        smaller = self.trees(depth - 1, names)
        out = list(self._leaves(names))
        self._spend(len(out))
        for form, op in _UNARY_FORMS:
            for kid in smaller:
                out.append(_build_unary(form, op, kid))
                self._spend()
        for form, op in _BINARY_FORMS:
            for left in smaller:
                for right in smaller:
                    out.append(_build_binary(form, op, left, right))
                    self._spend()
        var = _fresh_var(names)
        inner = self.trees(depth - 1, names | {var}) if depth >= 2 else []
        for q in M.QUANTIFIERS:
            for dom in smaller:
                for body in inner:
                    out.append(Quant(0, q, var, dom, body))
                    self._spend()
        return out

    # -- kind-level dynamic program ------------------------------------------

    def kinds(self, scope: tuple[tuple[str, RelType], ...], depth: int) -> dict[Kind, Node]:
        """Kinds achievable by well-typed palette trees of depth <= depth,
        each with one witness tree."""
        key = (scope, depth)
        if key in self._kinds_memo:
            return self._kinds_memo[key]
        if depth <= 0:
            self._kinds_memo[key] = {}
            return {}
        scope_dict = dict(scope)
        found: dict[Kind, Node] = {}
        for leaf in self._leaves(frozenset(scope_dict)):
            try:
                kind = self.ctx.typeof(leaf, scope_dict)
            except EngineError:
                continue
            found.setdefault(kind, leaf)
        if depth >= 2:
            prev = self.kinds(scope, depth - 1)
            for form, op in _UNARY_FORMS:
                for kind, wit in prev.items():
                    node = _build_unary(form, op, wit)
                    try:
                        got = self.ctx.kind_step(node, (kind,))
                    except TypeProblem:
                        continue
                    found.setdefault(got, node)
            for form, op in _BINARY_FORMS:
                for k1, w1 in prev.items():
                    for k2, w2 in prev.items():
                        node = _build_binary(form, op, w1, w2)
                        try:
                            got = self.ctx.kind_step(node, (k1, k2))
                        except TypeProblem:
                            continue
                        found.setdefault(got, node)
            var = _fresh_var(frozenset(scope_dict))
            for dk, dwit in prev.items():
                if not isinstance(dk, ExprKind) or dk.rel.arity != 1:
                    continue
                inner_scope = tuple(sorted({**scope_dict, var: dk.rel}.items()))
                inner = self.kinds(inner_scope, depth - 1)
                if FORMULA_KIND in inner:
                    for q in M.QUANTIFIERS:
                        found.setdefault(FORMULA_KIND,
                                         Quant(0, q, var, dwit, inner[FORMULA_KIND]))
        self._kinds_memo[key] = found
        return found

    def node_kinds(self, node: Node, scope: tuple[tuple[str, RelType], ...],
                   depth: int) -> dict[Kind, Node]:
        """Kinds achievable by filling `node`'s holes with depth-<=depth trees,
        with witness completions."""
        if isinstance(node, Hole):
            return self.kinds(scope, depth)
        kids = M.children(node)
        if not kids:
            try:
                return {self.ctx.typeof(node, dict(scope)): node}
            except EngineError:
                return {}
        if isinstance(node, Quant):
            out: dict[Kind, Node] = {}
            for dk, dwit in self.node_kinds(node.domain, scope, depth).items():
                if not isinstance(dk, ExprKind) or dk.rel.arity != 1:
                    continue
                inner = tuple(sorted({**dict(scope), node.var: dk.rel}.items()))
                body_kinds = self.node_kinds(node.body, inner, depth)
                if FORMULA_KIND in body_kinds:
                    wit = Quant(node.nid, node.quant, node.var, dwit,
                                body_kinds[FORMULA_KIND])
                    out.setdefault(FORMULA_KIND, wit)
            return out
        kid_options = [self.node_kinds(k, scope, depth) for k in kids]
        out = {}
        for combo in itertools.product(*(opt.items() for opt in kid_options)):
            kid_kinds = tuple(k for k, _ in combo)
            kid_wits = tuple(w for _, w in combo)
            try:
                got = self.ctx.kind_step(node, kid_kinds)
            except TypeProblem:
                continue
            out.setdefault(got, M.with_children(node, kid_wits))
        return out


def _fresh_var(names: frozenset[str]) -> str:
    i = 0
    while True:
        name = f"v{i}"
        if name not in names:
            return name
        i += 1


def _hole_fill_names(model: Model, root: Node, hole_id: int,
                     scope: dict[str, RelType]) -> frozenset[str]:
    return frozenset(scope) | frozenset(
        v for v, _ in M.scope_at(model, root, hole_id))


def renumber(node: Node, start: int = 0) -> Node:
    """Assign fresh sequential ids; used to make standalone completions valid."""
    counter = itertools.count(start)

    def go(n: Node) -> Node:
        kids = tuple(go(k) for k in M.children(n))
        renew = M.with_children(n, kids) if kids else n
        return dc_replace(renew, nid=next(counter))

    return go(node)


def enumerate_completions(model: Model, scope: dict[str, RelType] | None,
                          node: Node, depth: int,
                          budget: int = 200_000,
                          required_class: str | None = None) -> list[Node]:
    """Every hole-free instantiation of `node`'s holes with palette trees of
    depth <= depth that type-checks, deterministic order, fresh ids.

    `required_class` is the kind class the node's position demands; it
    defaults to the class of the node's own form, which is only wrong when
    the node was just substituted into a slot of a different class.

    Raises BudgetExceeded above the node-count cap.
    """
    scope = scope or {}
    oracle = Oracle(model, budget=budget)
    holes = M.holes_in(node)
    expected_class = required_class or M.produced_class(node)

    if not holes:
        candidates: Iterator[Node] = iter([node])
    else:
        fills = []
        for h in holes:
            names = _hole_fill_names(model, node, h.nid, scope)
            fills.append(oracle.trees(depth, names))

        def build() -> Iterator[Node]:
            for combo in itertools.product(*fills):
                completed = node
                for hole, fill in zip(holes, combo):
                    completed = M.replace_node(completed, hole.nid,
                                               _tag_fill(fill, hole.nid))
                yield completed

        candidates = build()

    ctx = oracle.ctx
    out = []
    for cand in candidates:
        oracle._spend(M.node_count(cand))
        try:
            kind = ctx.typeof(cand, scope)
        except EngineError:
            continue
        if kind.kind_class != expected_class:
            continue
        out.append(renumber(cand))
    return out


def _tag_fill(fill: Node, hole_id: int) -> Node:
    """Give a fill unique negative ids derived from its hole so the completed
    tree has no id collisions before the final renumbering."""
    counter = itertools.count(hole_id * 100_000 + 1)

    def go(n: Node) -> Node:
        kids = tuple(go(k) for k in M.children(n))
        renew = M.with_children(n, kids) if kids else n
        return dc_replace(renew, nid=-next(counter))

    return go(fill)


def completion_exists(model: Model, scope: dict[str, RelType] | None,
                      node: Node, depth: int,
                      required_class: str | None = None) -> Node | None:
    """A witness completion of `node` (all holes filled, type-checks, and has
    the kind class the node's position implies), or None.

    Equivalent to `enumerate_completions(...) != []` because the typing rules
    are compositional in the operands' kinds, but runs in polynomial time.
    """
    scope_items = tuple(sorted((scope or {}).items()))
    oracle = Oracle(model, budget=10**9)
    expected_class = required_class or M.produced_class(node)
    for kind, wit in oracle.node_kinds(node, scope_items, depth).items():
        if kind.kind_class == expected_class:
            return wit
    return None
