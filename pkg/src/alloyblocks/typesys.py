"""Kind and bounding-type computation, the possible-type abstraction for
partial trees, hole constraints, and block selectability.

Two routes coexist on purpose:

* `typeof` computes the exact kind of a hole-free tree, failing with the
  leftmost-innermost error in Analyzer style ("Left type = ... Right type =
  ...").
* `possible_type` soundly over-approximates the kinds reachable by filling a
  partial tree's holes; a block is selectable at a hole exactly when the tree
  with the block's template substituted in still has a non-empty abstraction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import model as M
from .errors import EngineError, HolesPresent, Untypable
from .model import (
    EXPR, FORMULA, FORMULA_KIND, INT, INT_KIND, BinRel, Card, Compare,
    ExprKind, FormulaKind, Hole, IntCompare, IntKind, IntLit, Kind, Model,
    MultFormula, Node, Not, PredCall, Prime, Prop, Quant, RelType, SetLeaf,
    TempBin, TempUn, UnRel, Universe,
)

KIND_MISMATCH = "KindMismatch"
ARITY_MISMATCH = "ArityMismatch"
DISJOINT_OPERANDS = "DisjointOperands"
EMPTY_JOIN = "EmptyJoin"
CLOSURE_ARITY = "ClosureArity"
TRANSPOSE_ARITY = "TransposeArity"


class TypeProblem(EngineError):
    """A type error with the Analyzer-style left/right detail snapshot."""

    def __init__(self, node_id: int, error_class: str,
                 left: Kind | None = None, right: Kind | None = None,
                 note: str = ""):
        self.node_id = node_id
        self.error_class = error_class
        self.left = left
        self.right = right
        self.note = note
        super().__init__(f"{error_class} at node {node_id}: {self.detail()}")

    def detail(self) -> str:
        if self.left is not None and self.right is not None:
            return f"Left type = {self.left.render()}. Right type = {self.right.render()}"
        if self.left is not None:
            return f"Type = {self.left.render()}" + (f". {self.note}" if self.note else "")
        return self.note or "this expression failed to typecheck"


class _Top:
    """Abstract bound meaning `any products at this arity`."""

    def __repr__(self):
        return "TOP"


TOP = _Top()
Bound = RelType | _Top


class _NonEmptyReq:
    """Overlap requirement satisfied by any non-empty type of the right arity."""

    def __repr__(self):
        return "NONEMPTY"


NONEMPTY = _NonEmptyReq()
Requirement = RelType | _NonEmptyReq


@dataclass(frozen=True)
class PossibleType:
    """Sound over-approximation of the kinds a (possibly holey) tree can take.

    `exprs` maps each achievable arity to an upper bound on the products of
    any completion at that arity; TOP means unbounded. A hole-free tree's
    PossibleType is the singleton of its exact kind; an empty PossibleType
    proves no completion can type-check.
    """

    formula: bool = False
    integer: bool = False
    exprs: tuple[tuple[int, Bound], ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.formula and not self.integer and not self.exprs

    def expr_map(self) -> dict[int, Bound]:
        return dict(self.exprs)

    def arities(self) -> frozenset[int]:
        return frozenset(a for a, _ in self.exprs)

    def kind_classes(self) -> frozenset[str]:
        classes = set()
        if self.formula:
            classes.add(FORMULA)
        if self.integer:
            classes.add(INT)
        if self.exprs:
            classes.add(EXPR)
        return frozenset(classes)

    @staticmethod
    def of(formula=False, integer=False, exprs: dict[int, Bound] | None = None) -> "PossibleType":
        items = tuple(sorted((exprs or {}).items(), key=lambda kv: kv[0]))
        return PossibleType(formula=formula, integer=integer, exprs=items)


@dataclass(frozen=True)
class HoleConstraint:
    """What a hole's context demands: kind class, allowed arities, and
    per-arity overlap requirements (a conjunction), plus first/last column
    requirements for join and restriction contexts."""

    kind_class: str
    arities: frozenset[int] = frozenset()
    overlap: tuple[tuple[int, tuple[Requirement, ...]], ...] = ()
    first_col: frozenset[str] | None = None
    last_col: frozenset[str] | None = None

    def requirements(self, arity: int) -> tuple[Requirement, ...]:
        for a, reqs in self.overlap:
            if a == arity:
                return reqs
        return ()

    def must_overlap(self, arity: int) -> RelType | None:
        """The single concrete overlap requirement at an arity, if any."""
        for req in self.requirements(arity):
            if isinstance(req, RelType):
                return req
        return None


FORMULA_CONSTRAINT = HoleConstraint(FORMULA)
INT_CONSTRAINT = HoleConstraint(INT)


def _expr_constraint(arities, overlap: dict[int, tuple[Requirement, ...]] | None = None,
                     first_col=None, last_col=None) -> HoleConstraint:
    items = tuple(sorted((overlap or {}).items(), key=lambda kv: kv[0]))
    items = tuple((a, reqs) for a, reqs in items if reqs)
    return HoleConstraint(EXPR, frozenset(arities), items, first_col, last_col)


# ---------------------------------------------------------------------------
# Exact typing
# ---------------------------------------------------------------------------

class TypeContext:
    """Shared machinery for one model: prim universe, declared-type cache."""

    def __init__(self, model: Model, universe: Universe | None = None):
        self.model = model
        self.universe = universe or Universe(model)
        self.max_arity = model.config.max_arity
        self.strict_minus = model.config.strict_disjoint_minus
        self._iden: RelType | None = None

    @property
    def iden(self) -> RelType:
        if self._iden is None:
            self._iden = self.universe.iden_type()
        return self._iden

    # -- exact -------------------------------------------------------------

    def typeof(self, node: Node, scope: dict[str, RelType] | None = None) -> Kind:
        scope = scope or {}
        match node:
            case Hole():
                raise HolesPresent((node.nid,))
            case SetLeaf(ref=ref):
                return ExprKind(self.universe.declared_type(ref, scope))
            case IntLit():
                return INT_KIND
            case PredCall():
                return FORMULA_KIND
            case Quant(var=v, domain=d, body=b):
                dk = self.typeof(d, scope)
                self._require_domain(d, dk)
                bk = self.typeof(b, {**scope, v: dk.rel})
                if not isinstance(bk, FormulaKind):
                    raise TypeProblem(b.nid, KIND_MISMATCH, left=bk,
                                      note="quantifier body must be a formula")
                return FORMULA_KIND
            case _:
                kids = M.children(node)
                kid_kinds = tuple(self.typeof(k, scope) for k in kids)
                return self.kind_step(node, kid_kinds)

    def _require_domain(self, dnode: Node, dk: Kind):
        if not isinstance(dk, ExprKind):
            raise TypeProblem(dnode.nid, KIND_MISMATCH, left=dk,
                              note="quantifier domain must be a set")
        if dk.rel.arity != 1:
            raise TypeProblem(dnode.nid, ARITY_MISMATCH, left=dk,
                              note="quantifier domain must have arity 1")

    def kind_step(self, node: Node, kids: tuple[Kind, ...]) -> Kind:
        """Kind of one operator application given its children's kinds.

        typeof and the brute-force oracle both judge through here, so the two
        routes cannot drift apart on the per-operator rules.
        """
        ch = M.children(node)

        def expr_at(i) -> RelType:
            k = kids[i]
            if not isinstance(k, ExprKind):
                raise TypeProblem(ch[i].nid, KIND_MISMATCH, left=k,
                                  note="operand must be a set")
            return k.rel

        def formula_at(i):
            if not isinstance(kids[i], FormulaKind):
                raise TypeProblem(ch[i].nid, KIND_MISMATCH, left=kids[i],
                                  note="operand must be a formula")

        def int_at(i):
            if not isinstance(kids[i], IntKind):
                raise TypeProblem(ch[i].nid, KIND_MISMATCH, left=kids[i],
                                  note="operand must be an integer")

        match node:
            case UnRel(op="~"):
                t = expr_at(0)
                if t.arity != 2:
                    raise TypeProblem(node.nid, TRANSPOSE_ARITY, left=ExprKind(t))
                return ExprKind(t.reverse())
            case UnRel(op="^"):
                t = expr_at(0)
                if t.arity != 2:
                    raise TypeProblem(node.nid, CLOSURE_ARITY, left=ExprKind(t))
                return ExprKind(t.closure())
            case UnRel(op="*"):
                t = expr_at(0)
                if t.arity != 2:
                    raise TypeProblem(node.nid, CLOSURE_ARITY, left=ExprKind(t))
                return ExprKind(t.closure().union(self.iden))
            case MultFormula():
                expr_at(0)
                return FORMULA_KIND
            case Not() | TempUn():
                formula_at(0)
                return FORMULA_KIND
            case Prop() | TempBin():
                formula_at(0)
                formula_at(1)
                return FORMULA_KIND
            case Prime():
                return ExprKind(expr_at(0))
            case Card():
                expr_at(0)
                return INT_KIND
            case IntCompare():
                int_at(0)
                int_at(1)
                return FORMULA_KIND
            case Compare():
                l, r = expr_at(0), expr_at(1)
                if l.arity != r.arity:
                    raise TypeProblem(node.nid, ARITY_MISMATCH,
                                      left=ExprKind(l), right=ExprKind(r))
                if not l.overlaps(r):
                    raise TypeProblem(node.nid, DISJOINT_OPERANDS,
                                      left=ExprKind(l), right=ExprKind(r))
                return FORMULA_KIND
            case BinRel(op=op):
                return ExprKind(self._binrel(node, op, expr_at(0), expr_at(1)))
            case Quant(domain=d, body=b):
                self._require_domain(d, kids[0])
                if not isinstance(kids[1], FormulaKind):
                    raise TypeProblem(b.nid, KIND_MISMATCH, left=kids[1],
                                      note="quantifier body must be a formula")
                return FORMULA_KIND
        raise TypeError(f"no typing rule for {node!r}")

    def _binrel(self, node: Node, op: str, l: RelType, r: RelType) -> RelType:
        lk, rk = ExprKind(l), ExprKind(r)
        if op in ("&", "+", "-", "++"):
            if l.arity != r.arity:
                raise TypeProblem(node.nid, ARITY_MISMATCH, left=lk, right=rk)
        if op == "&":
            t = l.intersect(r)
            if t.is_empty:
                raise TypeProblem(node.nid, DISJOINT_OPERANDS, left=lk, right=rk)
            return t
        if op == "+":
            return l.union(r)
        if op == "++":
            if l.arity < 2:
                raise TypeProblem(node.nid, ARITY_MISMATCH, left=lk, right=rk,
                                  note="override needs arity >= 2")
            return l.union(r)
        if op == "-":
            if self.strict_minus and not l.overlaps(r):
                raise TypeProblem(node.nid, DISJOINT_OPERANDS, left=lk, right=rk)
            return l
        if op == "->":
            if l.arity + r.arity > self.max_arity:
                raise TypeProblem(node.nid, ARITY_MISMATCH, left=lk, right=rk,
                                  note=f"arity {l.arity + r.arity} exceeds the cap "
                                       f"of {self.max_arity}")
            return l.concat(r)
        if op == ".":
            k = l.arity + r.arity - 2
            if k == 0:
                raise TypeProblem(node.nid, EMPTY_JOIN, left=lk, right=rk,
                                  note="join of two unary sets")
            if k > self.max_arity:
                raise TypeProblem(node.nid, ARITY_MISMATCH, left=lk, right=rk,
                                  note=f"arity {k} exceeds the cap of {self.max_arity}")
            t = l.compose(r)
            if t.is_empty:
                raise TypeProblem(node.nid, EMPTY_JOIN, left=lk, right=rk)
            return t
        if op == "<:":
            if l.arity != 1:
                raise TypeProblem(node.nid, ARITY_MISMATCH, left=lk, right=rk,
                                  note="domain restriction needs an arity-1 left operand")
            t = r.restrict_first(l.first_cols())
            if t.is_empty:
                raise TypeProblem(node.nid, EMPTY_JOIN, left=lk, right=rk)
            return t
        if op == ":>":
            if r.arity != 1:
                raise TypeProblem(node.nid, ARITY_MISMATCH, left=lk, right=rk,
                                  note="range restriction needs an arity-1 right operand")
            t = l.restrict_last(r.first_cols())
            if t.is_empty:
                raise TypeProblem(node.nid, EMPTY_JOIN, left=lk, right=rk)
            return t
        raise TypeError(f"unknown relational operator {op!r}")

    # -- abstraction ---------------------------------------------------------

    def possible(self, node: Node, scope: dict[str, Bound] | None = None) -> PossibleType:
        scope = scope or {}
        match node:
            case Hole(kind_class=kc):
                if kc == FORMULA:
                    return PossibleType.of(formula=True)
                if kc == INT:
                    return PossibleType.of(integer=True)
                return PossibleType.of(exprs={a: TOP for a in range(1, self.max_arity + 1)})
            case SetLeaf(ref=ref):
                if ref in scope:
                    b = scope[ref]
                    return PossibleType.of(exprs={1 if b is TOP else b.arity: b})
                t = self.universe.declared_type(ref)
                return PossibleType.of(exprs={t.arity: t})
            case IntLit():
                return PossibleType.of(integer=True)
            case PredCall():
                return PossibleType.of(formula=True)
            case Quant(var=v, domain=d, body=b):
                dp = self.possible(d, scope)
                dom = dp.expr_map().get(1)
                if dom is None:
                    return PossibleType.of()
                bp = self.possible(b, {**scope, v: dom})
                return PossibleType.of(formula=bp.formula)
            case Not(operand=x) | TempUn(operand=x):
                return PossibleType.of(formula=self.possible(x, scope).formula)
            case Prop(left=l, right=r) | TempBin(left=l, right=r):
                ok = self.possible(l, scope).formula and self.possible(r, scope).formula
                return PossibleType.of(formula=ok)
            case MultFormula(operand=x):
                return PossibleType.of(formula=bool(self.possible(x, scope).exprs))
            case Card(operand=x):
                return PossibleType.of(integer=bool(self.possible(x, scope).exprs))
            case IntCompare(left=l, right=r):
                ok = self.possible(l, scope).integer and self.possible(r, scope).integer
                return PossibleType.of(formula=ok)
            case Prime(operand=x):
                return PossibleType.of(exprs=self.possible(x, scope).expr_map())
            case UnRel(op=op, operand=x):
                b = self.possible(x, scope).expr_map().get(2)
                if b is None:
                    return PossibleType.of()
                if op == "~":
                    return PossibleType.of(exprs={2: TOP if b is TOP else b.reverse()})
                if op == "^":
                    return PossibleType.of(exprs={2: TOP if b is TOP else b.closure()})
                return PossibleType.of(exprs={2: self.iden if b is TOP
                                              else b.closure().union(self.iden)})
            case Compare(left=l, right=r):
                lm = self.possible(l, scope).expr_map()
                rm = self.possible(r, scope).expr_map()
                ok = any(_overlap_possible(lm[a], rm[a]) for a in lm.keys() & rm.keys())
                return PossibleType.of(formula=ok)
            case BinRel(op=op, left=l, right=r):
                lm = self.possible(l, scope).expr_map()
                rm = self.possible(r, scope).expr_map()
                return PossibleType.of(exprs=self._binrel_bounds(op, lm, rm))
        raise TypeError(f"no abstraction rule for {node!r}")

    def _binrel_bounds(self, op: str, lm: dict[int, Bound],
                       rm: dict[int, Bound]) -> dict[int, Bound]:
        out: dict[int, Bound] = {}

        def put(arity: int, bound: Bound):
            prev = out.get(arity)
            out[arity] = bound if prev is None else _union_bound(prev, bound)

        if op in ("&", "+", "-", "++"):
            for a in lm.keys() & rm.keys():
                lb, rb = lm[a], rm[a]
                if op == "&":
                    meet = _intersect_bound(lb, rb)
                    if isinstance(meet, RelType) and meet.is_empty:
                        continue
                    put(a, meet)
                elif op == "+":
                    put(a, _union_bound(lb, rb))
                elif op == "++":
                    if a >= 2:
                        put(a, _union_bound(lb, rb))
                else:  # -
                    if self.strict_minus and not _overlap_possible(lb, rb):
                        continue
                    put(a, lb)
            return out
        if op == "->":
            for a, lb in lm.items():
                for b, rb in rm.items():
                    if a + b > self.max_arity:
                        continue
                    l_empty = isinstance(lb, RelType) and lb.is_empty
                    r_empty = isinstance(rb, RelType) and rb.is_empty
                    if l_empty or r_empty:
                        # concatenation with the empty type is empty no matter
                        # how the other side completes
                        put(a + b, RelType(a + b, frozenset()))
                    elif lb is TOP or rb is TOP:
                        put(a + b, TOP)
                    else:
                        put(a + b, lb.concat(rb))
            return out
        if op == ".":
            for n, lb in lm.items():
                for m, rb in rm.items():
                    k = n + m - 2
                    if k < 1 or k > self.max_arity:
                        continue
                    if isinstance(lb, RelType) and lb.is_empty:
                        continue
                    if isinstance(rb, RelType) and rb.is_empty:
                        continue
                    if lb is TOP or rb is TOP:
                        put(k, TOP)
                    else:
                        t = lb.compose(rb)
                        if not t.is_empty:
                            put(k, t)
            return out
        if op == "<:":
            lb = lm.get(1)
            if lb is None:
                return out
            for m, rb in rm.items():
                if lb is TOP:
                    if not (isinstance(rb, RelType) and rb.is_empty):
                        put(m, rb)
                elif isinstance(lb, RelType) and lb.is_empty:
                    continue
                elif rb is TOP:
                    put(m, TOP)
                else:
                    t = rb.restrict_first(lb.first_cols())
                    if not t.is_empty:
                        put(m, t)
            return out
        if op == ":>":
            rb = rm.get(1)
            if rb is None:
                return out
            for n, lb in lm.items():
                if rb is TOP:
                    if not (isinstance(lb, RelType) and lb.is_empty):
                        put(n, lb)
                elif isinstance(rb, RelType) and rb.is_empty:
                    continue
                elif lb is TOP:
                    put(n, TOP)
                else:
                    t = lb.restrict_last(rb.first_cols())
                    if not t.is_empty:
                        put(n, t)
            return out
        raise TypeError(f"unknown relational operator {op!r}")


def _intersect_bound(a: Bound, b: Bound) -> Bound:
    if a is TOP:
        return b
    if b is TOP:
        return a
    return a.intersect(b)


def _union_bound(a: Bound, b: Bound) -> Bound:
    if a is TOP or b is TOP:
        return TOP
    return a.union(b)


def _overlap_possible(a: Bound, b: Bound) -> bool:
    if a is TOP and b is TOP:
        return True
    if a is TOP:
        return not b.is_empty
    if b is TOP:
        return not a.is_empty
    return a.overlaps(b)


def _satisfies_requirement(bound: Bound, req: Requirement) -> bool:
    if bound is TOP:
        return True
    if req is NONEMPTY:
        return not bound.is_empty
    return bound.overlaps(req)


# ---------------------------------------------------------------------------
# Hole constraints
# ---------------------------------------------------------------------------

def _all_arities(ctx: TypeContext) -> frozenset[int]:
    return frozenset(range(1, ctx.max_arity + 1))


def _arity_entries(p: PossibleType) -> dict[int, Bound]:
    return p.expr_map()


def derive_constraint(ctx: TypeContext, root: Node, target_id: int,
                      scope: dict[str, Bound] | None = None) -> HoleConstraint:
    """Constraint on the position of `target_id` inside `root` (a pred body)."""

    def descend(node: Node, c: HoleConstraint, scope: dict[str, Bound]) -> HoleConstraint | None:
        if node.nid == target_id:
            return c
        if isinstance(node, Quant):
            hit = descend(node.domain, _expr_constraint({1}), scope)
            if hit is not None:
                return hit
            dom = ctx.possible(node.domain, scope).expr_map().get(1, TOP)
            return descend(node.body, FORMULA_CONSTRAINT, {**scope, node.var: dom})
        kids = M.children(node)
        for i, kid in enumerate(kids):
            if M.contains_node(kid, target_id):
                return descend(kid, _child_constraint(ctx, node, i, c, scope), scope)
        return None

    found = descend(root, FORMULA_CONSTRAINT, scope or {})
    if found is None:
        from .errors import UnknownNode
        raise UnknownNode(target_id)
    return found


def _child_constraint(ctx: TypeContext, parent: Node, index: int,
                      c: HoleConstraint, scope: dict[str, Bound]) -> HoleConstraint:
    match parent:
        case Not() | TempUn() | Prop() | TempBin():
            return FORMULA_CONSTRAINT
        case IntCompare():
            return INT_CONSTRAINT
        case MultFormula() | Card():
            return _expr_constraint(_all_arities(ctx))
        case Prime():
            return c if c.kind_class == EXPR else _expr_constraint(_all_arities(ctx))
        case UnRel(op=op):
            if op == "~":
                reqs = tuple(r.reverse() if isinstance(r, RelType) else r
                             for r in c.requirements(2))
                return _expr_constraint({2}, {2: reqs})
            if op == "^":
                reqs = (NONEMPTY,) if c.requirements(2) else ()
                return _expr_constraint({2}, {2: reqs})
            return _expr_constraint({2})
        case Compare(left=l, right=r):
            sib = r if index == 0 else l
            sib_map = _arity_entries(ctx.possible(sib, scope))
            arities, overlap = set(), {}
            for a, b in sib_map.items():
                if isinstance(b, RelType) and b.is_empty:
                    continue
                arities.add(a)
                overlap[a] = (NONEMPTY,) if b is TOP else (b,)
            return _expr_constraint(arities, overlap)
        case BinRel(op=op, left=l, right=r):
            sib = r if index == 0 else l
            sib_map = _arity_entries(ctx.possible(sib, scope))
            return _binrel_child_constraint(ctx, op, index, c, sib_map)
    raise TypeError(f"cannot derive a child constraint under {parent!r}")


def _binrel_child_constraint(ctx: TypeContext, op: str, index: int,
                             c: HoleConstraint, sib: dict[int, Bound]) -> HoleConstraint:
    parent_arities = c.arities if c.kind_class == EXPR else frozenset()

    if op in ("&", "+", "-", "++"):
        arities, overlap = set(), {}
        for a in parent_arities & frozenset(sib):
            if op == "++" and a < 2:
                continue
            sb = sib[a]
            reqs: list = []
            if op == "&":
                base = NONEMPTY if sb is TOP else sb
                if isinstance(base, RelType) and base.is_empty:
                    continue
                have = list(c.requirements(a))
                if not have:
                    reqs = [base]
                else:
                    for req in have:
                        if sb is TOP or req is NONEMPTY:
                            reqs.append(base if req is NONEMPTY else req)
                        else:
                            refined = sb.intersect(req)
                            if refined.is_empty:
                                reqs = None
                                break
                            reqs.append(refined)
                    if reqs is None:
                        continue
                    if sb is TOP:
                        reqs.append(NONEMPTY)
            elif op in ("+", "++"):
                for req in c.requirements(a):
                    if not _satisfies_requirement(sb, req):
                        reqs.append(req)
            else:  # -
                if index == 0:
                    reqs = list(c.requirements(a))
                    if ctx.strict_minus:
                        reqs.append(NONEMPTY if sb is TOP else sb)
                else:
                    dead = any(not _satisfies_requirement(sb, req)
                               for req in c.requirements(a))
                    if dead:
                        continue
                    if ctx.strict_minus:
                        reqs = [NONEMPTY if sb is TOP else sb]
            if any(isinstance(rq, RelType) and rq.is_empty for rq in reqs):
                continue
            arities.add(a)
            overlap[a] = tuple(reqs)
        return _expr_constraint(arities, overlap)

    if op == "->":
        arities, overlap = set(), {}
        for a in range(1, ctx.max_arity + 1):
            reqs_here: list = []
            feasible_bs = []
            for b in sib:
                total = a + b
                if total > ctx.max_arity or (parent_arities and total not in parent_arities):
                    continue
                result_reqs = c.requirements(total)
                sb = sib[b]
                if result_reqs and isinstance(sb, RelType) and sb.is_empty:
                    continue
                feasible_bs.append((b, result_reqs))
            if not feasible_bs:
                continue
            if all(reqs for _, reqs in feasible_bs):
                reqs_here.append(NONEMPTY)
                if len(feasible_bs) == 1:
                    b, result_reqs = feasible_bs[0]
                    for req in result_reqs:
                        if isinstance(req, RelType):
                            side = (lambda t: t[:a]) if index == 0 else (lambda t: t[-a:])
                            proj = RelType.of(a, (side(t) for t in req.products))
                            if proj.is_empty:
                                reqs_here = None
                                break
                            reqs_here.append(proj)
                    if reqs_here is None:
                        continue
            arities.add(a)
            overlap[a] = tuple(reqs_here)
        return _expr_constraint(arities, overlap)

    if op == ".":
        arities, overlap = set(), {}
        col_prims: set[str] | None = set()
        for n in range(1, ctx.max_arity + 1):
            feasible = []
            for m, sb in sib.items():
                k = n + m - 2
                if k < 1 or k > ctx.max_arity:
                    continue
                if parent_arities and k not in parent_arities:
                    continue
                if isinstance(sb, RelType) and sb.is_empty:
                    continue
                feasible.append((m, sb, c.requirements(k)))
            if not feasible:
                continue
            arities.add(n)
            if all(reqs for _, _, reqs in feasible):
                overlap[n] = (NONEMPTY,)
            for _, sb, _ in feasible:
                if col_prims is not None:
                    if sb is TOP:
                        col_prims = None
                    else:
                        col_prims |= sb.first_cols() if index == 0 else sb.last_cols()
        cols = frozenset(col_prims) if col_prims is not None else None
        if index == 0:
            return _expr_constraint(arities, overlap, last_col=cols)
        return _expr_constraint(arities, overlap, first_col=cols)

    if op in ("<:", ":>"):
        is_filter_side = (op == "<:" and index == 0) or (op == ":>" and index == 1)
        if is_filter_side:
            sb = None
            for _, bound in sorted(sib.items()):
                sb = bound if sb is None else _union_bound(sb, bound)
            if sb is None:
                return _expr_constraint(set())
            if sb is TOP:
                return _expr_constraint({1}, {1: (NONEMPTY,)})
            cols = sb.first_cols() if op == "<:" else sb.last_cols()
            req = RelType.of(1, ((p,) for p in cols))
            if req.is_empty:
                return _expr_constraint(set())
            return _expr_constraint({1}, {1: (req,)})
        # restricted side: parent's requirements pass through, plus the
        # filter set constrains the matching end column
        filt = sib.get(1)
        overlap = {a: c.requirements(a) for a in parent_arities}
        cols = None if filt is TOP or filt is None else filt.first_cols()
        if op == "<:":
            return _expr_constraint(parent_arities, overlap, first_col=cols)
        return _expr_constraint(parent_arities, overlap, last_col=cols)

    raise TypeError(f"unknown relational operator {op!r}")


# ---------------------------------------------------------------------------
# Selectability
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Selectable:
    @property
    def ok(self) -> bool:
        return True


@dataclass(frozen=True)
class Grayed:
    reason_class: str  # KindMismatch | ArityMismatch | TypeDisjoint | DeclarationOnly
    human_reason: str

    @property
    def ok(self) -> bool:
        return False


Verdict = Selectable | Grayed

TYPE_DISJOINT = "TypeDisjoint"
DECLARATION_ONLY = "DeclarationOnly"


def judge_candidate(ctx: TypeContext, body: Node, target_id: int, candidate: Node,
                    constraint: HoleConstraint,
                    candidate_scope: dict[str, Bound]) -> Verdict:
    """Decide selectability of a candidate subtree at a target position.

    The derived constraint carries necessary conditions only, so failing one
    of its screens already proves no completion exists; the whole-body
    re-analysis then gives the final word on whatever survives.
    """
    cand = ctx.possible(candidate, candidate_scope)
    classes = cand.kind_classes()
    if constraint.kind_class not in classes:
        have = ", ".join(sorted(classes)) or "nothing"
        return Grayed(KIND_MISMATCH,
                      f"this position needs a {constraint.kind_class}; "
                      f"the block produces {have}")

    disjoint_detail = ""
    if constraint.kind_class == EXPR:
        possible_arities = cand.arities()
        if not (possible_arities & constraint.arities):
            need = sorted(constraint.arities)
            have = sorted(possible_arities)
            return Grayed(ARITY_MISMATCH,
                          f"this position needs arity {need}; "
                          f"the block can only produce arity {have}")
        usable = False
        for a, bound in cand.expr_map().items():
            if a not in constraint.arities:
                continue
            if not all(_satisfies_requirement(bound, req)
                       for req in constraint.requirements(a)):
                continue
            if isinstance(bound, RelType):
                if constraint.first_col is not None \
                        and not (bound.first_cols() & constraint.first_col):
                    continue
                if constraint.last_col is not None \
                        and not (bound.last_cols() & constraint.last_col):
                    continue
            usable = True
            break
        if not usable:
            for a in sorted(possible_arities & constraint.arities):
                req = constraint.must_overlap(a)
                if req is not None:
                    disjoint_detail = f"; required overlap with {req.render()}"
                    break
            return Grayed(TYPE_DISJOINT, "no completion shares a bounding type "
                                         f"with this context{disjoint_detail}")

    new_body = M.replace_node(body, target_id, candidate)
    if ctx.possible(new_body).formula:
        return Selectable()
    if constraint.kind_class == EXPR:
        for a in sorted(cand.arities() & constraint.arities):
            req = constraint.must_overlap(a)
            if req is not None:
                disjoint_detail = f"; required overlap with {req.render()}"
                break
        return Grayed(TYPE_DISJOINT, "no completion shares a bounding type "
                                     f"with this context{disjoint_detail}")
    return Grayed(TYPE_DISJOINT, "no completion type-checks in this context")


def exprs_top(ctx: TypeContext) -> dict[int, Bound]:
    return {a: TOP for a in range(1, ctx.max_arity + 1)}


def scope_bounds_at(ctx: TypeContext, body: Node, nid: int) -> dict[str, Bound]:
    """Abstract types of the quantifier variables in scope at a node."""
    bounds: dict[str, Bound] = {}
    for var, domain in M.scope_at(ctx.model, body, nid):
        bounds[var] = ctx.possible(domain, bounds).expr_map().get(1, TOP)
    return bounds


def check_block_at(ctx: TypeContext, body: Node, target_id: int, block_key: str,
                   anchored: Node | None = None, side: str | None = None,
                   constraint: HoleConstraint | None = None,
                   scope: dict[str, Bound] | None = None) -> Verdict:
    """Selectability of one palette block at a hole or anchor inside `body`."""
    from . import blocks as B

    if block_key == "op:set":
        return Grayed(DECLARATION_ONLY,
                      "'set' is a declaration multiplicity, not an operator")

    counter = iter(range(-1, -64, -1))
    candidate = B.make_template(block_key, lambda: next(counter),
                                anchored=anchored, side=side)
    if candidate is None:
        what = "wrap the existing node from this side" if anchored is not None \
            else "fill a hole"
        return Grayed(KIND_MISMATCH, f"this block cannot {what}")

    if scope is None:
        scope = scope_bounds_at(ctx, body, target_id)
    if constraint is None:
        constraint = derive_constraint(ctx, body, target_id)
    return judge_candidate(ctx, body, target_id, candidate, constraint, scope)


# ---------------------------------------------------------------------------
# Module-level convenience API
# ---------------------------------------------------------------------------

def check_block(model: Model, pred_name: str, target, block_key: str) -> Verdict:
    """Spec-level entry: target is a hole id or an (anchor node id, side) pair."""
    ctx = TypeContext(model)
    body = model.pred(pred_name).body
    if isinstance(target, tuple):
        nid, side = target
        anchored = M.find_node(body, nid)
        if isinstance(anchored, Hole):
            from .errors import UnknownTarget
            raise UnknownTarget(target)
        return check_block_at(ctx, body, nid, block_key, anchored=anchored, side=side)
    node = M.find_node(body, target)
    if not isinstance(node, Hole):
        from .errors import UnknownHole
        raise UnknownHole(target)
    return check_block_at(ctx, body, target, block_key)


def typeof(model: Model, scope: dict[str, RelType] | None, node: Node) -> Kind:
    return TypeContext(model).typeof(node, scope)


def possible_type(model: Model, scope: dict[str, Bound] | None, node: Node) -> PossibleType:
    p = TypeContext(model).possible(node, scope)
    if p.is_empty:
        raise Untypable(node.nid)
    return p


def hole_constraint(model: Model, pred_name: str, hole_id: int) -> HoleConstraint:
    ctx = TypeContext(model)
    pred = model.pred(pred_name)
    node = M.find_node(pred.body, hole_id)
    if not isinstance(node, Hole):
        from .errors import UnknownHole
        raise UnknownHole(hole_id)
    return derive_constraint(ctx, pred.body, hole_id)
