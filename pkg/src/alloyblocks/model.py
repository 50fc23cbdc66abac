"""Core data model: signature hierarchy, relation declarations, bounding types,
and the AST-with-holes.

Models are immutable snapshots. Edits never mutate; they build new trees that
share structure with the old ones, so snapshots are safe to hand across
threads and to keep on undo stacks. Node ids are monotonically increasing and
never reused within a model's lifetime, which is what lets the UI and edit
scripts keep referring to nodes across edits.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterator

from .errors import ParseError, SourceSpan, UnknownNode, UnknownRef, UnknownSig

EXPR = "expr"
FORMULA = "formula"
INT = "int"

BUILTINS = ("univ", "iden", "none")

UNREL_OPS = ("~", "^", "*")
MULT_OPS = ("no", "lone", "some", "one")
BINREL_OPS = ("&", "+", "-", "++", "<:", ":>", ".", "->")
COMPARE_OPS = ("in", "=", "!in", "!=")
INTCOMPARE_OPS = ("<", ">", "=<", ">=")
PROP_OPS = ("or", "and", "iff", "=>")
QUANTIFIERS = ("all", "no", "some", "lone", "one")
TEMPUN_OPS = ("always", "eventually", "after", "before", "historically", "once")
TEMPBIN_OPS = ("since", "triggered", "until", "releases", ";")

SIG_MULTS = ("one", "lone", "some")
FIELD_MULTS = ("lone", "one", "some", "set")


# ---------------------------------------------------------------------------
# Bounding types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RelType:
    """A bounding type: a set of equal-length tuples of primitive sig ids.

    The currency of all type checking. Canonical by construction: products is
    a frozenset (no duplicates) and all printing iterates in sorted order.
    An empty products set is the sentinel carried by `none`; it overlaps
    nothing.
    """

    arity: int
    products: frozenset[tuple[str, ...]]

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("arity must be >= 1")
        for t in self.products:
            if len(t) != self.arity:
                raise ValueError(f"tuple {t} does not match arity {self.arity}")

    @staticmethod
    def of(arity: int, tuples) -> "RelType":
        return RelType(arity, frozenset(tuple(t) for t in tuples))

    @property
    def is_empty(self) -> bool:
        return not self.products

    def overlaps(self, other: "RelType") -> bool:
        if self.arity != other.arity:
            return False
        return not self.products.isdisjoint(other.products)

    def intersect(self, other: "RelType") -> "RelType":
        return RelType(self.arity, self.products & other.products)

    def union(self, other: "RelType") -> "RelType":
        return RelType(self.arity, self.products | other.products)

    def reverse(self) -> "RelType":
        return RelType(self.arity, frozenset(t[::-1] for t in self.products))

    def concat(self, other: "RelType") -> "RelType":
        prods = frozenset(a + b for a in self.products for b in other.products)
        return RelType(self.arity + other.arity, prods)

    def compose(self, other: "RelType") -> "RelType":
        """Relational join: drop the matched column pair."""
        n, m = self.arity, other.arity
        if n + m - 2 < 1:
            raise ValueError("join of two unary types has arity 0")
        by_first: dict[str, list[tuple[str, ...]]] = {}
        for b in other.products:
            by_first.setdefault(b[0], []).append(b[1:])
        prods = set()
        for a in self.products:
            for rest in by_first.get(a[-1], ()):
                prods.add(a[:-1] + rest)
        return RelType(n + m - 2, frozenset(prods))

    def closure(self) -> "RelType":
        """Transitive closure of an arity-2 pair set; fixed point of T ∪ T.self."""
        if self.arity != 2:
            raise ValueError("closure needs arity 2")
        current = self
        while True:
            grown = current.union(current.compose(self))
            if grown == current:
                return current
            current = grown

    def first_cols(self) -> frozenset[str]:
        return frozenset(t[0] for t in self.products)

    def last_cols(self) -> frozenset[str]:
        return frozenset(t[-1] for t in self.products)

    def restrict_first(self, prims: frozenset[str]) -> "RelType":
        return RelType(self.arity, frozenset(t for t in self.products if t[0] in prims))

    def restrict_last(self, prims: frozenset[str]) -> "RelType":
        return RelType(self.arity, frozenset(t for t in self.products if t[-1] in prims))

    def render(self) -> str:
        """Analyzer-style rendering, e.g. {this/File->this/File}."""
        parts = ["->".join(f"this/{p}" for p in t) for t in sorted(self.products)]
        return "{" + ", ".join(parts) + "}"

    def __repr__(self):
        return f"RelType({self.arity}, {sorted(self.products)!r})"


# ---------------------------------------------------------------------------
# Kinds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExprKind:
    rel: RelType

    @property
    def kind_class(self) -> str:
        return EXPR

    def render(self) -> str:
        return self.rel.render()


@dataclass(frozen=True)
class FormulaKind:
    @property
    def kind_class(self) -> str:
        return FORMULA

    def render(self) -> str:
        return "boolean"


@dataclass(frozen=True)
class IntKind:
    @property
    def kind_class(self) -> str:
        return INT

    def render(self) -> str:
        return "{Int}"


FORMULA_KIND = FormulaKind()
INT_KIND = IntKind()

Kind = ExprKind | FormulaKind | IntKind


# ---------------------------------------------------------------------------
# AST nodes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Node:
    nid: int


@dataclass(frozen=True)
class Hole(Node):
    kind_class: str  # expr | formula | int


@dataclass(frozen=True)
class SetLeaf(Node):
    ref: str  # sig, field, or bound variable name, or univ/iden/none


@dataclass(frozen=True)
class UnRel(Node):
    op: str  # ~ ^ *
    operand: Node


@dataclass(frozen=True)
class MultFormula(Node):
    op: str  # no lone some one
    operand: Node


@dataclass(frozen=True)
class Not(Node):
    operand: Node


@dataclass(frozen=True)
class BinRel(Node):
    op: str  # & + - ++ <: :> . ->
    left: Node
    right: Node


@dataclass(frozen=True)
class Compare(Node):
    op: str  # in = !in !=
    left: Node
    right: Node


@dataclass(frozen=True)
class IntCompare(Node):
    op: str  # < > =< >=
    left: Node
    right: Node


@dataclass(frozen=True)
class Card(Node):
    operand: Node


@dataclass(frozen=True)
class IntLit(Node):
    value: int


@dataclass(frozen=True)
class Prop(Node):
    op: str  # or and iff =>
    left: Node
    right: Node


@dataclass(frozen=True)
class Quant(Node):
    quant: str  # all no some lone one
    var: str
    domain: Node
    body: Node


@dataclass(frozen=True)
class TempUn(Node):
    op: str  # always eventually after before historically once
    operand: Node


@dataclass(frozen=True)
class Prime(Node):
    operand: Node


@dataclass(frozen=True)
class TempBin(Node):
    op: str  # since triggered until releases ;
    left: Node
    right: Node


@dataclass(frozen=True)
class PredCall(Node):
    pred: str


def children(node: Node) -> tuple[Node, ...]:
    match node:
        case Hole() | SetLeaf() | IntLit() | PredCall():
            return ()
        case UnRel(operand=x) | MultFormula(operand=x) | Not(operand=x) | Card(operand=x) \
                | TempUn(operand=x) | Prime(operand=x):
            return (x,)
        case BinRel(left=l, right=r) | Compare(left=l, right=r) | IntCompare(left=l, right=r) \
                | Prop(left=l, right=r) | TempBin(left=l, right=r):
            return (l, r)
        case Quant(domain=d, body=b):
            return (d, b)
    raise TypeError(f"not a node: {node!r}")


def with_children(node: Node, kids: tuple[Node, ...]) -> Node:
    match node:
        case Hole() | SetLeaf() | IntLit() | PredCall():
            assert not kids
            return node
        case UnRel() | MultFormula() | Not() | Card() | TempUn() | Prime():
            return replace(node, operand=kids[0])
        case BinRel() | Compare() | IntCompare() | Prop() | TempBin():
            return replace(node, left=kids[0], right=kids[1])
        case Quant():
            return replace(node, domain=kids[0], body=kids[1])
    raise TypeError(f"not a node: {node!r}")


def walk(node: Node) -> Iterator[Node]:
    """Preorder traversal."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(children(n)))


def find_node(root: Node, nid: int) -> Node:
    for n in walk(root):
        if n.nid == nid:
            return n
    raise UnknownNode(nid)


def contains_node(root: Node, nid: int) -> bool:
    return any(n.nid == nid for n in walk(root))


def replace_node(root: Node, nid: int, new: Node) -> Node:
    """Path-copying replacement; untouched subtrees are shared."""
    if root.nid == nid:
        return new
    kids = children(root)
    for i, kid in enumerate(kids):
        if contains_node(kid, nid):
            new_kids = kids[:i] + (replace_node(kid, nid, new),) + kids[i + 1:]
            return with_children(root, new_kids)
    raise UnknownNode(nid)


def parent_of(root: Node, nid: int) -> tuple[Node, int] | None:
    """(parent node, child slot index), or None when nid is the root."""
    if root.nid == nid:
        return None
    stack = [root]
    while stack:
        n = stack.pop()
        for i, kid in enumerate(children(n)):
            if kid.nid == nid:
                return (n, i)
            stack.append(kid)
    raise UnknownNode(nid)


def holes_in(root: Node) -> tuple[Hole, ...]:
    return tuple(n for n in walk(root) if isinstance(n, Hole))


def node_count(root: Node) -> int:
    return sum(1 for _ in walk(root))


def produced_class(node: Node) -> str:
    """The grammatical kind class a node's form yields, independent of typing."""
    match node:
        case Hole(kind_class=k):
            return k
        case SetLeaf() | UnRel() | BinRel() | Prime():
            return EXPR
        case Card() | IntLit():
            return INT
        case _:
            return FORMULA


def slot_classes(node: Node) -> tuple[str, ...]:
    """Kind classes each child slot of a node's form demands."""
    match node:
        case UnRel() | MultFormula() | Card() | Prime():
            return (EXPR,)
        case Not() | TempUn():
            return (FORMULA,)
        case BinRel() | Compare():
            return (EXPR, EXPR)
        case IntCompare():
            return (INT, INT)
        case Prop() | TempBin():
            return (FORMULA, FORMULA)
        case Quant():
            return (EXPR, FORMULA)
        case _:
            return ()


def same_shape(a: Node, b: Node) -> bool:
    """Structural equality up to node ids."""
    if type(a) is not type(b):
        return False
    ka, kb = children(a), children(b)
    if len(ka) != len(kb):
        return False
    match a, b:
        case Hole(kind_class=x), Hole(kind_class=y):
            if x != y:
                return False
        case SetLeaf(ref=x), SetLeaf(ref=y):
            if x != y:
                return False
        case IntLit(value=x), IntLit(value=y):
            if x != y:
                return False
        case PredCall(pred=x), PredCall(pred=y):
            if x != y:
                return False
        case Quant(), Quant():
            if a.quant != b.quant or a.var != b.var:
                return False
        case _:
            opa = getattr(a, "op", None)
            if opa != getattr(b, "op", None):
                return False
    return all(same_shape(x, y) for x, y in zip(ka, kb))


# ---------------------------------------------------------------------------
# Declarations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldDecl:
    name: str
    owner: str
    columns: tuple[str, ...]  # right-hand side sig names, length >= 1
    mult: str = "set"  # applies to the final column
    mutable: bool = False

    @property
    def arity(self) -> int:
        return 1 + len(self.columns)


@dataclass(frozen=True)
class SigDecl:
    name: str
    mutable: bool = False
    abstract: bool = False
    mult: str | None = None  # one | lone | some
    extends: str | None = None
    subsets: tuple[str, ...] = ()  # the `in` form; exclusive with extends
    fields: tuple[FieldDecl, ...] = ()
    trivia: tuple[str, ...] = ()

    @property
    def is_subset(self) -> bool:
        return bool(self.subsets)


@dataclass(frozen=True)
class PredDecl:
    name: str
    body: Node
    trivia: tuple[str, ...] = ()


@dataclass(frozen=True)
class CommandDecl:
    """A run/check line, retained verbatim and never executed."""

    text: str
    trivia: tuple[str, ...] = ()


@dataclass(frozen=True)
class ModelConfig:
    max_arity: int = 4
    strict_disjoint_minus: bool = True


@dataclass(frozen=True)
class Model:
    sigs: tuple[SigDecl, ...] = ()
    preds: tuple[PredDecl, ...] = ()
    commands: tuple[CommandDecl, ...] = ()
    next_node_id: int = 0
    config: ModelConfig = field(default_factory=ModelConfig)

    def sig(self, name: str) -> SigDecl:
        for s in self.sigs:
            if s.name == name:
                return s
        raise UnknownSig(name)

    def maybe_sig(self, name: str) -> SigDecl | None:
        return next((s for s in self.sigs if s.name == name), None)

    def field_decl(self, name: str) -> FieldDecl | None:
        for s in self.sigs:
            for f in s.fields:
                if f.name == name:
                    return f
        return None

    def pred(self, name: str) -> PredDecl:
        for p in self.preds:
            if p.name == name:
                return p
        raise UnknownRef(name)

    def pred_of_node(self, nid: int) -> PredDecl:
        for p in self.preds:
            if contains_node(p.body, nid):
                return p
        raise UnknownNode(nid)

    def find(self, nid: int) -> Node:
        for p in self.preds:
            for n in walk(p.body):
                if n.nid == nid:
                    return n
        raise UnknownNode(nid)

    def with_body(self, pred_name: str, body: Node, next_node_id: int | None = None) -> "Model":
        preds = tuple(replace(p, body=body) if p.name == pred_name else p for p in self.preds)
        nid = self.next_node_id if next_node_id is None else next_node_id
        return replace(self, preds=preds, next_node_id=nid)

    def fresh_node_id(self) -> tuple["Model", int]:
        """Issue one id; strictly greater than every id previously issued."""
        nid = self.next_node_id
        return replace(self, next_node_id=nid + 1), nid


def scope_at(model: Model, root: Node, nid: int) -> tuple[tuple[str, Node], ...]:
    """Quantifier bindings (var, domain node) enclosing node `nid`, outermost first."""

    def search(node: Node, env: tuple[tuple[str, Node], ...]):
        if node.nid == nid:
            return env
        if isinstance(node, Quant):
            hit = search(node.domain, env)
            if hit is not None:
                return hit
            return search(node.body, env + ((node.var, node.domain),))
        for kid in children(node):
            hit = search(kid, env)
            if hit is not None:
                return hit
        return None

    found = search(root, ())
    if found is None:
        raise UnknownNode(nid)
    return found


# ---------------------------------------------------------------------------
# Primitive signatures and declared types
# ---------------------------------------------------------------------------

class Universe:
    """Primitive-sig decomposition of a model's signature hierarchy.

    Primitive sigs partition the atom universe: one per leaf of the extends
    forest, plus a `<name>$remainder` per non-abstract sig with extends
    children. Subset (`in`) sigs map onto the union of their parents' prims,
    which is what makes e.g. two subsets of the same parent type-comparable.
    """

    def __init__(self, model: Model):
        self.model = model
        self._prims: dict[str, frozenset[str]] = {}
        self._decl_cache: dict[str, RelType] = {}
        self._build()

    def _build(self):
        sigs = {s.name: s for s in self.model.sigs}
        ext_children: dict[str, list[str]] = {name: [] for name in sigs}
        for s in self.model.sigs:
            if s.extends:
                ext_children[s.extends].append(s.name)

        own: dict[str, frozenset[str]] = {}

        def prims_of_extends(name: str) -> frozenset[str]:
            if name in own:
                return own[name]
            sig = sigs[name]
            kids = ext_children[name]
            if not kids:
                result = frozenset({name})
            else:
                result = frozenset().union(*(prims_of_extends(k) for k in kids))
                if not sig.abstract:
                    result |= {f"{name}$remainder"}
            own[name] = result
            return result

        for s in self.model.sigs:
            if not s.is_subset:
                prims_of_extends(s.name)

        # Subset sigs may chain through other subset sigs; resolve transitively.
        def resolve(name: str, seen: frozenset[str]) -> frozenset[str]:
            if name in self._prims:
                return self._prims[name]
            sig = sigs.get(name)
            if sig is None:
                raise UnknownSig(name)
            if not sig.is_subset:
                result = own[name]
            else:
                if name in seen:
                    raise ParseError(f"cycle through subset sig '{name}'",
                                     SourceSpan(0, 0, 1, 1))
                result = frozenset().union(
                    *(resolve(p, seen | {name}) for p in sig.subsets))
            self._prims[name] = result
            return result

        for s in self.model.sigs:
            resolve(s.name, frozenset())

        self.all_prims: frozenset[str] = frozenset().union(
            *(self._prims[s.name] for s in self.model.sigs if not s.is_subset)
        ) if self.model.sigs else frozenset()

    def prims(self, sig_name: str) -> frozenset[str]:
        if sig_name not in self._prims:
            raise UnknownSig(sig_name)
        return self._prims[sig_name]

    def univ_type(self) -> RelType:
        return RelType.of(1, ((p,) for p in self.all_prims))

    def iden_type(self) -> RelType:
        """Over-approximated as univ x univ; exact diagonal typing adds no
        error-prevention power here."""
        return RelType.of(2, ((p, q) for p in self.all_prims for q in self.all_prims))

    def none_type(self) -> RelType:
        return RelType(1, frozenset())

    def sig_type(self, name: str) -> RelType:
        return RelType.of(1, ((p,) for p in self.prims(name)))

    def field_type(self, f: FieldDecl) -> RelType:
        col_prims = [self.prims(f.owner)] + [self.prims(c) for c in f.columns]
        return RelType.of(len(col_prims), itertools.product(*col_prims))

    def declared_type(self, ref: str, scope: dict[str, RelType] | None = None) -> RelType:
        """Bounding type of a sig, field, builtin, or in-scope variable."""
        if scope and ref in scope:
            return scope[ref]
        cached = self._decl_cache.get(ref)
        if cached is not None:
            return cached
        if ref == "univ":
            t = self.univ_type()
        elif ref == "iden":
            t = self.iden_type()
        elif ref == "none":
            t = self.none_type()
        elif self.model.maybe_sig(ref) is not None:
            t = self.sig_type(ref)
        else:
            fd = self.model.field_decl(ref)
            if fd is None:
                raise UnknownRef(ref)
            t = self.field_type(fd)
        self._decl_cache[ref] = t
        return t


def prims(model: Model, sig_name: str) -> frozenset[str]:
    return Universe(model).prims(sig_name)


def declared_type(model: Model, ref: str, scope: dict[str, RelType] | None = None) -> RelType:
    return Universe(model).declared_type(ref, scope)


# ---------------------------------------------------------------------------
# Model validation
# ---------------------------------------------------------------------------

def validate_model(model: Model) -> None:
    """Check the declaration-level invariants; raises ParseError/UnknownSig."""
    span = SourceSpan(0, 0, 1, 1)
    names: set[str] = set()
    for s in model.sigs:
        if s.name in names:
            raise ParseError(f"duplicate sig name '{s.name}'", span)
        names.add(s.name)

    sigs = {s.name: s for s in model.sigs}
    for s in model.sigs:
        if s.extends and s.subsets:
            raise ParseError(f"sig '{s.name}' cannot both extend and be a subset", span)
        parents = ([s.extends] if s.extends else []) + list(s.subsets)
        for p in parents:
            if p not in sigs:
                raise UnknownSig(p)
        if s.extends and sigs[s.extends].is_subset:
            raise ParseError(
                f"sig '{s.name}' extends subset sig '{s.extends}'", span)

    # Extends graph is a forest: every chain terminates at a top-level sig.
    for s in model.sigs:
        seen = {s.name}
        cur = s
        while cur.extends:
            if cur.extends in seen:
                raise ParseError(f"extends cycle through '{cur.extends}'", span)
            seen.add(cur.extends)
            cur = sigs[cur.extends]

    for s in model.sigs:
        if s.is_subset and not s.subsets:
            raise ParseError(f"subset sig '{s.name}' has no parents", span)
        fnames = set()
        for f in s.fields:
            if f.name in fnames:
                raise ParseError(f"duplicate field '{f.name}' in sig '{s.name}'", span)
            fnames.add(f.name)
            for c in f.columns:
                if c not in sigs:
                    raise UnknownSig(c)

    # Universe construction validates subset cycles as a side effect.
    Universe(model)

    pnames = set()
    for p in model.preds:
        if p.name in pnames:
            raise ParseError(f"duplicate pred name '{p.name}'", span)
        pnames.add(p.name)

    seen_ids: set[int] = set()
    for p in model.preds:
        for n in walk(p.body):
            if n.nid in seen_ids:
                raise ParseError(f"duplicate node id {n.nid}", span)
            seen_ids.add(n.nid)
            if n.nid >= model.next_node_id:
                raise ParseError(
                    f"node id {n.nid} not below next_node_id {model.next_node_id}", span)
