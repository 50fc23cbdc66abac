"""Parser and pretty-printer for the supported Alloy-6 subset.

The concrete syntax extension `(?)` denotes a hole; its kind class (expr,
formula, or int) is inferred from the grammatical position, never annotated
in the text. Pred bodies are blocks of juxtaposed formulas which are folded
into left-nested conjunctions, matching how the Analyzer treats multiple
constraints in one block.

Hole-free output of print_model is grammatical Alloy.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace

from . import model as M
from .errors import ParseError, SourceSpan, UnknownRef
from .model import (
    BinRel, Card, CommandDecl, Compare, FieldDecl, Hole, IntCompare, IntLit,
    Model, ModelConfig, MultFormula, Node, Not, PredCall, PredDecl, Prime,
    Prop, Quant, SetLeaf, SigDecl, TempBin, TempUn, UnRel,
)

# ---------------------------------------------------------------------------
# Operator precedence
# ---------------------------------------------------------------------------

QUANT_TIER = 0
OR_TIER = 10
IFF_TIER = 20
IMPLIES_TIER = 30
AND_TIER = 40
TEMPBIN_TIER = 50
FORMULA_UNARY_TIER = 60   # ! and the unary temporal operators
COMPARE_TIER = 70
MULT_TIER = 80            # no/lone/some/one as formula-producing tests
ADD_TIER = 90             # + -
CARD_TIER = 100
OVERRIDE_TIER = 110       # ++
INTERSECT_TIER = 120
ARROW_TIER = 130
RESTRICT_TIER = 140       # <: :>
JOIN_TIER = 150
REL_UNARY_TIER = 160      # ~ ^ * and postfix '
ATOM_TIER = 1000

INFIX_TIERS: dict[str, int] = {
    "or": OR_TIER, "iff": IFF_TIER, "=>": IMPLIES_TIER, "and": AND_TIER,
    "since": TEMPBIN_TIER, "triggered": TEMPBIN_TIER, "until": TEMPBIN_TIER,
    "releases": TEMPBIN_TIER, ";": TEMPBIN_TIER,
    "in": COMPARE_TIER, "=": COMPARE_TIER, "!in": COMPARE_TIER, "!=": COMPARE_TIER,
    "<": COMPARE_TIER, ">": COMPARE_TIER, "=<": COMPARE_TIER, ">=": COMPARE_TIER,
    "+": ADD_TIER, "-": ADD_TIER,
    "++": OVERRIDE_TIER, "&": INTERSECT_TIER, "->": ARROW_TIER,
    "<:": RESTRICT_TIER, ":>": RESTRICT_TIER, ".": JOIN_TIER,
}

RIGHT_ASSOC = {"=>", "since", "triggered", "until", "releases", ";"}

PREFIX_TIERS: dict[str, int] = {
    "!": FORMULA_UNARY_TIER,
    **{op: FORMULA_UNARY_TIER for op in M.TEMPUN_OPS},
    **{op: MULT_TIER for op in M.MULT_OPS},
    "#": CARD_TIER,
    "~": REL_UNARY_TIER, "^": REL_UNARY_TIER, "*": REL_UNARY_TIER,
}

DOMAIN_TIER = MULT_TIER  # quantifier domains are exprs; comparisons end them


def infix_tier(op: str) -> int:
    return INFIX_TIERS[op]


def node_tier(node: Node) -> int:
    """Binding tier a finished node prints at."""
    match node:
        case Quant():
            return QUANT_TIER
        case Prop(op=op) | TempBin(op=op) | Compare(op=op) | IntCompare(op=op) | BinRel(op=op):
            return INFIX_TIERS[op]
        case Not() | TempUn():
            return FORMULA_UNARY_TIER
        case MultFormula():
            return MULT_TIER
        case Card():
            return CARD_TIER
        case UnRel() | Prime():
            return REL_UNARY_TIER
        case _:
            return ATOM_TIER


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

KEYWORDS = frozenset(
    ["sig", "var", "abstract", "in", "extends", "pred", "run", "check", "not",
     "set", "univ", "iden", "none"]
    + list(M.QUANTIFIERS) + list(M.PROP_OPS) + list(M.TEMPUN_OPS)
    + list(M.TEMPBIN_OPS[:-1])  # ';' is a symbol
)

SYMBOLS = ["(?)", "++", "<:", ":>", "->", "=>", "=<", ">=",
           "{", "}", "(", ")", ":", ",", "|", ".", "&", "+", "-", "~", "^",
           "*", "!", "#", "'", ";", "=", "<", ">"]

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
INT_RE = re.compile(r"[0-9]+")


@dataclass(frozen=True)
class Token:
    kind: str  # ident | int | keyword | symbol | hole | eof
    value: str
    span: SourceSpan
    trivia: tuple[str, ...] = ()  # comment lines immediately preceding


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    pending: list[str] = []

    def span(start, start_line, start_col, end, end_line, end_col):
        return SourceSpan(start, end, start_line, start_col, end_line, end_col)

    def advance(k: int):
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            advance(1)
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            j = n if j == -1 else j
            pending.append(text[i:j].rstrip())
            advance(j - i)
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j == -1:
                raise ParseError("unterminated block comment",
                                 span(i, line, col, n, line, col))
            pending.append(text[i:j + 2])
            advance(j + 2 - i)
            continue

        start, start_line, start_col = i, line, col
        m = IDENT_RE.match(text, i)
        if m:
            word = m.group()
            advance(len(word))
            kind = "keyword" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word,
                                span(start, start_line, start_col, i, line, col),
                                tuple(pending)))
            pending = []
            continue
        m = INT_RE.match(text, i)
        if m:
            word = m.group()
            advance(len(word))
            tokens.append(Token("int", word,
                                span(start, start_line, start_col, i, line, col),
                                tuple(pending)))
            pending = []
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, i):
                advance(len(sym))
                kind = "hole" if sym == "(?)" else "symbol"
                tokens.append(Token(kind, sym,
                                    span(start, start_line, start_col, i, line, col),
                                    tuple(pending)))
                pending = []
                break
        else:
            raise ParseError(f"unexpected character {c!r}",
                             span(i, line, col, i + 1, line, col + 1),
                             ("declaration", "expression"))
    tokens.append(Token("eof", "", span(n, line, col, n, line, col), tuple(pending)))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

# Placeholder leaf for an identifier before name resolution.
@dataclass(frozen=True)
class _NameLeaf(Node):
    name: str
    span: SourceSpan | None = None


EXPR_STARTERS = ("expression", "signature or relation name", "quantifier",
                 "unary operator", "integer literal", "hole")


class _Parser:
    def __init__(self, text: str, config: ModelConfig):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.next_id = 0
        self.config = config

    # -- token plumbing ----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok.value == value and tok.kind in ("keyword", "symbol")

    def accept(self, value: str) -> Token | None:
        if self.at(value):
            return self.next()
        return None

    def expect(self, value: str, expected: tuple[str, ...]) -> Token:
        tok = self.peek()
        if not self.at(value):
            raise ParseError(f"found {tok.value!r}", tok.span, expected)
        return self.next()

    def fresh(self) -> int:
        nid = self.next_id
        self.next_id += 1
        return nid

    # -- declarations ------------------------------------------------------

    def parse_model(self) -> Model:
        sigs: list[SigDecl] = []
        preds: list[PredDecl] = []
        commands: list[CommandDecl] = []
        while self.peek().kind != "eof":
            tok = self.peek()
            trivia = tok.trivia
            if tok.value in ("var", "abstract", "sig") or \
                    (tok.value in M.SIG_MULTS and self._sig_ahead()):
                sigs.append(self._sig_decl(trivia))
            elif tok.value == "pred":
                preds.append(self._pred_decl(trivia, [s.name for s in sigs]))
            elif tok.value in ("run", "check"):
                commands.append(self._command(trivia))
            else:
                raise ParseError(f"found {tok.value!r}", tok.span,
                                 ("sig declaration", "pred declaration", "run/check command"))
        model = Model(sigs=tuple(sigs), preds=tuple(preds), commands=tuple(commands),
                      next_node_id=self.next_id, config=self.config)
        resolved = _resolve_model(model)
        M.validate_model(resolved)
        return resolved

    def _sig_ahead(self) -> bool:
        k = 0
        while self.peek(k).value in ("var", "abstract", "one", "lone", "some"):
            k += 1
        return self.peek(k).value == "sig"

    def _sig_decl(self, trivia) -> SigDecl:
        mutable = abstract = False
        mult = None
        while True:
            if self.accept("var"):
                mutable = True
            elif self.accept("abstract"):
                abstract = True
            elif self.peek().value in M.SIG_MULTS and self.peek().kind == "keyword" \
                    and mult is None and self._sig_ahead():
                mult = self.next().value
            else:
                break
        self.expect("sig", ("sig keyword",))
        name = self._ident("sig name")
        extends = None
        subsets: tuple[str, ...] = ()
        if self.accept("extends"):
            extends = self._ident("parent sig name")
        elif self.accept("in"):
            parents = [self._ident("parent sig name")]
            while self.accept("+"):
                parents.append(self._ident("parent sig name"))
            subsets = tuple(parents)
        self.expect("{", ("'{'",))
        fields: list[FieldDecl] = []
        if not self.at("}"):
            fields.append(self._field_decl(name))
            while self.accept(","):
                fields.append(self._field_decl(name))
        self.expect("}", ("'}'", "','"))
        return SigDecl(name=name, mutable=mutable, abstract=abstract, mult=mult,
                       extends=extends, subsets=subsets, fields=tuple(fields),
                       trivia=trivia)

    def _field_decl(self, owner: str) -> FieldDecl:
        mutable = bool(self.accept("var"))
        name = self._ident("field name")
        self.expect(":", ("':'",))
        mult = None
        if self.peek().value in M.FIELD_MULTS and self.peek().kind == "keyword":
            mult = self.next().value
        columns = [self._ident("sig name")]
        while self.accept("->"):
            if mult is not None:
                raise ParseError("multiplicity keyword only allowed before the final column",
                                 self.peek().span, ("sig name",))
            if self.peek().value in M.FIELD_MULTS and self.peek().kind == "keyword":
                mult = self.next().value
            columns.append(self._ident("sig name"))
        if mult is None:
            mult = "one" if len(columns) == 1 else "set"
        return FieldDecl(name=name, owner=owner, columns=tuple(columns),
                         mult=mult, mutable=mutable)

    def _pred_decl(self, trivia, sig_names) -> PredDecl:
        self.expect("pred", ("pred keyword",))
        name = self._ident("pred name")
        self.expect("{", ("'{'",))
        conjuncts: list[Node] = []
        while not self.at("}"):
            if self.peek().kind == "eof":
                raise ParseError("unterminated pred body", self.peek().span, ("'}'",))
            conjuncts.append(self.parse_expr(QUANT_TIER))
        self.expect("}", ("'}'", "formula"))
        if not conjuncts:
            body: Node = Hole(self.fresh(), M.FORMULA)
        else:
            body = conjuncts[0]
            for extra in conjuncts[1:]:
                body = Prop(self.fresh(), "and", body, extra)
        return PredDecl(name=name, body=body, trivia=trivia)

    def _command(self, trivia) -> CommandDecl:
        tok = self.next()  # run | check
        start = tok.span.start
        cmd_line = tok.span.line
        while self.peek().kind != "eof" and self.peek().span.line == cmd_line:
            tok = self.next()
        end = tok.span.end
        return CommandDecl(text=self.text[start:end].strip(), trivia=trivia)

    def _ident(self, what: str) -> str:
        tok = self.peek()
        if tok.kind != "ident":
            raise ParseError(f"found {tok.value!r}", tok.span, (what,))
        return self.next().value

    # -- expressions -------------------------------------------------------

    def parse_expr(self, min_tier: int) -> Node:
        left = self._prefix()
        while True:
            op = self._peek_infix()
            if op is None:
                break
            tier = infix_tier(op)
            if tier < min_tier:
                break
            self._consume_infix(op)
            next_min = tier if op in RIGHT_ASSOC else tier + 1
            right = self.parse_expr(next_min)
            left = self._make_binary(op, left, right)
        return left

    def _peek_infix(self) -> str | None:
        tok = self.peek()
        if tok.kind == "symbol" or tok.kind == "keyword":
            if tok.value in ("!", "not"):
                nxt = self.peek(1)
                if nxt.value in ("in", "="):
                    return "!in" if nxt.value == "in" else "!="
                return None
            if tok.value in INFIX_TIERS:
                # quantifier keywords double as prefix mult ops, never infix
                if tok.value in ("no", "some", "lone", "one"):
                    return None
                return tok.value
        return None

    def _consume_infix(self, op: str):
        if op in ("!in", "!="):
            self.next()  # ! or not
            self.next()  # in or =
        else:
            self.next()

    def _make_binary(self, op: str, left: Node, right: Node) -> Node:
        nid = self.fresh()
        if op in M.PROP_OPS:
            return Prop(nid, op, left, right)
        if op in M.TEMPBIN_OPS:
            return TempBin(nid, op, left, right)
        if op in M.COMPARE_OPS:
            return Compare(nid, op, left, right)
        if op in M.INTCOMPARE_OPS:
            return IntCompare(nid, op, left, right)
        return BinRel(nid, op, left, right)

    def _prefix(self) -> Node:
        tok = self.peek()

        # A negated comparison operator where an operand is expected: report
        # the whole `!in`/`!=` token pair, matching the Analyzer highlight.
        if tok.value in ("!", "not") and self.peek(1).value in ("in", "="):
            nxt = self.peek(1)
            bad = SourceSpan(tok.span.start, nxt.span.end, tok.span.line,
                             tok.span.col, nxt.span.end_line, nxt.span.end_col)
            raise ParseError(f"comparison operator "
                             f"'{'!in' if nxt.value == 'in' else '!='}' needs a left operand",
                             bad, EXPR_STARTERS)

        if tok.value in M.QUANTIFIERS and tok.kind == "keyword" \
                and self.peek(1).kind == "ident" and self.peek(2).value == ":":
            return self._quant()

        if tok.value in ("!", "not") and tok.kind in ("symbol", "keyword"):
            self.next()
            operand = self.parse_expr(FORMULA_UNARY_TIER)
            return Not(self.fresh(), operand)
        if tok.value in M.TEMPUN_OPS and tok.kind == "keyword":
            self.next()
            operand = self.parse_expr(FORMULA_UNARY_TIER)
            return TempUn(self.fresh(), tok.value, operand)
        if tok.value in M.MULT_OPS and tok.kind == "keyword":
            self.next()
            operand = self.parse_expr(MULT_TIER)
            return MultFormula(self.fresh(), tok.value, operand)
        if tok.value == "#":
            self.next()
            operand = self.parse_expr(CARD_TIER)
            return Card(self.fresh(), operand)
        if tok.value in ("~", "^", "*") and tok.kind == "symbol":
            self.next()
            operand = self.parse_expr(REL_UNARY_TIER)
            return UnRel(self.fresh(), tok.value, operand)
        if tok.value == "set" and tok.kind == "keyword":
            raise ParseError("'set' is a declaration multiplicity, not an operator",
                             tok.span, EXPR_STARTERS)
        return self._postfix(self._primary())

    def _postfix(self, node: Node) -> Node:
        while self.at("'"):
            self.next()
            node = Prime(self.fresh(), node)
        return node

    def _quant(self) -> Node:
        q = self.next().value
        var = self._ident("variable name")
        self.expect(":", ("':'",))
        domain = self.parse_expr(DOMAIN_TIER)
        self.expect("|", ("'|'",))
        body = self.parse_expr(QUANT_TIER)
        return Quant(self.fresh(), q, var, domain, body)

    def _primary(self) -> Node:
        tok = self.peek()
        if tok.kind == "hole":
            self.next()
            return Hole(self.fresh(), M.FORMULA)  # class reassigned positionally
        if tok.kind == "ident":
            self.next()
            return _NameLeaf(self.fresh(), tok.value, tok.span)
        if tok.kind == "int":
            self.next()
            return IntLit(self.fresh(), int(tok.value))
        if tok.value in M.BUILTINS and tok.kind == "keyword":
            self.next()
            return SetLeaf(self.fresh(), tok.value)
        if self.at("("):
            self.next()
            inner = self.parse_expr(QUANT_TIER)
            self.expect(")", ("')'",))
            return inner
        raise ParseError(f"found {tok.value if tok.kind != 'eof' else 'end of input'!r}",
                         tok.span, EXPR_STARTERS)


# ---------------------------------------------------------------------------
# Name resolution and hole kind assignment
# ---------------------------------------------------------------------------

def _resolve_model(model: Model) -> Model:
    sig_names = {s.name for s in model.sigs}
    field_names = {f.name for s in model.sigs for f in s.fields}
    pred_names = {p.name for p in model.preds}

    def resolve(node: Node, bound: frozenset[str]) -> Node:
        if isinstance(node, _NameLeaf):
            if node.name in bound:
                return SetLeaf(node.nid, node.name)
            if node.name in sig_names or node.name in field_names:
                return SetLeaf(node.nid, node.name)
            if node.name in pred_names:
                return PredCall(node.nid, node.name)
            raise UnknownRef(node.name, node.span)
        if isinstance(node, Quant):
            return replace(node,
                           domain=resolve(node.domain, bound),
                           body=resolve(node.body, bound | {node.var}))
        kids = tuple(resolve(k, bound) for k in M.children(node))
        return M.with_children(node, kids)

    preds = tuple(
        replace(p, body=assign_hole_classes(resolve(p.body, frozenset()), M.FORMULA))
        for p in model.preds
    )
    return replace(model, preds=preds)


def assign_hole_classes(node: Node, slot_class: str) -> Node:
    """Give every hole the kind class its grammatical position demands."""
    if isinstance(node, Hole):
        return Hole(node.nid, slot_class)
    kids = M.children(node)
    if not kids:
        return node
    classes = M.slot_classes(node)
    new_kids = tuple(assign_hole_classes(k, c) for k, c in zip(kids, classes))
    return M.with_children(node, new_kids)


def parse_model(text: str, config: ModelConfig | None = None) -> Model:
    return _Parser(text, config or ModelConfig()).parse_model()


def parse_fragment(text: str, expected_kind_class: str,
                   scope: dict | None = None,
                   model: Model | None = None) -> Node:
    """Parse a standalone subformula/expression against an existing scope.

    Node ids are allocated locally from 0; the caller re-ids before attaching.
    `scope` supplies bound variable names; `model` supplies sig/field/pred
    names (an empty model otherwise).
    """
    parser = _Parser(text, (model.config if model else None) or ModelConfig())
    node = parser.parse_expr(QUANT_TIER)
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError(f"trailing input {tok.value!r}", tok.span, ("end of fragment",))

    base = model or Model()
    sig_names = {s.name for s in base.sigs}
    field_names = {f.name for s in base.sigs for f in s.fields}
    pred_names = {p.name for p in base.preds}
    bound0 = frozenset(scope or ())

    def resolve(n: Node, bound: frozenset[str]) -> Node:
        if isinstance(n, _NameLeaf):
            if n.name in bound or n.name in sig_names or n.name in field_names:
                return SetLeaf(n.nid, n.name)
            if n.name in pred_names:
                return PredCall(n.nid, n.name)
            raise UnknownRef(n.name, n.span)
        if isinstance(n, Quant):
            return replace(n, domain=resolve(n.domain, bound),
                           body=resolve(n.body, bound | {n.var}))
        return M.with_children(n, tuple(resolve(k, bound) for k in M.children(n)))

    node = resolve(node, bound0)
    got = M.produced_class(node)
    if not isinstance(node, Hole) and got != expected_kind_class:
        from .errors import KindMismatch
        raise KindMismatch(
            f"fragment is {got}-kinded but the slot needs {expected_kind_class}")
    return assign_hole_classes(node, expected_kind_class)


# ---------------------------------------------------------------------------
# Pretty-printer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrintOptions:
    allow_holes: bool = True
    paren_policy: str = "minimal"  # minimal | full


def print_node(node: Node, options: PrintOptions | None = None) -> str:
    options = options or PrintOptions()
    if not options.allow_holes:
        holes = M.holes_in(node)
        if holes:
            from .errors import HolesPresent
            raise HolesPresent(tuple(h.nid for h in holes))
    return _print(node, QUANT_TIER, options.paren_policy == "full")


def _wrap(text: str, needed: bool) -> str:
    return f"({text})" if needed else text


def _print(node: Node, min_tier: int, full: bool) -> str:
    tier = node_tier(node)

    def child(kid: Node, kid_min: int) -> str:
        if full and not isinstance(kid, (SetLeaf, Hole, IntLit, PredCall)):
            return f"({_print(kid, QUANT_TIER, full)})"
        return _print(kid, kid_min, full)

    match node:
        case Hole():
            return "(?)"
        case SetLeaf(ref=r):
            return r
        case IntLit(value=v):
            return str(v)
        case PredCall(pred=p):
            return p
        case Quant(quant=q, var=v, domain=d, body=b):
            text = f"{q} {v} : {child(d, DOMAIN_TIER)} | {child(b, QUANT_TIER)}"
            return _wrap(text, min_tier > tier)
        case Not(operand=x):
            return _wrap(f"!{child(x, FORMULA_UNARY_TIER)}", min_tier > tier)
        case TempUn(op=op, operand=x):
            return _wrap(f"{op} {child(x, FORMULA_UNARY_TIER)}", min_tier > tier)
        case MultFormula(op=op, operand=x):
            return _wrap(f"{op} {child(x, MULT_TIER)}", min_tier > tier)
        case Card(operand=x):
            return _wrap(f"#{child(x, CARD_TIER)}", min_tier > tier)
        case UnRel(op=op, operand=x):
            return _wrap(f"{op}{child(x, REL_UNARY_TIER)}", min_tier > tier)
        case Prime(operand=x):
            inner = child(x, REL_UNARY_TIER)
            if isinstance(x, UnRel) and not full:
                inner = f"({inner})"  # ' binds to the primary: ^x' means ^(x')
            return _wrap(f"{inner}'", min_tier > tier)
        case BinRel(op=".", left=l, right=r):
            text = f"{child(l, tier)}.{child(r, tier + 1)}"
            return _wrap(text, min_tier > tier)
        case Prop() | TempBin() | Compare() | IntCompare() | BinRel():
            op = node.op
            right_assoc = op in RIGHT_ASSOC
            left_min = tier + 1 if right_assoc else tier
            right_min = tier if right_assoc else tier + 1
            text = f"{child(node.left, left_min)} {op} {child(node.right, right_min)}"
            return _wrap(text, min_tier > tier)
    raise TypeError(f"not a node: {node!r}")


def _print_field(f: FieldDecl) -> str:
    var = "var " if f.mutable else ""
    if len(f.columns) == 1:
        rhs = f"{f.mult} {f.columns[0]}"
    else:
        rhs = " -> ".join(f.columns[:-1]) + f" -> {f.mult} {f.columns[-1]}"
    return f"{var}{f.name} : {rhs}"


def _print_sig(s: SigDecl) -> str:
    head = ""
    if s.mutable:
        head += "var "
    if s.abstract:
        head += "abstract "
    if s.mult:
        head += f"{s.mult} "
    head += f"sig {s.name}"
    if s.extends:
        head += f" extends {s.extends}"
    elif s.subsets:
        head += " in " + " + ".join(s.subsets)
    if not s.fields:
        return head + " {}"
    if len(s.fields) == 1:
        return head + " { " + _print_field(s.fields[0]) + " }"
    lines = ",\n  ".join(_print_field(f) for f in s.fields)
    return head + " {\n  " + lines + "\n}"


def print_model(model: Model, options: PrintOptions | None = None) -> str:
    options = options or PrintOptions()
    if not options.allow_holes:
        hole_ids = tuple(h.nid for p in model.preds for h in M.holes_in(p.body))
        if hole_ids:
            from .errors import HolesPresent
            raise HolesPresent(hole_ids)

    sections: list[str] = []
    if model.sigs:
        sections.append("\n".join(
            "\n".join(list(s.trivia) + [_print_sig(s)]) for s in model.sigs))
    if model.preds:
        sections.append("\n".join(
            "\n".join(list(p.trivia)
                      + [f"pred {p.name} {{ {print_node(p.body, options)} }}"])
            for p in model.preds))
    if model.commands:
        sections.append("\n".join(
            "\n".join(list(c.trivia) + [c.text]) for c in model.commands))
    return "\n\n".join(sections) + "\n"
