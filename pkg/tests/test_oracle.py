"""The brute-force completion oracle and its kind-level fast path."""
import pytest

from alloyblocks import parse_fragment, parse_model
from alloyblocks import model as M
from alloyblocks.errors import BudgetExceeded
from alloyblocks.model import RelType, SetLeaf
from alloyblocks.oracle import Oracle, completion_exists, enumerate_completions
from alloyblocks.typesys import TypeContext

FILE1 = RelType.of(1, [("File",)])


def frag(model, text, kind=M.FORMULA, scope=None):
    return parse_fragment(text, kind, scope=scope, model=model)


def rhs_leaf_refs(completions):
    refs = set()
    for node in completions:
        rhs = node.right
        if isinstance(rhs, SetLeaf):
            refs.add(rhs.ref)
    return refs


def test_depth1_negated_membership_rhs(trash_model):
    node = frag(trash_model, "x !in (?)", scope={"x": None})
    completions = enumerate_completions(trash_model, {"x": FILE1}, node, depth=1)
    refs = rhs_leaf_refs(completions)
    assert {"Protected", "Trash", "File", "univ"} <= refs
    assert "link" not in refs
    assert "none" not in refs  # no overlap with x
    # every completion type-checks
    ctx = TypeContext(trash_model)
    for c in completions:
        assert ctx.typeof(c, {"x": FILE1}) == M.FORMULA_KIND


def test_depth1_formula_hole_under_always(trash_model):
    node = frag(trash_model, "always (?)")
    completions = enumerate_completions(trash_model, None, node, depth=2)
    shapes = {type(c.operand).__name__ for c in completions}
    assert "MultFormula" in shapes
    assert "PredCall" in shapes
    assert "SetLeaf" not in shapes  # bare sigs produce sets, not booleans


def test_depth0_hole_free_is_identity(trash_model):
    node = frag(trash_model, "some File")
    completions = enumerate_completions(trash_model, None, node, depth=0)
    assert len(completions) == 1
    assert M.same_shape(completions[0], node)


def test_depth0_with_holes_has_no_completions(trash_model):
    node = frag(trash_model, "some (?)")
    assert enumerate_completions(trash_model, None, node, depth=0) == []


def test_budget_exceeded(trash_model):
    node = frag(trash_model, "(?) and ((?) or (?))")
    with pytest.raises(BudgetExceeded):
        enumerate_completions(trash_model, None, node, depth=2, budget=50)


def test_expr_completions_keep_expr_class(trash_model):
    node = frag(trash_model, "File & (?)", kind=M.EXPR)
    completions = enumerate_completions(trash_model, None, node, depth=1)
    ctx = TypeContext(trash_model)
    for c in completions:
        kind = ctx.typeof(c)
        assert isinstance(kind, M.ExprKind)
        assert kind.rel.arity == 1


def test_completion_ids_are_fresh_and_unique(trash_model):
    node = frag(trash_model, "(?) in (?)")
    for c in enumerate_completions(trash_model, None, node, depth=1):
        ids = [n.nid for n in M.walk(c)]
        assert len(ids) == len(set(ids))


def test_kind_dp_agrees_with_enumeration(trash_model):
    # existence via the kind-level dynamic program must match literal
    # enumeration; the per-operator rules are compositional in kinds
    cases = [
        ("x !in (?)", {"x": FILE1}, 1),
        ("always (?)", None, 1),
        ("always (?)", None, 2),
        ("(?) in (none -> (?))", None, 1),
        ("some ((?) & link)", None, 1),
        ("#(?) > (?)", None, 1),
        ("all y : (?) | y in (?)", None, 1),
    ]
    for text, scope, depth in cases:
        node = frag(trash_model, text, scope={k: None for k in (scope or {})})
        listed = enumerate_completions(trash_model, scope, node, depth=depth,
                                       budget=2_000_000)
        witness = completion_exists(trash_model, scope, node, depth=depth)
        assert (witness is not None) == bool(listed), (text, depth)
        if witness is not None:
            ctx = TypeContext(trash_model)
            kind = ctx.typeof(witness, scope or {})
            assert kind.kind_class == M.produced_class(node)


def test_witness_quantifier_body_uses_bound_variable(trash_model):
    # the DP must thread quantifier scopes: a domain choice types the body var
    node = frag(trash_model, "all y : link.(?) | y = (?)")
    witness = completion_exists(trash_model, None, node, depth=2)
    assert witness is not None
    ctx = TypeContext(trash_model)
    assert ctx.typeof(witness) == M.FORMULA_KIND


def test_oracle_trees_depth_one_are_leaves(trash_model):
    oracle = Oracle(trash_model)
    trees = oracle.trees(1, frozenset())
    assert all(not M.children(t) for t in trees)
    refs = {t.ref for t in trees if isinstance(t, SetLeaf)}
    assert {"File", "Trash", "Protected", "link", "univ", "iden", "none"} <= refs


def test_oracle_kinds_monotone_in_depth(trash_model):
    oracle = Oracle(trash_model)
    k1 = set(oracle.kinds((), 1))
    k2 = set(oracle.kinds((), 2))
    k3 = set(oracle.kinds((), 3))
    assert k1 <= k2 <= k3
    assert M.FORMULA_KIND in k2
    assert M.INT_KIND in k1
