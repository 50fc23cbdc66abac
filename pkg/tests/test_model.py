"""Core model: primitive-sig decomposition, declared types, node ids, trees."""
import pytest

from alloyblocks import declared_type, parse_model, prims
from alloyblocks import model as M
from alloyblocks.errors import ParseError, UnknownRef, UnknownSig
from alloyblocks.model import Model, RelType, Universe


def test_prims_subset_sigs_inherit_parent_prims(trash_model):
    # subset sigs land on the parent's primitive type, which is what makes
    # `x !in Protected` with x : File typable
    assert prims(trash_model, "Trash") == {"File"}
    assert prims(trash_model, "Protected") == {"File"}


def test_prims_top_level_leaf_is_itself(trash_model):
    assert prims(trash_model, "File") == {"File"}


def test_prims_extends_forest_with_remainder():
    m = parse_model("sig A {}\nsig B extends A {}\nsig C extends A {}\n")
    # hand enumeration: extends-forest leaves B, C plus the remainder of
    # non-abstract A
    assert prims(m, "A") == {"B", "C", "A$remainder"}
    assert prims(m, "B") == {"B"}


def test_prims_abstract_parent_has_no_remainder():
    m = parse_model("abstract sig A {}\nsig B extends A {}\nsig C extends A {}\n")
    assert prims(m, "A") == {"B", "C"}


def test_prims_partition_property(trash_model):
    m = parse_model(
        "abstract sig T {}\nabstract sig U extends T {}\nsig U1 extends U {}\n"
        "sig U2 extends U {}\nsig V2 extends T {}\nsig W {}\nsig Sub in W {}\n")
    uni = Universe(m)
    tops = [s.name for s in m.sigs if not s.is_subset and s.extends is None]
    union = frozenset().union(*(uni.prims(t) for t in tops))
    assert union == uni.all_prims
    # extends-siblings are disjoint
    assert not (uni.prims("U") & uni.prims("V2"))
    assert not (uni.prims("U1") & uni.prims("U2"))


def test_prims_subset_monotone():
    m = parse_model("sig Base {}\nsig L1 in Base {}\nsig L2 in Base {}\n"
                    "sig Both in L1 + L2 {}\n")
    assert prims(m, "Both") <= prims(m, "L1") | prims(m, "L2")
    assert prims(m, "L1") <= prims(m, "Base")


def test_prims_unknown_sig(trash_model):
    with pytest.raises(UnknownSig):
        prims(trash_model, "Nope")


def test_declared_type_field(trash_model):
    assert declared_type(trash_model, "link") == RelType.of(2, [("File", "File")])
    assert declared_type(trash_model, "link").render() == "{this/File->this/File}"


def test_declared_type_sig(trash_model):
    assert declared_type(trash_model, "File") == RelType.of(1, [("File",)])


def test_declared_type_univ_is_union_of_prims(trash_model):
    # trash model has a single primitive
    assert declared_type(trash_model, "univ") == RelType.of(1, [("File",)])


def test_declared_type_builtins(trash_model):
    iden = declared_type(trash_model, "iden")
    assert iden.arity == 2 and iden.products == {("File", "File")}
    none = declared_type(trash_model, "none")
    assert none.arity == 1 and none.is_empty


def test_declared_type_variable_scope(trash_model):
    t = RelType.of(1, [("File",)])
    assert declared_type(trash_model, "x", {"x": t}) == t
    with pytest.raises(UnknownRef):
        declared_type(trash_model, "x")


def test_declared_type_multicolumn_field():
    m = parse_model("sig M {}\nsig N {}\nsig K { table : M -> lone N }\n")
    t = declared_type(m, "table")
    assert t.arity == 3
    assert t.products == {("K", "M", "N")}


def test_fresh_node_ids_monotone_never_reused():
    m = Model()
    m, a = m.fresh_node_id()
    assert a == 0
    m, b = m.fresh_node_id()
    m, c = m.fresh_node_id()
    assert (b, c) == (1, 2)
    m, d = m.fresh_node_id()
    assert d == 3  # deletion elsewhere never hands back ids


def test_reltype_canonical_and_deterministic():
    t1 = RelType.of(2, [("B", "A"), ("A", "B"), ("B", "A")])
    t2 = RelType.of(2, [("A", "B"), ("B", "A")])
    assert t1 == t2
    assert t1.render() == "{this/A->this/B, this/B->this/A}"


def test_reltype_ops():
    r = RelType.of(2, [("A", "B"), ("B", "C")])
    assert r.reverse() == RelType.of(2, [("B", "A"), ("C", "B")])
    assert r.compose(r) == RelType.of(2, [("A", "C")])
    s = RelType.of(1, [("A",)])
    assert s.concat(s) == RelType.of(2, [("A", "A")])
    assert r.restrict_first(frozenset({"A"})) == RelType.of(2, [("A", "B")])
    assert r.restrict_last(frozenset({"C"})) == RelType.of(2, [("B", "C")])


def test_reltype_closure_chain():
    chain = RelType.of(2, [("A", "B"), ("B", "C"), ("C", "D")])
    closed = chain.closure()
    assert ("A", "D") in closed.products
    assert ("A", "C") in closed.products
    assert closed.products >= chain.products


def test_tree_replace_shares_structure(trash_model):
    body = trash_model.preds[0].body
    target = M.children(body)[1]  # the implication
    hole = M.Hole(999, M.FORMULA)
    new = M.replace_node(body, target.nid, hole)
    assert M.find_node(new, 999) is hole
    # untouched domain subtree is the same object
    assert M.children(new)[0] is M.children(body)[0]


def test_scope_at_nested_quantifiers():
    m = parse_model("sig A {}\npred p { all x : A | all y : A | x in y }\n")
    body = m.preds[0].body
    inner_cmp = [n for n in M.walk(body) if isinstance(n, M.Compare)][0]
    env = M.scope_at(m, body, inner_cmp.nid)
    assert [v for v, _ in env] == ["x", "y"]


def test_validation_duplicate_sig():
    with pytest.raises(ParseError, match="duplicate sig"):
        parse_model("sig A {}\nsig A {}\n")


def test_validation_extends_cycle():
    with pytest.raises(ParseError, match="cycle"):
        parse_model("sig A extends B {}\nsig B extends A {}\n")


def test_validation_extends_subset_forbidden():
    with pytest.raises(ParseError, match="extends subset"):
        parse_model("sig A {}\nsig B in A {}\nsig C extends B {}\n")


def test_validation_unknown_parent():
    with pytest.raises(UnknownSig):
        parse_model("sig A extends Ghost {}\n")


def test_validation_duplicate_field():
    with pytest.raises(ParseError, match="duplicate field"):
        parse_model("sig A { f : set A, f : set A }\n")


def test_trees_have_unique_ids(trash_model):
    seen = set()
    for p in trash_model.preds:
        for n in M.walk(p.body):
            assert n.nid not in seen
            seen.add(n.nid)
            assert n.nid < trash_model.next_node_id
