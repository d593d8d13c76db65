from hypothesis import given

from strategies import types
from toto.subtype import (
    SubtypeQuery, ancestor_chain, derive, is_subtype, mutual_supertype,
    name_tag_type, subtype_check,
)
from toto.syntax import (
    Mu, Prod, RCons, RNil, Sum, TagEntry, TagRef, TagTy, TagTyExt, Tagged, Top,
    TyVar, Var,
)

ROOT = TagEntry(Top())


def rec(*fields):
    T = RNil()
    for label, F in reversed(fields):
        T = RCons(label, F, T)
    return T


def sub(lhs, rhs, gamma=None, sigma=None):
    return subtype_check(SubtypeQuery(lhs, rhs, gamma or {}, sigma or {}))


def test_reflexive_on_open_name():
    assert sub(Tagged(Var("x")), Tagged(Var("x")))


def test_record_width_after_permutation():
    assert sub(rec(("f", Top()), ("g", Top())), rec(("g", Top())))


def test_record_depth():
    sigma = {0: ROOT, 1: TagEntry(Top(), TagRef(0))}
    assert sub(rec(("f", Tagged(TagRef(1)))), rec(("f", Tagged(TagRef(0)))), sigma=sigma)
    assert not sub(rec(("f", Tagged(TagRef(0)))), rec(("f", Tagged(TagRef(1)))), sigma=sigma)


def test_record_missing_field():
    assert not sub(rec(("f", Top())), rec(("g", Top())))


def test_ill_formed_records_are_unrelated():
    bad = RCons("f", Top(), Top())
    assert sub(bad, bad)  # reflexivity does not look inside
    assert not sub(bad, rec(("f", Top())))
    assert not sub(RCons("f", Top(), RCons("f", Top(), RNil())), rec(("f", Top())))


def test_tag3():
    assert sub(TagTyExt(Top(), TagRef(1)), TagTy(Top()))


def test_amber():
    assert sub(Mu("t", rec(("f", TyVar("t")))), Mu("s", rec()))
    assert not sub(TyVar("t"), TyVar("s"))


def test_tag_chain():
    sigma = {0: ROOT, 1: TagEntry(Top(), TagRef(0)), 2: TagEntry(Top(), TagRef(1))}
    assert sub(Tagged(TagRef(2)), Tagged(TagRef(0)), sigma=sigma)
    assert not sub(Tagged(TagRef(0)), Tagged(TagRef(2)), sigma=sigma)


def test_unrelated_roots():
    sigma = {0: ROOT, 3: ROOT}
    assert not sub(Tagged(TagRef(0)), Tagged(TagRef(3)), sigma=sigma)


def test_prod_contravariant_domain():
    sigma = {0: ROOT, 1: TagEntry(Top(), TagRef(0))}
    f = Prod("x", Tagged(TagRef(0)), Top())
    g = Prod("x", Tagged(TagRef(1)), Top())
    assert sub(f, g, sigma=sigma)
    assert not sub(g, f, sigma=sigma)


def test_sum_binders_vacuous_agree():
    assert sub(Sum("_", Top(), Top()), Sum("x", Top(), Top()))
    assert not sub(Sum("x", Top(), Tagged(Var("x"))), Sum("y", Top(), Tagged(Var("y"))))


def test_name_tag_type():
    assert name_tag_type({}, {0: ROOT}, TagRef(0)) == TagTy(Top())
    assert name_tag_type({"x": Top()}, {}, Var("x")) == Top()
    got = name_tag_type({}, {1: TagEntry(Top(), TagRef(0))}, TagRef(1))
    assert got == TagTyExt(Top(), TagRef(0))


def test_mutual_supertype():
    assert mutual_supertype({}, {0: ROOT}, TagRef(0), TagRef(0))
    sib = {0: ROOT, 1: TagEntry(Top(), TagRef(0)), 2: TagEntry(Top(), TagRef(0))}
    assert mutual_supertype({}, sib, TagRef(1), TagRef(2))
    assert not mutual_supertype({}, {0: ROOT, 3: ROOT}, TagRef(0), TagRef(3))


def test_ancestor_chain():
    sigma = {0: ROOT, 1: TagEntry(Top(), TagRef(0)), 2: TagEntry(Top(), TagRef(1))}
    assert ancestor_chain({}, sigma, TagRef(2)) == [TagRef(2), TagRef(1), TagRef(0)]
    assert ancestor_chain({}, sigma, TagRef(0)) == [TagRef(0)]
    assert ancestor_chain({}, {}, Var("q")) == [Var("q")]


def test_derivation_tree_exists_iff_subtype():
    T, U = rec(("f", Top()), ("g", Top())), rec(("f", Top()))
    tree = derive(T, U, {}, {})
    assert tree is not None and tree.rule.startswith("ST-Record")
    assert derive(U, T, {}, {}) is None


@given(types)
def test_reflexivity_holds_everywhere(T):
    assert is_subtype(T, T, {}, {})


@given(types, types)
def test_derive_agrees_with_check(A, B):
    assert (derive(A, B, {}, {}) is not None) == is_subtype(A, B, {}, {})
