"""Hypothesis strategies for raw (not necessarily well-typed) syntax."""

from hypothesis import strategies as st

from toto.syntax import (
    App, Extract, Fix, Fold, Fst, FstN, Lam, Let, Match, Mu, NameTm, New,
    NewTag, Pair, Prod, Proj, RCons, RConsTm, RNil, RNilTm, Snd, SubTag, Sum,
    TagRef, TagTy, TagTyExt, Tagged, Top, TyVar, Unfold, UnfoldN, Unit, Var,
)

VARS = ("x", "y", "z", "f")
TYVARS = ("t", "s")
LABELS = ("f", "g", "h")

variables = st.sampled_from(VARS)
labels = st.sampled_from(LABELS)

names = st.recursive(
    st.one_of(variables.map(Var), st.integers(0, 3).map(TagRef)),
    lambda inner: st.one_of(inner.map(FstN), inner.map(UnfoldN)),
    max_leaves=3,
)

types = st.recursive(
    st.one_of(st.just(Top()), st.just(RNil()), st.sampled_from(TYVARS).map(TyVar), names.map(Tagged)),
    lambda T: st.one_of(
        T.map(TagTy),
        st.builds(TagTyExt, T, names),
        st.builds(Prod, variables, T, T),
        st.builds(Sum, variables, T, T),
        st.builds(RCons, labels, T, T),
        st.builds(Mu, st.sampled_from(TYVARS), T),
    ),
    max_leaves=6,
)

terms = st.recursive(
    st.one_of(st.just(Unit()), st.just(RNilTm()), names.map(NameTm)),
    lambda e: st.one_of(
        types.map(NewTag),
        st.builds(SubTag, types, names),
        st.builds(New, names, e),
        st.builds(Match, e, names, variables, e, e),
        e.map(Extract),
        st.builds(Lam, variables, types, e),
        st.builds(App, e, e),
        st.builds(RConsTm, labels, e, e),
        st.builds(Proj, e, labels),
        st.builds(Let, variables, e, e),
        e.map(Fix),
        st.builds(Fold, types, e),
        e.map(Unfold),
        st.builds(Pair, e, e),
        e.map(Fst),
        e.map(Snd),
    ),
    max_leaves=10,
)
