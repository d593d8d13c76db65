"""Term substitution, names into types, and types into type variables.

None of these rename binders.  Evaluation only ever substitutes closed
values and the typechecker only substitutes names, so shadowing checks
are enough.
"""

from __future__ import annotations

from .syntax import (
    App, Extract, Fix, Fold, Fst, FstN, Lam, Let, Match, Mu, Name, NameTm,
    New, NewTag, Pair, Prod, Proj, RCons, RConsTm, Snd, SubTag, Sum, TagTy,
    TagTyExt, Tagged, Tm, Ty, TyVar, Unfold, UnfoldN, Var, name_vars,
)


def subst_name(x: str, m: Name, n: Name) -> Name:
    """Replace ``Var x`` by ``m`` inside the name ``n``."""
    match n:
        case Var(y):
            return m if y == x else n
        case FstN(inner):
            return FstN(subst_name(x, m, inner))
        case UnfoldN(inner):
            return UnfoldN(subst_name(x, m, inner))
        case _:
            return n


def subst_name_ty(e: Name, x: str, T: Ty) -> Ty:
    """``[e/x]T`` for a name ``e``."""
    match T:
        case Tagged(n):
            return Tagged(subst_name(x, e, n))
        case TagTy(body):
            return TagTy(subst_name_ty(e, x, body))
        case TagTyExt(body, parent):
            return TagTyExt(subst_name_ty(e, x, body), subst_name(x, e, parent))
        case Prod(y, a, b):
            b2 = b if y == x else subst_name_ty(e, x, b)
            return Prod(y, subst_name_ty(e, x, a), b2)
        case Sum(y, a, b):
            b2 = b if y == x else subst_name_ty(e, x, b)
            return Sum(y, subst_name_ty(e, x, a), b2)
        case RCons(label, head, tail):
            return RCons(label, subst_name_ty(e, x, head), subst_name_ty(e, x, tail))
        case Mu(t, body):
            return Mu(t, subst_name_ty(e, x, body))
        case _:
            return T


def subst_tyvar(t: str, U: Ty, T: Ty) -> Ty:
    """``[t to U]T``; a Mu binding ``t`` shadows."""
    match T:
        case TyVar(s):
            return U if s == t else T
        case Mu(s, body):
            return T if s == t else Mu(s, subst_tyvar(t, U, body))
        case TagTy(body):
            return TagTy(subst_tyvar(t, U, body))
        case TagTyExt(body, parent):
            return TagTyExt(subst_tyvar(t, U, body), parent)
        case Prod(x, a, b):
            return Prod(x, subst_tyvar(t, U, a), subst_tyvar(t, U, b))
        case Sum(x, a, b):
            return Sum(x, subst_tyvar(t, U, a), subst_tyvar(t, U, b))
        case RCons(label, head, tail):
            return RCons(label, subst_tyvar(t, U, head), subst_tyvar(t, U, tail))
        case _:
            return T


def unfold_mu(T: Mu) -> Ty:
    return subst_tyvar(T.t, T, T.body)


def _name_as_term(x: str, s: Tm, n: Name) -> Tm:
    # Fst(x) / Unfold(x) with x bound to a non-name value become the
    # corresponding projection terms.
    if x not in name_vars(n):
        return NameTm(n)
    match n:
        case Var(y) if y == x:
            return s
        case FstN(inner):
            return Fst(_name_as_term(x, s, inner))
        case UnfoldN(inner):
            return Unfold(_name_as_term(x, s, inner))
        case _:
            return NameTm(n)


def subst_tm(x: str, s: Tm, t: Tm) -> Tm:
    """``[x:=s]t``.

    When ``s`` is itself a name, occurrences of ``x`` in name positions
    (tag arguments, match patterns, names in type annotations) are
    rewritten too; a tag-typed variable can only ever be bound to a name.
    """
    m = s.n if isinstance(s, NameTm) else None

    def name(n: Name) -> Name:
        return n if m is None else subst_name(x, m, n)

    def ty(T: Ty) -> Ty:
        return T if m is None else subst_name_ty(m, x, T)

    def go(t: Tm) -> Tm:
        match t:
            case NameTm(n):
                if m is not None:
                    return NameTm(subst_name(x, m, n))
                return _name_as_term(x, s, n)
            case NewTag(T):
                return NewTag(ty(T))
            case SubTag(T, n):
                return SubTag(ty(T), name(n))
            case New(n, body):
                return New(name(n), go(body))
            case Match(e1, n, y, e2, e3):
                return Match(go(e1), name(n), y, e2 if y == x else go(e2), go(e3))
            case Extract(e):
                return Extract(go(e))
            case Lam(y, T, body):
                return Lam(y, ty(T), body if y == x else go(body))
            case App(f, a):
                return App(go(f), go(a))
            case RConsTm(label, head, tail):
                return RConsTm(label, go(head), go(tail))
            case Proj(e, label):
                return Proj(go(e), label)
            case Let(y, bound, body):
                return Let(y, go(bound), body if y == x else go(body))
            case Fix(e):
                return Fix(go(e))
            case Fold(T, e):
                return Fold(ty(T), go(e))
            case Unfold(e):
                return Unfold(go(e))
            case Pair(l, r):
                return Pair(go(l), go(r))
            case Fst(e):
                return Fst(go(e))
            case Snd(e):
                return Snd(go(e))
            case _:
                return t

    return go(t)
