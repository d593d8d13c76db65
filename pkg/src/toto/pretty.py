"""Surface syntax printer.  ``parse(pretty(x)) == x`` for every AST."""

from __future__ import annotations

from .syntax import (
    App, Extract, Fix, Fold, Fst, FstN, Lam, Let, Match, Mu, Name, NameTm, New,
    NewTag, Pair, Prod, Proj, RCons, RConsTm, RNil, RNilTm, Snd, SubTag, Sum,
    TagRef, TagTy, TagTyExt, Tagged, Tm, Top, Ty, TyVar, Unfold, UnfoldN, Unit,
    Var,
)


def pretty_name(n: Name) -> str:
    match n:
        case Var(x):
            return x
        case TagRef(c):
            return f"#{c}"
        case FstN(inner):
            return f"Fst({pretty_name(inner)})"
        case UnfoldN(inner):
            return f"Unfold({pretty_name(inner)})"
    raise TypeError(f"not a name: {n!r}")


def _fields(T, nil_type, cons_type, show) -> str:
    parts = []
    while isinstance(T, cons_type):
        parts.append(show(T))
        T = T.tail
    body = " ;; ".join(parts)
    if isinstance(T, nil_type):
        return "{" + body + "}"
    return "{" + body + " | " + (pretty_ty(T) if nil_type is RNil else pretty_tm(T)) + "}"


def pretty_ty(T: Ty) -> str:
    match T:
        case Top():
            return "Top"
        case TyVar(t):
            return t
        case Tagged(n):
            return f"Tagged({pretty_name(n)})"
        case TagTy(body):
            return f"Tag[{pretty_ty(body)}]"
        case TagTyExt(body, parent):
            return f"Tag[{pretty_ty(body)}]Extends({pretty_name(parent)})"
        case Prod(x, a, b):
            return f"Prod[{x}:{pretty_ty(a)}],{pretty_ty(b)}"
        case Sum(x, a, b):
            return f"Sum[{x}:{pretty_ty(a)}]{pretty_ty(b)}"
        case RNil():
            return "nil"
        case RCons():
            return _fields(T, RNil, RCons, lambda f: f"{f.label}:{pretty_ty(f.head)}")
        case Mu(t, body):
            return f"mu({t}):{pretty_ty(body)}"
    raise TypeError(f"not a type: {T!r}")


def _is_letrec(e: Tm) -> bool:
    match e:
        case Let(x, Fix(Lam(y, _, _)), _):
            return x == y
    return False


def _atom(e: Tm) -> str:
    # Application arguments and projection targets must be atoms.
    s = pretty_tm(e)
    if isinstance(e, (App, Lam, Let)):
        return f"({s})"
    return s


def _postfix(e: Tm) -> str:
    if isinstance(e, Proj):
        return pretty_tm(e)
    return _atom(e)


def pretty_tm(e: Tm) -> str:
    match e:
        case Unit():
            return "< >"
        case NameTm(n):
            return pretty_name(n)
        case NewTag(T):
            return f"NewTag[{pretty_ty(T)}]"
        case SubTag(T, n):
            return f"SubTag[{pretty_ty(T)}]({pretty_name(n)})"
        case New(n, body):
            return f"New{{{pretty_tm(body)}}}({pretty_name(n)})"
        case Match(e1, n, y, e2, e3):
            return (
                f"Match{{{pretty_tm(e1)}}}({pretty_name(n)})({y})"
                f"{{{pretty_tm(e2)}}}{{{pretty_tm(e3)}}}"
            )
        case Extract(inner):
            return f"Extract{{{pretty_tm(inner)}}}"
        case Lam(x, T, body):
            return f"/{x}:{pretty_ty(T)},{pretty_tm(body)}"
        case App(f, a):
            head = pretty_tm(f) if isinstance(f, (App, Proj)) else _atom(f)
            return f"{head} {_postfix(a) if isinstance(a, Proj) else _atom(a)}"
        case RNilTm():
            return "nil"
        case RConsTm():
            return _fields(e, RNilTm, RConsTm, lambda f: f"{f.label} = {pretty_tm(f.head)}")
        case Proj(inner, label):
            return f"{_postfix(inner)} proj {label}"
        case Let(x, bound, body) if _is_letrec(e):
            lam = bound.e
            return f"LetRec {x}:{pretty_ty(lam.T)} be {pretty_tm(lam.body)} in {pretty_tm(body)}"
        case Let(x, bound, body):
            return f"Let {x} be {pretty_tm(bound)} in {pretty_tm(body)}"
        case Fix(inner):
            return f"Fix{{{pretty_tm(inner)}}}"
        case Fold(T, inner):
            return f"Fold[{pretty_ty(T)}]{{{pretty_tm(inner)}}}"
        case Unfold(inner):
            return f"Unfold{{{pretty_tm(inner)}}}"
        case Pair(l, r):
            return f"<{pretty_tm(l)}, {pretty_tm(r)}>"
        case Fst(inner):
            return f"Fst{{{pretty_tm(inner)}}}"
        case Snd(inner):
            return f"Snd{{{pretty_tm(inner)}}}"
    raise TypeError(f"not a term: {e!r}")


def pretty(x) -> str:
    if isinstance(x, (Var, TagRef, FstN, UnfoldN)):
        return pretty_name(x)
    if isinstance(x, (TagTy, TagTyExt, Tagged, Prod, Sum, RNil, RCons, Mu, Top, TyVar)):
        return pretty_ty(x)
    return pretty_tm(x)
