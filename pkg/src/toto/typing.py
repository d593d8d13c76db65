"""Syntax-directed type synthesis.

Subsumption is not a free-standing rule.  It is applied at the checking
positions only: function arguments, New and SubTag bodies, Fold bodies,
and when reconciling the two branches of a Match.
"""

from __future__ import annotations

import enum
from typing import Optional

from .substitution import subst_name_ty, unfold_mu
from .subtype import ancestor_chain, binders_agree, is_subtype, mutual_supertype, name_tag_type
from .syntax import (
    App, Extract, Fix, Fold, Fst, FstN, Lam, Let, Match, Mu, Name, NameTm, New,
    NewTag, Pair, Prod, Proj, RCons, RConsTm, RNil, RNilTm, Snd, SubTag, Sum,
    TagCtx, TagRef, TagTy, TagTyExt, Tagged, Tm, Top, Ty, TypingCtx, Unfold,
    UnfoldN, Unit, Var, extend, free_ty_vars, letrec, record_fields, record_of,
    record_tm, ty_lookup, wellformed_ty,
)


class ErrorKind(enum.Enum):
    UnboundVariable = "UnboundVariable"
    UnboundTag = "UnboundTag"
    NotAFunction = "NotAFunction"
    ArgumentNotAName = "ArgumentNotAName"
    ArgumentTypeMismatch = "ArgumentTypeMismatch"
    NotATag = "NotATag"
    NotTagged = "NotTagged"
    NoMutualSupertype = "NoMutualSupertype"
    BranchTypesIncomparable = "BranchTypesIncomparable"
    NotARecord = "NotARecord"
    MissingField = "MissingField"
    NotASum = "NotASum"
    NotAMu = "NotAMu"
    FoldAnnotationMismatch = "FoldAnnotationMismatch"
    IllFormedType = "IllFormedType"
    FirstComponentNotAName = "FirstComponentNotAName"


class TypeCheckError(Exception):
    def __init__(
        self,
        kind: ErrorKind,
        path: tuple[int, ...] = (),
        detail: str = "",
        expected: Optional[Ty] = None,
        got: Optional[Ty] = None,
    ):
        self.kind = kind
        self.path = path
        self.detail = detail
        self.expected = expected
        self.got = got
        super().__init__(self.render())

    def render(self, pretty=repr) -> str:
        where = "/" + "/".join(map(str, self.path))
        head = f"{self.kind.value} @ {where}"
        if self.expected is not None or self.got is not None:
            exp = "?" if self.expected is None else pretty(self.expected)
            got = "?" if self.got is None else pretty(self.got)
            return f"{head}: expected {exp}, got {got}"
        return f"{head}: {self.detail}" if self.detail else head


def _name_type(gamma, sigma, n: Name, path) -> Ty:
    T = name_tag_type(gamma, sigma, n)
    if T is not None:
        return T
    match n:
        case Var(x):
            raise TypeCheckError(ErrorKind.UnboundVariable, path, f"variable {x} is unbound")
        case TagRef(c):
            raise TypeCheckError(ErrorKind.UnboundTag, path, f"tag #{c} is unbound")
        case FstN(_):
            raise TypeCheckError(ErrorKind.NotASum, path, "Fst of a name without a sum type")
        case UnfoldN(_):
            raise TypeCheckError(ErrorKind.NotAMu, path, "Unfold of a name without a mu type")
    raise AssertionError(n)


def _tag_body(gamma, sigma, n: Name, path) -> Ty:
    T = _name_type(gamma, sigma, n, path)
    if isinstance(T, (TagTy, TagTyExt)):
        return T.body
    raise TypeCheckError(ErrorKind.NotATag, path, "name is not a tag", got=T)


def _wellformed(T: Ty, path) -> None:
    if not wellformed_ty(T):
        raise TypeCheckError(ErrorKind.IllFormedType, path, "ill-formed type annotation", got=T)


def _common_ancestor(gamma, sigma, n: Name, m: Name) -> Optional[Name]:
    other = ancestor_chain(gamma, sigma, m)
    for anc in ancestor_chain(gamma, sigma, n):
        if anc in other:
            return anc
    return None


def join(a: Ty, b: Ty, gamma: TypingCtx, sigma: TagCtx) -> Optional[Ty]:
    """An upper bound of two branch types, or None.

    Comparable types give the larger one.  Tagged types meet at their
    nearest shared ancestor; records, products, sums and subtag types are
    joined component-wise (products meet their domains).
    """
    if is_subtype(a, b, gamma, sigma):
        return b
    if is_subtype(b, a, gamma, sigma):
        return a
    match a, b:
        case Tagged(n), Tagged(m):
            anc = _common_ancestor(gamma, sigma, n, m)
            return None if anc is None else Tagged(anc)
        case (RNil() | RCons()), (RNil() | RCons()):
            theirs = dict(record_fields(b))
            fields = []
            for label, T in record_fields(a):
                if label in theirs:
                    J = join(T, theirs[label], gamma, sigma)
                    if J is not None:
                        fields.append((label, J))
            return record_of(fields)
        case Prod(x, a1, a2), Prod(y, b1, b2) if binders_agree(x, a2, y, b2):
            m1 = meet(a1, b1, gamma, sigma)
            if m1 is not None:
                j2 = join(a2, b2, extend(gamma, x, m1) if x == y else gamma, sigma)
                if j2 is not None:
                    return Prod(x, m1, j2)
        case Sum(x, a1, a2), Sum(y, b1, b2) if binders_agree(x, a2, y, b2):
            j1 = join(a1, b1, gamma, sigma)
            if j1 is not None:
                j2 = join(a2, b2, extend(gamma, x, a1) if x == y else gamma, sigma)
                if j2 is not None:
                    return Sum(x, j1, j2)
        case TagTyExt(body, n), TagTyExt(body2, m) if body == body2:
            anc = _common_ancestor(gamma, sigma, n, m)
            return TagTy(body) if anc is None else TagTyExt(body, anc)
    return None


def meet(a: Ty, b: Ty, gamma: TypingCtx, sigma: TagCtx) -> Optional[Ty]:
    """A lower bound of two types, or None; the dual of :func:`join`."""
    if is_subtype(a, b, gamma, sigma):
        return a
    if is_subtype(b, a, gamma, sigma):
        return b
    match a, b:
        case (RNil() | RCons()), (RNil() | RCons()):
            theirs = dict(record_fields(b))
            fields = []
            for label, T in record_fields(a):
                if label in theirs:
                    M = meet(T, theirs.pop(label), gamma, sigma)
                    if M is None:
                        return None
                    fields.append((label, M))
                else:
                    fields.append((label, T))
            return record_of(fields + list(theirs.items()))
        case Prod(x, a1, a2), Prod(y, b1, b2) if binders_agree(x, a2, y, b2):
            j1 = join(a1, b1, gamma, sigma)
            if j1 is not None:
                m2 = meet(a2, b2, extend(gamma, x, j1) if x == y else gamma, sigma)
                if m2 is not None:
                    return Prod(x, j1, m2)
        case Sum(x, a1, a2), Sum(y, b1, b2) if binders_agree(x, a2, y, b2):
            m1 = meet(a1, b1, gamma, sigma)
            if m1 is not None:
                m2 = meet(a2, b2, extend(gamma, x, m1) if x == y else gamma, sigma)
                if m2 is not None:
                    return Sum(x, m1, m2)
    return None


def _match_head(gamma: TypingCtx, sigma: TagCtx, e: Match, path) -> None:
    scrut = synthesize(gamma, sigma, e.scrutinee, path + (0,))
    if not isinstance(scrut, Tagged):
        raise TypeCheckError(ErrorKind.NotTagged, path + (0,), "match scrutinee is not tagged", got=scrut)
    _tag_body(gamma, sigma, e.n, path)
    if not mutual_supertype(gamma, sigma, e.n, scrut.n):
        raise TypeCheckError(
            ErrorKind.NoMutualSupertype, path,
            "pattern and scrutinee tags share no supertag",
            expected=Tagged(e.n), got=scrut,
        )


def synthesize(gamma: TypingCtx, sigma: TagCtx, e: Tm, path: tuple[int, ...] = ()) -> Ty:
    """The principal type of ``e``; raises :class:`TypeCheckError`."""
    match e:
        case NameTm(n):
            return _name_type(gamma, sigma, n, path)

        case Unit():
            return Top()

        case NewTag(T):
            _wellformed(T, path)
            return TagTy(T)

        case SubTag(T, n):
            _wellformed(T, path)
            parent_body = _tag_body(gamma, sigma, n, path)
            if not is_subtype(T, parent_body, gamma, sigma):
                raise TypeCheckError(
                    ErrorKind.ArgumentTypeMismatch, path,
                    "subtag body must refine the parent body", expected=parent_body, got=T,
                )
            return TagTyExt(T, n)

        case New(n, body):
            T = _tag_body(gamma, sigma, n, path)
            check_against(gamma, sigma, body, T, path + (0,))
            return Tagged(n)

        case Match(e1, n, y, e2, e3):
            _match_head(gamma, sigma, e, path)
            t_hit = synthesize(extend(gamma, y, Tagged(n)), sigma, e2, path + (1,))
            if y in free_ty_vars(t_hit):
                raise TypeCheckError(
                    ErrorKind.BranchTypesIncomparable, path + (1,),
                    f"match binder {y} escapes in the branch type",
                )
            t_miss = synthesize(gamma, sigma, e3, path + (2,))
            out = join(t_hit, t_miss, gamma, sigma)
            if out is None:
                raise TypeCheckError(ErrorKind.BranchTypesIncomparable, path, expected=t_hit, got=t_miss)
            return out

        case Extract(inner):
            T = synthesize(gamma, sigma, inner, path + (0,))
            if not isinstance(T, Tagged):
                raise TypeCheckError(ErrorKind.NotTagged, path + (0,), "Extract of an untagged term", got=T)
            return _tag_body(gamma, sigma, T.n, path)

        case Lam(x, T, body):
            _wellformed(T, path)
            return Prod(x, T, synthesize(extend(gamma, x, T), sigma, body, path + (0,)))

        case App(f, a):
            F = synthesize(gamma, sigma, f, path + (0,))
            if not isinstance(F, Prod):
                raise TypeCheckError(ErrorKind.NotAFunction, path + (0,), "applying a non-function", got=F)
            check_against(gamma, sigma, a, F.dom, path + (1,))
            if F.x not in free_ty_vars(F.cod):
                return F.cod
            if not isinstance(a, NameTm):
                raise TypeCheckError(
                    ErrorKind.ArgumentNotAName, path + (1,),
                    "argument of a dependent function must be a name",
                )
            return subst_name_ty(a.n, F.x, F.cod)

        case RNilTm():
            return RNil()

        case RConsTm(label, head, tail):
            if not record_tm(tail):
                raise TypeCheckError(ErrorKind.NotARecord, path + (1,), "record tail is not a record")
            T_head = synthesize(gamma, sigma, head, path + (0,))
            T_tail = synthesize(gamma, sigma, tail, path + (1,))
            out = RCons(label, T_head, T_tail)
            _wellformed(out, path)
            return out

        case Proj(inner, label):
            R = synthesize(gamma, sigma, inner, path + (0,))
            if not isinstance(R, (RNil, RCons)):
                raise TypeCheckError(ErrorKind.NotARecord, path + (0,), "projection from a non-record", got=R)
            T = ty_lookup(label, R)
            if T is None:
                raise TypeCheckError(ErrorKind.MissingField, path, f"no field {label}", got=R)
            return T

        case Let(x, bound, body):
            T1 = synthesize(gamma, sigma, bound, path + (0,))
            T2 = synthesize(extend(gamma, x, T1), sigma, body, path + (1,))
            if x not in free_ty_vars(T2):
                return T2
            if not isinstance(bound, NameTm):
                raise TypeCheckError(
                    ErrorKind.ArgumentNotAName, path + (0,),
                    f"{x} occurs in the body type but is bound to a non-name",
                )
            return subst_name_ty(bound.n, x, T2)

        case Fix(inner):
            F = synthesize(gamma, sigma, inner, path + (0,))
            if not isinstance(F, Prod):
                raise TypeCheckError(ErrorKind.NotAFunction, path + (0,), "Fix of a non-function", got=F)
            if F.x in free_ty_vars(F.cod):
                raise TypeCheckError(ErrorKind.ArgumentNotAName, path, "Fix of a dependent function")
            if not is_subtype(F.cod, F.dom, gamma, sigma):
                raise TypeCheckError(ErrorKind.ArgumentTypeMismatch, path, expected=F.dom, got=F.cod)
            return F.cod

        case Fold(T, inner):
            _wellformed(T, path)
            if not isinstance(T, Mu):
                raise TypeCheckError(ErrorKind.FoldAnnotationMismatch, path, "Fold annotation must be a mu type", got=T)
            want = unfold_mu(T)
            try:
                check_against(gamma, sigma, inner, want, path + (0,))
            except TypeCheckError as err:
                if err.kind is not ErrorKind.ArgumentTypeMismatch:
                    raise
                raise TypeCheckError(
                    ErrorKind.FoldAnnotationMismatch, err.path, expected=err.expected, got=err.got
                ) from None
            return T

        case Unfold(inner):
            T = synthesize(gamma, sigma, inner, path + (0,))
            if not isinstance(T, Mu):
                raise TypeCheckError(ErrorKind.NotAMu, path + (0,), "Unfold of a non-recursive type", got=T)
            return unfold_mu(T)

        case Pair(l, r):
            return Sum("_", synthesize(gamma, sigma, l, path + (0,)), synthesize(gamma, sigma, r, path + (1,)))

        case Fst(inner):
            T = synthesize(gamma, sigma, inner, path + (0,))
            if not isinstance(T, Sum):
                raise TypeCheckError(ErrorKind.NotASum, path + (0,), "Fst of a non-pair", got=T)
            return T.first

        case Snd(inner):
            T = synthesize(gamma, sigma, inner, path + (0,))
            if not isinstance(T, Sum):
                raise TypeCheckError(ErrorKind.NotASum, path + (0,), "Snd of a non-pair", got=T)
            if T.x not in free_ty_vars(T.second):
                return T.second
            if not isinstance(inner, NameTm):
                raise TypeCheckError(
                    ErrorKind.ArgumentNotAName, path + (0,),
                    "Snd of a dependent pair needs a name",
                )
            return subst_name_ty(FstN(inner.n), T.x, T.second)

    raise TypeError(f"not a term: {e!r}")


def check_against(gamma: TypingCtx, sigma: TagCtx, e: Tm, T: Ty, path: tuple[int, ...] = ()) -> None:
    """Succeeds iff ``e`` has type ``T`` up to subsumption.

    Synthesis gives every pair a non-dependent sum type, which is not
    always the one wanted.  So pairs meet sums component-wise, record
    literals meet record types field by field, and when synthesis of an
    elimination or binding form falls short the expected type is pushed
    into the subterm in result position.
    """
    match e, T:
        case Pair(l, r), Sum(x, first, second):
            check_against(gamma, sigma, l, first, path + (0,))
            if x not in free_ty_vars(second):
                check_against(gamma, sigma, r, second, path + (1,))
                return
            if not isinstance(l, NameTm):
                raise TypeCheckError(
                    ErrorKind.FirstComponentNotAName, path + (0,),
                    "first component of a dependent pair must be a name",
                )
            check_against(gamma, sigma, r, subst_name_ty(l.n, x, second), path + (1,))
            return

        case RConsTm(), (RNil() | RCons()) if record_tm(e) and wellformed_ty(T):
            wanted = dict(record_fields(T))
            node, sub = e, path
            while isinstance(node, RConsTm):
                if node.label in wanted:
                    check_against(gamma, sigma, node.head, wanted.pop(node.label), sub + (0,))
                else:
                    synthesize(gamma, sigma, node.head, sub + (0,))
                node, sub = node.tail, sub + (1,)
            if wanted:
                label = next(iter(wanted))
                raise TypeCheckError(ErrorKind.MissingField, path, f"no field {label}", expected=T)
            # Labels must still be distinct.
            _wellformed(synthesize(gamma, sigma, e, path), path)
            return

    if isinstance(e, (Proj, Fst, Snd, Let, Match, App)):
        try:
            if is_subtype(synthesize(gamma, sigma, e, path), T, gamma, sigma):
                return
        except TypeCheckError:
            pass
        _push(gamma, sigma, e, T, path)
        return
    got = synthesize(gamma, sigma, e, path)
    if not is_subtype(got, T, gamma, sigma):
        raise TypeCheckError(ErrorKind.ArgumentTypeMismatch, path, expected=T, got=got)


def _push(gamma: TypingCtx, sigma: TagCtx, e: Tm, T: Ty, path: tuple[int, ...]) -> None:
    # Synthesis fell short; check the subterm in result position instead.
    # A name bound by Let or application may occur in types, which this
    # loses, so these rules only run after synthesis has been tried.
    match e, T:
        case Proj(inner, label), _:
            # Width subtyping makes {label:T} the weakest record type to ask for.
            check_against(gamma, sigma, inner, RCons(label, T, RNil()), path + (0,))
            return

        case (Fst(inner) | Snd(inner)), _:
            S = synthesize(gamma, sigma, inner, path + (0,))
            if isinstance(S, Sum) and S.x not in free_ty_vars(S.second):
                want = Sum(S.x, T, S.second) if isinstance(e, Fst) else Sum(S.x, S.first, T)
                check_against(gamma, sigma, inner, want, path + (0,))
                return

        case Let(x, bound, body), _ if x not in free_ty_vars(T):
            T1 = synthesize(gamma, sigma, bound, path + (0,))
            check_against(extend(gamma, x, T1), sigma, body, T, path + (1,))
            return

        case Match(_, n, y, hit, miss), _ if y not in free_ty_vars(T):
            _match_head(gamma, sigma, e, path)
            check_against(extend(gamma, y, Tagged(n)), sigma, hit, T, path + (1,))
            check_against(gamma, sigma, miss, T, path + (2,))
            return

        case App(Lam(x, S, body), a), _ if x not in free_ty_vars(T):
            _wellformed(S, path + (0,))
            check_against(gamma, sigma, a, S, path + (1,))
            check_against(extend(gamma, x, S), sigma, body, T, path + (0, 0))
            return

    got = synthesize(gamma, sigma, e, path)
    if not is_subtype(got, T, gamma, sigma):
        raise TypeCheckError(ErrorKind.ArgumentTypeMismatch, path, expected=T, got=got)


def type_letrec(gamma: TypingCtx, sigma: TagCtx, x: str, T: Ty, e1: Tm, e2: Tm) -> Ty:
    return synthesize(gamma, sigma, letrec(x, T, e1, e2))


def typecheck(e: Tm, sigma: Optional[TagCtx] = None, gamma: Optional[TypingCtx] = None) -> Ty:
    return synthesize(gamma or {}, sigma or {}, e)
