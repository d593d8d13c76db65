"""Abstract syntax of tagged-object names, types and terms.

Everything here is an immutable value.  Structural equality and hashing
come from frozen dataclasses, so types and terms can be used directly as
dictionary keys.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, NamedTuple, Optional, Union

TagId = int


# ---------------------------------------------------------------------------
# names


@dataclass(frozen=True, slots=True)
class Var:
    x: str


@dataclass(frozen=True, slots=True)
class TagRef:
    c: TagId


@dataclass(frozen=True, slots=True)
class FstN:
    n: Name


@dataclass(frozen=True, slots=True)
class UnfoldN:
    n: Name


Name = Union[Var, TagRef, FstN, UnfoldN]


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True, slots=True)
class TagTy:
    body: Ty


@dataclass(frozen=True, slots=True)
class TagTyExt:
    body: Ty
    parent: Name


@dataclass(frozen=True, slots=True)
class Tagged:
    n: Name


@dataclass(frozen=True, slots=True)
class Prod:
    x: str
    dom: Ty
    cod: Ty


@dataclass(frozen=True, slots=True)
class Sum:
    x: str
    first: Ty
    second: Ty


@dataclass(frozen=True, slots=True)
class RNil:
    pass


@dataclass(frozen=True, slots=True)
class RCons:
    label: str
    head: Ty
    tail: Ty


@dataclass(frozen=True, slots=True)
class Mu:
    t: str
    body: Ty


@dataclass(frozen=True, slots=True)
class Top:
    pass


@dataclass(frozen=True, slots=True)
class TyVar:
    t: str


Ty = Union[TagTy, TagTyExt, Tagged, Prod, Sum, RNil, RCons, Mu, Top, TyVar]


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True, slots=True)
class NewTag:
    T: Ty


@dataclass(frozen=True, slots=True)
class SubTag:
    T: Ty
    parent: Name


@dataclass(frozen=True, slots=True)
class New:
    n: Name
    body: Tm


@dataclass(frozen=True, slots=True)
class Match:
    scrutinee: Tm
    n: Name
    binder: str
    hit: Tm
    miss: Tm


@dataclass(frozen=True, slots=True)
class Extract:
    e: Tm


@dataclass(frozen=True, slots=True)
class Lam:
    x: str
    T: Ty
    body: Tm


@dataclass(frozen=True, slots=True)
class App:
    f: Tm
    a: Tm


@dataclass(frozen=True, slots=True)
class RNilTm:
    pass


@dataclass(frozen=True, slots=True)
class RConsTm:
    label: str
    head: Tm
    tail: Tm


@dataclass(frozen=True, slots=True)
class Proj:
    e: Tm
    label: str


@dataclass(frozen=True, slots=True)
class Let:
    x: str
    bound: Tm
    body: Tm


@dataclass(frozen=True, slots=True)
class Fix:
    e: Tm


@dataclass(frozen=True, slots=True)
class Fold:
    annot: Ty
    e: Tm


@dataclass(frozen=True, slots=True)
class Unfold:
    e: Tm


@dataclass(frozen=True, slots=True)
class Pair:
    l: Tm
    r: Tm


@dataclass(frozen=True, slots=True)
class Fst:
    e: Tm


@dataclass(frozen=True, slots=True)
class Snd:
    e: Tm


@dataclass(frozen=True, slots=True)
class Unit:
    pass


@dataclass(frozen=True, slots=True)
class NameTm:
    n: Name


Tm = Union[
    NewTag, SubTag, New, Match, Extract, Lam, App, RNilTm, RConsTm, Proj,
    Let, Fix, Fold, Unfold, Pair, Fst, Snd, Unit, NameTm,
]

NAME_TYPES = (Var, TagRef, FstN, UnfoldN)
TY_TYPES = (TagTy, TagTyExt, Tagged, Prod, Sum, RNil, RCons, Mu, Top, TyVar)
TM_TYPES = (
    NewTag, SubTag, New, Match, Extract, Lam, App, RNilTm, RConsTm, Proj,
    Let, Fix, Fold, Unfold, Pair, Fst, Snd, Unit, NameTm,
)


def letrec(x: str, T: Ty, e1: Tm, e2: Tm) -> Tm:
    """``LetRec x:T be e1 in e2``, which is sugar for a Let over Fix."""
    return Let(x, Fix(Lam(x, T, e1)), e2)


# ---------------------------------------------------------------------------
# contexts


class TagEntry(NamedTuple):
    body: Ty
    parent: Optional[Name] = None


TypingCtx = Mapping[str, Ty]
TagCtx = Mapping[TagId, TagEntry]
AmberEnv = frozenset  # of (str, str) pairs


def extend(gamma: TypingCtx, x: str, T: Ty) -> dict[str, Ty]:
    out = dict(gamma)
    out[x] = T
    return out


# ---------------------------------------------------------------------------
# record shape predicates


def record_ty(T: Ty) -> bool:
    return isinstance(T, (RNil, RCons))


def record_tm(e: Tm) -> bool:
    return isinstance(e, (RNilTm, RConsTm))


def record_fields(T: Ty) -> list[tuple[str, Ty]]:
    """Flatten a record spine.  The spine must end in RNil."""
    out = []
    while isinstance(T, RCons):
        out.append((T.label, T.head))
        T = T.tail
    if not isinstance(T, RNil):
        raise ValueError(f"not a record spine: {T!r}")
    return out


def record_of(fields) -> Ty:
    out: Ty = RNil()
    for label, T in reversed(list(fields)):
        out = RCons(label, T, out)
    return out


def record_tm_of(fields) -> Tm:
    out: Tm = RNilTm()
    for label, e in reversed(list(fields)):
        out = RConsTm(label, e, out)
    return out


def ty_lookup(label: str, T: Ty) -> Optional[Ty]:
    while isinstance(T, RCons):
        if T.label == label:
            return T.head
        T = T.tail
    return None


def tm_lookup(label: str, e: Tm) -> Optional[Tm]:
    while isinstance(e, RConsTm):
        if e.label == label:
            return e.head
        e = e.tail
    return None


def wellformed_ty(T: Ty) -> bool:
    match T:
        case RCons():
            seen = set()
            while isinstance(T, RCons):
                if T.label in seen or not wellformed_ty(T.head):
                    return False
                seen.add(T.label)
                T = T.tail
            return isinstance(T, RNil)
        case TagTy(body) | TagTyExt(body, _) | Mu(_, body):
            return wellformed_ty(body)
        case Prod(_, a, b) | Sum(_, a, b):
            return wellformed_ty(a) and wellformed_ty(b)
        case _:
            return True


# ---------------------------------------------------------------------------
# free variables


def name_vars(n: Name) -> set[str]:
    while isinstance(n, (FstN, UnfoldN)):
        n = n.n
    return {n.x} if isinstance(n, Var) else set()


def name_root(n: Name) -> Name:
    while isinstance(n, (FstN, UnfoldN)):
        n = n.n
    return n


def free_ty_vars(T: Ty) -> set[str]:
    """Term variables occurring in the names inside ``T``."""
    match T:
        case Tagged(n):
            return name_vars(n)
        case TagTy(body):
            return free_ty_vars(body)
        case TagTyExt(body, parent):
            return free_ty_vars(body) | name_vars(parent)
        case Prod(x, a, b) | Sum(x, a, b):
            return free_ty_vars(a) | (free_ty_vars(b) - {x})
        case RCons(_, head, tail):
            return free_ty_vars(head) | free_ty_vars(tail)
        case Mu(_, body):
            return free_ty_vars(body)
        case _:
            return set()


def free_vars(e: Tm) -> set[str]:
    match e:
        case NameTm(n):
            return name_vars(n)
        case NewTag(T):
            return free_ty_vars(T)
        case SubTag(T, n):
            return free_ty_vars(T) | name_vars(n)
        case New(n, body):
            return name_vars(n) | free_vars(body)
        case Match(e1, n, y, e2, e3):
            return free_vars(e1) | name_vars(n) | (free_vars(e2) - {y}) | free_vars(e3)
        case Lam(x, T, body):
            return free_ty_vars(T) | (free_vars(body) - {x})
        case Let(x, bound, body):
            return free_vars(bound) | (free_vars(body) - {x})
        case Fold(T, body):
            return free_ty_vars(T) | free_vars(body)
        case _:
            out: set[str] = set()
            for child in children(e):
                out |= free_vars(child)
            return out


# ---------------------------------------------------------------------------
# generic traversal


def children(e: Tm) -> tuple[Tm, ...]:
    """Immediate subterms, in the order used for error paths."""
    match e:
        case New(_, body) | Extract(body) | Fix(body) | Fold(_, body) | Unfold(body):
            return (body,)
        case Fst(body) | Snd(body) | Proj(body, _) | Lam(_, _, body):
            return (body,)
        case Match(e1, _, _, e2, e3):
            return (e1, e2, e3)
        case App(f, a):
            return (f, a)
        case RConsTm(_, head, tail):
            return (head, tail)
        case Let(_, bound, body):
            return (bound, body)
        case Pair(l, r):
            return (l, r)
        case _:
            return ()


def subterms(e: Tm) -> Iterator[Tm]:
    yield e
    for child in children(e):
        yield from subterms(child)


def tm_size(e: Tm) -> int:
    return 1 + sum(tm_size(c) for c in children(e))


def name_depth(n: Name) -> int:
    d = 1
    while isinstance(n, (FstN, UnfoldN)):
        n = n.n
        d += 1
    return d


def ty_depth(T: Ty) -> int:
    """Syntactic depth; leaves (Top, type variables, nil) have depth 1."""
    match T:
        case Tagged(n):
            return 1 + name_depth(n)
        case TagTy(body):
            return 1 + ty_depth(body)
        case TagTyExt(body, parent):
            return 1 + max(ty_depth(body), name_depth(parent))
        case Prod(_, a, b) | Sum(_, a, b):
            return 1 + max(ty_depth(a), ty_depth(b))
        case RCons(_, head, tail):
            return 1 + max(ty_depth(head), ty_depth(tail))
        case Mu(_, body):
            return 1 + ty_depth(body)
        case _:
            return 1
