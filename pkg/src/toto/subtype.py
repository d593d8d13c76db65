"""Algorithmic subtyping.

The declarative rule set has explicit reflexivity and transitivity and is
therefore not syntax directed.  The checker here dispatches on the head
constructors of both sides instead; reflexivity and transitivity are
admissible, which the harness verifies against the declarative search.

Tag names get their types from :func:`name_tag_type`, which never needs a
subtyping premise.  That is what breaks the cycle between subtyping of
tagged types and typing of names.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .substitution import unfold_mu
from .syntax import (
    AmberEnv, FstN, Mu, Name, Prod, RCons, RNil, Sum, TagCtx, TagRef, TagTy,
    TagTyExt, Tagged, Ty, TyVar, TypingCtx, UnfoldN, Var, extend, free_ty_vars, record_fields,
    wellformed_ty,
)


class SubtypeFuelExhausted(Exception):
    pass


@dataclass(frozen=True)
class SubtypeQuery:
    lhs: Ty
    rhs: Ty
    gamma: TypingCtx = field(default_factory=dict)
    sigma: TagCtx = field(default_factory=dict)
    delta: AmberEnv = frozenset()


def name_tag_type(gamma: TypingCtx, sigma: TagCtx, n: Name) -> Optional[Ty]:
    """The subsumption-free type of a name, or None when it has none."""
    match n:
        case Var(x):
            return gamma.get(x)
        case TagRef(c):
            entry = sigma.get(c)
            if entry is None:
                return None
            if entry.parent is None:
                return TagTy(entry.body)
            return TagTyExt(entry.body, entry.parent)
        case FstN(inner):
            T = name_tag_type(gamma, sigma, inner)
            return T.first if isinstance(T, Sum) else None
        case UnfoldN(inner):
            T = name_tag_type(gamma, sigma, inner)
            return unfold_mu(T) if isinstance(T, Mu) else None
    return None


def ancestor_chain(gamma: TypingCtx, sigma: TagCtx, n: Name) -> list[Name]:
    chain = [n]
    while True:
        T = name_tag_type(gamma, sigma, chain[-1])
        if not isinstance(T, TagTyExt) or T.parent in chain:
            return chain
        chain.append(T.parent)


def mutual_supertype(gamma: TypingCtx, sigma: TagCtx, n: Name, m: Name) -> bool:
    mine = ancestor_chain(gamma, sigma, n)
    return any(a in mine for a in ancestor_chain(gamma, sigma, m))


def _amber_reaches(delta: AmberEnv, a: str, b: str) -> bool:
    seen = {a}
    frontier = [a]
    while frontier:
        s = frontier.pop()
        for (p, q) in delta:
            if p == s and q not in seen:
                if q == b:
                    return True
                seen.add(q)
                frontier.append(q)
    return False


def binders_agree(x: str, body_x: Ty, y: str, body_y: Ty) -> bool:
    """Prod and Sum binders match when equal, or when neither occurs in its
    body, in which case the two types are alpha-equivalent by renaming."""
    return x == y or (x not in free_ty_vars(body_x) and y not in free_ty_vars(body_y))


def _under(gamma: TypingCtx, x: str, y: str, T: Ty) -> TypingCtx:
    # A vacuous binder must not shadow an outer variable of the same name.
    return extend(gamma, x, T) if x == y else gamma


def is_subtype(
    lhs: Ty,
    rhs: Ty,
    gamma: TypingCtx,
    sigma: TagCtx,
    delta: AmberEnv = frozenset(),
    fuel: Optional[list[int]] = None,
) -> bool:
    if fuel is not None:
        fuel[0] -= 1
        if fuel[0] < 0:
            raise SubtypeFuelExhausted
    if lhs == rhs:
        return True
    match lhs, rhs:
        case TyVar(a), TyVar(b):
            return _amber_reaches(delta, a, b)
        case Mu(a, s), Mu(b, t):
            return is_subtype(s, t, gamma, sigma, delta | {(a, b)}, fuel)
        case (RNil() | RCons()), (RNil() | RCons()):
            if not (wellformed_ty(lhs) and wellformed_ty(rhs)):
                return False
            have = dict(record_fields(lhs))
            for label, want in record_fields(rhs):
                got = have.get(label)
                if got is None or not is_subtype(got, want, gamma, sigma, delta, fuel):
                    return False
            return True
        case Prod(x, a, b), Prod(y, c, d) if binders_agree(x, b, y, d):
            return is_subtype(c, a, gamma, sigma, delta, fuel) and is_subtype(
                b, d, _under(gamma, x, y, c), sigma, delta, fuel
            )
        case Sum(x, a, b), Sum(y, c, d) if binders_agree(x, b, y, d):
            return is_subtype(a, c, gamma, sigma, delta, fuel) and is_subtype(
                b, d, _under(gamma, x, y, a), sigma, delta, fuel
            )
        case Tagged(n), Tagged(m):
            return m in ancestor_chain(gamma, sigma, n)
        case TagTyExt(a, n), TagTyExt(b, m) if a == b:
            return m in ancestor_chain(gamma, sigma, n)
        case TagTyExt(a, _), TagTy(b):
            return a == b
    return False


def subtype_check(q: SubtypeQuery) -> bool:
    return is_subtype(q.lhs, q.rhs, q.gamma, q.sigma, q.delta)


# ---------------------------------------------------------------------------
# derivations, for the CLI


@dataclass
class Derivation:
    rule: str
    lhs: Ty
    rhs: Ty
    premises: list["Derivation"] = field(default_factory=list)

    def render(self, pretty=repr, indent: int = 0) -> str:
        pad = "  " * indent
        lines = [f"{pad}{self.rule}: {pretty(self.lhs)} <: {pretty(self.rhs)}"]
        lines += [p.render(pretty, indent + 1) for p in self.premises]
        return "\n".join(lines)


def derive(
    lhs: Ty, rhs: Ty, gamma: TypingCtx, sigma: TagCtx, delta: AmberEnv = frozenset()
) -> Optional[Derivation]:
    """A rule tree for ``lhs <: rhs`` in the algorithmic system, or None."""
    if lhs == rhs:
        return Derivation("ST-Reflexive", lhs, rhs)
    match lhs, rhs:
        case TyVar(a), TyVar(b) if _amber_reaches(delta, a, b):
            return Derivation("ST-Amber-1", lhs, rhs)
        case Mu(a, s), Mu(b, t):
            sub = derive(s, t, gamma, sigma, delta | {(a, b)})
            return sub and Derivation("ST-Amber-2", lhs, rhs, [sub])
        case (RNil() | RCons()), (RNil() | RCons()):
            if not (wellformed_ty(lhs) and wellformed_ty(rhs)):
                return None
            have = dict(record_fields(lhs))
            premises = []
            for label, want in record_fields(rhs):
                if label not in have:
                    return None
                sub = derive(have[label], want, gamma, sigma, delta)
                if sub is None:
                    return None
                premises.append(sub)
            return Derivation("ST-Record-1/2/3", lhs, rhs, premises)
        case Prod(x, a, b), Prod(y, c, d) if binders_agree(x, b, y, d):
            p1 = derive(c, a, gamma, sigma, delta)
            p2 = p1 and derive(b, d, _under(gamma, x, y, c), sigma, delta)
            return p2 and Derivation("ST-App", lhs, rhs, [p1, p2])
        case Sum(x, a, b), Sum(y, c, d) if binders_agree(x, b, y, d):
            p1 = derive(a, c, gamma, sigma, delta)
            p2 = p1 and derive(b, d, _under(gamma, x, y, a), sigma, delta)
            return p2 and Derivation("ST-Sum", lhs, rhs, [p1, p2])
        case Tagged(n), Tagged(m) if m in ancestor_chain(gamma, sigma, n):
            chain = ancestor_chain(gamma, sigma, n)
            hops = chain[: chain.index(m) + 1]
            node = Derivation("ST-Tag-1", Tagged(hops[0]), Tagged(hops[1]))
            for a, b in zip(hops[1:], hops[2:]):
                step = Derivation("ST-Tag-1", Tagged(a), Tagged(b))
                node = Derivation("ST-Transitive", lhs, Tagged(b), [node, step])
            return node
        case TagTyExt(a, n), TagTyExt(b, m) if a == b:
            sub = derive(Tagged(n), Tagged(m), gamma, sigma, delta)
            return sub and Derivation("ST-Tag-2", lhs, rhs, [sub])
        case TagTyExt(a, _), TagTy(b) if a == b:
            return Derivation("ST-Tag-3", lhs, rhs)
    return None
