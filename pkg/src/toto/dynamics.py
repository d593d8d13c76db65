"""Values and small-step reduction over (store, term) pairs.

Congruence rules thread the store through, so a tag allocated deep inside
a term is visible to the whole program.  Rule names in traces follow the
congruence chain from the outside in, e.g. ``r_let/r_cls``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .tag_store import Store, fresh_tag, path_of, store_contains, store_extend_child, store_extend_root
from .substitution import subst_tm
from .syntax import (
    App, Extract, Fix, Fold, Fst, Lam, Let, Match, NameTm, New, NewTag, Pair,
    Proj, RConsTm, RNilTm, Snd, SubTag, TagRef, Tm, Unfold, Unit, record_tm,
    tm_lookup,
)

ALLOCATING_RULES = ("r_cls", "r_ccls")


@dataclass(frozen=True)
class Stepped:
    store: Store
    term: Tm
    rule: str
    redex: Tm

    @property
    def innermost(self) -> str:
        return self.rule.rsplit("/", 1)[-1]


@dataclass(frozen=True)
class IsValue:
    pass


@dataclass(frozen=True)
class Stuck:
    reason: str


StepResult = Union[Stepped, IsValue, Stuck]


def is_value(S: Store, e: Tm) -> bool:
    match e:
        case Unit() | Lam() | RNilTm():
            return True
        case NameTm(TagRef(c)):
            return store_contains(c, S)
        case New(_, body) | Fold(_, body):
            return is_value(S, body)
        case RConsTm(_, head, tail):
            return is_value(S, head) and is_value(S, tail)
        case Pair(l, r):
            return is_value(S, l) and is_value(S, r)
    return False


def _congruence(S: Store, sub: Tm, rule: str, rebuild):
    out = _step(S, sub)
    if isinstance(out, Stepped):
        return Stepped(out.store, rebuild(out.term), f"{rule}/{out.rule}", out.redex)
    return out


def _step(S: Store, e: Tm) -> StepResult:
    if is_value(S, e):
        return IsValue()
    match e:
        case NewTag(_):
            c, S2 = fresh_tag(S)
            return Stepped(store_extend_root(c, S2), NameTm(TagRef(c)), "r_cls", e)

        case SubTag(_, parent):
            if not isinstance(parent, TagRef):
                return Stuck("SubTag of an open name")
            if path_of(parent.c, S) is None:
                return Stuck("SubTag parent not in store")
            c, S2 = fresh_tag(S)
            return Stepped(store_extend_child(c, parent.c, S2), NameTm(TagRef(c)), "r_ccls", e)

        case New(n, body):
            return _congruence(S, body, "r_new", lambda b: New(n, b))

        case Match(e1, n, y, e2, e3):
            if not is_value(S, e1):
                return _congruence(S, e1, "r_match", lambda s: Match(s, n, y, e2, e3))
            if not isinstance(e1, New):
                return Stuck("Match scrutinee is not a tagged value")
            if not isinstance(e1.n, TagRef):
                return Stuck("Match scrutinee tagged with an open name")
            if not isinstance(n, TagRef):
                return Stuck("Match pattern is an open name")
            p = path_of(e1.n.c, S)
            if p is None:
                return Stuck("Match scrutinee tag not in store")
            if n.c in p:
                return Stepped(S, subst_tm(y, e1, e2), "r_matchsuc", e)
            return Stepped(S, e3, "r_matchfail", e)

        case Extract(inner):
            if not is_value(S, inner):
                return _congruence(S, inner, "r_untag1", Extract)
            if isinstance(inner, New):
                return Stepped(S, inner.body, "r_untag2", e)
            return Stuck("Extract of non-New value")

        case Proj(inner, label):
            if not is_value(S, inner):
                return _congruence(S, inner, "r_rcdproj", lambda r: Proj(r, label))
            if not record_tm(inner):
                return Stuck("projection from a non-record")
            found = tm_lookup(label, inner)
            if found is None:
                return Stuck("projection label missing")
            return Stepped(S, found, "r_projrcd", e)

        case RConsTm(label, head, tail):
            if not is_value(S, head):
                return _congruence(S, head, "r_rcdhead", lambda h: RConsTm(label, h, tail))
            return _congruence(S, tail, "r_rcdtail", lambda t: RConsTm(label, head, t))

        case Let(x, bound, body):
            if is_value(S, bound):
                return Stepped(S, subst_tm(x, bound, body), "r_letv", e)
            return _congruence(S, bound, "r_let", lambda b: Let(x, b, body))

        case Fix(inner):
            if isinstance(inner, Lam):
                return Stepped(S, subst_tm(inner.x, e, inner.body), "r_fixb", e)
            if is_value(S, inner):
                return Stuck("Fix of a non-function value")
            return _congruence(S, inner, "r_fix", Fix)

        case Unfold(inner):
            if isinstance(inner, Fold) and is_value(S, inner.e):
                return Stepped(S, inner.e, "r_unfldfld", e)
            if is_value(S, inner):
                return Stuck("Unfold of a non-Fold value")
            return _congruence(S, inner, "r_unfld", Unfold)

        case Fold(T, inner):
            return _congruence(S, inner, "r_fld", lambda b: Fold(T, b))

        case Fst(inner) | Snd(inner):
            first = isinstance(e, Fst)
            if isinstance(inner, Pair) and is_value(S, inner):
                return Stepped(S, inner.l if first else inner.r, "r_pairv1" if first else "r_pairv2", e)
            if is_value(S, inner):
                return Stuck("projection from a non-pair value")
            return _congruence(S, inner, "r_proj1" if first else "r_proj2", Fst if first else Snd)

        case Pair(l, r):
            if not is_value(S, l):
                return _congruence(S, l, "r_pair1", lambda a: Pair(a, r))
            return _congruence(S, r, "r_pair2", lambda b: Pair(l, b))

        case App(f, a):
            if not is_value(S, f):
                return _congruence(S, f, "r_app1", lambda g: App(g, a))
            if not is_value(S, a):
                return _congruence(S, a, "r_app2", lambda b: App(f, b))
            if isinstance(f, Lam):
                return Stepped(S, subst_tm(f.x, a, f.body), "r_appabs", e)
            return Stuck("application of a non-function value")

        case NameTm(TagRef(c)):
            return Stuck(f"tag #{c} not in store")

        case NameTm(_):
            return Stuck("open name")

    return Stuck(f"no rule applies to {type(e).__name__}")


def step(S: Store, e: Tm) -> StepResult:
    return _step(S, e)


@dataclass
class Evaluation:
    store: Store
    term: Tm
    status: str  # "Value" | "Stuck" | "OutOfFuel"
    trace: list[tuple[str, Tm, Store]] = field(default_factory=list)
    reason: Optional[str] = None

    @property
    def steps(self) -> int:
        return len(self.trace)


def evaluate(S: Store, e: Tm, fuel: int = 10000) -> Evaluation:
    trace: list[tuple[str, Tm, Store]] = []
    for _ in range(fuel):
        out = step(S, e)
        if isinstance(out, IsValue):
            return Evaluation(S, e, "Value", trace)
        if isinstance(out, Stuck):
            return Evaluation(S, e, "Stuck", trace, out.reason)
        S, e = out.store, out.term
        trace.append((out.rule, e, S))
    if is_value(S, e):
        return Evaluation(S, e, "Value", trace)
    out = step(S, e)
    if isinstance(out, Stuck):
        return Evaluation(S, e, "Stuck", trace, out.reason)
    return Evaluation(S, e, "OutOfFuel", trace)
