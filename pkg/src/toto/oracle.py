"""Declarative subtyping, decided by saturation over a finite universe.

The declarative rules include explicit reflexivity and transitivity, so
proof search is not syntax directed.  Instead of searching, the relation
is computed bottom-up: level ``k`` holds every judgement with a derivation
of height ``k`` whose premises all mention types from the universe.  The
minimum height of each judgement is kept, so a depth-bounded query is a
dictionary lookup.

Premises change the contexts: Amber-2 extends Δ and the product and sum
rules extend Γ.  Every (Δ, Γ) pair reachable from the starting one is
discovered up front and all of them are saturated together, level by
level, so that cross-context premises see consistent heights.
"""

from __future__ import annotations

from itertools import permutations
from typing import Iterable, Optional, Sequence

from .subtype import SubtypeQuery, name_tag_type
from .syntax import (
    AmberEnv, FstN, Mu, Name, Prod, RCons, RNil, Sum, TagCtx, TagEntry, TagRef,
    TagTy, TagTyExt, Tagged, Top, Ty, TyVar, TypingCtx, UnfoldN, Var, record_fields,
    free_ty_vars, record_of, wellformed_ty,
)


# ---------------------------------------------------------------------------
# the enumeration universe


def enumerate_types(tag_count: int, labels: Sequence[str], depth: int) -> list[Ty]:
    """Every wellformed type of depth at most ``depth`` over a small alphabet."""
    if depth <= 0:
        return []
    out: list[Ty] = [Top(), TyVar("t"), RNil()]
    depth_of = {T: 1 for T in out}
    for d in range(2, depth + 1):
        smaller = list(out)
        fresh: list[Ty] = []
        if d == 2:
            fresh += [Tagged(TagRef(i)) for i in range(tag_count)]
            fresh.append(TagTy(Top()))
            fresh += [TagTyExt(Top(), TagRef(i)) for i in range(tag_count)]
        records = [T for T in smaller if isinstance(T, (RNil, RCons))]
        for label in labels:
            for head in smaller:
                for tail in records:
                    if label in (f for f, _ in record_fields(tail)):
                        continue
                    if max(depth_of[head], depth_of[tail]) == d - 1:
                        fresh.append(RCons(label, head, tail))
        for ctor in (Prod, Sum):
            for a in smaller:
                for b in smaller:
                    if max(depth_of[a], depth_of[b]) == d - 1:
                        fresh.append(ctor("x", a, b))
        fresh += [Mu("t", b) for b in smaller if depth_of[b] == d - 1]
        for T in fresh:
            depth_of[T] = d
        out += fresh
    return out


def _names_in(T: Ty) -> Iterable[Name]:
    match T:
        case Tagged(n):
            yield n
        case TagTyExt(_, n):
            yield n


def _name_vars(n: Name) -> set[str]:
    match n:
        case Var(x):
            return {x}
        case FstN(inner) | UnfoldN(inner):
            return _name_vars(inner)
    return set()


def _immediate(T: Ty) -> list[Ty]:
    match T:
        case TagTy(body):
            return [body]
        case TagTyExt(body, parent):
            return [body, Tagged(parent)]
        case Prod(_, a, b) | Sum(_, a, b):
            return [a, b]
        case Mu(_, body):
            return [body]
        case RCons():
            fields = record_fields(T)
            out = [h for _, h in fields]
            for k in range(len(fields)):
                out.append(record_of(fields[:k]))
                out.append(record_of(fields[k + 1:]))
            if len(fields) <= 4:
                out += [record_of(list(p)) for p in permutations(fields)]
            return out
    return []


def close_universe(seed: Iterable[Ty], gammas: Iterable[TypingCtx], sigma: TagCtx) -> list[Ty]:
    """Close under subterms, record prefixes and permutations, Tagged(parent)
    for extended tag types, and principal types of the names that occur."""
    gammas = list(gammas)
    seen: dict[Ty, None] = {}
    work = [T for T in seed if wellformed_ty(T)]
    while work:
        T = work.pop()
        if T in seen:
            continue
        seen[T] = None
        nxt = _immediate(T)
        for n in _names_in(T):
            for g in gammas:
                P = name_tag_type(g, sigma, n)
                if P is not None:
                    nxt.append(P)
        work += [U for U in nxt if U not in seen and wellformed_ty(U)]
    return list(seen)


# ---------------------------------------------------------------------------
# saturation


Key = tuple[AmberEnv, tuple]


class _Rel:
    __slots__ = ("succ", "pred", "height", "delta_pairs")

    def __init__(self, n: int):
        self.succ: list[set[int]] = [set() for _ in range(n)]
        self.pred: list[set[int]] = [set() for _ in range(n)]
        self.height: dict[tuple[int, int], int] = {}
        self.delta_pairs: list[tuple[int, int]] = []


class DeclarativeSubtyping:
    """Saturated declarative relation over a fixed universe and Σ."""

    def __init__(
        self,
        universe: Iterable[Ty],
        sigma: TagCtx,
        gamma: Optional[TypingCtx] = None,
        delta: AmberEnv = frozenset(),
        max_rounds: int = 8,
    ):
        self.sigma = sigma
        gamma = dict(gamma or {})
        types = close_universe(universe, [gamma], sigma)
        self.vars_used = sorted({v for T in types for n in _names_in(T) for v in _name_vars(n)})
        # The universe and the set of reachable contexts feed each other
        # through principal types of names; iterate to a fixpoint.
        for _ in range(max_rounds):
            self._index(types)
            root = self._key(delta, gamma)
            keys = self._discover(root)
            more = close_universe(types, [self._gamma_of(k) for k in keys], sigma)
            if len(more) == len(types):
                break
            types = more
        else:
            raise RuntimeError("universe closure did not stabilise")
        self.root = root
        self.keys = keys
        self.rel = {k: _Rel(len(self.types)) for k in keys}
        self.levels = self._saturate()

    # -- indexing -------------------------------------------------------------

    def _index(self, types: list[Ty]):
        self.types = types
        self.id = {T: i for i, T in enumerate(types)}
        ident = self.id
        self.prods: list[tuple[int, str, int, int]] = []
        self.sums: list[tuple[int, str, int, int]] = []
        # (dom, cod) -> [(id, binder)]
        self.prod_at: dict[tuple[int, int], list[tuple[int, str]]] = {}
        self.sum_at: dict[tuple[int, int], list[tuple[int, str]]] = {}
        self.vacuous: set[int] = set()
        self.mus: list[tuple[int, str, int]] = []
        self.record_groups: dict[tuple[str, ...], list[tuple[int, tuple[int, ...]]]] = {}
        self.tag_ext: dict[int, list[tuple[int, Name]]] = {}
        self.tagged: dict[Name, int] = {}
        self.tyvars: dict[str, int] = {}
        self.axioms: list[tuple[int, int]] = []
        for i, T in enumerate(types):
            match T:
                case Prod(x, a, b) | Sum(x, a, b):
                    into, table = (self.prods, self.prod_at) if isinstance(T, Prod) else (self.sums, self.sum_at)
                    into.append((i, x, ident[a], ident[b]))
                    table.setdefault((ident[a], ident[b]), []).append((i, x))
                    if x not in free_ty_vars(b):
                        self.vacuous.add(i)
                case Mu(t, body):
                    self.mus.append((i, t, ident[body]))
                case RNil() | RCons():
                    fields = record_fields(T)
                    labels = tuple(f for f, _ in fields)
                    self.record_groups.setdefault(labels, []).append(
                        (i, tuple(ident[h] for _, h in fields))
                    )
                    # ST-Record-1: drop a suffix of fields.
                    for k in range(len(fields)):
                        j = ident.get(record_of(fields[:k]))
                        if j is not None:
                            self.axioms.append((i, j))
                    # ST-Record-3: permutation with identical field types.
                    if 1 < len(fields) <= 4:
                        for p in permutations(fields):
                            j = ident.get(record_of(list(p)))
                            if j is not None and j != i:
                                self.axioms.append((i, j))
                case TagTyExt(body, parent):
                    self.tag_ext.setdefault(ident[body], []).append((i, parent))
                    # ST-Tag-3
                    j = ident.get(TagTy(body))
                    if j is not None:
                        self.axioms.append((i, j))
                case Tagged(n):
                    self.tagged[n] = i
                case TyVar(t):
                    self.tyvars[t] = i

    def _key(self, delta: AmberEnv, gamma: TypingCtx) -> Key:
        return (frozenset(delta), tuple((v, gamma[v]) for v in self.vars_used if v in gamma))

    @staticmethod
    def _gamma_of(key: Key) -> TypingCtx:
        return dict(key[1])

    def _extend_gamma(self, key: Key, x: str, T: Ty) -> Key:
        if x not in self.vars_used:
            return key
        g = self._gamma_of(key)
        g[x] = T
        return self._key(key[0], g)

    def _with_delta(self, key: Key, a: str, b: str) -> Key:
        return (key[0] | {(a, b)}, key[1])

    def _typing_key(self, key: Key) -> Key:
        # The premise of ST-Tag-1 is a typing judgement, which has no Δ.
        return (frozenset(), key[1])

    def _discover(self, root: Key) -> list[Key]:
        found = {root: None}
        work = [root]
        while work:
            k = work.pop()
            nxt = [self._typing_key(k)]
            nxt += [self._extend_gamma(k, x, self.types[c]) for (_, x, c, _) in self.prods]
            nxt += [self._extend_gamma(k, x, self.types[a]) for (_, x, a, _) in self.sums]
            nxt += [self._with_delta(k, a, b) for (_, a, _) in self.mus for (_, b, _) in self.mus]
            for k2 in nxt:
                if k2 not in found:
                    found[k2] = None
                    work.append(k2)
        return list(found)

    # -- the fixpoint ---------------------------------------------------------

    def _level_one(self, key: Key) -> set[tuple[int, int]]:
        out = {(i, i) for i in range(len(self.types))}
        out.update(self.axioms)
        for (a, b) in key[0]:  # ST-Amber-1
            if a in self.tyvars and b in self.tyvars:
                out.add((self.tyvars[a], self.tyvars[b]))
        out |= self._tag1(key, direct_only=True)
        return out

    def _principal(self, key: Key, n: Name) -> Optional[int]:
        P = name_tag_type(self._gamma_of(key), self.sigma, n)
        return None if P is None else self.id.get(P)

    def _tag1(self, key: Key, direct_only: bool = False) -> set[tuple[int, int]]:
        # n : Tag[T]Extends(m), directly or through subsumption, gives
        # Tagged(n) <: Tagged(m).
        out = set()
        rel = self.rel[self._typing_key(key)] if not direct_only else None
        for n, i in self.tagged.items():
            P = self._principal(key, n)
            if P is None:
                continue
            targets = {P} if direct_only else rel.succ[P]
            for t in targets:
                T = self.types[t]
                if isinstance(T, TagTyExt) and T.parent in self.tagged:
                    out.add((i, self.tagged[T.parent]))
        return out

    def _candidates(self, key: Key) -> set[tuple[int, int]]:
        rel = self.rel[key]
        succ, pred = rel.succ, rel.pred
        out: set[tuple[int, int]] = set()

        # ST-Transitive, semi-naive on last level's new pairs.
        for (a, b) in rel.delta_pairs:
            for c in succ[b]:
                out.add((a, c))
            for z in pred[a]:
                out.add((z, b))

        # ST-Record-2: same labels, same order, pointwise subtypes.
        for group in self.record_groups.values():
            if len(group) < 2 or not group[0][1]:
                continue
            for (i, fi) in group:
                for (j, fj) in group:
                    if i != j and all(b in succ[a] for a, b in zip(fi, fj)):
                        out.add((i, j))

        # ST-App: contravariant domain, codomain under x:domain'.  Binders
        # must be equal, or vacuous on both sides (then Γ is not extended).
        for (i, x, a, b) in self.prods:
            for c in pred[a]:
                self._related_pairs(out, i, x, c, b, self.prod_at,
                                    self.rel[self._extend_gamma(key, x, self.types[c])].succ, succ)

        # ST-Sum: covariant in both, second under x:first.
        for (i, x, a, b) in self.sums:
            inner = self.rel[self._extend_gamma(key, x, self.types[a])].succ
            for c in succ[a]:
                self._related_pairs(out, i, x, c, b, self.sum_at, inner, succ)

        # ST-Amber-2
        for (i, a, s) in self.mus:
            for (j, b, t) in self.mus:
                if t in self.rel[self._with_delta(key, a, b)].succ[s]:
                    out.add((i, j))

        out |= self._tag1(key)

        # ST-Tag-2: same body, parents related as tagged types.
        for entries in self.tag_ext.values():
            for (i, n) in entries:
                for (j, m) in entries:
                    if i != j and n in self.tagged and m in self.tagged:
                        if self.tagged[m] in succ[self.tagged[n]]:
                            out.add((i, j))
        return out

    def _related_pairs(self, out, i, x, c, b, table, succ_same, succ_plain):
        for d in succ_same[b]:
            for (j, y) in table.get((c, d), ()):
                if y == x:
                    out.add((i, j))
        if i in self.vacuous:
            for d in succ_plain[b]:
                for (j, y) in table.get((c, d), ()):
                    if y != x and j in self.vacuous:
                        out.add((i, j))

    def _commit(self, key: Key, pairs: Iterable[tuple[int, int]], level: int):
        rel = self.rel[key]
        fresh = []
        for (a, b) in pairs:
            if b not in rel.succ[a]:
                rel.succ[a].add(b)
                rel.pred[b].add(a)
                rel.height[(a, b)] = level
                fresh.append((a, b))
        rel.delta_pairs = fresh
        return bool(fresh)

    def _saturate(self) -> int:
        for k in self.keys:
            self._commit(k, self._level_one(k), 1)
        level = 1
        while True:
            level += 1
            batch = {k: self._candidates(k) for k in self.keys}
            changed = False
            for k in self.keys:
                changed |= self._commit(k, batch[k], level)
            if not changed:
                return level - 1

    # -- queries --------------------------------------------------------------

    def height(self, lhs: Ty, rhs: Ty, delta: Optional[AmberEnv] = None,
               gamma: Optional[TypingCtx] = None) -> Optional[int]:
        key = self.root
        if delta is not None or gamma is not None:
            key = self._key(
                self.root[0] if delta is None else frozenset(delta),
                self._gamma_of(self.root) if gamma is None else gamma,
            )
        rel = self.rel.get(key)
        i, j = self.id.get(lhs), self.id.get(rhs)
        if rel is None or i is None or j is None:
            return None
        return rel.height.get((i, j))

    def holds(self, lhs: Ty, rhs: Ty, depth: Optional[int] = None, **ctx) -> bool:
        h = self.height(lhs, rhs, **ctx)
        return h is not None and (depth is None or h <= depth)

    def pair_count(self) -> int:
        return len(self.rel[self.root].height)


def subtype_oracle(q: SubtypeQuery, depth: int, universe: Optional[Iterable[Ty]] = None) -> bool:
    """Is there a declarative derivation of height at most ``depth``?

    Transitivity's middle type ranges over ``universe`` closed as in
    :func:`close_universe`; by default the closure of the two sides.
    """
    seed = [q.lhs, q.rhs] if universe is None else list(universe) + [q.lhs, q.rhs]
    if not (wellformed_ty(q.lhs) and wellformed_ty(q.rhs)):
        return False
    rel = DeclarativeSubtyping(seed, q.sigma, q.gamma, q.delta)
    return rel.holds(q.lhs, q.rhs, depth)


def differential_sigma() -> TagCtx:
    """#0 a root tag and #1 extending it, both over Top."""
    return {0: TagEntry(Top()), 1: TagEntry(Top(), TagRef(0))}
