"""Random well-typed closed programs over a random tag forest.

Generation is type directed: pick a target type, then build a term aimed
at it from introduction forms, eliminations of freshly built values,
variables in scope, and the tag constructs (NewTag, SubTag, New, Match,
Extract).  Every candidate is run through the typechecker, so a generator
bug can only cost retries, never an ill-typed case.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .tag_store import EMPTY, Store, store_extend_child, store_extend_root
from .substitution import subst_name_ty, unfold_mu
from .subtype import ancestor_chain, is_subtype, mutual_supertype, name_tag_type
from .syntax import (
    App, Extract, Fix, Fold, Fst, Lam, Let, Match, Mu, Name, NameTm, New, NewTag,
    Pair, Prod, Proj, RCons, RConsTm, RNil, RNilTm, Snd, SubTag, Sum, TagCtx,
    TagEntry, TagRef, TagTy, TagTyExt, Tagged, Tm, Top, Ty, TypingCtx, TyVar,
    Unfold, Unit, Var, free_ty_vars, record_fields, record_of, subterms,
)
from .typing import TypeCheckError, synthesize

LABELS = ("f", "g", "h")


@dataclass(frozen=True)
class TestCase:
    gamma: TypingCtx
    sigma: TagCtx
    store: Store
    term: Tm
    ty: Ty
    seed: int
    attempts: int = field(default=1, compare=False)

    __test__ = False  # not a pytest class


def tag_forest(rng: random.Random, max_tags: int = 4) -> tuple[TagCtx, Store]:
    """A random Σ and the matching store: roots over Top or {f:Top}, each
    child refining its parent's body by width."""
    sigma: dict[int, TagEntry] = {}
    store = EMPTY
    for c in range(rng.randint(1, max_tags)):
        if c == 0 or rng.random() < 0.35:
            body = rng.choice([Top(), record_of([("f", Top())])])
            sigma[c] = TagEntry(body)
            store = store_extend_root(c, store)
        else:
            p = rng.randrange(c)
            body = sigma[p].body
            if isinstance(body, (RNil, RCons)) and rng.random() < 0.5:
                fields = record_fields(body)
                extra = [l for l in LABELS if l not in dict(fields)]
                if extra:
                    body = record_of(fields + [(extra[0], Top())])
            sigma[c] = TagEntry(body, TagRef(p))
            store = store_extend_child(c, p, store)
    return sigma, store


Env = tuple[tuple[str, Ty], ...]


class _Generator:
    def __init__(self, rng: random.Random, sigma: TagCtx):
        self.rng = rng
        self.sigma = sigma
        self.counter = 0

    # -- helpers --------------------------------------------------------------

    def fresh(self, prefix: str = "v") -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    @staticmethod
    def gamma(env: Env) -> dict[str, Ty]:
        return dict(env)

    def tag_names(self, env: Env) -> list[Name]:
        g = self.gamma(env)
        out: list[Name] = [TagRef(c) for c in sorted(self.sigma)]
        out += [Var(x) for x, T in g.items() if isinstance(T, (TagTy, TagTyExt))]
        return out

    def body_of(self, env: Env, n: Name) -> Optional[Ty]:
        T = name_tag_type(self.gamma(env), self.sigma, n)
        return T.body if isinstance(T, (TagTy, TagTyExt)) else None

    def sub(self, env: Env, a: Ty, b: Ty) -> bool:
        return is_subtype(a, b, self.gamma(env), self.sigma)

    def pick(self, options: list[tuple[float, Callable[[], Tm]]]) -> Tm:
        total = sum(w for w, _ in options)
        r = self.rng.random() * total
        for w, thunk in options:
            r -= w
            if r <= 0:
                return thunk()
        return options[-1][1]()

    # -- types ----------------------------------------------------------------

    def rand_ty(self, d: int, param: bool = False) -> Ty:
        rng = self.rng
        tags = sorted(self.sigma)
        base: list[Ty] = [Top(), Top(), Tagged(TagRef(rng.choice(tags)))]
        roots = [c for c in tags if self.sigma[c].parent is None]
        base.append(TagTy(self.sigma[rng.choice(roots)].body))
        children = [c for c in tags if self.sigma[c].parent is not None]
        if children:
            c = rng.choice(children)
            base.append(TagTyExt(self.sigma[c].body, self.sigma[c].parent))
        if d <= 0 or rng.random() < 0.4:
            return rng.choice(base)
        kind = rng.choice(["record", "record", "sum", "prod", "mu", "dep"])
        if kind == "record":
            labels = rng.sample(LABELS, rng.randint(1, 2))
            return record_of([(l, self.rand_ty(d - 1, param)) for l in labels])
        if kind == "sum":
            return Sum(rng.choice(["_", "x"]), self.rand_ty(d - 1, param), self.rand_ty(d - 1, param))
        if kind == "prod":
            return Prod("x", self.rand_ty(d - 1, param), self.rand_ty(d - 1, param))
        if kind == "mu":
            head = self.rand_ty(d - 1, param)
            if rng.random() < 0.6:
                return Mu("t", record_of([("h", head), ("k", Prod("z", Top(), TyVar("t")))]))
            return Mu("t", record_of([("h", head)]))
        # Dependent types never annotate a binder: a dependent pair bound to
        # a variable cannot be substituted back into the types that mention
        # the variable.
        if param:
            return rng.choice(base)
        B = self.sigma[rng.choice(roots)].body
        ctor = rng.choice([Prod, Sum])
        return ctor("x", TagTy(B), Tagged(Var("x")))

    # -- terms ----------------------------------------------------------------

    def gen(self, T: Ty, env: Env, d: int) -> Tm:
        g = self.gamma(env)
        usable = [x for x, S in g.items() if self.sub(env, S, T)]
        if d <= 0:
            if usable and self.rng.random() < 0.7:
                return NameTm(Var(self.rng.choice(usable)))
            return self.canon(T, env, 0)
        opts: list[tuple[float, Callable[[], Tm]]] = [(2.0, lambda: self.canon(T, env, d))]
        if usable:
            opts.append((1.5, lambda: NameTm(Var(self.rng.choice(usable)))))
        opts += [
            (3.0, lambda: self.match(T, env, d)),
            (2.0, lambda: self.let(T, env, d)),
            (1.0, lambda: self.app(T, env, d)),
            (0.8, lambda: self.proj(T, env, d)),
            (0.8, lambda: self.pair_elim(T, env, d)),
            (0.4, lambda: self.fix(T, env, d)),
            (0.4, lambda: self.unfold(T, env, d)),
        ]
        if any(self.sub(env, b, T) for b in map(lambda n: self.body_of(env, n), self.tag_names(env)) if b):
            opts.append((1.5, lambda: self.extract(T, env, d)))
        if isinstance(T, Tagged):
            opts.append((1.0, lambda: self.dep_app(T, env, d)))
        fns = [x for x, S in g.items() if isinstance(S, Prod) and S.x not in free_ty_vars(S.cod)
               and self.sub(env, S.cod, T)]
        if fns:
            opts.append((0.3, lambda: self.call(self.rng.choice(fns), env, d)))
        return self.pick(opts)

    def canon(self, T: Ty, env: Env, d: int) -> Tm:
        rng = self.rng
        match T:
            case Top():
                return Unit()
            case Tagged(n):
                # A tag below n also inhabits Tagged(n).
                below = [m for m in self.tag_names(env) if n in ancestor_chain(self.gamma(env), self.sigma, m)]
                m = rng.choice(below) if below and rng.random() < 0.5 else n
                body = self.body_of(env, m)
                return New(m, self.gen(body, env, d - 1))
            case TagTy(B):
                same = [c for c, e in sorted(self.sigma.items()) if e.body == B]
                if same and rng.random() < 0.5:
                    return NameTm(TagRef(rng.choice(same)))
                return NewTag(B)
            case TagTyExt(B, p):
                same = [c for c, e in sorted(self.sigma.items()) if e == TagEntry(B, p)]
                if same and rng.random() < 0.5:
                    return NameTm(TagRef(rng.choice(same)))
                return SubTag(B, p)
            case RNil() | RCons():
                fields = [(l, self.gen(S, env, d - 1)) for l, S in record_fields(T)]
                spare = [l for l in LABELS if l not in dict(fields)]
                if spare and rng.random() < 0.3:
                    fields.append((rng.choice(spare), Unit()))
                out: Tm = RNilTm()
                for l, e in reversed(fields):
                    out = RConsTm(l, e, out)
                return out
            case Sum(x, A, B) if x in free_ty_vars(B):
                names = [n for n in self.tag_names(env)
                         if self.sub(env, name_tag_type(self.gamma(env), self.sigma, n), A)]
                if not names:
                    return Unit()  # rejected by the typechecker; retried
                n = rng.choice(names)
                return Pair(NameTm(n), self.gen(subst_name_ty(n, x, B), env, d - 1))
            case Sum(_, A, B):
                return Pair(self.gen(A, env, d - 1), self.gen(B, env, d - 1))
            case Prod(x, A, B):
                return Lam(x, A, self.gen(B, env + ((x, A),), d - 1))
            case Mu():
                if d <= 0 and not any(self.sub(env, S, T) for _, S in env):
                    f = self.fresh("f")
                    return Fix(Lam(f, T, Fold(T, self.canon(unfold_mu(T), env + ((f, T),), 0))))
                return Fold(T, self.gen(unfold_mu(T), env, d - 1))
        return Unit()

    def match(self, T: Ty, env: Env, d: int) -> Tm:
        names = self.tag_names(env)
        g = self.gamma(env)
        # Prefer let-bound tags so the dynamic hierarchy is exercised.
        local = [n for n in names if isinstance(n, Var)]
        m = self.rng.choice(local if local and self.rng.random() < 0.6 else names)
        related = [n for n in names if mutual_supertype(g, self.sigma, m, n)]
        n = self.rng.choice(related)
        scrut = self.gen(Tagged(n), env, d - 1)
        y = self.fresh("y")
        hit = self.gen(T, env + ((y, Tagged(m)),), d - 1)
        miss = self.gen(T, env, d - 1)
        return Match(scrut, m, y, hit, miss)

    def let(self, T: Ty, env: Env, d: int) -> Tm:
        z = self.fresh("z")
        if self.rng.random() < 0.5:
            # Allocate a tag at run time: a fresh root or a subtag.
            names = self.tag_names(env)
            if self.rng.random() < 0.4:
                B = self.rand_ty(0) if self.rng.random() < 0.3 else Top()
                bound: Tm = NewTag(B)
                S: Ty = TagTy(B)
            else:
                p = self.rng.choice(names)
                B = self.body_of(env, p)
                bound, S = SubTag(B, p), TagTyExt(B, p)
        else:
            S = self.rand_ty(1, param=True)
            bound = self.gen(S, env, d - 1)
        return Let(z, bound, self.gen(T, env + ((z, S),), d - 1))

    def app(self, T: Ty, env: Env, d: int) -> Tm:
        x = self.fresh("x")
        S = self.rand_ty(1, param=True)
        return App(Lam(x, S, self.gen(T, env + ((x, S),), d - 1)), self.gen(S, env, d - 1))

    def dep_app(self, T: Tagged, env: Env, d: int) -> Tm:
        n = T.n
        tag_ty = name_tag_type(self.gamma(env), self.sigma, n)
        if not isinstance(tag_ty, (TagTy, TagTyExt)):
            return self.canon(T, env, d)
        return App(Lam("x", tag_ty, New(Var("x"), self.gen(tag_ty.body, env, d - 1))), NameTm(n))

    def call(self, f: str, env: Env, d: int) -> Tm:
        F = self.gamma(env)[f]
        return App(NameTm(Var(f)), self.gen(F.dom, env, d - 1))

    def extract(self, T: Ty, env: Env, d: int) -> Tm:
        names = [n for n in self.tag_names(env) if (b := self.body_of(env, n)) is not None and self.sub(env, b, T)]
        n = self.rng.choice(names)
        return Extract(self.gen(Tagged(n), env, d - 1))

    def proj(self, T: Ty, env: Env, d: int) -> Tm:
        label = self.rng.choice(LABELS)
        return Proj(self.gen(RCons(label, T, RNil()), env, d - 1), label)

    def pair_elim(self, T: Ty, env: Env, d: int) -> Tm:
        other = self.rand_ty(0)
        if self.rng.random() < 0.5:
            return Fst(self.gen(Sum("_", T, other), env, d - 1))
        return Snd(self.gen(Sum("_", other, T), env, d - 1))

    def fix(self, T: Ty, env: Env, d: int) -> Tm:
        f, z = self.fresh("f"), self.fresh("z")
        P = Prod(z, Top(), T)
        body = self.gen(T, env + ((f, P), (z, Top())), d - 1)
        return App(Fix(Lam(f, P, Lam(z, Top(), body))), Unit())

    def unfold(self, T: Ty, env: Env, d: int) -> Tm:
        M = Mu("t", record_of([("h", T)]))
        return Proj(Unfold(self.gen(M, env, d - 1)), "h")


def gen_typed_term(seed: int, depth: int = 4, retries: int = 30) -> TestCase:
    """A closed well-typed program with a store that matches its Σ."""
    rng = random.Random(seed)
    sigma, store = tag_forest(rng)
    gen = _Generator(rng, sigma)
    for attempt in range(1, retries + 1):
        target = gen.rand_ty(2)
        term = gen.gen(target, (), depth)
        try:
            ty = synthesize({}, sigma, term)
        except TypeCheckError:
            continue
        return TestCase({}, sigma, store, term, ty, seed, attempt)
    return TestCase({}, sigma, store, Unit(), Top(), seed, retries + 1)


def construct_histogram(e: Tm) -> dict[str, int]:
    out: dict[str, int] = {}
    for s in subterms(e):
        k = type(s).__name__
        out[k] = out.get(k, 0) + 1
    return out
