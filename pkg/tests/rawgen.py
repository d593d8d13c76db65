"""Seeded random raw syntax, much faster than hypothesis for bulk laws."""

import random

from toto.syntax import (
    App, Extract, Fix, Fold, Fst, FstN, Lam, Let, Match, Mu, NameTm, New,
    NewTag, Pair, Prod, Proj, RCons, RConsTm, RNil, RNilTm, Snd, SubTag, Sum,
    TagRef, TagTy, TagTyExt, Tagged, Top, TyVar, Unfold, UnfoldN, Unit, Var,
)

VARS = ("x", "y", "z", "f")
TYVARS = ("t", "s")
LABELS = ("f", "g", "h")


class Raw:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def var(self) -> str:
        return self.rng.choice(VARS)

    def name(self, d: int = 2):
        r = self.rng.random()
        if d > 0 and r < 0.2:
            return self.rng.choice([FstN, UnfoldN])(self.name(d - 1))
        return Var(self.var()) if r < 0.65 else TagRef(self.rng.randrange(4))

    def ty(self, d: int):
        if d <= 0 or self.rng.random() < 0.3:
            return self.rng.choice([Top(), RNil(), TyVar(self.rng.choice(TYVARS)), Tagged(self.name())])
        k = self.rng.randrange(6)
        T = lambda: self.ty(d - 1)
        return [
            lambda: TagTy(T()),
            lambda: TagTyExt(T(), self.name()),
            lambda: Prod(self.var(), T(), T()),
            lambda: Sum(self.var(), T(), T()),
            lambda: RCons(self.rng.choice(LABELS), T(), T()),
            lambda: Mu(self.rng.choice(TYVARS), T()),
        ][k]()

    def tm(self, d: int):
        if d <= 0 or self.rng.random() < 0.2:
            return self.rng.choice([Unit(), RNilTm(), NameTm(self.name())])
        e = lambda: self.tm(d - 1)
        T = lambda: self.ty(2)
        label = lambda: self.rng.choice(LABELS)
        options = [
            lambda: NewTag(T()),
            lambda: SubTag(T(), self.name()),
            lambda: New(self.name(), e()),
            lambda: Match(e(), self.name(), self.var(), e(), e()),
            lambda: Extract(e()),
            lambda: Lam(self.var(), T(), e()),
            lambda: App(e(), e()),
            lambda: RConsTm(label(), e(), e()),
            lambda: Proj(e(), label()),
            lambda: Let(self.var(), e(), e()),
            lambda: Fix(e()),
            lambda: Fold(T(), e()),
            lambda: Unfold(e()),
            lambda: Pair(e(), e()),
            lambda: Fst(e()),
            lambda: Snd(e()),
        ]
        return self.rng.choice(options)()
