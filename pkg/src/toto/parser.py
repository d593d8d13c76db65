"""Recursive-descent parser for the surface syntax.

A program is an optional list of tag declarations followed by one term::

    tag #0 : Top
    tag #1 : Top extends #0
    Match{New{< >}(#1)}(#0)(y){y}{< >}

``--`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .tag_store import EMPTY, Store, StoreError, store_extend_child, store_extend_root
from .syntax import (
    App, Extract, Fix, Fold, Fst, FstN, Lam, Let, Match, Mu, Name, NameTm, New,
    NewTag, Pair, Prod, Proj, RCons, RConsTm, RNil, RNilTm, Snd, SubTag, Sum,
    TagCtx, TagEntry, TagRef, TagTy, TagTyExt, Tagged, Tm, Top, Ty, TyVar,
    Unfold, UnfoldN, Unit, Var, letrec,
)

KEYWORDS = frozenset({
    "NewTag", "SubTag", "New", "Match", "Extract", "Let", "LetRec", "be", "in",
    "Fix", "Fold", "Unfold", "Fst", "Snd", "proj", "nil", "Tag", "Extends",
    "Tagged", "Prod", "Sum", "mu", "Top", "tag", "extends",
})

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<tag>\#\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<semi>;;)
  | (?P<punct>[()\[\]{}<>,:=/|])
    """,
    re.VERBOSE,
)


class ParseError(Exception):
    def __init__(self, line: int, col: int, expected: list[str], got: str):
        self.line, self.col, self.expected, self.got = line, col, expected, got
        want = " or ".join(expected)
        super().__init__(f"parse error at {line}:{col}: expected {want}, got {got}")


@dataclass(frozen=True)
class Token:
    kind: str  # "tag" | "ident" | "kw" | "punct" | "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    last = (1, 1)
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(line, pos - line_start + 1, ["a token"], repr(text[pos]))
        kind, lexeme = m.lastgroup, m.group()
        col = pos - line_start + 1
        if kind != "ws":
            if kind == "ident" and lexeme in KEYWORDS:
                kind = "kw"
            elif kind == "semi":
                kind = "punct"
            out.append(Token(kind, lexeme, line, col))
            last = (line, col + len(lexeme) - 1)
        for i, ch in enumerate(lexeme):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    # End of input is reported at the last character of the text.
    out.append(Token("eof", "end of input", *last))
    return out


@dataclass
class Program:
    main: Tm
    sigma: TagCtx = field(default_factory=dict)
    store: Store = EMPTY
    declarations: list[tuple[int, Ty, Optional[int]]] = field(default_factory=list)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, *expected: str):
        t = self.tok
        raise ParseError(t.line, t.col, list(expected), repr(t.text) if t.kind != "eof" else t.text)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("kw", "punct") and self.tok.text == text

    def eat(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.fail("an identifier")
        t = self.tok
        self.i += 1
        return t.text

    def tag_id(self) -> int:
        if self.tok.kind != "tag":
            self.fail("a tag '#k'")
        t = self.tok
        self.i += 1
        return int(t.text[1:])

    # names -----------------------------------------------------------------

    def name(self) -> Name:
        t = self.tok
        if t.kind == "tag":
            return TagRef(self.tag_id())
        if t.kind == "ident":
            return Var(self.ident())
        for kw, ctor in (("Fst", FstN), ("Unfold", UnfoldN)):
            if self.at(kw):
                self.i += 1
                self.eat("(")
                inner = self.name()
                self.eat(")")
                return ctor(inner)
        self.fail("a name")

    # types -----------------------------------------------------------------

    def ty(self) -> Ty:
        t = self.tok
        if t.kind == "ident":
            return TyVar(self.ident())
        if self.at("Top"):
            self.i += 1
            return Top()
        if self.at("nil"):
            self.i += 1
            return RNil()
        if self.at("Tagged"):
            self.i += 1
            self.eat("(")
            n = self.name()
            self.eat(")")
            return Tagged(n)
        if self.at("Tag"):
            self.i += 1
            self.eat("[")
            body = self.ty()
            self.eat("]")
            if self.at("Extends"):
                self.i += 1
                self.eat("(")
                n = self.name()
                self.eat(")")
                return TagTyExt(body, n)
            return TagTy(body)
        if self.at("Prod") or self.at("Sum"):
            is_prod = self.tok.text == "Prod"
            self.i += 1
            self.eat("[")
            x = self.ident()
            self.eat(":")
            a = self.ty()
            self.eat("]")
            if is_prod:
                self.eat(",")
                return Prod(x, a, self.ty())
            return Sum(x, a, self.ty())
        if self.at("mu"):
            self.i += 1
            self.eat("(")
            v = self.ident()
            self.eat(")")
            self.eat(":")
            return Mu(v, self.ty())
        if self.at("{"):
            return self.record(self.ty, ":", RNil, RCons)
        if self.at("("):
            self.i += 1
            T = self.ty()
            self.eat(")")
            return T
        self.fail("a type")

    def record(self, item, sep: str, nil, cons):
        self.eat("{")
        fields = []
        tail = nil()
        if not self.at("}"):
            while True:
                label = self.ident()
                self.eat(sep)
                fields.append((label, item()))
                if self.at(";;"):
                    self.i += 1
                    continue
                if self.at("|"):
                    self.i += 1
                    tail = item()
                break
        self.eat("}")
        for label, v in reversed(fields):
            tail = cons(label, v, tail)
        return tail

    # terms -----------------------------------------------------------------

    def braced(self) -> Tm:
        self.eat("{")
        e = self.tm()
        self.eat("}")
        return e

    def bracket_ty(self) -> Ty:
        self.eat("[")
        T = self.ty()
        self.eat("]")
        return T

    def paren_name(self) -> Name:
        self.eat("(")
        n = self.name()
        self.eat(")")
        return n

    def tm(self) -> Tm:
        if self.at("/"):
            self.i += 1
            x = self.ident()
            self.eat(":")
            T = self.ty()
            self.eat(",")
            return Lam(x, T, self.tm())
        if self.at("Let"):
            self.i += 1
            x = self.ident()
            self.eat("be")
            bound = self.tm()
            self.eat("in")
            return Let(x, bound, self.tm())
        if self.at("LetRec"):
            self.i += 1
            x = self.ident()
            self.eat(":")
            T = self.ty()
            self.eat("be")
            bound = self.tm()
            self.eat("in")
            return letrec(x, T, bound, self.tm())
        e = self.postfix()
        while self.starts_atom():
            e = App(e, self.postfix())
        return e

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("tag", "ident"):
            return True
        return t.kind in ("kw", "punct") and t.text in (
            "NewTag", "SubTag", "New", "Match", "Extract", "Fix", "Fold",
            "Unfold", "Fst", "Snd", "nil", "{", "<", "(",
        )

    def postfix(self) -> Tm:
        e = self.atom()
        while self.at("proj"):
            self.i += 1
            e = Proj(e, self.ident())
        return e

    def atom(self) -> Tm:
        t = self.tok
        if t.kind in ("tag", "ident"):
            return NameTm(self.name())
        if t.kind not in ("kw", "punct"):
            self.fail("a term")
        match t.text:
            case "NewTag":
                self.i += 1
                return NewTag(self.bracket_ty())
            case "SubTag":
                self.i += 1
                T = self.bracket_ty()
                return SubTag(T, self.paren_name())
            case "New":
                self.i += 1
                body = self.braced()
                return New(self.paren_name(), body)
            case "Match":
                self.i += 1
                e1 = self.braced()
                n = self.paren_name()
                self.eat("(")
                y = self.ident()
                self.eat(")")
                e2 = self.braced()
                return Match(e1, n, y, e2, self.braced())
            case "Extract":
                self.i += 1
                return Extract(self.braced())
            case "Fix":
                self.i += 1
                return Fix(self.braced())
            case "Fold":
                self.i += 1
                T = self.bracket_ty()
                return Fold(T, self.braced())
            case "Unfold" | "Fst" | "Snd":
                self.i += 1
                if self.at("("):
                    # a name: Fst(n) / Unfold(n)
                    if t.text == "Snd":
                        self.fail("'{'")
                    self.i -= 1
                    return NameTm(self.name())
                inner = self.braced()
                return {"Unfold": Unfold, "Fst": Fst, "Snd": Snd}[t.text](inner)
            case "nil":
                self.i += 1
                return RNilTm()
            case "{":
                return self.record(self.tm, "=", RNilTm, RConsTm)
            case "<":
                self.i += 1
                if self.at(">"):
                    self.i += 1
                    return Unit()
                left = self.tm()
                self.eat(",")
                right = self.tm()
                self.eat(">")
                return Pair(left, right)
            case "(":
                self.i += 1
                e = self.tm()
                self.eat(")")
                return e
        self.fail("a term")

    def end(self):
        if self.tok.kind != "eof":
            self.fail("end of input")

    # programs --------------------------------------------------------------

    def program(self) -> Program:
        sigma: dict = {}
        store = EMPTY
        decls = []
        while self.at("tag"):
            start = self.tok
            self.i += 1
            c = self.tag_id()
            self.eat(":")
            T = self.ty()
            parent = None
            if self.at("extends"):
                self.i += 1
                parent = self.tag_id()
            try:
                if c in sigma:
                    raise StoreError(f"tag #{c} declared twice")
                if parent is None:
                    store = store_extend_root(c, store)
                else:
                    store = store_extend_child(c, parent, store)
            except StoreError as err:
                raise ParseError(start.line, start.col, ["a valid tag declaration"], str(err)) from None
            sigma[c] = TagEntry(T, None if parent is None else TagRef(parent))
            decls.append((c, T, parent))
        main = self.tm()
        self.end()
        return Program(main, sigma, store, decls)


def parse_program(text: str) -> Program:
    return _Parser(text).program()


def parse_tm(text: str) -> Tm:
    p = _Parser(text)
    e = p.tm()
    p.end()
    return e


def parse_ty(text: str) -> Ty:
    p = _Parser(text)
    T = p.ty()
    p.end()
    return T


def pretty_program(prog: Program) -> str:
    from .pretty import pretty_tm, pretty_ty

    lines = []
    for c, T, parent in prog.declarations:
        ext = "" if parent is None else f" extends #{parent}"
        lines.append(f"tag #{c} : {pretty_ty(T)}{ext}")
    lines.append(pretty_tm(prog.main))
    return "\n".join(lines)
