"""Recursive-descent parser for judgments.

Grammar (one judgment per line, ``#`` starts a comment)::

    judgment ::= ctx '|-' T 'type' | ctx '|-' t ':' T | ctx '|-' t '=' t ':' T
    ctx      ::= '()' | empty | ctx ',' x ':' T
    T        ::= 'Pi' x ':' T '.' T | 'Sigma' x ':' T '.' T | 'Id' A a a | A
    A        ::= 'base' NAME | NAME | '(' T ')'
    t        ::= 'lam' x ':' T '.' t | h a*
    h        ::= 'pair' a a | 'fst' a | 'snd' a | 'refl' a
               | 'J' '(' x y p '.' T ')' '(' z '.' t ')' a | a
    a        ::= x | '(' t ')'

A comment of the form ``# expect: OBLIGATION`` (or ``# expect: ok``) records
the verdict a corpus line is expected to produce.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import App, Base, Const, Fst, Id, J, Judgment, Lam, Pair, Pi, Refl, Sigma, Snd, Term, Type, Var

KEYWORDS = {"Pi", "Sigma", "Id", "base", "lam", "pair", "fst", "snd", "refl", "J", "type"}
_TOKEN = re.compile(r"\s*(?:(\|-)|([A-Za-z_][A-Za-z0-9_']*)|([().,:=]))")
_EXPECT = re.compile(r"#\s*expect\s*:\s*([A-Za-z0-9_.]+)")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message, self.line, self.col = message, line, col


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "sym" or "eof"
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1) -> list[Token]:
    out = []
    i = 0
    code = text.split("#", 1)[0]
    while i < len(code):
        if code[i:].strip() == "":
            break
        m = _TOKEN.match(code, i)
        if m is None:
            j = i
            while j < len(code) and code[j].isspace():
                j += 1
            raise ParseError(f"unexpected character {code[j]!r}", line, j + 1)
        start = m.start(m.lastindex)  # type: ignore[arg-type]
        tok = m.group(m.lastindex)  # type: ignore[arg-type]
        out.append(Token("name" if m.lastindex == 2 else "sym", tok, line, start + 1))
        i = m.end()
    out.append(Token("eof", "", line, len(code.rstrip()) + 1))
    return out


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    # -- token helpers
    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        return self.cur.text == text and self.cur.kind != "eof"

    def eat(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        tok = self.cur
        self.i += 1
        return tok

    def fail(self, message: str):
        tok = self.cur
        found = "end of line" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"{message}, found {found}", tok.line, tok.col)

    def ident(self) -> Token:
        tok = self.cur
        if tok.kind != "name" or tok.text in KEYWORDS:
            self.fail("expected a variable name")
        self.i += 1
        return tok

    # -- types
    def type_(self, env: list[str]) -> Type:
        tok = self.cur
        pos = (tok.line, tok.col)
        if self.at("Pi") or self.at("Sigma"):
            self.i += 1
            x = self.ident().text
            self.eat(":")
            dom = self.type_(env)
            self.eat(".")
            cod = self.type_(env + [x])
            return (Pi if tok.text == "Pi" else Sigma)(x, dom, cod, pos)
        if self.at("Id"):
            self.i += 1
            ty = self.atype(env)
            lhs = self.atom(env)
            rhs = self.atom(env)
            return Id(ty, lhs, rhs, pos)
        return self.atype(env)

    def atype(self, env: list[str]) -> Type:
        tok = self.cur
        pos = (tok.line, tok.col)
        if self.at("base"):
            self.i += 1
            return Base(self.ident().text, pos)
        if self.at("("):
            self.i += 1
            t = self.type_(env)
            self.eat(")")
            return t
        if tok.kind == "name" and tok.text not in KEYWORDS:
            if tok.text in env:
                raise ParseError(f"{tok.text!r} is a term variable, not a type", tok.line, tok.col)
            self.i += 1
            return Base(tok.text, pos)
        self.fail("expected a type")
        raise AssertionError

    # -- terms
    def term(self, env: list[str]) -> Term:
        tok = self.cur
        pos = (tok.line, tok.col)
        if self.at("lam"):
            self.i += 1
            x = self.ident().text
            self.eat(":")
            ty = self.type_(env)
            self.eat(".")
            return Lam(x, ty, self.term(env + [x]), pos)
        t = self.head(env)
        while self._starts_atom():
            arg_pos = (self.cur.line, self.cur.col)
            t = App(t, self.atom(env), arg_pos)
        return t

    def _starts_atom(self) -> bool:
        tok = self.cur
        return tok.text == "(" or (tok.kind == "name" and tok.text not in KEYWORDS)

    def head(self, env: list[str]) -> Term:
        tok = self.cur
        pos = (tok.line, tok.col)
        if self.at("pair"):
            self.i += 1
            return Pair(self.atom(env), self.atom(env), pos)
        if self.at("fst") or self.at("snd") or self.at("refl"):
            self.i += 1
            return {"fst": Fst, "snd": Snd, "refl": Refl}[tok.text](self.atom(env), pos)
        if self.at("J"):
            self.i += 1
            self.eat("(")
            names = (self.ident().text, self.ident().text, self.ident().text)
            self.eat(".")
            motive = self.type_(env + list(names))
            self.eat(")")
            self.eat("(")
            z = self.ident().text
            self.eat(".")
            base = self.term(env + [z])
            self.eat(")")
            return J(names, motive, z, base, self.atom(env), pos)  # type: ignore[arg-type]
        return self.atom(env)

    def atom(self, env: list[str]) -> Term:
        tok = self.cur
        pos = (tok.line, tok.col)
        if self.at("("):
            self.i += 1
            t = self.term(env)
            self.eat(")")
            return t
        if tok.kind == "name" and tok.text not in KEYWORDS:
            self.i += 1
            for k, name in enumerate(reversed(env)):
                if name == tok.text:
                    return Var(k, name, pos)
            return Const(tok.text, pos)
        self.fail("expected a term")
        raise AssertionError

    # -- judgments
    def judgment(self) -> tuple[tuple[tuple[str, Type], ...], str, Type, Term | None, Term | None]:
        ctx: list[tuple[str, Type]] = []
        env: list[str] = []
        if self.at("("):
            self.i += 1
            self.eat(")")
            if self.at(","):
                self.i += 1
            elif not self.at("|-"):
                self.fail("expected ',' or '|-'")
        while not self.at("|-"):
            x = self.ident().text
            self.eat(":")
            ctx.append((x, self.type_(env)))
            env.append(x)
            if self.at(","):
                self.i += 1
            elif not self.at("|-"):
                self.fail("expected ',' or '|-'")
        self.eat("|-")
        start = self.i
        try:
            t = self.term(env)
            if self.at(":"):
                self.i += 1
                ty = self.type_(env)
                self._end()
                return tuple(ctx), "term", ty, t, None
            if self.at("="):
                self.i += 1
                s = self.term(env)
                self.eat(":")
                ty = self.type_(env)
                self._end()
                return tuple(ctx), "equal", ty, t, s
        except ParseError as exc:
            term_error: ParseError | None = exc
        else:
            term_error = None
        self.i = start
        try:
            ty = self.type_(env)
            self.eat("type")
            self._end()
            return tuple(ctx), "type", ty, None, None
        except ParseError as exc:
            if term_error is not None and (term_error.line, term_error.col) > (exc.line, exc.col):
                raise term_error from None
            raise

    def _end(self) -> None:
        if self.cur.kind != "eof":
            self.fail("unexpected trailing input")


def parse_type(text: str, env: list[str] | None = None, line: int = 1) -> Type:
    p = _Parser(tokenize(text, line))
    t = p.type_(list(env or []))
    p._end()
    return t


def parse_term(text: str, env: list[str] | None = None, line: int = 1) -> Term:
    p = _Parser(tokenize(text, line))
    t = p.term(list(env or []))
    p._end()
    return t


def parse_judgment(text: str, line: int = 1) -> Judgment:
    m = _EXPECT.search(text)
    expect = m.group(1) if m else None
    ctx, kind, ty, t, s = _Parser(tokenize(text, line)).judgment()
    return Judgment(ctx, kind, ty, t, s, line, text.split("#", 1)[0].strip(), expect)


def parse(text: str) -> list[Judgment]:
    """All judgments of a corpus; blank and comment-only lines are skipped."""
    out = []
    for n, raw in enumerate(text.splitlines(), start=1):
        if raw.split("#", 1)[0].strip() == "":
            continue
        out.append(parse_judgment(raw, n))
    return out
