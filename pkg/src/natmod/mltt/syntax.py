"""Abstract syntax: types and terms with de Bruijn variables.

Every node carries the source position ``pos = (line, column)`` it was parsed
from; positions are ignored by equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

Pos = tuple[int, int]


def _pos() -> Pos:
    return field(default=(0, 0), compare=False, repr=False)  # type: ignore[return-value]


# ------------------------------------------------------------------- types

@dataclass(frozen=True)
class Base:
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Pi:
    var: str
    dom: "Type"
    cod: "Type"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Sigma:
    var: str
    dom: "Type"
    cod: "Type"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Id:
    ty: "Type"
    lhs: "Term"
    rhs: "Term"
    pos: Pos = _pos()


Type = Union[Base, Pi, Sigma, Id]


# ------------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    index: int
    name: str = field(default="", compare=False)
    pos: Pos = _pos()


@dataclass(frozen=True)
class Const:
    """A named global term bound by the model environment."""

    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Lam:
    var: str
    ty: Type
    body: "Term"
    pos: Pos = _pos()


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Pair:
    fst: "Term"
    snd: "Term"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Fst:
    arg: "Term"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Snd:
    arg: "Term"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Refl:
    arg: "Term"
    pos: Pos = _pos()


@dataclass(frozen=True)
class J:
    """``J (x y p. motive) (z. base) path``; the motive binds three variables
    and the base case one."""

    names: tuple[str, str, str]
    motive: Type
    base_var: str
    base: "Term"
    path: "Term"
    pos: Pos = _pos()


Term = Union[Var, Const, Lam, App, Pair, Fst, Snd, Refl, J]


# -------------------------------------------------------------- judgments

@dataclass(frozen=True)
class Judgment:
    """``ctx |- T type``, ``ctx |- t : T`` or ``ctx |- t = s : T``."""

    ctx: tuple[tuple[str, Type], ...]
    kind: str
    type: Type
    term: Term | None = None
    other: Term | None = None
    line: int = 0
    text: str = ""
    expect: str | None = None


# ------------------------------------------------------- de Bruijn algebra

def shift(t, by: int, cutoff: int = 0):
    """Add ``by`` to every variable index ``>= cutoff`` in a type or term."""
    if isinstance(t, Var):
        return Var(t.index + by, t.name, t.pos) if t.index >= cutoff else t
    if isinstance(t, (Base, Const)):
        return t
    if isinstance(t, (Pi, Sigma)):
        return type(t)(t.var, shift(t.dom, by, cutoff), shift(t.cod, by, cutoff + 1), t.pos)
    if isinstance(t, Id):
        return Id(shift(t.ty, by, cutoff), shift(t.lhs, by, cutoff), shift(t.rhs, by, cutoff), t.pos)
    if isinstance(t, Lam):
        return Lam(t.var, shift(t.ty, by, cutoff), shift(t.body, by, cutoff + 1), t.pos)
    if isinstance(t, App):
        return App(shift(t.fn, by, cutoff), shift(t.arg, by, cutoff), t.pos)
    if isinstance(t, Pair):
        return Pair(shift(t.fst, by, cutoff), shift(t.snd, by, cutoff), t.pos)
    if isinstance(t, (Fst, Snd, Refl)):
        return type(t)(shift(t.arg, by, cutoff), t.pos)
    if isinstance(t, J):
        return J(t.names, shift(t.motive, by, cutoff + 3), t.base_var, shift(t.base, by, cutoff + 1),
                 shift(t.path, by, cutoff), t.pos)
    raise TypeError(f"not a syntax node: {t!r}")


def subst(t, index: int, value: Term):
    """Replace variable ``index`` by ``value`` and lower the variables above it."""
    if isinstance(t, Var):
        if t.index == index:
            return shift(value, index)
        return Var(t.index - 1, t.name, t.pos) if t.index > index else t
    if isinstance(t, (Base, Const)):
        return t
    if isinstance(t, (Pi, Sigma)):
        return type(t)(t.var, subst(t.dom, index, value), subst(t.cod, index + 1, value), t.pos)
    if isinstance(t, Id):
        return Id(subst(t.ty, index, value), subst(t.lhs, index, value), subst(t.rhs, index, value), t.pos)
    if isinstance(t, Lam):
        return Lam(t.var, subst(t.ty, index, value), subst(t.body, index + 1, value), t.pos)
    if isinstance(t, App):
        return App(subst(t.fn, index, value), subst(t.arg, index, value), t.pos)
    if isinstance(t, Pair):
        return Pair(subst(t.fst, index, value), subst(t.snd, index, value), t.pos)
    if isinstance(t, (Fst, Snd, Refl)):
        return type(t)(subst(t.arg, index, value), t.pos)
    if isinstance(t, J):
        return J(t.names, subst(t.motive, index + 3, value), t.base_var, subst(t.base, index + 1, value),
                 subst(t.path, index, value), t.pos)
    raise TypeError(f"not a syntax node: {t!r}")


def show(t, names: list[str] | None = None) -> str:
    """Pretty-print, naming variables from ``names`` (innermost last)."""

    def go(t, env: list[str]) -> str:
        if isinstance(t, Base):
            return t.name
        if isinstance(t, Var):
            return env[-1 - t.index] if t.index < len(env) else (t.name or f"#{t.index}")
        if isinstance(t, Const):
            return t.name
        if isinstance(t, (Pi, Sigma)):
            return f"({type(t).__name__} {t.var}:{go(t.dom, env)}. {go(t.cod, env + [t.var])})"
        if isinstance(t, Id):
            return f"(Id {go(t.ty, env)} {go(t.lhs, env)} {go(t.rhs, env)})"
        if isinstance(t, Lam):
            return f"(lam {t.var}:{go(t.ty, env)}. {go(t.body, env + [t.var])})"
        if isinstance(t, App):
            return f"({go(t.fn, env)} {go(t.arg, env)})"
        if isinstance(t, Pair):
            return f"(pair {go(t.fst, env)} {go(t.snd, env)})"
        if isinstance(t, (Fst, Snd, Refl)):
            return f"({type(t).__name__.lower()} {go(t.arg, env)})"
        if isinstance(t, J):
            x, y, p = t.names
            return (f"(J ({x} {y} {p}. {go(t.motive, env + [x, y, p])}) "
                    f"({t.base_var}. {go(t.base, env + [t.base_var])}) {go(t.path, env)})")
        raise TypeError(f"not a syntax node: {t!r}")

    return go(t, list(names or []))
