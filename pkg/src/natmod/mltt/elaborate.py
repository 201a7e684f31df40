"""Interpretation of judgments in a natural model with type formers.

Contexts become objects reached by iterated context extension from a base
object; types and terms become elements of the model's presheaves there.
Equality is equality of denotations.  Types keep their outermost former so
that eliminators know which structure to invert.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from ..natmodel import NaturalModel
from ..fincat import terminal
from ..typeformers import Formers, RuleError
from . import syntax as sx
from .parser import ParseError, parse


class ElabError(ValueError):
    """A judgment failed to elaborate; ``obligation`` names the rule."""

    def __init__(self, obligation: str, message: str, pos: tuple[int, int] = (0, 0), **detail: Any):
        super().__init__(f"{pos[0]}:{pos[1]}: [{obligation}] {message}")
        self.obligation, self.message, self.pos, self.detail = obligation, message, pos, detail


@dataclass(frozen=True)
class SType:
    """A type at context object ``obj``: its element of ``U(obj)``, the former
    it was built with and the parts that former needs (``pi``/``sigma``:
    domain and family over ``obj·A``; ``id``: carrier type and endpoints)."""

    obj: int
    elem: int
    head: str
    parts: tuple = ()


@dataclass(frozen=True)
class Denotation:
    sort: str  # "type" or "term"
    obj: int
    elem: int
    type: SType | None = None


@dataclass(frozen=True)
class SCtx:
    obj: int
    names: tuple[str, ...]
    types: tuple[SType, ...]
    terms: tuple[int, ...]
    to_base: int


class Environment:
    """A model with its formers and the names the surface syntax may use."""

    def __init__(self, formers: Formers, *, base_object: int | None = None,
                 types: dict[str, int] | None = None, terms: dict[str, int] | None = None):
        self.F = formers
        self.M: NaturalModel = formers.M
        C = self.M.base
        self.base_object = terminal(C) if base_object is None else base_object
        self.types = dict(types or {})
        self.terms = dict(terms or {})

    # -- semantic substitution ---------------------------------------------
    def subst(self, T: SType, sigma: int) -> SType:
        """``T`` pulled back along ``σ: Δ -> T.obj``."""
        M, C = self.M, self.M.base
        if C.tgt(sigma) != T.obj:
            raise ValueError(f"substitution {sigma} does not land in {T.obj}")
        delta = C.src(sigma)
        elem = M.types.restrict(sigma, T.elem)
        if T.head in ("pi", "sigma"):
            A, B = T.parts
            A2 = self.subst(A, sigma)
            B2 = self.subst(B, M.lifted(T.obj, A.elem, sigma))
            return SType(delta, elem, T.head, (A2, B2))
        if T.head == "id":
            A, a, b = T.parts
            return SType(delta, elem, "id", (self.subst(A, sigma), M.terms.restrict(sigma, a),
                                             M.terms.restrict(sigma, b)))
        return SType(delta, elem, T.head, T.parts)

    def extend(self, G: SCtx, name: str, A: SType) -> SCtx:
        M, C = self.M, self.M.base
        w = M.extend(G.obj, A.elem)
        types = tuple(self.subst(T, w.pA) for T in G.types) + (self.subst(A, w.pA),)
        terms = tuple(M.terms.restrict(w.pA, t) for t in G.terms) + (w.qA,)
        return SCtx(w.ext, G.names + (name,), types, terms, C.compose(G.to_base, w.pA))

    def empty(self) -> SCtx:
        if self.base_object is None:
            raise ElabError("ctx.no_terminal", "the category has no terminal object for closed judgments")
        C = self.M.base
        return SCtx(self.base_object, (), (), (), C.id(self.base_object))

    def context(self, entries) -> SCtx:
        G = self.empty()
        for name, ty in entries:
            G = self.extend(G, name, self.type(G, ty))
        return G

    # -- types ---------------------------------------------------------------
    def type(self, G: SCtx, T) -> SType:
        F, M = self.F, self.M
        try:
            if isinstance(T, sx.Base):
                if T.name not in self.types:
                    raise ElabError("base.unbound", f"no base type named {T.name!r}", T.pos)
                return SType(G.obj, M.types.restrict(G.to_base, self.types[T.name]), "base", (T.name,))
            if isinstance(T, (sx.Pi, sx.Sigma)):
                A = self.type(G, T.dom)
                B = self.type(self.extend(G, T.var, A), T.cod)
                if isinstance(T, sx.Pi):
                    return SType(G.obj, F.pi_form(G.obj, A.elem, B.elem), "pi", (A, B))
                return SType(G.obj, F.sigma_form(G.obj, A.elem, B.elem), "sigma", (A, B))
            if isinstance(T, sx.Id):
                A = self.type(G, T.ty)
                a = self._check_as(G, T.lhs, A, "id.form.type_mismatch")
                b = self._check_as(G, T.rhs, A, "id.form.type_mismatch")
                return SType(G.obj, F.id_form(G.obj, A.elem, a, b), "id", (A, a, b))
        except RuleError as exc:
            raise ElabError("model.rule", str(exc), getattr(T, "pos", (0, 0))) from None
        raise TypeError(f"not a type: {T!r}")

    # -- terms ---------------------------------------------------------------
    def _check_as(self, G: SCtx, t, A: SType, obligation: str) -> int:
        try:
            return self.check(G, t, A)
        except ElabError as exc:
            if exc.obligation != "conv.mismatch":
                raise
            raise ElabError(obligation, exc.message, exc.pos, **exc.detail) from None

    def check(self, G: SCtx, t, A: SType) -> int:
        if isinstance(t, sx.Pair) and A.head == "sigma":
            A1, B = A.parts
            a = self.check(G, t.fst, A1)
            b = self.check(G, t.snd, self.subst(B, self.M.section(G.obj, A1.elem, a)))
            return self.F.sigma_pair(G.obj, A1.elem, B.elem, a, b)
        v, T = self.infer(G, t)
        if T.elem != A.elem:
            raise ElabError("conv.mismatch", f"expected type {A.elem}, got {T.elem} at object {G.obj}",
                            t.pos, expected=A.elem, actual=T.elem, object=G.obj)
        return v

    def infer(self, G: SCtx, t) -> tuple[int, SType]:
        try:
            return self._infer(G, t)
        except RuleError as exc:
            raise ElabError("model.rule", str(exc), t.pos) from None

    def _infer(self, G: SCtx, t) -> tuple[int, SType]:
        F, M = self.F, self.M
        T = M.terms
        if isinstance(t, sx.Var):
            if t.index >= len(G.terms):
                raise ElabError("var.unbound", f"variable {t.name or t.index} is not in scope", t.pos)
            return G.terms[-1 - t.index], G.types[-1 - t.index]
        if isinstance(t, sx.Const):
            if t.name not in self.terms:
                raise ElabError("var.unbound", f"no variable or constant named {t.name!r}", t.pos)
            a = T.restrict(G.to_base, self.terms[t.name])
            return a, SType(G.obj, M.type_of(G.obj, a), "base", (t.name,))
        if isinstance(t, sx.Lam):
            A = self.type(G, t.ty)
            b, B = self.infer(self.extend(G, t.var, A), t.body)
            return F.pi_lambda(G.obj, A.elem, b), SType(G.obj, F.pi_form(G.obj, A.elem, B.elem), "pi", (A, B))
        if isinstance(t, sx.App):
            f, Tf = self.infer(G, t.fn)
            if Tf.head != "pi":
                raise ElabError("pi.elim.not_function", f"applied term has no Π type (type {Tf.elem})", t.fn.pos)
            A, B = Tf.parts
            a = self._check_as(G, t.arg, A, "pi.elim.domain")
            return F.pi_app(G.obj, A.elem, B.elem, f, a), self.subst(B, M.section(G.obj, A.elem, a))
        if isinstance(t, sx.Pair):
            a, A = self.infer(G, t.fst)
            b, B = self.infer(G, t.snd)
            Bw = self.subst(B, M.extend(G.obj, A.elem).pA)
            S = SType(G.obj, F.sigma_form(G.obj, A.elem, Bw.elem), "sigma", (A, Bw))
            return F.sigma_pair(G.obj, A.elem, Bw.elem, a, b), S
        if isinstance(t, (sx.Fst, sx.Snd)):
            c, S = self.infer(G, t.arg)
            if S.head != "sigma":
                raise ElabError("sigma.elim.not_pair", f"projected term has no Σ type (type {S.elem})", t.arg.pos)
            A, B = S.parts
            a, b = F.sigma_split(G.obj, A.elem, B.elem, c)
            if isinstance(t, sx.Fst):
                return a, A
            return b, self.subst(B, M.section(G.obj, A.elem, a))
        if isinstance(t, sx.Refl):
            a, A = self.infer(G, t.arg)
            return F.id_refl(G.obj, a), SType(G.obj, F.id_form(G.obj, A.elem, a, a), "id", (A, a, a))
        if isinstance(t, sx.J):
            return self._infer_j(G, t)
        raise TypeError(f"not a term: {t!r}")

    def _infer_j(self, G: SCtx, t: sx.J) -> tuple[int, SType]:
        F, M = self.F, self.M
        q, Tq = self.infer(G, t.path)
        if Tq.head != "id":
            raise ElabError("id.elim.not_identity", f"eliminated term has no identity type (type {Tq.elem})",
                            t.path.pos)
        A, a, b = Tq.parts
        x, y, p = t.names
        G1 = self.extend(G, x, A)
        G2 = self.extend(G1, y, G1.types[-1])
        A2 = G2.types[-1]
        idA = SType(G2.obj, F.id_form(G2.obj, A2.elem, G2.terms[-2], G2.terms[-1]), "id",
                    (A2, G2.terms[-2], G2.terms[-1]))
        G3 = self.extend(G2, p, idA)
        tw = F.tower(G.obj, A.elem)
        if G3.obj != tw.top or G1.obj != tw.w1.ext:
            raise ElabError("model.rule", "context extension disagrees with the identity tower", t.pos)
        motive = self.type(G3, t.motive)
        base_ctx = SCtx(G1.obj, G.names + (t.base_var,), G1.types, G1.terms, G1.to_base)
        c = self.check(base_ctx, t.base, self.subst(motive, tw.rho))
        j = F.id_j(G.obj, A.elem, motive.elem, c)
        m1 = M.section(G.obj, A.elem, a)
        m2 = M.pair_sub(tw.w1.ext, tw.A1, m1, b)
        m3 = M.pair_sub(tw.w2.ext, tw.IdA, m2, q)
        return M.terms.restrict(m3, j), self.subst(motive, m3)

    # -- judgments -----------------------------------------------------------
    def judge(self, jd: sx.Judgment) -> Denotation | tuple[Denotation, Denotation]:
        G = self.context(jd.ctx)
        T = self.type(G, jd.type)
        if jd.kind == "type":
            return Denotation("type", G.obj, T.elem)
        a = self.check(G, jd.term, T)
        d = Denotation("term", G.obj, a, T)
        if jd.kind == "term":
            return d
        b = self.check(G, jd.other, T)
        e = Denotation("term", G.obj, b, T)
        if not check_equal(d, e):
            raise ElabError("conv.unequal", f"the two sides denote {a} and {b} at object {G.obj}",
                            jd.other.pos, lhs=a, rhs=b)
        return d, e


def check_equal(d1: Denotation, d2: Denotation) -> bool:
    """Equality of denotations; both must live in the same context and sort."""
    if d1.obj != d2.obj or d1.sort != d2.sort:
        raise ValueError("denotations live in different contexts or sorts")
    if d1.sort == "term" and d1.type is not None and d2.type is not None and d1.type.elem != d2.type.elem:
        return False
    return d1.elem == d2.elem


@dataclass
class Verdict:
    line: int
    text: str
    ok: bool
    obligation: str
    message: str
    expect: str | None
    denotation: Any = None

    @property
    def as_expected(self) -> bool:
        if self.expect is None:
            return self.ok
        return self.obligation == self.expect

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"line": self.line, "judgment": self.text, "ok": self.ok,
                               "obligation": self.obligation, "message": self.message,
                               "as_expected": self.as_expected}
        if self.expect is not None:
            out["expect"] = self.expect
        return out


def elaborate(jd: sx.Judgment, env: Environment):
    return env.judge(jd)


def typecheck(text: str, env: Environment) -> list[Verdict]:
    """Elaborate every judgment of a corpus; parse errors abort the whole file."""
    out = []
    for jd in parse(text):
        try:
            d = env.judge(jd)
            out.append(Verdict(jd.line, jd.text, True, "ok", "", jd.expect, d))
        except ElabError as exc:
            line, col = exc.pos
            out.append(Verdict(jd.line, jd.text, False, exc.obligation, f"{line}:{col}: {exc.message}", jd.expect))
    return out


__all__ = ["Denotation", "ElabError", "Environment", "ParseError", "SCtx", "SType", "Verdict", "check_equal",
           "elaborate", "typecheck"]
