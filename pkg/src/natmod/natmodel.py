"""Representable maps of presheaves and the context/substitution calculus they carry.

A :class:`NaturalModel` is a map ``p: terms -> types`` together with a witness
table: for each context ``Γ`` and type ``A ∈ types(Γ)`` an extension object
``Γ·A``, a display map ``pA: Γ·A -> Γ`` and a generic term ``qA`` at ``Γ·A``
making the Yoneda square a pullback.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .fincat import FinCategory
from .presheaf import (
    Element,
    NatTrans,
    Presheaf,
    PresheafError,
    element_as_map,
    is_pullback_square,
    morphism_map,
    pullback_square_defects,
    yoneda,
)
from .report import ValidationReport


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Extension:
    ext: int
    pA: int
    qA: int


class NaturalModel:
    def __init__(self, p: NatTrans, witness: dict[tuple[int, int], Extension], *, name: str = ""):
        self.p = p
        self.types: Presheaf = p.cod
        self.terms: Presheaf = p.dom
        self.base: FinCategory = p.base
        self.witness = dict(witness)
        self.name = name
        self._pair_tables: dict[tuple[int, int], dict[int, dict[tuple[int, int], int]]] = {}

    # -- judgments ---------------------------------------------------------
    def type_of(self, ctx: int, a: int) -> int:
        return self.p(ctx, a)

    def terms_of(self, ctx: int, A: int) -> list[int]:
        return self.p.fiber(ctx, A)

    def extend(self, ctx: int, A: int) -> Extension:
        try:
            return self.witness[(ctx, A)]
        except KeyError:
            raise ModelError(f"no context extension for type {A} at object {ctx}") from None

    def _pairs_into(self, ctx: int, A: int, delta: int) -> dict[tuple[int, int], int]:
        per = self._pair_tables.setdefault((ctx, A), {})
        if delta not in per:
            w = self.extend(ctx, A)
            C = self.base
            table: dict[tuple[int, int], int] = {}
            for h in C.hom(delta, w.ext):
                key = (C.compose(w.pA, h), self.terms.restrict(h, w.qA))
                if key in table:
                    raise ModelError(f"extension of type {A} at {ctx} is not a pullback: "
                                     f"two maps from {delta} give the pair {key}")
                table[key] = h
            per[delta] = table
        return per[delta]

    def pair_sub(self, ctx: int, A: int, sigma: int, a: int) -> int:
        """``(σ, a): Δ -> Γ·A`` for ``σ: Δ -> Γ`` and ``a`` a term at ``Δ`` of type ``A·σ``."""
        C = self.base
        if C.tgt(sigma) != ctx:
            raise ModelError(f"substitution {sigma} does not land in context {ctx}")
        delta = C.src(sigma)
        expected = self.types.restrict(sigma, A)
        if self.p(delta, a) != expected:
            raise ModelError(f"term {a} at {delta} has type {self.p(delta, a)}, expected {expected}")
        try:
            return self._pairs_into(ctx, A, delta)[(sigma, a)]
        except KeyError:
            raise ModelError(f"extension of type {A} at {ctx} lacks the map ({sigma}, {a})") from None

    def weaken_type(self, ctx: int, A: int, B: int) -> int:
        """``B`` at ``ctx`` pulled back to ``ctx·A``."""
        return self.types.restrict(self.extend(ctx, A).pA, B)

    def section(self, ctx: int, A: int, a: int) -> int:
        """``(1, a): Γ -> Γ·A``."""
        return self.pair_sub(ctx, A, self.base.id(ctx), a)

    def lifted(self, ctx: int, A: int, sigma: int) -> int:
        """``σ.A: Δ·Aσ -> Γ·A``, the substitution lifted under the binder."""
        delta = self.base.src(sigma)
        As = self.types.restrict(sigma, A)
        w = self.extend(delta, As)
        return self.pair_sub(ctx, A, self.base.compose(sigma, w.pA), w.qA)

    def to_json(self) -> dict[str, Any]:
        return {
            "category": self.base.to_json(),
            "types": self.types.to_json(),
            "terms": self.terms.to_json(),
            "p": self.p.to_json(),
            "witness": [
                {"ctx": g, "type": A, "ext": w.ext, "pA": w.pA, "qA": w.qA}
                for (g, A), w in sorted(self.witness.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any], base: FinCategory | None = None, *, validate: bool = True) -> "NaturalModel":
        if base is None:
            base = FinCategory.from_json(data["category"])
        U = Presheaf.from_json(base, data["types"], name="U", validate=validate)
        T = Presheaf.from_json(base, data["terms"], name="T", validate=validate)
        p = NatTrans.from_json(T, U, data["p"], name="p", validate=validate)
        witness = {}
        for w in data.get("witness", []):
            witness[(int(w["ctx"]), int(w["type"]))] = Extension(int(w["ext"]), int(w["pA"]), int(w["qA"]))
        return cls(p, witness, name=str(data.get("name", "")))


def subst_type(M: NaturalModel, A: int, sigma: int) -> int:
    return M.types.restrict(sigma, A)


def subst_term(M: NaturalModel, a: int, sigma: int) -> int:
    return M.terms.restrict(sigma, a)


def extend(M: NaturalModel, ctx: int, A: int) -> Extension:
    return M.extend(ctx, A)


def pair_sub(M: NaturalModel, ctx: int, A: int, sigma: int, a: int) -> int:
    return M.pair_sub(ctx, A, sigma, a)


def witness_square(p: NatTrans, ctx: int, A: int, w: Extension):
    """The four maps ``(top=qA, left=y(pA), right=p, bottom=A)``."""
    C = p.base
    top = element_as_map(Element(p.dom, w.ext, w.qA))
    left = morphism_map(C, w.pA)
    bottom = element_as_map(Element(p.cod, ctx, A))
    return top, left, p, bottom


def verify_witness(p: NatTrans, ctx: int, A: int, w: Extension) -> bool:
    C = p.base
    if C.src(w.pA) != w.ext or C.tgt(w.pA) != ctx:
        return False
    if p(w.ext, w.qA) != p.cod.restrict(w.pA, A):
        return False
    return is_pullback_square(*witness_square(p, ctx, A, w))


def _fiber_counts(p: NatTrans, ctx: int, A: int) -> list[int]:
    C = p.base
    U = p.cod
    out = []
    for e in C.objects():
        n = 0
        for s in C.hom(e, ctx):
            n += len(p.fiber(e, U.restrict(s, A)))
        out.append(n)
    return out


def find_witness(p: NatTrans, ctx: int, A: int) -> Extension | None:
    """Least ``(D, pA, qA)`` whose Yoneda square is a pullback."""
    C = p.base
    U, T = p.cod, p.dom
    counts = _fiber_counts(p, ctx, A)
    for d in C.objects():
        if any(len(C.hom(e, d)) != counts[e] for e in C.objects()):
            continue
        for m in C.hom(d, ctx):
            target = U.restrict(m, A)
            for y in range(T.carriers[d]):
                if p(d, y) != target:
                    continue
                w = Extension(d, m, y)
                if verify_witness(p, ctx, A, w):
                    return w
    return None


def find_representability(C: FinCategory, p: NatTrans) -> dict[tuple[int, int], Extension] | None:
    if p.base is not C:
        raise PresheafError("map is not over the given category")
    table = {}
    for ctx in C.objects():
        for A in range(p.cod.carriers[ctx]):
            w = find_witness(p, ctx, A)
            if w is None:
                return None
            table[(ctx, A)] = w
    return table


def missing_witnesses(p: NatTrans) -> list[tuple[int, int]]:
    return [(ctx, A) for ctx in p.base.objects() for A in range(p.cod.carriers[ctx])
            if find_witness(p, ctx, A) is None]


def identity_model(X: Presheaf) -> NaturalModel:
    """``id: X -> X`` with the trivial witnesses ``(Γ, id, A)``."""
    from .presheaf import identity

    C = X.base
    witness = {(c, A): Extension(c, C.id(c), A) for c in C.objects() for A in range(X.carriers[c])}
    return NaturalModel(identity(X), witness, name=f"id({X.name})")


def verify_cwf_laws(M: NaturalModel) -> ValidationReport:
    """Exhaustive check of the context-extension equations."""
    report = ValidationReport()
    C, U, T, p = M.base, M.types, M.terms, M.p
    for c in C.objects():
        for A in range(U.carriers[c]):
            if (c, A) not in M.witness:
                report.add("cwf.witness_missing", f"no extension for type {A} at {c}", ctx=c, type=A)
    # Functoriality of the actions and naturality of p (strict equality of tables).
    from .presheaf import validate_nat_trans, validate_presheaf

    for name, X in (("types", U), ("terms", T)):
        for v in validate_presheaf(X):
            report.add(f"cwf.{name}_functorial", v.message, **v.witness)
    for v in validate_nat_trans(p):
        report.add("cwf.typing_natural", v.message, **v.witness)
    if report:
        return report
    for (c, A), w in sorted(M.witness.items()):
        cell = {"ctx": c, "type": A, "ext": w.ext}
        if C.src(w.pA) != w.ext or C.tgt(w.pA) != c:
            report.add("cwf.display_shape", f"pA={w.pA} is not a map {w.ext} -> {c}", **cell)
            continue
        if p(w.ext, w.qA) != U.restrict(w.pA, A):
            report.add("cwf.generic_typing", f"qA does not have type A·pA for type {A} at {c}", **cell)
            continue
        top, left, right, bottom = witness_square(p, c, A, w)
        defects = pullback_square_defects(top, left, right, bottom)
        if defects:
            report.add("cwf.pullback", f"extension square for type {A} at {c} is not a pullback", defects=defects[:4],
                       **cell)
            continue
        # (σ, a) exists uniquely for all σ and all a of type Aσ.
        for d in C.objects():
            for sigma in C.hom(d, c):
                As = U.restrict(sigma, A)
                for a in p.fiber(d, As):
                    hits = [h for h in C.hom(d, w.ext)
                            if C.compose(w.pA, h) == sigma and T.restrict(h, w.qA) == a]
                    if len(hits) != 1:
                        report.add("cwf.pair_unique", f"(σ={sigma}, a={a}) has {len(hits)} lifts", sigma=sigma, term=a,
                                   **cell)
                        continue
                    h = M.pair_sub(c, A, sigma, a)
                    if h != hits[0]:
                        report.add("cwf.pair_sub", "pair_sub disagrees with search", sigma=sigma, term=a, **cell)
                    for tau in C.into(d):
                        lhs = C.compose(h, tau)
                        rhs = M.pair_sub(c, A, C.compose(sigma, tau), T.restrict(tau, a))
                        if lhs != rhs:
                            report.add("cwf.pair_comp", "(σ,a)∘τ != (σ∘τ, aτ)", sigma=sigma, term=a, tau=tau, **cell)
        if M.pair_sub(c, A, w.pA, w.qA) != C.id(w.ext):
            report.add("cwf.pair_eta", "(pA, qA) != id", **cell)
    return report
