"""Π, Σ and identity-type structures on a natural model.

A structure is a pair of presheaf maps (plus, for intensional identity types,
a lifting structure).  The ``check_*`` functions verify the defining squares
cell by cell; :class:`Formers` turns a verified structure into the term-level
rule operations (λ, application, pairing, projections, refl, J).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from . import presheaf as ps
from .natmodel import Extension, NaturalModel
from .polynomial import PolyApplication, element_to_pair, pair_to_element, poly_apply, poly_map
from .presheaf import NatTrans, Presheaf, PresheafError, PullbackPS, SliceExponential
from .report import ValidationReport


class RuleError(ValueError):
    """A rule was applied to premises that do not hold."""


# ------------------------------------------------------- canonical domains

@dataclass
class SigmaDomain:
    """Quadruples ``(A, B, a, b)`` with ``b : B[a]``, stored as ``(e, a, b)``
    where ``e ∈ P_p(U)`` classifies ``(A, B)``."""

    Q: Presheaf
    pi_proj: NatTrans
    first: NatTrans
    second: NatTrans


@dataclass
class IdDomain:
    TT: PullbackPS
    delta: NatTrans


class ModelObjects:
    """The presheaves every former is stated against, built once per model."""

    def __init__(self, M: NaturalModel):
        self.M = M
        self._PU: PolyApplication | None = None
        self._PT: PolyApplication | None = None
        self._Pp: NatTrans | None = None
        self._sigma: SigmaDomain | None = None
        self._id: IdDomain | None = None

    @property
    def PU(self) -> PolyApplication:
        if self._PU is None:
            self._PU = poly_apply(self.M.p, self.M.types)
        return self._PU

    @property
    def PT(self) -> PolyApplication:
        if self._PT is None:
            self._PT = poly_apply(self.M.p, self.M.terms)
        return self._PT

    @property
    def Pp(self) -> NatTrans:
        if self._Pp is None:
            self._Pp = poly_map(self.PT, self.PU, self.M.p)
        return self._Pp

    @property
    def sigma(self) -> SigmaDomain:
        if self._sigma is None:
            self._sigma = _build_sigma_domain(self.M, self.PU)
        return self._sigma

    @property
    def ident(self) -> IdDomain:
        if self._id is None:
            TT = ps.pullback_ps(self.M.p, self.M.p)
            T = self.M.terms
            delta = TT.pair(ps.identity(T), ps.identity(T))
            self._id = IdDomain(TT, delta)
        return self._id


def model_objects(M: NaturalModel) -> ModelObjects:
    obj = getattr(M, "_objects", None)
    if obj is None:
        obj = ModelObjects(M)
        M._objects = obj  # type: ignore[attr-defined]
    return obj


def _build_sigma_domain(M: NaturalModel, PU: PolyApplication) -> SigmaDomain:
    C, p, T = M.base, M.p, M.terms
    labels = []
    for c in C.objects():
        row = []
        for e in range(PU.result.carriers[c]):
            A = PU.projection(c, e)
            for a in p.fiber(c, A):
                Ba = PU.space.at_identity(c, e, a)
                for b in p.fiber(c, Ba):
                    row.append((e, a, b))
        labels.append(row)
    where = [{lab: i for i, lab in enumerate(r)} for r in labels]
    tables = []
    for k in C.morphisms():
        d, c = C.src(k), C.tgt(k)
        tables.append(tuple(where[d][(PU.result.restrict(k, e), T.restrict(k, a), T.restrict(k, b))]
                            for e, a, b in labels[c]))
    Q = Presheaf(C, [len(r) for r in labels], tables, labels=labels, name="Q", validate=False)
    Q._index = where
    proj = NatTrans(Q, PU.result, [tuple(e for e, _, _ in r) for r in labels], validate=False)
    first = NatTrans(Q, T, [tuple(a for _, a, _ in r) for r in labels], validate=False)
    second = NatTrans(Q, T, [tuple(b for _, _, b in r) for r in labels], validate=False)
    return SigmaDomain(Q, proj, first, second)


def sigma_domain(M: NaturalModel) -> SigmaDomain:
    return model_objects(M).sigma


def id_domain(M: NaturalModel) -> IdDomain:
    return model_objects(M).ident


# ------------------------------------------------------------- structures

@dataclass
class PiStructure:
    lambda_map: NatTrans
    Pi_map: NatTrans

    def to_json(self) -> dict[str, Any]:
        return {"lambda": self.lambda_map.to_json(), "Pi": self.Pi_map.to_json()}


@dataclass
class SigmaStructure:
    pair_map: NatTrans
    Sigma_map: NatTrans
    pi_proj: NatTrans

    def to_json(self) -> dict[str, Any]:
        return {"pair": self.pair_map.to_json(), "Sigma": self.Sigma_map.to_json()}


@dataclass
class Comparison:
    """``c = (g^B, C^f): C^B -> D^B ×_{D^A} C^A`` with its pieces, all
    exponentials taken in the slice over the common base."""

    f: NatTrans
    g: NatTrans
    over: tuple[NatTrans, NatTrans, NatTrans, NatTrans]
    CB: SliceExponential
    DB: SliceExponential
    CA: SliceExponential
    DA: SliceExponential
    gB: NatTrans
    Cf: NatTrans
    Df: NatTrans
    gA: NatTrans
    target: PullbackPS
    c: NatTrans


@dataclass
class LiftingStructure:
    section: NatTrans
    comparison: Comparison

    def to_json(self) -> dict[str, Any]:
        return {"section": self.section.to_json()}


@dataclass
class IdStructure:
    i_map: NatTrans
    Id_map: NatTrans
    mode: str = "intensional"
    lifting: LiftingStructure | None = None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"mode": self.mode, "i": self.i_map.to_json(), "Id": self.Id_map.to_json()}
        if self.lifting is not None:
            out["lifting"] = self.lifting.to_json()
        return out


def _shape(report: ValidationReport, key: str, t: NatTrans, dom: Presheaf, cod: Presheaf, what: str) -> bool:
    if not (t.dom.same_as(dom) and t.cod.same_as(cod)):
        report.add(key, f"{what} has the wrong domain or codomain")
        return False
    return True


def _natural(report: ValidationReport, key: str, t: NatTrans, what: str) -> None:
    for v in ps.validate_nat_trans(t):
        report.add(key, f"{what}: {v.message}", map=what, **v.witness)


def _square(report: ValidationReport, prefix: str, top: NatTrans, left: NatTrans, right: NatTrans,
            bottom: NatTrans, *, pullback: bool = True) -> None:
    C = top.base
    bad = False
    for c in C.objects():
        for x in range(top.dom.carriers[c]):
            if right(c, top(c, x)) != bottom(c, left(c, x)):
                report.add(f"{prefix}.commute", f"square fails to commute at object {c}, element {x}",
                           object=c, element=x)
                bad = True
    if bad or not pullback:
        return
    for d in ps.pullback_square_defects(top, left, right, bottom):
        report.add(f"{prefix}.pullback", f"square is not a pullback at object {d['object']} ({d['kind']})", **d)


def check_pi(M: NaturalModel, S: PiStructure) -> ValidationReport:
    """``p∘λ = Π∘P_p(p)`` and the square is a pullback."""
    O = model_objects(M)
    report = ValidationReport()
    ok = _shape(report, "pi.shape", S.lambda_map, O.PT.result, M.terms, "lambda")
    ok = _shape(report, "pi.shape", S.Pi_map, O.PU.result, M.types, "Pi") and ok
    if not ok:
        return report
    _natural(report, "pi.natural", S.lambda_map, "lambda")
    _natural(report, "pi.natural", S.Pi_map, "Pi")
    if report:
        return report
    _square(report, "pi", S.lambda_map, O.Pp, M.p, S.Pi_map)
    return report


def check_sigma(M: NaturalModel, S: SigmaStructure) -> ValidationReport:
    O = model_objects(M)
    D = O.sigma
    report = ValidationReport()
    ok = _shape(report, "sigma.shape", S.pair_map, D.Q, M.terms, "pair")
    ok = _shape(report, "sigma.shape", S.Sigma_map, O.PU.result, M.types, "Sigma") and ok
    if not ok:
        return report
    if not S.pi_proj.same_as(D.pi_proj):
        report.add("sigma.shape", "projection is not the canonical map to P_p(U)")
        return report
    _natural(report, "sigma.natural", S.pair_map, "pair")
    _natural(report, "sigma.natural", S.Sigma_map, "Sigma")
    if report:
        return report
    _square(report, "sigma", S.pair_map, D.pi_proj, M.p, S.Sigma_map)
    return report


def _id_common(M: NaturalModel, S: IdStructure, report: ValidationReport) -> bool:
    D = model_objects(M).ident
    ok = _shape(report, "id.shape", S.i_map, M.terms, M.terms, "i")
    ok = _shape(report, "id.shape", S.Id_map, D.TT.obj, M.types, "Id") and ok
    if not ok:
        return False
    _natural(report, "id.natural", S.i_map, "i")
    _natural(report, "id.natural", S.Id_map, "Id")
    return not report


def check_id_ext(M: NaturalModel, S: IdStructure) -> ValidationReport:
    report = ValidationReport()
    if _id_common(M, S, report):
        _square(report, "id", S.i_map, model_objects(M).ident.delta, M.p, S.Id_map)
    return report


# ------------------------------------------------------ lifting structures

def comparison_map(f: NatTrans, g: NatTrans,
                   over: tuple[NatTrans, NatTrans, NatTrans, NatTrans] | None = None) -> Comparison:
    """``f: A -> B``, ``g: C -> D``; ``over`` gives the projections of
    ``A, B, C, D`` to a common base (the terminal presheaf when omitted)."""
    if over is None:
        over = (ps.to_terminal(f.dom), ps.to_terminal(f.cod), ps.to_terminal(g.dom), ps.to_terminal(g.cod))
    pa, pb, pc, pd = over
    if not (pa.dom.same_as(f.dom) and pb.dom.same_as(f.cod) and pc.dom.same_as(g.dom) and pd.dom.same_as(g.cod)):
        raise PresheafError("projections do not match the maps")
    if not ps.compose(pb, f).same_as(pa) or not ps.compose(pd, g).same_as(pc):
        raise PresheafError("maps do not live over the common base")
    CB, DB = SliceExponential(pb, pc), SliceExponential(pb, pd)
    CA, DA = SliceExponential(pa, pc), SliceExponential(pa, pd)
    gB = CB.postcompose(DB, g)
    Cf = CB.precompose(CA, f)
    Df = DB.precompose(DA, f)
    gA = CA.postcompose(DA, g)
    target = ps.pullback_ps(Df, gA)
    c = target.pair(gB, Cf)
    return Comparison(f, g, over, CB, DB, CA, DA, gB, Cf, Df, gA, target, c)


def find_lifting_structure(f: NatTrans, g: NatTrans,
                           over: tuple[NatTrans, NatTrans, NatTrans, NatTrans] | None = None,
                           *, comparison: Comparison | None = None) -> LiftingStructure | None:
    """The least section of the comparison map in lexicographic order of
    component tables, or ``None``."""
    cmp_ = comparison or comparison_map(f, g, over)
    fib = ps.fibers(cmp_.c)
    found = ps.natural_maps(cmp_.target.obj, cmp_.CB.obj, lambda c, x: fib[c].get(x, ()), limit=1)
    if not found:
        return None
    return LiftingStructure(found[0], cmp_)


def check_lifting_equivalence(f: NatTrans, g: NatTrans, s: LiftingStructure | NatTrans,
                              over: tuple[NatTrans, NatTrans, NatTrans, NatTrans] | None = None) -> ValidationReport:
    """Check the three equivalent readings of a lifting structure cell by cell:
    (1) ``s`` is a natural section of ``c``; (2) ``γ(α,β) = s∘(α,β)`` makes
    both triangles commute, naturally in the stage; (3) the transposed fillers
    solve every square and are natural under reindexing.  A disagreement
    between the three verdicts is itself reported."""
    if isinstance(s, LiftingStructure):
        cm, sec = s.comparison, s.section
    else:
        cm, sec = comparison_map(f, g, over), s
    C = f.base
    report = ValidationReport()
    tgt = cm.target.obj
    if not (sec.dom.same_as(tgt) and sec.cod.same_as(cm.CB.obj)):
        report.add("lifting.shape", "section does not map the pullback into C^B")
        return report
    verdict = {}

    # (1) natural section
    before = len(report)
    for v in ps.validate_nat_trans(sec):
        report.add("lifting.section_natural", v.message, **v.witness)
    for c in C.objects():
        for x in range(tgt.carriers[c]):
            if cm.c(c, sec(c, x)) != x:
                report.add("lifting.section", f"c∘s differs from the identity at object {c}, element {x}",
                           object=c, element=x)
    verdict[1] = len(report) == before

    # (2) γ(α, β) at representable stages
    before = len(report)
    for c in C.objects():
        for x, (beta, alpha) in enumerate(tgt.labels[c]):  # type: ignore[arg-type]
            gam = sec(c, x)
            if cm.gB(c, gam) != beta or cm.Cf(c, gam) != alpha:
                report.add("lifting.triangle", f"γ at object {c}, element {x} misses a triangle", object=c, element=x)
            for u in C.into(c):
                d = C.src(u)
                x2 = tgt.restrict(u, x)
                if cm.CB.obj.restrict(u, gam) != sec(d, x2):
                    report.add("lifting.gamma_natural", f"γ(α,β)∘u != γ(α∘u, β∘u) for u={u}",
                               object=c, element=x, u=u)
    verdict[2] = len(report) == before

    # (3) fillers by transposition
    before = len(report)
    _, _, pc, pd = cm.over
    for c in C.objects():
        for x, (beta, alpha) in enumerate(tgt.labels[c]):  # type: ignore[arg-type]
            gam = sec(c, x)
            a0 = cm.CB.proj(c, gam)
            if a0 != cm.CA.proj(c, alpha):
                report.add("lifting.filler_base", f"filler at object {c}, element {x} lies over the wrong base element",
                           object=c, element=x)
                continue
            for d, h, y in cm.CA.space.positions(c, a0):
                fill = cm.CB.space.value(c, gam, d, h, cm.f(d, y))
                if fill != cm.CA.space.value(c, alpha, d, h, y):
                    report.add("lifting.filler_top", f"filler fails the upper triangle at object {c}, element {x}",
                               object=c, element=x, position=[d, h, y])
            for d, h, y in cm.CB.space.positions(c, a0):
                fill = cm.CB.space.value(c, gam, d, h, y)
                if cm.g(d, fill) != cm.DB.space.value(c, beta, d, h, y):
                    report.add("lifting.filler_bottom", f"filler fails the lower triangle at object {c}, element {x}",
                               object=c, element=x, position=[d, h, y])
            for u in C.into(c):
                e = C.src(u)
                x2 = tgt.restrict(u, x)
                gam2 = sec(e, x2)
                if cm.CB.proj(e, gam2) != cm.CA.proj(e, tgt.labels[e][x2][1]):  # type: ignore[index]
                    continue  # reported at its own cell
                for d, h, y in cm.CB.space.positions(e, cm.CB.proj(e, gam2)):
                    if cm.CB.space.value(c, gam, d, C.compose(u, h), y) != cm.CB.space.value(e, gam2, d, h, y):
                        report.add("lifting.filler_natural", f"c(a,b)∘(u×B) != c(a∘(u×A), b∘(u×B)) for u={u}",
                                   object=c, element=x, u=u, position=[d, h, y])
                        break
    verdict[3] = len(report) == before
    if len(set(verdict.values())) > 1:
        report.add("lifting.equivalence", f"conditions disagree: {verdict}", verdict={str(k): v for k, v in verdict.items()})
    return report


# ---------------------------------------------------------- identity types

def id_lifting_problem(M: NaturalModel, S: IdStructure) -> tuple[NatTrans, NatTrans, tuple, PullbackPS]:
    """``ρ = (δ, i): Ũ -> I`` and ``U*(p): U×Ũ -> U×U`` over ``U`` with their
    projections; also returns ``I`` as a pullback."""
    D = model_objects(M).ident
    p, U, T = M.p, M.types, M.terms
    I = ps.pullback_ps(S.Id_map, p)
    rho = I.pair(D.delta, S.i_map)
    UT, UU = ps.product(U, T), ps.product(U, U)
    g = UU.pair(UT.p1, ps.compose(p, UT.p2))
    pI = ps.compose(p, ps.compose(D.TT.p1, I.p1))
    return rho, g, (p, pI, UT.p1, UU.p1), I


def id_comparison(M: NaturalModel, S: IdStructure) -> Comparison:
    cache = getattr(S, "_comparison", None)
    if cache is None:
        rho, g, over, _ = id_lifting_problem(M, S)
        cache = comparison_map(rho, g, over)
        S._comparison = cache  # type: ignore[attr-defined]
    return cache


def find_id_lifting(M: NaturalModel, S: IdStructure) -> LiftingStructure | None:
    return find_lifting_structure(*id_lifting_problem(M, S)[:2], comparison=id_comparison(M, S))


@dataclass
class IdTower:
    """``Γ·A``, ``Γ·A·A`` and ``Γ·A·A·Id_A`` with their display maps, the two
    variables ``x1, x2`` at ``Γ·A·A``, the generic element of ``I`` at the top
    and ``ρ_A: Γ·A -> Γ·A·A·Id_A``."""

    ctx: int
    A: int
    w1: Extension
    A1: int
    w2: Extension
    x1: int
    x2: int
    IdA: int
    w3: Extension
    top: int
    down: int
    generic: int
    diag: int
    rho: int


class Formers:
    """Rule operations of a natural model equipped with structures."""

    def __init__(self, M: NaturalModel, *, pi: PiStructure | None = None, sigma: SigmaStructure | None = None,
                 ident: IdStructure | None = None):
        self.M = M
        self.objects = model_objects(M)
        self.pi, self.sigma, self.ident = pi, sigma, ident
        self._lam_inv: list[dict[tuple[int, int], int]] | None = None
        self._pair_inv: list[dict[tuple[int, int], int]] | None = None
        self._I: PullbackPS | None = None
        self._towers: dict[tuple[int, int], IdTower] = {}

    # -- helpers
    def _need(self, what: str):
        s = getattr(self, what)
        if s is None:
            raise RuleError(f"the model carries no {what} structure")
        return s

    def _typed(self, ctx: int, a: int, A: int, what: str) -> None:
        if self.M.type_of(ctx, a) != A:
            raise RuleError(f"{what}: term {a} at {ctx} has type {self.M.type_of(ctx, a)}, expected {A}")

    # -- Π
    def pi_form(self, ctx: int, A: int, B: int) -> int:
        S = self._need("pi")
        return S.Pi_map(ctx, pair_to_element(self.M, self.objects.PU, ctx, A, B))

    def pi_lambda(self, ctx: int, A: int, b: int) -> int:
        S = self._need("pi")
        return S.lambda_map(ctx, pair_to_element(self.M, self.objects.PT, ctx, A, b))

    def pi_uncurry(self, ctx: int, A: int, B: int, f: int) -> int:
        """``f̃`` at ``Γ·A`` with ``λ f̃ = f``."""
        S = self._need("pi")
        O = self.objects
        self._typed(ctx, f, self.pi_form(ctx, A, B), "application")
        if self._lam_inv is None:
            self._lam_inv = []
            for c in self.M.base.objects():
                inv: dict[tuple[int, int], int] = {}
                for e in range(O.PT.result.carriers[c]):
                    key = (S.lambda_map(c, e), O.Pp(c, e))
                    if key in inv:
                        raise RuleError(f"Π structure is not a pullback at object {c}")
                    inv[key] = e
                self._lam_inv.append(inv)
        e = self._lam_inv[ctx].get((f, pair_to_element(self.M, O.PU, ctx, A, B)))
        if e is None:
            raise RuleError(f"Π structure is not a pullback: no preimage of {f} at {ctx}")
        return element_to_pair(self.M, O.PT, ctx, e)[1]

    def pi_app(self, ctx: int, A: int, B: int, f: int, a: int) -> int:
        self._typed(ctx, a, A, "application argument")
        ft = self.pi_uncurry(ctx, A, B, f)
        return self.M.terms.restrict(self.M.section(ctx, A, a), ft)

    # -- Σ
    def sigma_form(self, ctx: int, A: int, B: int) -> int:
        S = self._need("sigma")
        return S.Sigma_map(ctx, pair_to_element(self.M, self.objects.PU, ctx, A, B))

    def sigma_pair(self, ctx: int, A: int, B: int, a: int, b: int) -> int:
        S = self._need("sigma")
        self._typed(ctx, a, A, "pair first component")
        self._typed(ctx, b, self.subst_at(ctx, A, B, a), "pair second component")
        D = self.objects.sigma
        e = pair_to_element(self.M, self.objects.PU, ctx, A, B)
        return S.pair_map(ctx, D.Q.index(ctx, (e, a, b)))

    def sigma_split(self, ctx: int, A: int, B: int, c: int) -> tuple[int, int]:
        S = self._need("sigma")
        self._typed(ctx, c, self.sigma_form(ctx, A, B), "projection")
        D = self.objects.sigma
        if self._pair_inv is None:
            self._pair_inv = []
            for x in self.M.base.objects():
                inv: dict[tuple[int, int], int] = {}
                for q in range(D.Q.carriers[x]):
                    key = (S.pair_map(x, q), D.pi_proj(x, q))
                    if key in inv:
                        raise RuleError(f"Σ structure is not a pullback at object {x}")
                    inv[key] = q
                self._pair_inv.append(inv)
        q = self._pair_inv[ctx].get((c, pair_to_element(self.M, self.objects.PU, ctx, A, B)))
        if q is None:
            raise RuleError(f"Σ structure is not a pullback: no preimage of {c} at {ctx}")
        return D.first(ctx, q), D.second(ctx, q)

    def sigma_proj1(self, ctx: int, A: int, B: int, c: int) -> int:
        return self.sigma_split(ctx, A, B, c)[0]

    def sigma_proj2(self, ctx: int, A: int, B: int, c: int) -> int:
        return self.sigma_split(ctx, A, B, c)[1]

    # -- substitution helpers
    def subst_at(self, ctx: int, A: int, B: int, a: int) -> int:
        """``B[a] = B∘(1, a)`` for ``B`` at ``Γ·A``."""
        return self.M.types.restrict(self.M.section(ctx, A, a), B)

    # -- Id
    @property
    def I(self) -> PullbackPS:
        if self._I is None:
            S = self._need("ident")
            self._I = ps.pullback_ps(S.Id_map, self.M.p)
        return self._I

    def id_form(self, ctx: int, A: int, a: int, b: int) -> int:
        S = self._need("ident")
        self._typed(ctx, a, A, "identity type left endpoint")
        self._typed(ctx, b, A, "identity type right endpoint")
        return S.Id_map(ctx, self.objects.ident.TT.index(ctx, a, b))

    def id_refl(self, ctx: int, a: int) -> int:
        S = self._need("ident")
        return S.i_map(ctx, a)

    def tower(self, ctx: int, A: int) -> IdTower:
        key = (ctx, A)
        if key not in self._towers:
            M, C, T, U = self.M, self.M.base, self.M.terms, self.M.types
            TT = self.objects.ident.TT
            w1 = M.extend(ctx, A)
            A1 = U.restrict(w1.pA, A)
            w2 = M.extend(w1.ext, A1)
            x1 = T.restrict(w2.pA, w1.qA)
            x2 = w2.qA
            IdA = self.id_form(w2.ext, U.restrict(w2.pA, A1), x1, x2)
            w3 = M.extend(w2.ext, IdA)
            top = w3.ext
            down = C.chain(w1.pA, w2.pA, w3.pA)
            tt = TT.index(top, T.restrict(w3.pA, x1), T.restrict(w3.pA, x2))
            generic = self.I.index(top, tt, w3.qA)
            diag = M.pair_sub(w1.ext, A1, C.id(w1.ext), w1.qA)
            rho = M.pair_sub(w2.ext, IdA, diag, self.id_refl(w1.ext, w1.qA))
            self._towers[key] = IdTower(ctx, A, w1, A1, w2, x1, x2, IdA, w3, top, down, generic, diag, rho)
        return self._towers[key]

    def id_j(self, ctx: int, A: int, Cty: int, c: int) -> int:
        """``Γ·A·A·Id_A ⊢ j(c) : C`` for ``Γ·A·A·Id_A ⊢ C`` and ``Γ·A ⊢ c : Cρ_A``."""
        S = self._need("ident")
        if S.lifting is None:
            raise RuleError("identity structure has no lifting structure")
        tw = self.tower(ctx, A)
        M, U = self.M, self.M.types
        if not 0 <= Cty < U.carriers[tw.top]:
            raise RuleError(f"motive {Cty} is not a type at {tw.top}")
        self._typed(tw.w1.ext, c, U.restrict(tw.rho, Cty), "J premise")
        cm = S.lifting.comparison
        UU = ps.product(U, U).obj
        UT = ps.product(U, M.terms).obj
        Ah = U.restrict(tw.down, A)
        beta = cm.DB.space.from_generic(ctx, A, tw.top, tw.down, tw.generic, UU.index(tw.top, (Ah, Cty)))
        alpha = cm.CA.space.from_generic(ctx, A, tw.w1.ext, tw.w1.pA, tw.w1.qA,
                                         UT.index(tw.w1.ext, (U.restrict(tw.w1.pA, A), c)))
        try:
            x = cm.target.index(ctx, beta, alpha)
        except KeyError:
            raise RuleError("J premise does not form a commuting square") from None
        gam = S.lifting.section(ctx, x)
        _, t = UT.labels[tw.top][cm.CB.space.value(ctx, gam, tw.top, tw.down, tw.generic)]  # type: ignore[index,misc]
        return t


def check_id_int(M: NaturalModel, S: IdStructure) -> ValidationReport:
    """Commuting square, a valid lifting structure for ``ρ`` against ``U*(p)``
    over ``U``, and the computation rule ``j(c)ρ_A = c`` for every premise."""
    report = ValidationReport()
    if not _id_common(M, S, report):
        return report
    _square(report, "id", S.i_map, model_objects(M).ident.delta, M.p, S.Id_map, pullback=False)
    if report:
        return report
    if S.lifting is None:
        report.add("id.lifting_missing", "intensional identity structure without a lifting structure")
        return report
    cm = id_comparison(M, S)
    sec = S.lifting.section
    if not (sec.dom.same_as(cm.target.obj) and sec.cod.same_as(cm.CB.obj)):
        report.add("id.lifting", "lifting section is not a map between the canonical comparison objects")
        return report
    for v in ps.validate_nat_trans(sec):
        report.add("id.lifting", f"section not natural: {v.message}", **v.witness)
    for c in M.base.objects():
        for x in range(cm.target.obj.carriers[c]):
            if cm.c(c, sec(c, x)) != x:
                report.add("id.lifting", f"c∘s differs from the identity at object {c}, element {x}",
                           object=c, element=x)
    if report:
        return report
    F = Formers(M, ident=IdStructure(S.i_map, S.Id_map, S.mode, LiftingStructure(sec, cm)))
    U, T = M.types, M.terms
    for ctx in M.base.objects():
        for A in range(U.carriers[ctx]):
            tw = F.tower(ctx, A)
            for Cty in range(U.carriers[tw.top]):
                for c in M.p.fiber(tw.w1.ext, U.restrict(tw.rho, Cty)):
                    j = F.id_j(ctx, A, Cty, c)
                    if M.type_of(tw.top, j) != Cty:
                        report.add("id.elim_typing", f"j(c) does not have type C at ctx {ctx}, type {A}",
                                   ctx=ctx, type=A, motive=Cty, term=c)
                    elif T.restrict(tw.rho, j) != c:
                        report.add("id.comp", f"j(c)ρ_A != c at ctx {ctx}, type {A}", ctx=ctx, type=A,
                                   motive=Cty, term=c)
    return report


# ---------------------------------------------------------------- JSON

def load_structures(M: NaturalModel, data: dict[str, Any], *, validate: bool = True) -> dict[str, Any]:
    """Structures from their component tables; missing keys are skipped."""
    O = model_objects(M)
    out: dict[str, Any] = {}
    if "pi" in data:
        d = data["pi"]
        out["pi"] = PiStructure(NatTrans.from_json(O.PT.result, M.terms, d["lambda"], name="lambda", validate=validate),
                                NatTrans.from_json(O.PU.result, M.types, d["Pi"], name="Pi", validate=validate))
    if "sigma" in data:
        d = data["sigma"]
        D = O.sigma
        out["sigma"] = SigmaStructure(NatTrans.from_json(D.Q, M.terms, d["pair"], name="pair", validate=validate),
                                      NatTrans.from_json(O.PU.result, M.types, d["Sigma"], name="Sigma",
                                                         validate=validate), D.pi_proj)
    if "id" in data:
        d = data["id"]
        S = IdStructure(NatTrans.from_json(M.terms, M.terms, d["i"], name="i", validate=validate),
                        NatTrans.from_json(O.ident.TT.obj, M.types, d["Id"], name="Id", validate=validate),
                        str(d.get("mode", "intensional")))
        if "lifting" in d:
            cm = id_comparison(M, S)
            sec = NatTrans.from_json(cm.target.obj, cm.CB.obj, d["lifting"]["section"], name="j", validate=validate)
            S.lifting = LiftingStructure(sec, cm)
        out["id"] = S
    return out
