"""Natural models from classes of display maps.

Given a finite category and a class of morphisms closed under pullback, this
module certifies the closure conditions, builds the strictified model whose
types over ``C`` are cospans ``C -> Z <- W`` with the right leg in the class,
and synthesises Σ, Π and Id structures on it.  Every construction here is
re-checked by the independent validators in :mod:`natmod.typeformers` and
:mod:`natmod.natmodel`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

from . import presheaf as ps
from .fincat import CommutativeSquare, FinCategory, mediate, pullback, terminal
from .natmodel import Extension, NaturalModel
from .polynomial import element_to_pair
from .presheaf import NatTrans, Presheaf
from .report import CheckFailed, ValidationReport


# ------------------------------------------------------------------ classes

@dataclass
class MapClass:
    base: FinCategory
    members: frozenset[int]
    chosen: dict[tuple[int, int], CommutativeSquare] = field(default_factory=dict)

    def __contains__(self, f: int) -> bool:
        return f in self.members

    def over(self, c: int) -> list[int]:
        """Members with codomain ``c`` (objects of the display slice over ``c``)."""
        return sorted(d for d in self.members if self.base.tgt(d) == c)

    def pull(self, d: int, s: int) -> CommutativeSquare:
        """Chosen pullback of member ``d`` along ``s``: ``bottom = s``, ``right = d``,
        ``left`` is the pulled-back member."""
        try:
            return self.chosen[(d, s)]
        except KeyError:
            raise CheckFailed(f"no chosen pullback of {d} along {s}") from None

    def apex(self, d: int, s: int) -> int:
        return self.base.src(self.pull(d, s).left)

    def along(self, d: int, s: int, s2: int, u: int) -> int:
        """For ``u: dom s2 -> dom s`` with ``s∘u = s2``, the induced map between
        the chosen pullbacks of ``d`` along ``s2`` and along ``s``."""
        C = self.base
        if C.compose(s, u) != s2:
            raise CheckFailed(f"{u} is not a map over the codomain from {s2} to {s}")
        sq2, sq = self.pull(d, s2), self.pull(d, s)
        return mediate(C, sq, C.compose(u, sq2.left), sq2.top)

    def to_json(self) -> dict[str, Any]:
        return {"members": sorted(self.members)}


def load_class(C: FinCategory, data: dict[str, Any]) -> tuple[list[int], dict[str, Any]]:
    members = sorted({int(m) for m in data["members"]})
    for m in members:
        if not 0 <= m < C.n_morphisms:
            raise ValueError(f"class member {m} is not a morphism")
    return members, data


def check_stable(C: FinCategory, members: Iterable[int]) -> MapClass | ValidationReport:
    mem = frozenset(int(m) for m in members)
    report = ValidationReport()
    chosen = {}
    for d in sorted(mem):
        for s in C.into(C.tgt(d)):
            sq = pullback(C, s, d)
            if sq is None:
                report.add("stable.pullback_missing", f"member {d} has no pullback along {s}", member=d, along=s)
            elif sq.left not in mem:
                report.add("stable.leg_not_member", f"pullback of member {d} along {s} has leg {sq.left} outside the class",
                           member=d, along=s, leg=sq.left)
            else:
                chosen[(d, s)] = sq
    if report:
        return report
    return MapClass(C, mem, chosen)


# -------------------------------------------------------------- closedness

@dataclass
class RightAdjoint:
    """``d_* g`` as the member ``image`` with counit ``counit: d*(image) -> dom g``."""

    image: int
    counit: int


@dataclass
class SliceExponentialWitness:
    """Exponential of ``y`` by ``x`` in the display slice: member ``obj`` with
    evaluation ``ev`` from the chosen pullback of ``x`` along ``obj``."""

    obj: int
    ev: int


@dataclass
class ClosureCertificate:
    terminal: int
    terminal_maps: dict[int, int]
    composites: dict[tuple[int, int], int]
    right_adjoints: dict[tuple[int, int], RightAdjoint]
    exponentials: dict[tuple[int, int], SliceExponentialWitness]
    full_slice: dict[tuple[int, int], bool]

    def to_json(self) -> dict[str, Any]:
        return {
            "terminal": self.terminal,
            "terminal_maps": {str(k): v for k, v in sorted(self.terminal_maps.items())},
            "composites": len(self.composites),
            "right_adjoints": [
                {"along": d, "of": g, "image": r.image, "counit": r.counit}
                for (d, g), r in sorted(self.right_adjoints.items())
            ],
            "exponentials": [
                {"base": x, "target": y, "object": e.obj, "eval": e.ev}
                for (x, y), e in sorted(self.exponentials.items())
            ],
        }


def _pullback_functor(M: MapClass, d: int, x: int, k: int, x2: int) -> int:
    """``d*(k)`` for ``k: dom x -> dom x2`` over ``cod d``: the map between the
    chosen pullbacks of ``x`` and ``x2`` along ``d``."""
    C = M.base
    sq, sq2 = M.pull(x, d), M.pull(x2, d)
    return mediate(C, sq2, sq.left, C.compose(k, sq.top))


def _maps_over(C: FinCategory, x: int, y: int) -> list[int]:
    """Morphisms ``k: dom x -> dom y`` with ``y∘k = x``."""
    return [k for k in C.hom(C.src(x), C.src(y)) if C.compose(y, k) == x]


def find_right_adjoint(M: MapClass, d: int, g: int) -> RightAdjoint | None:
    """Search ``d_* g`` in the display slice over ``cod d`` by its universal property."""
    C = M.base
    tgt = C.tgt(d)
    tests = M.over(tgt)
    for e in M.over(tgt):
        sq = M.pull(e, d)
        for eps in C.hom(C.src(sq.left), C.src(g)):
            if C.compose(g, eps) != sq.left:
                continue
            ok = True
            for x in tests:
                got = []
                for k in _maps_over(C, x, e):
                    got.append(C.compose(eps, _pullback_functor(M, d, x, k, e)))
                want = _maps_over(C, M.pull(x, d).left, g)
                if len(got) != len(set(got)) or set(got) != set(want):
                    ok = False
                    break
            if ok:
                return RightAdjoint(e, eps)
    return None


def _exp_transpose_ok(M: MapClass, x: int, y: int, e: int, ev: int, tests: Iterable[int]) -> int | None:
    """First test object ``z`` where ``k ↦ ev∘(k ×_C x)`` is not a bijection
    ``Hom(z, e) -> Hom(z ×_C x, y)`` over ``C``; ``None`` when universal."""
    C = M.base
    sq_e = M.pull(x, e)
    for z in tests:
        sq_z = M.pull(x, z)
        got = []
        for k in _maps_over(C, z, e):
            kx = mediate(C, sq_e, C.compose(k, sq_z.left), sq_z.top)
            got.append(C.compose(ev, kx))
        over_c = C.compose(z, sq_z.left)
        want = _maps_over(C, over_c, y)
        if len(got) != len(set(got)) or set(got) != set(want):
            return z
    return None


def find_slice_exponential(M: MapClass, x: int, y: int) -> SliceExponentialWitness | None:
    C = M.base
    c = C.tgt(x)
    tests = M.over(c)
    for e in M.over(c):
        sq = M.pull(x, e)
        over_c = C.compose(e, sq.left)
        for ev in _maps_over(C, over_c, y):
            if _exp_transpose_ok(M, x, y, e, ev, tests) is None:
                return SliceExponentialWitness(e, ev)
    return None


def exponential_matches_presheaf_slice(M: MapClass, x: int, y: int, w: SliceExponentialWitness) -> bool:
    """Compare the display-slice exponential with the exponential of the
    representables ``y(x)``, ``y(y)`` computed in presheaves over ``y(cod x)``:
    ``Hom(z, e) -> (yy)^(yx)(z)`` must be bijective at every object ``z``."""
    C = M.base
    yx, yy = ps.morphism_map(C, x), ps.morphism_map(C, y)
    E = ps.slice_exponential(yx, yy)
    sq = M.pull(x, w.obj)
    Xc = yx.cod
    for z in C.objects():
        images = []
        for k in C.hom(z, C.src(w.obj)):
            u = C.compose(w.obj, k)
            a = Xc.index(z, u)

            def fn(dd: int, h: int, m_idx: int, k: int = k) -> int:
                m = yx.dom.label(dd, m_idx)
                med = mediate(C, sq, C.compose(k, h), m)
                return yy.dom.index(dd, C.compose(w.ev, med))

            try:
                images.append(E.space.index_from(z, a, fn))
            except ps.PresheafError:
                return False
        if len(images) != len(set(images)) or len(images) != E.obj.carriers[z]:
            return False
    return True


def check_closed(M: MapClass) -> ClosureCertificate | ValidationReport:
    C = M.base
    report = ValidationReport()
    t = terminal(C)
    tmaps: dict[int, int] = {}
    if t is None:
        report.add("closed.terminal", "the category has no terminal object")
        return report
    for x in C.objects():
        (m,) = C.hom(x, t)
        tmaps[x] = m
        if m not in M.members:
            report.add("closed.terminal_maps", f"the map {x} -> terminal ({m}) is not in the class", object=x, mor=m)
    if report:
        return report
    composites = {}
    for d in sorted(M.members):
        for e in sorted(M.members):
            if C.tgt(d) == C.src(e):
                h = C.compose(e, d)
                composites[(e, d)] = h
                if h not in M.members:
                    report.add("closed.composition", f"{e} after {d} = {h} is not in the class", outer=e, inner=d)
    if report:
        return report
    adjoints = {}
    for d in sorted(M.members):
        for g in M.over(C.src(d)):
            ra = find_right_adjoint(M, d, g)
            if ra is None:
                report.add("closed.right_adjoint", f"no right adjoint image of {g} along {d}", along=d, of=g)
            else:
                adjoints[(d, g)] = ra
    if report:
        return report
    exps = {}
    full = {}
    for c in C.objects():
        for x in M.over(c):
            for y in M.over(c):
                w = find_slice_exponential(M, x, y)
                if w is None:
                    report.add("closed.exponential", f"no exponential of {y} by {x} in the display slice over {c}",
                               base=x, target=y)
                    continue
                exps[(x, y)] = w
                all_c = C.into(c)
                z = _exp_transpose_ok(M, x, y, w.obj, w.ev, all_c)
                full[(x, y)] = z is None
                if z is not None:
                    report.add("closed.exponential_preserved",
                               f"exponential of {y} by {x} is not universal against {z} in the full slice",
                               base=x, target=y, test=z)
                elif not exponential_matches_presheaf_slice(M, x, y, w):
                    report.add("closed.exponential_preserved",
                               f"exponential of {y} by {x} differs from the presheaf slice exponential",
                               base=x, target=y)
    if report:
        return report
    return ClosureCertificate(t, tmaps, composites, adjoints, exps, full)


# ------------------------------------------------- anodyne and factorization

def lifting_squares(C: FinCategory, a: int, d: int) -> list[tuple[int, int]]:
    """Commutative squares ``(u, v)`` with ``d∘u = v∘a``."""
    out = []
    for u in C.hom(C.src(a), C.src(d)):
        du = C.compose(d, u)
        for v in C.hom(C.tgt(a), C.tgt(d)):
            if C.compose(v, a) == du:
                out.append((u, v))
    return out


def fillers(C: FinCategory, a: int, d: int, u: int, v: int) -> list[int]:
    return [h for h in C.hom(C.tgt(a), C.src(d)) if C.compose(h, a) == u and C.compose(d, h) == v]


def is_anodyne(C: FinCategory, M: MapClass, a: int) -> dict[tuple[int, int, int], int] | None:
    """Least filler for every square from ``a`` to every member, or ``None``."""
    cert = {}
    for d in sorted(M.members):
        for u, v in lifting_squares(C, a, d):
            fs = fillers(C, a, d, u, v)
            if not fs:
                return None
            cert[(d, u, v)] = fs[0]
    return cert


@dataclass
class Factorization:
    anodyne: int
    display: int


@dataclass
class FactorizationTable:
    mode: str  # "full" or "diagonal"
    maps: dict[int, Factorization]
    diagonals: dict[int, Factorization]
    diagonal_maps: dict[int, int]

    def to_json(self) -> dict[str, Any]:
        return {
            "mode": self.mode,
            "factorizations": [{"f": f, "anodyne": x.anodyne, "display": x.display} for f, x in sorted(self.maps.items())],
            "diagonal_factorizations": [
                {"member": d, "diagonal": self.diagonal_maps[d], "anodyne": x.anodyne, "display": x.display}
                for d, x in sorted(self.diagonals.items())
            ],
        }


class Factorizer:
    def __init__(self, M: MapClass, supplied: dict[str, Any] | None = None):
        self.M = M
        self.C = M.base
        self._anodyne: dict[int, bool] = {}
        self.supplied = {}
        self.supplied_diag = {}
        if supplied:
            for e in supplied.get("factorizations", []) or []:
                self.supplied[int(e["f"])] = Factorization(int(e["anodyne"]), int(e["display"]))
            for e in supplied.get("diagonal_factorizations", []) or []:
                self.supplied_diag[int(e["member"])] = Factorization(int(e["anodyne"]), int(e["display"]))

    def anodyne(self, a: int) -> bool:
        if a not in self._anodyne:
            self._anodyne[a] = is_anodyne(self.C, self.M, a) is not None
        return self._anodyne[a]

    def valid(self, f: int, x: Factorization) -> bool:
        C = self.C
        return (C.tgt(x.anodyne) == C.src(x.display) and C.compose(x.display, x.anodyne) == f
                and x.display in self.M and self.anodyne(x.anodyne))

    def factor(self, f: int, supplied: Factorization | None = None) -> Factorization | None:
        C = self.C
        if supplied is not None:
            return supplied if self.valid(f, supplied) else None
        if f in self.M and self.anodyne(C.id(C.src(f))):
            return Factorization(C.id(C.src(f)), f)
        for b in C.objects():
            for a in C.hom(C.src(f), b):
                for d in C.hom(b, C.tgt(f)):
                    if d in self.M and C.compose(d, a) == f and self.anodyne(a):
                        return Factorization(a, d)
        return None

    def diagonal(self, d: int) -> int:
        sq = self.M.pull(d, d)
        return mediate(self.C, sq, self.C.id(self.C.src(d)), self.C.id(self.C.src(d)))


def factor(C: FinCategory, M: MapClass, f: int) -> tuple[int, int] | None:
    x = Factorizer(M).factor(f)
    return None if x is None else (x.anodyne, x.display)


def diagonal_factor(C: FinCategory, M: MapClass, d: int) -> tuple[int, int] | None:
    fz = Factorizer(M)
    x = fz.factor(fz.diagonal(d))
    return None if x is None else (x.anodyne, x.display)


def check_factorizing(M: MapClass, supplied: dict[str, Any] | None = None,
                      mode: str = "auto") -> FactorizationTable | ValidationReport:
    """``mode`` is ``full`` (every map factors), ``diagonal`` (only diagonals of
    members) or ``auto`` (full when possible, otherwise diagonal-only)."""
    C = M.base
    fz = Factorizer(M, supplied)
    report = ValidationReport()
    diag_maps, diags = {}, {}
    for d in sorted(M.members):
        delta = fz.diagonal(d)
        diag_maps[d] = delta
        x = fz.factor(delta, fz.supplied_diag.get(d))
        if x is None:
            report.add("factor.diagonal", f"diagonal {delta} of member {d} has no anodyne/display factorization",
                       member=d, diagonal=delta)
        else:
            diags[d] = x
    full_report = ValidationReport()
    maps = {}
    if mode in ("full", "auto"):
        for f in C.morphisms():
            x = fz.factor(f, fz.supplied.get(f))
            if x is None:
                full_report.add("factor.map", f"map {f} has no anodyne/display factorization", f=f)
            else:
                maps[f] = x
    if mode == "full":
        report.extend(full_report)
        return report if report else FactorizationTable("full", maps, diags, diag_maps)
    if report:
        return report
    used = "full" if (mode == "auto" and not full_report) else "diagonal"
    return FactorizationTable(used, maps if used == "full" else {}, diags, diag_maps)


# ----------------------------------------------------------- strict model

@dataclass
class StrictModel:
    D0: Presheaf
    D1: Presheaf
    pi: NatTrans
    M: MapClass

    def type_data(self, c: int, A: int) -> tuple[int, int]:
        """``(b, d)`` with ``b: c -> cod d``."""
        return self.D0.labels[c][A]  # type: ignore[index,return-value]

    def term_data(self, c: int, a: int) -> tuple[int, int]:
        """``(a, d)`` with ``a: c -> dom d``."""
        return self.D1.labels[c][a]  # type: ignore[index,return-value]

    def type_index(self, c: int, b: int, d: int) -> int:
        return self.D0.index(c, (b, d))

    def term_index(self, c: int, a: int, d: int) -> int:
        return self.D1.index(c, (a, d))


def build_strict_model(C: FinCategory, M: MapClass) -> StrictModel:
    members = sorted(M.members)
    d1_labels, d0_labels = [], []
    for c in C.objects():
        d1_labels.append(sorted((a, d) for d in members for a in C.hom(c, C.src(d))))
        d0_labels.append(sorted((b, d) for d in members for b in C.hom(c, C.tgt(d))))

    def build(labels: list[list[tuple[int, int]]], name: str) -> Presheaf:
        where = [{lab: i for i, lab in enumerate(ls)} for ls in labels]
        tables = []
        for k in C.morphisms():
            dk, ck = C.src(k), C.tgt(k)
            tables.append(tuple(where[dk][(C.compose(x, k), d)] for x, d in labels[ck]))
        X = Presheaf(C, [len(ls) for ls in labels], tables, labels=labels, name=name)
        X._index = where
        return X

    D1 = build(d1_labels, "D1")
    D0 = build(d0_labels, "D0")
    pi = NatTrans(D1, D0, [tuple(D0.index(c, (C.compose(d, a), d)) for a, d in d1_labels[c]) for c in C.objects()],
                  name="pi")
    return StrictModel(D0, D1, pi, M)


def build_representability(C: FinCategory, M: MapClass, S: StrictModel) -> dict[tuple[int, int], Extension]:
    table = {}
    for c in C.objects():
        for A, (b, d) in enumerate(S.D0.labels[c]):  # type: ignore[arg-type]
            sq = M.pull(d, b)
            ext = C.src(sq.left)
            q = S.term_index(ext, sq.top, d)
            # π(q', d) = (d∘q', d) = (b∘pA, d) = A·pA
            if S.pi(ext, q) != S.D0.restrict(sq.left, A):
                raise CheckFailed(f"generic term of type {A} at {c} has the wrong type")
            table[(c, A)] = Extension(ext, sq.left, q)
    return table


def strict_natural_model(C: FinCategory, M: MapClass, S: StrictModel | None = None) -> NaturalModel:
    S = S or build_strict_model(C, M)
    return NaturalModel(S.pi, build_representability(C, M, S), name=f"pi({C.name})")


# ------------------------------------------------------------ Σ and Π

@dataclass
class DependentPairData:
    """The pieces shared by Σ(A, B) and Π(A, B) for ``A = (a, p)`` at ``X`` and
    ``B = (b, q)`` at ``X·A``: the exponential ``E -> A0`` of ``B0`` by ``A1``,
    the transpose ``bbar: X -> E``, the pulled-back ``p': E×A1 -> E`` and
    ``q': Gq -> E×A1``."""

    a: int
    p: int
    b: int
    q: int
    exp: int
    ev_b: int
    bbar: int
    p_prime: int
    q_prime: int


class DisplayCalculus:
    """Σ/Π/Id constructions on the strict model of a closed stable class."""

    def __init__(self, C: FinCategory, M: MapClass, S: StrictModel, cert: ClosureCertificate,
                 factors: FactorizationTable | None = None):
        self.C, self.M, self.S, self.cert = C, M, S, cert
        self.factors = factors
        self.model = NaturalModel(S.pi, build_representability(C, M, S), name=f"pi({C.name})")
        self._with_b0: dict[int, CommutativeSquare] = {}
        self._generic: dict[tuple[int, int], GenericLifting] = {}
        self.beck_chevalley: dict[str, list[dict[str, Any]]] = {"sigma": [], "pi": []}

    # -- helpers
    def _times_b0(self, a0: int, b0: int) -> CommutativeSquare:
        """``A0 × B0`` as a member over ``A0``: chosen pullback of ``B0 -> 1`` along ``A0 -> 1``."""
        tm = self.cert.terminal_maps
        return self.M.pull(tm[b0], tm[a0])

    def pair_data(self, X: int, A: int, B: int) -> DependentPairData:
        C, M = self.C, self.M
        a, p = self.S.type_data(X, A)
        w = self.model.extend(X, A)
        b, q = self.S.type_data(w.ext, B)
        a0, b0 = C.tgt(p), C.tgt(q)
        prod = self._times_b0(a0, b0)
        ex = self.cert.exponentials[(p, prod.left)]
        sq_e = M.pull(p, ex.obj)
        ev_b = C.compose(prod.top, ex.ev)
        target = mediate(C, prod, C.compose(a, w.pA), b)
        hits = [k for k in C.hom(X, C.src(ex.obj))
                if C.compose(ex.obj, k) == a and C.compose(ex.ev, M.along(p, ex.obj, a, k)) == target]
        if len(hits) != 1:
            raise CheckFailed(f"type {B} over {A} at {X} has {len(hits)} exponential transposes")
        q_prime = M.pull(q, ev_b).left
        return DependentPairData(a, p, b, q, ex.obj, ev_b, hits[0], sq_e.left, q_prime)

    def _iso_over(self, x: int, y: int) -> int | None:
        C = self.C
        for phi in C.hom(C.src(x), C.src(y)):
            if C.compose(y, phi) == x and C.is_iso(phi):
                return phi
        return None

    def _record_bc(self, kind: str, p1: int, q1: int, image: int) -> None:
        """Compare ``y*(image)`` with the construction redone over ``Y`` for
        every ``y`` into the base of ``image``."""
        C, M = self.C, self.M
        E = C.tgt(p1)
        for y in C.into(E):
            sq_p = M.pull(p1, y)
            pY = sq_p.left
            qY = M.pull(q1, sq_p.top).left
            lhs = M.pull(image, y).left
            if kind == "sigma":
                rhs = C.compose(pY, qY)
            else:
                rhs = self.cert.right_adjoints[(pY, qY)].image
            self.beck_chevalley[kind].append({"along": y, "p": p1, "q": q1,
                                              "iso": self._iso_over(lhs, rhs)})

    # -- Σ
    def build_sigma(self) -> "SigmaStructure":
        from .typeformers import SigmaStructure, model_objects

        C, S, NM = self.C, self.S, self.model
        O = model_objects(NM)
        PU, D = O.PU, O.sigma
        seen: set[tuple[int, int]] = set()
        sig_rows, pair_rows = [], []
        for X in C.objects():
            srow = []
            for e in range(PU.result.carriers[X]):
                A, B = element_to_pair(NM, PU, X, e)
                d = self.pair_data(X, A, B)
                comp = C.compose(d.p_prime, d.q_prime)
                srow.append(S.type_index(X, d.bbar, comp))
                if (d.p_prime, d.q_prime) not in seen:
                    seen.add((d.p_prime, d.q_prime))
                    self._record_bc("sigma", d.p_prime, d.q_prime, comp)
            sig_rows.append(tuple(srow))
            prow = []
            for e, at, bt in D.Q.labels[X]:  # type: ignore[misc]
                A, B = element_to_pair(NM, PU, X, e)
                d = self.pair_data(X, A, B)
                a1, _ = S.term_data(X, at)
                b2, _ = S.term_data(X, bt)
                c2 = mediate(C, self.M.pull(d.p, d.exp), d.bbar, a1)
                c1 = mediate(C, self.M.pull(d.q, d.ev_b), c2, b2)
                prow.append(S.term_index(X, c1, C.compose(d.p_prime, d.q_prime)))
            pair_rows.append(tuple(prow))
        Sigma = NatTrans(PU.result, NM.types, sig_rows, name="Sigma", validate=False)
        pair = NatTrans(D.Q, NM.terms, pair_rows, name="pair", validate=False)
        return SigmaStructure(pair, Sigma, D.pi_proj)

    # -- Π
    def build_pi(self) -> "PiStructure":
        from .typeformers import PiStructure, model_objects

        C, S, NM, M = self.C, self.S, self.model, self.M
        O = model_objects(NM)
        PU, PT = O.PU, O.PT
        seen: set[tuple[int, int]] = set()
        pi_rows, lam_rows = [], []
        for X in C.objects():
            row = []
            for e in range(PU.result.carriers[X]):
                A, B = element_to_pair(NM, PU, X, e)
                d = self.pair_data(X, A, B)
                ra = self.cert.right_adjoints[(d.p_prime, d.q_prime)]
                row.append(S.type_index(X, d.bbar, ra.image))
                if (d.p_prime, d.q_prime) not in seen:
                    seen.add((d.p_prime, d.q_prime))
                    self._record_bc("pi", d.p_prime, d.q_prime, ra.image)
            pi_rows.append(tuple(row))
            row = []
            for e in range(PT.result.carriers[X]):
                A, bt = element_to_pair(NM, PT, X, e)
                w = NM.extend(X, A)
                B = NM.p(w.ext, bt)
                d = self.pair_data(X, A, B)
                b2, _ = S.term_data(w.ext, bt)
                ra = self.cert.right_adjoints[(d.p_prime, d.q_prime)]
                bx = M.along(d.p, d.exp, d.a, d.bbar)
                sec = mediate(C, M.pull(d.q, d.ev_b), bx, b2)
                sq_r = M.pull(ra.image, d.p_prime)
                hits = [k for k in C.hom(X, C.src(ra.image))
                        if C.compose(ra.image, k) == d.bbar
                        and C.compose(ra.counit, mediate(C, sq_r, bx, C.compose(k, w.pA))) == sec]
                if len(hits) != 1:
                    raise CheckFailed(f"term {bt} at {w.ext} has {len(hits)} abstractions at {X}")
                row.append(S.term_index(X, hits[0], ra.image))
            lam_rows.append(tuple(row))
        Pi = NatTrans(PU.result, NM.types, pi_rows, name="Pi", validate=False)
        lam = NatTrans(PT.result, NM.terms, lam_rows, name="lambda", validate=False)
        return PiStructure(lam, Pi)

    # -- Id
    def diagonal_data(self, p: int) -> tuple[CommutativeSquare, int, int, int]:
        """``(A1 ×_{A0} A1, r_A, d_A, e_I)`` with ``e_I = p∘pr1∘d_A: I_A -> A0``."""
        if self.factors is None:
            raise CheckFailed("no factorization table for identity types")
        C = self.C
        sq = self.M.pull(p, p)
        x = self.factors.diagonals[p]
        return sq, x.anodyne, x.display, C.chain(p, sq.left, x.display)

    def generic_for(self, p: int, q: int) -> "GenericLifting":
        key = (p, q)
        if key not in self._generic:
            _, r, _, eI = self.diagonal_data(p)
            g = generic_lifting_object(self.M, q, r, p, eI)
            if g is None:
                raise CheckFailed(f"no generic lifting object for display {q} against r of {p}")
            if g.filler is None:
                raise CheckFailed(f"generic lifting problem for display {q} against r of {p} has no filler")
            self._generic[key] = g
        return self._generic[key]

    def build_id(self) -> "IdStructure":
        from .typeformers import IdStructure, LiftingStructure, id_comparison, model_objects

        C, S, NM, M = self.C, self.S, self.model, self.M
        O = model_objects(NM)
        TT = O.ident.TT
        id_rows, i_rows = [], []
        for X in C.objects():
            row = []
            for t1, t2 in TT.obj.labels[X]:  # type: ignore[misc]
                a1, p = S.term_data(X, t1)
                a2, _ = S.term_data(X, t2)
                sq, _, dA, _ = self.diagonal_data(p)
                row.append(S.type_index(X, mediate(C, sq, a1, a2), dA))
            id_rows.append(tuple(row))
            row = []
            for a, p in S.D1.labels[X]:  # type: ignore[misc]
                _, r, dA, _ = self.diagonal_data(p)
                row.append(S.term_index(X, C.compose(r, a), dA))
            i_rows.append(tuple(row))
        Id = NatTrans(TT.obj, NM.types, id_rows, name="Id", validate=False)
        i = NatTrans(NM.terms, NM.terms, i_rows, name="i", validate=False)
        out = IdStructure(i, Id, "intensional")
        cm = id_comparison(NM, out)
        out.lifting = LiftingStructure(self._lifting_section(cm), cm)
        return out

    def _lifting_section(self, cm) -> NatTrans:
        C, S, NM, M = self.C, self.S, self.model, self.M
        U, T = NM.types, NM.terms
        UU = ps.product(U, U).obj
        UT = ps.product(U, T).obj
        I = cm.f.cod
        TT = I.factors[0]
        rows = []
        for X in C.objects():
            row = []
            for beta, alpha in cm.target.obj.labels[X]:  # type: ignore[misc]
                A = cm.DB.proj(X, beta)
                a, p = S.type_data(X, A)
                sq2, r, dA, eI = self.diagonal_data(p)
                # representing position of yX ×_U I
                sqI = M.pull(eI, a)
                RI, hI, tI = C.src(sqI.left), sqI.left, sqI.top
                m = C.compose(dA, tI)
                tt = TT.index(RI, (S.term_index(RI, C.compose(sq2.left, m), p),
                                   S.term_index(RI, C.compose(sq2.top, m), p)))
                iel = I.index(RI, (tt, S.term_index(RI, tI, dA)))
                _, Bt = UU.labels[RI][cm.DB.space.value(X, beta, RI, hI, iel)]  # type: ignore[index,misc]
                b, q = S.type_data(RI, Bt)
                # representing position of yX ×_U Ũ
                sq1 = M.pull(p, a)
                R1, h1, t1 = C.src(sq1.left), sq1.left, sq1.top
                gen = S.term_index(R1, t1, p)
                _, ct = UT.labels[R1][cm.CA.space.value(X, alpha, R1, h1, gen)]  # type: ignore[index,misc]
                c, q2 = S.term_data(R1, ct)
                if q2 != q:
                    raise CheckFailed(f"lifting problem at {X} mixes displays {q} and {q2}")
                G = self.generic_for(p, q)
                f = G.classify(X, a, b, c)
                j = C.compose(G.filler, M.along(eI, G.gmap, a, f))
                z = UT.index(RI, (U.restrict(hI, A), S.term_index(RI, j, q)))
                row.append(cm.CB.space.from_generic(X, A, RI, hI, iel, z))
            rows.append(tuple(row))
        return NatTrans(cm.target.obj, cm.CB.obj, rows, name="j", validate=False)


# ------------------------------------------------- generic lifting objects

@dataclass
class GenericLifting:
    """``G`` over ``A0`` (via ``gmap``) with ``e0: G ×_{A0} I -> B0`` and
    ``e1: G ×_{A0} A1 -> B1`` classifying lifting problems of ``r`` against
    ``q``; ``filler`` solves the generic problem and ``anodyne`` certifies
    that ``G × r`` is anodyne."""

    M: MapClass
    q: int
    r: int
    p: int
    eI: int
    gmap: int
    e0: int
    e1: int
    filler: int | None = None
    anodyne: dict[tuple[int, int, int], int] | None = None

    def times_r(self, s: int) -> int:
        """``X ×_{A0} r`` for ``s: X -> A0``."""
        C, M = self.M.base, self.M
        sq1, sqI = M.pull(self.p, s), M.pull(self.eI, s)
        return mediate(C, sqI, sq1.left, C.compose(self.r, sq1.top))

    def classify(self, X: int, s: int, b: int, c: int) -> int:
        C, M = self.M.base, self.M
        hits = [f for f in C.hom(X, C.src(self.gmap))
                if C.compose(self.gmap, f) == s
                and C.compose(self.e1, M.along(self.p, self.gmap, s, f)) == c
                and C.compose(self.e0, M.along(self.eI, self.gmap, s, f)) == b]
        if len(hits) != 1:
            raise CheckFailed(f"lifting problem at {X} has {len(hits)} classifying maps")
        return hits[0]


def _lifting_problems(M: MapClass, q: int, p: int, eI: int, r: int, X: int, s: int) -> list[tuple[int, int]]:
    C = M.base
    sq1, sqI = M.pull(p, s), M.pull(eI, s)
    xr = mediate(C, sqI, sq1.left, C.compose(r, sq1.top))
    B0, B1 = C.tgt(q), C.src(q)
    return [(b, c) for b in C.hom(C.src(sqI.left), B0) for c in C.hom(C.src(sq1.left), B1)
            if C.compose(b, xr) == C.compose(q, c)]


def generic_lifting_object(M: MapClass, q: int, r: int, p: int, eI: int) -> GenericLifting | None:
    """Least ``(G, gmap, e0, e1)`` whose classifying map exists uniquely for
    every lifting problem ``(X, s, b, c)`` of ``r`` (a map over ``A0`` from
    ``p: A1 -> A0`` to ``eI: I -> A0``) against the member ``q``."""
    C = M.base
    a0 = C.tgt(p)
    if C.tgt(eI) != a0 or C.compose(eI, r) != p:
        raise CheckFailed("r is not a map over the base of p")
    problems = {(X, s): _lifting_problems(M, q, p, eI, r, X, s) for X in C.objects() for s in C.hom(X, a0)}
    for G in C.objects():
        for gmap in C.hom(G, a0):
            for e0, e1 in problems[(G, gmap)]:
                cand = GenericLifting(M, q, r, p, eI, gmap, e0, e1)
                ok = True
                for (X, s), probs in problems.items():
                    for b, c in probs:
                        try:
                            cand.classify(X, s, b, c)
                        except CheckFailed:
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    gr = cand.times_r(gmap)
                    fs = fillers(C, gr, q, e1, e0)
                    cand.filler = fs[0] if fs else None
                    cand.anodyne = is_anodyne(C, M, gr)
                    return cand
    return None


# --------------------------------------------------------------- pipeline

def _calculus(C: FinCategory, M: MapClass, S: StrictModel, need_factors: bool = False) -> DisplayCalculus:
    cert = check_closed(M)
    if isinstance(cert, ValidationReport):
        raise CheckFailed(cert)
    factors = None
    if need_factors:
        factors = check_factorizing(M)
        if isinstance(factors, ValidationReport):
            raise CheckFailed(factors)
    return DisplayCalculus(C, M, S, cert, factors)


def build_sigma(C: FinCategory, M: MapClass, S: StrictModel) -> "SigmaStructure":
    return _calculus(C, M, S).build_sigma()


def build_pi(C: FinCategory, M: MapClass, S: StrictModel) -> "PiStructure":
    return _calculus(C, M, S).build_pi()


def build_id(C: FinCategory, M: MapClass, S: StrictModel) -> "IdStructure":
    return _calculus(C, M, S, need_factors=True).build_id()


@dataclass
class PipelineResult:
    ok: bool
    stage: str
    report: ValidationReport
    model: NaturalModel | None = None
    pi: Any = None
    sigma: Any = None
    ident: Any = None
    certificates: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"ok": self.ok, "stage": self.stage, "report": self.report.to_json()}
        out["certificates"] = {k: (v.to_json() if hasattr(v, "to_json") else v)
                               for k, v in self.certificates.items()}
        out["structures"] = {k: s.to_json() for k, s in (("sigma", self.sigma), ("pi", self.pi), ("id", self.ident))
                             if s is not None}
        return out


STAGES = ("stable", "factorizing", "closed", "model", "sigma", "pi", "id")


def run_pipeline(C: FinCategory, members: Iterable[int], *, supplied: dict[str, Any] | None = None,
                 factor_mode: str = "auto") -> PipelineResult:
    """Certify the class, build the strict model with Σ, Π and Id, and
    re-verify every output with the independent validators; stops at the
    first failing stage."""
    from .natmodel import verify_cwf_laws
    from .typeformers import check_id_int, check_pi, check_sigma

    certs: dict[str, Any] = {}
    M = check_stable(C, members)
    if isinstance(M, ValidationReport):
        return PipelineResult(False, "stable", M)
    certs["stable"] = {"chosen_pullbacks": len(M.chosen)}
    ft = check_factorizing(M, supplied, mode=factor_mode)
    if isinstance(ft, ValidationReport):
        return PipelineResult(False, "factorizing", ft, certificates=certs)
    certs["factorizing"] = ft
    cert = check_closed(M)
    if isinstance(cert, ValidationReport):
        return PipelineResult(False, "closed", cert, certificates=certs)
    certs["closed"] = cert
    S = build_strict_model(C, M)
    calc = DisplayCalculus(C, M, S, cert, ft)
    NM = calc.model
    rep = verify_cwf_laws(NM)
    if rep:
        return PipelineResult(False, "model", rep, NM, certificates=certs)
    try:
        sigma = calc.build_sigma()
    except CheckFailed as exc:
        return PipelineResult(False, "sigma", _failure("sigma.build", exc), NM, certificates=certs)
    rep = check_sigma(NM, sigma)
    if rep:
        return PipelineResult(False, "sigma", rep, NM, sigma=sigma, certificates=certs)
    try:
        pi = calc.build_pi()
    except CheckFailed as exc:
        return PipelineResult(False, "pi", _failure("pi.build", exc), NM, sigma=sigma, certificates=certs)
    rep = check_pi(NM, pi)
    if rep:
        return PipelineResult(False, "pi", rep, NM, pi=pi, sigma=sigma, certificates=certs)
    bc = ValidationReport()
    for kind, rows in calc.beck_chevalley.items():
        for row in rows:
            if row["iso"] is None:
                bc.add(f"{kind}.beck_chevalley", f"{kind} is not stable under pullback along {row['along']}", **row)
    if bc:
        return PipelineResult(False, "pi" if "pi.beck_chevalley" in bc.obligations() else "sigma", bc, NM,
                              pi=pi, sigma=sigma, certificates=certs)
    certs["beck_chevalley"] = {k: len(v) for k, v in calc.beck_chevalley.items()}
    try:
        ident = calc.build_id()
    except CheckFailed as exc:
        return PipelineResult(False, "id", _failure("id.build", exc), NM, pi=pi, sigma=sigma, certificates=certs)
    rep = check_id_int(NM, ident)
    if rep:
        return PipelineResult(False, "id", rep, NM, pi=pi, sigma=sigma, ident=ident, certificates=certs)
    certs["generic_lifting"] = [
        {"p": g.p, "q": g.q, "G": C.src(g.gmap), "filler": g.filler, "anodyne": g.anodyne is not None}
        for (_, _), g in sorted(calc._generic.items())
    ]
    return PipelineResult(True, "done", ValidationReport(), NM, pi, sigma, ident, certs)


def _failure(obligation: str, exc: Exception) -> ValidationReport:
    r = ValidationReport()
    r.add(obligation, str(exc))
    return r
