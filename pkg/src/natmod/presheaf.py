"""Presheaves on a finite category and the finite part of their topos.

A presheaf stores a carrier size per object and, per morphism ``f: D -> C``,
a restriction table sending elements at ``C`` to elements at ``D``.  Composite
presheaves (limits, exponentials, section spaces) also keep a label per
element describing the data it encodes; carriers are always enumerated in
sorted label order, so identical constructions give identical tables.

Every natural-map enumeration in the package goes through :func:`solve_families`,
a small arc-consistency search over "one value per element, restrictions must
commute" problems.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Sequence

import numpy as np

from . import _kernels
from .fincat import FinCategory
from .report import ValidationReport


class PresheafError(ValueError):
    def __init__(self, message: str, report: ValidationReport | None = None):
        super().__init__(message)
        self.report = report


def _pad(rows: Sequence[Sequence[int]], width: int) -> np.ndarray:
    out = np.full((len(rows), max(width, 1)), -1, dtype=np.int64)
    for i, r in enumerate(rows):
        if len(r):
            out[i, : len(r)] = r
    return out


class Presheaf:
    def __init__(
        self,
        base: FinCategory,
        carriers: Sequence[int],
        tables: Sequence[Sequence[int]],
        *,
        labels: Sequence[Sequence[Hashable]] | None = None,
        name: str = "",
        validate: bool = True,
    ):
        self.base = base
        self.carriers = tuple(int(c) for c in carriers)
        self.tables = [tuple(int(v) for v in t) for t in tables]
        self.labels = [list(ls) for ls in labels] if labels is not None else None
        self.name = name
        self.representing: int | None = None
        self._index: list[dict[Hashable, int]] | None = None
        self._act: np.ndarray | None = None
        if len(self.carriers) != base.n_objects or len(self.tables) != base.n_morphisms:
            raise PresheafError("carrier/action table shape does not match the base category")
        if validate:
            report = validate_presheaf(self)
            if report:
                raise PresheafError(f"invalid presheaf {name!r}:\n{report}", report)

    @property
    def act(self) -> np.ndarray:
        if self._act is None:
            self._act = _pad(self.tables, max(self.carriers, default=0))
        return self._act

    def restrict(self, f: int, x: int) -> int:
        """``x·f`` for ``x`` at ``cod f``."""
        return self.tables[f][x]

    def elements(self, c: int) -> range:
        return range(self.carriers[c])

    def all_elements(self) -> Iterable[tuple[int, int]]:
        for c in self.base.objects():
            for x in range(self.carriers[c]):
                yield c, x

    def label(self, c: int, x: int) -> Hashable:
        if self.labels is None:
            return x
        return self.labels[c][x]

    def index(self, c: int, label: Hashable) -> int:
        if self.labels is None:
            return int(label)  # type: ignore[arg-type]
        if self._index is None:
            self._index = [{lab: i for i, lab in enumerate(ls)} for ls in self.labels]
        return self._index[c][label]

    def same_as(self, other: "Presheaf") -> bool:
        return self is other or (
            self.base is other.base and self.carriers == other.carriers and self.tables == other.tables
        )

    def size(self) -> int:
        return sum(self.carriers)

    def __repr__(self) -> str:
        return f"Presheaf({self.name or '?'}; carriers={list(self.carriers)})"

    # -- serialisation -----------------------------------------------------
    def to_json(self) -> dict[str, Any]:
        return {
            "carriers": list(self.carriers),
            "actions": [{"mor": f, "table": list(t)} for f, t in enumerate(self.tables)],
        }

    @classmethod
    def from_json(cls, base: FinCategory, data: dict[str, Any], *, validate: bool = True, name: str = "") -> "Presheaf":
        try:
            carriers = [int(c) for c in data["carriers"]]
            given = {int(a["mor"]): [int(v) for v in a["table"]] for a in data["actions"]}
        except (KeyError, TypeError) as exc:
            raise PresheafError(f"malformed presheaf fixture: {exc!r}") from exc
        if len(carriers) != base.n_objects:
            raise PresheafError("carrier list length differs from object count")
        tables = []
        for f in base.morphisms():
            if f in given:
                tables.append(given[f])
            elif base.src(f) == base.tgt(f) and f == base.id(base.src(f)):
                tables.append(list(range(carriers[base.src(f)])))
            else:
                raise PresheafError(f"missing action table for morphism {f}")
        return cls(base, carriers, tables, validate=validate, name=name)


_PS_MESSAGES = {
    _kernels.PS_OUT_OF_RANGE: ("presheaf.action_range", "action of {a} sends element {b} to {c}, out of range"),
    _kernels.PS_IDENTITY: ("presheaf.identity", "identity {a} moves element {b} to {c}"),
    _kernels.PS_CONTRAVARIANCE: ("presheaf.functoriality", "action of g={a} after f={b} differs at element {c}"),
}


def validate_presheaf(X: Presheaf) -> ValidationReport:
    report = ValidationReport()
    C = X.base
    for f, t in enumerate(X.tables):
        if len(t) != X.carriers[C.tgt(f)]:
            report.add("presheaf.action_shape", f"table for morphism {f} has length {len(t)}", mor=f)
    if report:
        return report
    rows = _kernels.presheaf_violations(C.dom, C.cod, C.identity, C.comp, X.carriers, X.act)
    for kind, a, b, c in rows.tolist():
        ob, msg = _PS_MESSAGES[kind]
        report.add(ob, msg.format(a=a, b=b, c=c), a=a, b=b, c=c)
    return report


class NatTrans:
    def __init__(self, dom: Presheaf, cod: Presheaf, components: Sequence[Sequence[int]], *,
                 validate: bool = True, name: str = ""):
        if dom.base is not cod.base:
            raise PresheafError("natural transformation between presheaves on different bases")
        self.dom = dom
        self.cod = cod
        self.components = [tuple(int(v) for v in c) for c in components]
        self.name = name
        self._comp_arr: np.ndarray | None = None
        if len(self.components) != dom.base.n_objects:
            raise PresheafError("component table count differs from object count")
        if validate:
            report = validate_nat_trans(self)
            if report:
                raise PresheafError(f"invalid natural transformation {name!r}:\n{report}", report)

    @property
    def base(self) -> FinCategory:
        return self.dom.base

    @property
    def comp_array(self) -> np.ndarray:
        if self._comp_arr is None:
            self._comp_arr = _pad(self.components, max(self.dom.carriers, default=0))
        return self._comp_arr

    def __call__(self, c: int, x: int) -> int:
        return self.components[c][x]

    def same_as(self, other: "NatTrans") -> bool:
        return self.dom.same_as(other.dom) and self.cod.same_as(other.cod) and self.components == other.components

    def fiber(self, c: int, y: int) -> list[int]:
        return [x for x, v in enumerate(self.components[c]) if v == y]

    def to_json(self) -> dict[str, Any]:
        return {"components": [list(c) for c in self.components]}

    @classmethod
    def from_json(cls, dom: Presheaf, cod: Presheaf, data: dict[str, Any], *, validate: bool = True,
                  name: str = "") -> "NatTrans":
        try:
            comps = [[int(v) for v in c] for c in data["components"]]
        except (KeyError, TypeError) as exc:
            raise PresheafError(f"malformed natural transformation fixture: {exc!r}") from exc
        return cls(dom, cod, comps, validate=validate, name=name)

    def __repr__(self) -> str:
        return f"NatTrans({self.name or '?'}: {self.dom!r} -> {self.cod!r})"


def validate_nat_trans(t: NatTrans) -> ValidationReport:
    report = ValidationReport()
    C = t.base
    for c in C.objects():
        if len(t.components[c]) != t.dom.carriers[c]:
            report.add("nattrans.shape", f"component at {c} has wrong length", object=c)
    if report:
        return report
    rows = _kernels.naturality_violations(C.dom, C.cod, t.dom.carriers, t.cod.carriers, t.dom.act, t.cod.act,
                                          t.comp_array)
    for kind, a, b, _ in rows.tolist():
        if kind == _kernels.NT_OUT_OF_RANGE:
            report.add("nattrans.range", f"component at object {a} sends element {b} out of range", object=a, element=b)
        else:
            report.add("nattrans.naturality", f"naturality fails along morphism {a} at element {b}", mor=a, element=b)
    return report


@dataclass(frozen=True)
class Element:
    presheaf: Presheaf
    at: int
    value: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.presheaf.carriers[self.at]:
            raise PresheafError(f"element {self.value} out of range at object {self.at}")


@dataclass
class Over:
    """An object over a base presheaf: ``proj: obj -> base``."""

    obj: Presheaf
    proj: NatTrans


# ------------------------------------------------------------------ basics

def identity(X: Presheaf) -> NatTrans:
    return NatTrans(X, X, [tuple(range(n)) for n in X.carriers], validate=False)


def compose(g: NatTrans, f: NatTrans) -> NatTrans:
    """``g∘f``."""
    if not f.cod.same_as(g.dom):
        raise PresheafError("natural transformations are not composable")
    comps = [tuple(gc[v] for v in fc) for gc, fc in zip(g.components, f.components)]
    return NatTrans(f.dom, g.cod, comps, validate=False)


def _terminal_cache(C: FinCategory) -> dict:
    cache = getattr(C, "_ps_cache", None)
    if cache is None:
        cache = {}
        C._ps_cache = cache  # type: ignore[attr-defined]
    return cache


def terminal_presheaf(C: FinCategory) -> Presheaf:
    cache = _terminal_cache(C)
    if "terminal" not in cache:
        cache["terminal"] = Presheaf(C, [1] * C.n_objects, [(0,)] * C.n_morphisms, labels=[[()]] * C.n_objects,
                                     name="1", validate=False)
    return cache["terminal"]


def to_terminal(X: Presheaf) -> NatTrans:
    one = terminal_presheaf(X.base)
    return NatTrans(X, one, [(0,) * n for n in X.carriers], validate=False)


def yoneda(C: FinCategory, x: int) -> Presheaf:
    cache = _terminal_cache(C)
    key = ("yoneda", x)
    if key not in cache:
        homs = [C.hom(d, x) for d in C.objects()]
        pos = [{m: i for i, m in enumerate(h)} for h in homs]
        tables = []
        for f in C.morphisms():
            d, c = C.src(f), C.tgt(f)
            tables.append(tuple(pos[d][C.compose(m, f)] for m in homs[c]))
        y = Presheaf(C, [len(h) for h in homs], tables, labels=homs, name=f"y{x}", validate=False)
        y.representing = x
        cache[key] = y
    return cache[key]


def element_as_map(e: Element) -> NatTrans:
    X, c, x = e.presheaf, e.at, e.value
    C = X.base
    y = yoneda(C, c)
    comps = [tuple(X.restrict(m, x) for m in C.hom(d, c)) for d in C.objects()]
    return NatTrans(y, X, comps, validate=False)


def map_as_element(t: NatTrans) -> Element:
    x = t.dom.representing
    if x is None or t.dom is not yoneda(t.base, x):
        raise PresheafError("domain is not a yoneda presheaf produced by this module")
    return Element(t.cod, x, t(x, t.dom.index(x, t.base.id(x))))


def morphism_map(C: FinCategory, f: int) -> NatTrans:
    """``y(f): y(dom f) -> y(cod f)``."""
    return element_as_map(Element(yoneda(C, C.tgt(f)), C.src(f), yoneda(C, C.tgt(f)).index(C.src(f), f)))


# ------------------------------------------------------------- family search

def solve_families(
    Z: Presheaf,
    objs: Sequence[int],
    arcs: Sequence[tuple[int, int, int]],
    domains: Sequence[Iterable[int]],
    *,
    limit: int | None = None,
) -> list[tuple[int, ...]]:
    """All assignments ``val[i] ∈ domains[i]`` with ``val[j] = Z.restrict(f, val[i])``
    for each arc ``(i, j, f)``, in lexicographic order of the value tuples.

    ``objs[i]`` is the object at which position ``i`` lives (only used for
    consistency checks by callers).
    """
    n = len(objs)
    down: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in range(n)]
    up: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in range(n)]
    for i, j, f in arcs:
        tbl = Z.tables[f]
        down[i].append((j, tbl))
        up[j].append((i, tbl))
    doms = [frozenset(d) for d in domains]
    if any(not d for d in doms):
        return []

    def propagate(ds: list[frozenset[int]], queue: list[int]) -> bool:
        while queue:
            i = queue.pop()
            di = ds[i]
            for j, tbl in down[i]:
                img = frozenset(tbl[v] for v in di)
                dj = ds[j]
                new = dj & img
                if new != dj:
                    if not new:
                        return False
                    ds[j] = new
                    queue.append(j)
            for j, tbl in up[i]:
                dj = ds[j]
                new = frozenset(v for v in dj if tbl[v] in di)
                if new != dj:
                    if not new:
                        return False
                    ds[j] = new
                    queue.append(j)
        return True

    start = list(doms)
    if not propagate(start, list(range(n))):
        return []
    out: list[tuple[int, ...]] = []

    def search(ds: list[frozenset[int]]) -> bool:
        # With a limit, branch on positions in index order so the first
        # solutions found are the lexicographically least ones.
        best, best_size = -1, 0
        for i, d in enumerate(ds):
            s = len(d)
            if s > 1 and (best < 0 or s < best_size):
                best, best_size = i, s
                if limit is not None:
                    break
        if best < 0:
            out.append(tuple(next(iter(d)) for d in ds))
            return limit is not None and len(out) >= limit
        for v in sorted(ds[best]):
            child = list(ds)
            child[best] = frozenset((v,))
            if propagate(child, [best]) and search(child):
                return True
        return False

    search(start)
    out.sort()
    return out


def _element_graph(K: Presheaf) -> tuple[list[int], list[tuple[int, int, int]], list[tuple[int, int]]]:
    C = K.base
    positions = list(K.all_elements())
    where = {p: i for i, p in enumerate(positions)}
    arcs = []
    for f in C.morphisms():
        d, c = C.src(f), C.tgt(f)
        if f == C.id(c):
            continue
        for x in range(K.carriers[c]):
            arcs.append((where[(c, x)], where[(d, K.tables[f][x])], f))
    return [p[0] for p in positions], arcs, positions


def natural_maps(
    K: Presheaf,
    Z: Presheaf,
    allowed: Callable[[int, int], Iterable[int]] | None = None,
    *,
    limit: int | None = None,
) -> list[NatTrans]:
    """Every natural transformation ``K -> Z`` (optionally with per-element
    allowed values), in lexicographic order of their component tables."""
    objs, arcs, positions = _element_graph(K)
    if allowed is None:
        domains = [range(Z.carriers[c]) for c, _ in positions]
    else:
        domains = [allowed(c, x) for c, x in positions]
    sols = solve_families(Z, objs, arcs, domains, limit=limit)
    out = []
    for sol in sols:
        comps: list[list[int]] = [[] for _ in K.base.objects()]
        for (c, _), v in zip(positions, sol):
            comps[c].append(v)
        out.append(NatTrans(K, Z, comps, validate=False))
    return out


def maps_over(W: Over, Z: Over) -> list[NatTrans]:
    """Natural maps ``W.obj -> Z.obj`` commuting with the projections."""
    if not W.proj.cod.same_as(Z.proj.cod):
        raise PresheafError("objects over different bases")
    fib = fibers(Z.proj)
    return natural_maps(W.obj, Z.obj, lambda c, x: fib[c].get(W.proj(c, x), ()))


def fibers(t: NatTrans) -> list[dict[int, list[int]]]:
    out: list[dict[int, list[int]]] = []
    for comp in t.components:
        d: dict[int, list[int]] = {}
        for x, v in enumerate(comp):
            d.setdefault(v, []).append(x)
        out.append(d)
    return out


def is_iso(t: NatTrans) -> bool:
    return all(sorted(c) == list(range(t.cod.carriers[i])) and len(c) == t.cod.carriers[i]
               for i, c in enumerate(t.components))


def inverse(t: NatTrans) -> NatTrans:
    if not is_iso(t):
        raise PresheafError("not an isomorphism")
    comps = []
    for c, comp in enumerate(t.components):
        inv = [0] * len(comp)
        for x, v in enumerate(comp):
            inv[v] = x
        comps.append(inv)
    return NatTrans(t.cod, t.dom, comps, validate=False)


def find_iso(X: Presheaf, Y: Presheaf) -> NatTrans | None:
    if X.carriers != Y.carriers:
        return None
    for t in natural_maps(X, Y):
        if is_iso(t):
            return t
    return None


# ------------------------------------------------------------ finite limits

@dataclass
class PullbackPS:
    """``obj`` with ``p1: obj -> dom f`` and ``p2: obj -> dom g``; elements are
    labelled by pairs ``(x, y)`` with ``f(x) = g(y)``."""

    obj: Presheaf
    p1: NatTrans
    p2: NatTrans
    f: NatTrans
    g: NatTrans

    def pair(self, h1: NatTrans, h2: NatTrans) -> NatTrans:
        if not h1.dom.same_as(h2.dom):
            raise PresheafError("pairing maps with different domains")
        comps = []
        for c in self.obj.base.objects():
            comps.append(tuple(self.obj.index(c, (a, b)) for a, b in zip(h1.components[c], h2.components[c])))
        return NatTrans(h1.dom, self.obj, comps, validate=False)

    def index(self, c: int, x: int, y: int) -> int:
        return self.obj.index(c, (x, y))


def pullback_ps(f: NatTrans, g: NatTrans) -> PullbackPS:
    if not f.cod.same_as(g.cod):
        raise PresheafError("pullback of maps with different codomains")
    C = f.base
    X, Y = f.dom, g.dom
    labels = []
    for c in C.objects():
        gf = fibers_at(g, c)
        labels.append([(x, y) for x in range(X.carriers[c]) for y in gf.get(f(c, x), ())])
    where = [{lab: i for i, lab in enumerate(ls)} for ls in labels]
    tables = []
    for m in C.morphisms():
        d, c = C.src(m), C.tgt(m)
        tables.append(tuple(where[d][(X.restrict(m, x), Y.restrict(m, y))] for x, y in labels[c]))
    P = Presheaf(C, [len(ls) for ls in labels], tables, labels=labels, name=f"({X.name}x{Y.name})", validate=False)
    P._index = where
    P.factors = (X, Y)  # type: ignore[attr-defined]
    p1 = NatTrans(P, X, [tuple(x for x, _ in ls) for ls in labels], validate=False)
    p2 = NatTrans(P, Y, [tuple(y for _, y in ls) for ls in labels], validate=False)
    return PullbackPS(P, p1, p2, f, g)


def fibers_at(t: NatTrans, c: int) -> dict[int, list[int]]:
    d: dict[int, list[int]] = {}
    for x, v in enumerate(t.components[c]):
        d.setdefault(v, []).append(x)
    return d


def product(X: Presheaf, Y: Presheaf) -> PullbackPS:
    return pullback_ps(to_terminal(X), to_terminal(Y))


def base_change(f: NatTrans, g: NatTrans) -> Over:
    """Pullback of ``g: Z -> A`` along ``f: B -> A`` as an object over ``B``."""
    pb = pullback_ps(f, g)
    return Over(pb.obj, pb.p1)


def dependent_sum(f: NatTrans, g: Over) -> Over:
    if not g.proj.cod.same_as(f.dom):
        raise PresheafError("object is not over the domain of f")
    return Over(g.obj, compose(f, g.proj))


def is_pullback_square(top: NatTrans, left: NatTrans, right: NatTrans, bottom: NatTrans) -> bool:
    """``P -top-> B``, ``P -left-> A``, ``B -right-> Z``, ``A -bottom-> Z``."""
    if not (top.dom.same_as(left.dom) and top.cod.same_as(right.dom) and left.cod.same_as(bottom.dom)
            and right.cod.same_as(bottom.cod)):
        raise PresheafError("maps do not form a square")
    C = top.base
    for c in C.objects():
        for x in range(top.dom.carriers[c]):
            if right(c, top(c, x)) != bottom(c, left(c, x)):
                raise PresheafError(f"square does not commute at object {c}, element {x}")
    return not pullback_square_defects(top, left, right, bottom)


def pullback_square_defects(top: NatTrans, left: NatTrans, right: NatTrans, bottom: NatTrans) -> list[dict[str, Any]]:
    """Cells where the comparison map into the pointwise pullback fails to be
    bijective (assumes the square commutes)."""
    C = top.base
    out = []
    for c in C.objects():
        seen: dict[tuple[int, int], int] = {}
        for x in range(top.dom.carriers[c]):
            key = (left(c, x), top(c, x))
            if key in seen:
                out.append({"object": c, "kind": "not_injective", "elements": [seen[key], x]})
            seen[key] = x
        rf = fibers_at(right, c)
        for a in range(left.cod.carriers[c]):
            for b in rf.get(bottom(c, a), ()):
                if (a, b) not in seen:
                    out.append({"object": c, "kind": "not_surjective", "cone": [a, b]})
    return out


# ---------------------------------------------------------- section spaces

class SectionSpace:
    """Natural families over a map ``f: B -> A``.

    The carrier at ``C`` lists pairs ``(a, vals)`` with ``a ∈ A(C)`` and
    ``vals`` a natural family indexed by positions ``(D, h, b)`` where
    ``h: D -> C`` and ``b ∈ B(D)`` with ``f(b) = a·h``; the value at a position
    lies in ``Z(D)`` and is restricted by ``allowed(D, h, b)``.  The positions
    for fixed ``(C, a)`` are exactly the elements of ``yC ×_A B``.

    This single construction yields exponentials, slice exponentials,
    dependent products and polynomial functors.
    """

    def __init__(self, f: NatTrans, Z: Presheaf,
                 allowed: Callable[[int, int, int], Iterable[int]] | None = None, name: str = ""):
        self.f = f
        self.A = f.cod
        self.B = f.dom
        self.Z = Z
        C = f.base
        self.base = C
        self._pos: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
        self._where: dict[tuple[int, int], dict[tuple[int, int, int], int]] = {}
        fibB = [fibers_at(f, d) for d in C.objects()]
        self._fibB = fibB
        labels: list[list[tuple[int, tuple[int, ...]]]] = []
        for c in C.objects():
            row = []
            for a in range(self.A.carriers[c]):
                objs, arcs, doms = self._problem(c, a, allowed)
                for vals in solve_families(Z, objs, arcs, doms):
                    row.append((a, vals))
            labels.append(row)
        where = [{lab: i for i, lab in enumerate(ls)} for ls in labels]
        tables = []
        for k in C.morphisms():
            c2, c = C.src(k), C.tgt(k)
            tbl = []
            for a, vals in labels[c]:
                a2 = self.A.restrict(k, a)
                src = self._where[(c, a)]
                new = tuple(vals[src[(d, C.compose(k, h), b)]] for d, h, b in self._positions(c2, a2))
                tbl.append(where[c2][(a2, new)])
            tables.append(tuple(tbl))
        self.presheaf = Presheaf(C, [len(r) for r in labels], tables, labels=labels, name=name, validate=False)
        self.presheaf._index = where
        self.proj = NatTrans(self.presheaf, self.A, [tuple(a for a, _ in r) for r in labels], validate=False)

    def _positions(self, c: int, a: int) -> list[tuple[int, int, int]]:
        key = (c, a)
        if key not in self._pos:
            C = self.base
            pos = []
            for d in C.objects():
                for h in C.hom(d, c):
                    for b in self._fibB[d].get(self.A.restrict(h, a), ()):
                        pos.append((d, h, b))
            self._pos[key] = pos
            self._where[key] = {p: i for i, p in enumerate(pos)}
        return self._pos[key]

    def _problem(self, c: int, a: int, allowed):
        C = self.base
        pos = self._positions(c, a)
        where = self._where[(c, a)]
        arcs = []
        for i, (d, h, b) in enumerate(pos):
            for k in C.into(d):
                if k == C.id(d):
                    continue
                e = C.src(k)
                arcs.append((i, where[(e, C.compose(h, k), self.B.restrict(k, b))], k))
        if allowed is None:
            doms = [range(self.Z.carriers[d]) for d, _, _ in pos]
        else:
            doms = [allowed(d, h, b) for d, h, b in pos]
        return [p[0] for p in pos], arcs, doms

    def positions(self, c: int, a: int) -> list[tuple[int, int, int]]:
        return list(self._positions(c, a))

    def value(self, c: int, e: int, d: int, h: int, b: int) -> int:
        """The family ``e`` at ``C`` evaluated at position ``(d, h, b)``."""
        a, vals = self.presheaf.labels[c][e]  # type: ignore[index]
        self._positions(c, a)
        return vals[self._where[(c, a)][(d, h, b)]]

    def at_identity(self, c: int, e: int, b: int) -> int:
        return self.value(c, e, c, self.base.id(c), b)

    def index_from(self, c: int, a: int, fn: Callable[[int, int, int], int]) -> int:
        """The element at ``C`` over ``a`` whose family is ``fn``."""
        vals = tuple(fn(d, h, b) for d, h, b in self._positions(c, a))
        try:
            return self.presheaf.index(c, (a, vals))
        except KeyError:
            raise PresheafError(f"family over {a} at object {c} is not a valid section") from None

    def from_generic(self, c: int, a: int, r: int, h0: int, b0: int, z: int) -> int:
        """The family determined by its value ``z ∈ Z(r)`` at a representing
        position ``(r, h0, b0)``: every position is a unique restriction of it."""
        C = self.base

        def fn(d: int, h: int, b: int) -> int:
            hits = [m for m in C.hom(d, r) if C.compose(h0, m) == h and self.B.restrict(m, b0) == b]
            if len(hits) != 1:
                raise PresheafError(f"position ({d},{h},{b}) is not uniquely a restriction of the generic one")
            return self.Z.restrict(hits[0], z)

        return self.index_from(c, a, fn)


# ------------------------------------------------------------ exponentials

class Exponential:
    """``Y^X`` whose carrier at ``C`` lists natural maps ``yC × X -> Y``."""

    def __init__(self, X: Presheaf, Y: Presheaf):
        self.X, self.Y = X, Y
        self.space = SectionSpace(to_terminal(X), Y, name=f"({Y.name}^{X.name})")
        self.obj = self.space.presheaf
        self._eval: NatTrans | None = None
        self._dom: PullbackPS | None = None

    @property
    def eval_domain(self) -> PullbackPS:
        if self._dom is None:
            self._dom = product(self.obj, self.X)
        return self._dom

    @property
    def eval(self) -> NatTrans:
        if self._eval is None:
            P = self.eval_domain.obj
            comps = []
            for c in self.obj.base.objects():
                comps.append(tuple(self.space.at_identity(c, e, x) for e, x in P.labels[c]))  # type: ignore[index]
            self._eval = NatTrans(P, self.Y, comps, validate=False)
        return self._eval

    def transpose(self, g: NatTrans) -> NatTrans:
        """``g: W × X -> Y`` (with ``W × X`` built by :func:`product`) to ``W -> Y^X``."""
        W = _product_left(g.dom, self.X)
        C = W.base
        comps = []
        for c in C.objects():
            row = []
            for w in range(W.carriers[c]):
                row.append(self.space.index_from(
                    c, 0, lambda d, h, x: g(d, g.dom.index(d, (W.restrict(h, w), x)))))
            comps.append(tuple(row))
        return NatTrans(W, self.obj, comps, validate=False)


def _product_left(P: Presheaf, X: Presheaf) -> Presheaf:
    factors = getattr(P, "factors", None)
    if factors is None or not factors[1].same_as(X):
        raise PresheafError("domain must be a product W x X built by product()")
    return factors[0]


def exponential(X: Presheaf, Y: Presheaf) -> Exponential:
    if X.base is not Y.base:
        raise PresheafError("exponential of presheaves on different bases")
    return Exponential(X, Y)


class SliceExponential:
    """``Y^X`` in the slice over ``U`` for ``x: X -> U``, ``y: Y -> U``: at ``C``
    pairs ``(u, t)`` with ``t: yC ×_U X -> Y`` over ``U``."""

    def __init__(self, x: NatTrans, y: NatTrans):
        if not x.cod.same_as(y.cod):
            raise PresheafError("slice exponential of objects over different bases")
        self.x, self.y = x, y
        fy = fibers(y)
        self.space = SectionSpace(x, y.dom, lambda d, h, b: fy[d].get(x(d, b), ()),
                                  name=f"({y.dom.name}^{x.dom.name})/U")
        self.obj = self.space.presheaf
        self.proj = self.space.proj

    def over(self) -> Over:
        return Over(self.obj, self.proj)

    def postcompose(self, other: "SliceExponential", g: NatTrans) -> NatTrans:
        """``g^X``: this ``Y^X -> Y'^X`` for ``g: Y -> Y'`` over ``U``."""
        C = self.obj.base
        comps = []
        for c in C.objects():
            row = []
            for e, (a, _) in enumerate(self.obj.labels[c]):  # type: ignore[arg-type]
                row.append(other.space.index_from(c, a, lambda d, h, b: g(d, self.space.value(c, e, d, h, b))))
            comps.append(tuple(row))
        return NatTrans(self.obj, other.obj, comps, validate=False)

    def precompose(self, other: "SliceExponential", f: NatTrans) -> NatTrans:
        """``Y^f``: this ``Y^X -> Y^{X'}`` for ``f: X' -> X`` over ``U``."""
        C = self.obj.base
        comps = []
        for c in C.objects():
            row = []
            for e, (a, _) in enumerate(self.obj.labels[c]):  # type: ignore[arg-type]
                row.append(other.space.index_from(c, a, lambda d, h, b: self.space.value(c, e, d, h, f(d, b))))
            comps.append(tuple(row))
        return NatTrans(self.obj, other.obj, comps, validate=False)


class DependentProduct(Over):
    """``Π_f(q)`` with its counit and transposition."""

    def __init__(self, f: NatTrans, q: NatTrans):
        fq = fibers(q)
        self.f, self.q = f, q
        self.space = SectionSpace(f, q.dom, lambda d, h, b: fq[d].get(b, ()), name=f"Pi({q.dom.name})")
        super().__init__(self.space.presheaf, self.space.proj)

    def counit(self) -> tuple[Over, NatTrans]:
        """``f*(Π_f q) -> Z`` over ``B``."""
        pb = pullback_ps(self.f, self.proj)
        comps = []
        for c in self.obj.base.objects():
            comps.append(tuple(self.space.at_identity(c, s, b) for b, s in pb.obj.labels[c]))  # type: ignore[index]
        return Over(pb.obj, pb.p1), NatTrans(pb.obj, self.q.dom, comps, validate=False)

    def transpose(self, w: NatTrans, k: NatTrans) -> NatTrans:
        """For ``w: W -> A`` and ``k: f*W -> Z`` over ``B`` (``f*W`` built by
        ``pullback_ps(f, w)``), the map ``W -> Π_f q`` over ``A``."""
        W = w.dom
        C = W.base
        comps = []
        for c in C.objects():
            row = []
            for x in range(W.carriers[c]):
                row.append(self.space.index_from(
                    c, w(c, x), lambda d, h, b: k(d, k.dom.index(d, (b, W.restrict(h, x))))))
            comps.append(tuple(row))
        return NatTrans(W, self.obj, comps, validate=False)


def dependent_product(f: NatTrans, g: Over | NatTrans) -> DependentProduct:
    q = g.proj if isinstance(g, Over) else g
    if not q.cod.same_as(f.dom):
        raise PresheafError("object is not over the domain of f")
    return DependentProduct(f, q)


def slice_exponential(x: NatTrans, y: NatTrans) -> SliceExponential:
    return SliceExponential(x, y)
