"""Polynomial functors of presheaf maps and their classifying bijection.

For ``f: B -> A`` the polynomial functor sends ``X`` to the presheaf whose
elements at ``C`` are pairs ``(a, t)`` with ``a ∈ A(C)`` and ``t`` a natural
map from the fibre ``yC ×_A B`` into ``X``.  Maps ``Y -> P_f(X)`` correspond
to pairs ``(g1: Y -> A, g2: Y ×_A B -> X)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import presheaf as ps
from .natmodel import NaturalModel
from .presheaf import Element, NatTrans, Presheaf, PresheafError, PullbackPS, SectionSpace


@dataclass
class PolyApplication:
    f: NatTrans
    X: Presheaf
    space: SectionSpace
    result: Presheaf
    projection: NatTrans
    generic: PullbackPS
    u2: NatTrans

    def element(self, c: int, a: int, fn) -> int:
        return self.space.index_from(c, a, fn)


def poly_apply(f: NatTrans, X: Presheaf, *, check: bool = True) -> PolyApplication:
    if f.base is not X.base:
        raise PresheafError("polynomial functor applied across bases")
    space = SectionSpace(f, X, name=f"P({X.name})")
    result, proj = space.presheaf, space.proj
    G = ps.pullback_ps(proj, f)
    u2 = NatTrans(G.obj, X, [tuple(space.at_identity(c, e, b) for e, b in G.obj.labels[c])  # type: ignore[index]
                             for c in f.base.objects()], validate=False)
    out = PolyApplication(f, X, space, result, proj, G, u2)
    if check:
        iso = composite_comparison(out)
        if not ps.is_iso(iso):
            raise PresheafError("sections formula and adjoint composite disagree")
    return out


def composite_comparison(P: PolyApplication) -> NatTrans:
    """The canonical map from the sections-formula result into
    ``Σ_A Π_f (B × X)`` computed with the presheaf adjoints."""
    f, X = P.f, P.X
    BX = ps.base_change(ps.to_terminal(f.dom), ps.to_terminal(X))
    pi = ps.dependent_product(f, BX)
    total = ps.dependent_sum(ps.to_terminal(f.cod), pi)
    comps = []
    for c in f.base.objects():
        row = []
        for e, (a, _) in enumerate(P.result.labels[c]):  # type: ignore[arg-type]
            row.append(pi.space.index_from(
                c, a, lambda d, h, b: BX.obj.index(d, (b, P.space.value(c, e, d, h, b)))))
        comps.append(tuple(row))
    return NatTrans(P.result, total.obj, comps, validate=False)


def poly_map(P1: PolyApplication, P2: PolyApplication, h: NatTrans) -> NatTrans:
    """``P_f(h): P_f(X) -> P_f(Y)`` for ``h: X -> Y``."""
    if not P1.f.same_as(P2.f):
        raise PresheafError("polynomial functors of different maps")
    comps = []
    for c in P1.f.base.objects():
        row = []
        for e, (a, _) in enumerate(P1.result.labels[c]):  # type: ignore[arg-type]
            row.append(P2.space.index_from(c, a, lambda d, hh, b: h(d, P1.space.value(c, e, d, hh, b))))
        comps.append(tuple(row))
    return NatTrans(P1.result, P2.result, comps, validate=False)


def classify(P: PolyApplication, g: NatTrans) -> tuple[NatTrans, NatTrans]:
    """``g: Y -> P_f(X)`` to ``(g1: Y -> A, g2: Y ×_A B -> X)``; the domain of
    ``g2`` is ``pullback_ps(g1, f)``."""
    if not g.cod.same_as(P.result):
        raise PresheafError("map does not land in this polynomial application")
    g1 = ps.compose(P.projection, g)
    pb = ps.pullback_ps(g1, P.f)
    comps = [tuple(P.space.at_identity(c, g(c, y), b) for y, b in pb.obj.labels[c])  # type: ignore[index]
             for c in g.base.objects()]
    return g1, NatTrans(pb.obj, P.X, comps, validate=False)


def unclassify(P: PolyApplication, g1: NatTrans, g2: NatTrans) -> NatTrans:
    Y = g1.dom
    dom = g2.dom
    comps = []
    for c in Y.base.objects():
        row = []
        for y in range(Y.carriers[c]):
            row.append(P.space.index_from(
                c, g1(c, y), lambda d, h, b: g2(d, dom.index(d, (Y.restrict(h, y), b)))))
        comps.append(tuple(row))
    return NatTrans(Y, P.result, comps, validate=False)


def induced_generic_map(P: PolyApplication, g: NatTrans) -> NatTrans:
    """The map ``Y ×_A B -> G`` into the generic object induced by ``g``."""
    g1 = ps.compose(P.projection, g)
    pb = ps.pullback_ps(g1, P.f)
    comps = [tuple(P.generic.index(c, g(c, y), b) for y, b in pb.obj.labels[c])  # type: ignore[index]
             for c in g.base.objects()]
    return NatTrans(pb.obj, P.generic.obj, comps, validate=False)


# ------------------------------------------------ natural-model specialisation

def pair_to_element(M: NaturalModel, P: PolyApplication, ctx: int, A: int, B: int) -> int:
    """The element of ``P_p(X)`` at ``ctx`` classifying ``A`` at ``ctx`` and
    ``B ∈ X(ctx·A)``."""
    X = P.X
    return P.space.index_from(ctx, A, lambda d, h, b: X.restrict(M.pair_sub(ctx, A, h, b), B))


def element_to_pair(M: NaturalModel, P: PolyApplication, ctx: int, e: int) -> tuple[int, int]:
    A = P.projection(ctx, e)
    w = M.extend(ctx, A)
    return A, P.space.value(ctx, e, w.ext, w.pA, w.qA)


def classify_context_pairs(M: NaturalModel, P: PolyApplication, g: NatTrans) -> tuple[int, int]:
    """A map ``yΓ -> P_p(X)`` to ``(A at Γ, B at Γ·A)``."""
    e = ps.map_as_element(g)
    return element_to_pair(M, P, e.at, e.value)


def pair_to_map(M: NaturalModel, P: PolyApplication, ctx: int, A: int, B: int) -> NatTrans:
    return ps.element_as_map(Element(P.result, ctx, pair_to_element(M, P, ctx, A, B)))
