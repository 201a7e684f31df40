import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from natmod import catalog
from natmod.presheaf import (
    Element,
    NatTrans,
    Presheaf,
    PresheafError,
    base_change,
    compose,
    dependent_product,
    dependent_sum,
    element_as_map,
    exponential,
    find_iso,
    identity,
    is_pullback_square,
    map_as_element,
    morphism_map,
    natural_maps,
    product,
    pullback_ps,
    terminal_presheaf,
    to_terminal,
    validate_nat_trans,
    validate_presheaf,
    yoneda,
)

SMALL = ["one", "chain2", "chain3", "discrete2", "chaotic2", "parallel"]
seeds = st.integers(0, 2**32 - 1)


def sets(sizes):
    """Presheaves on the terminal category are finite sets."""
    C = catalog.terminal_category()
    return [Presheaf(C, [n], [list(range(n))]) for n in sizes]


def func(X, Y, values):
    return NatTrans(X, Y, [values])


def as_nat(X, Y, comps):
    return NatTrans(X, Y, comps)


# ------------------------------------------------------------- yoneda

def test_yoneda_on_the_arrow():
    C = catalog.chain(2)
    assert yoneda(C, 1).carriers == (1, 1)
    assert yoneda(C, 0).carriers == (1, 0)


@pytest.mark.parametrize("name", SMALL + ["diamond", "finset2"])
def test_yoneda_is_a_presheaf_containing_identities(name):
    C = catalog.by_name(name)
    for x in C.objects():
        y = yoneda(C, x)
        assert validate_presheaf(y).ok
        assert C.id(x) in y.labels[x]


def test_element_of_identity_is_identity_map():
    C = catalog.diamond()
    for x in C.objects():
        y = yoneda(C, x)
        t = element_as_map(Element(y, x, y.index(x, C.id(x))))
        assert t.same_as(identity(y))


def test_arrow_element_induces_the_arrow():
    C = catalog.chain(2)
    y1 = yoneda(C, 1)
    t = element_as_map(Element(y1, 0, 0))
    assert t.same_as(morphism_map(C, C.hom(0, 1)[0]))


@given(st.sampled_from(SMALL), seeds)
def test_yoneda_round_trip(name, seed):
    C = catalog.by_name(name)
    X = oracles.random_presheaf(C, np.random.default_rng(seed))
    for c in C.objects():
        for x in range(X.carriers[c]):
            t = element_as_map(Element(X, c, x))
            assert validate_nat_trans(t).ok
            e = map_as_element(t)
            assert (e.at, e.value) == (c, x)


def test_map_as_element_rejects_foreign_domains():
    C = catalog.chain(2)
    X = terminal_presheaf(C)
    with pytest.raises(PresheafError):
        map_as_element(identity(X))


# ------------------------------------------------------- natural maps

@given(st.sampled_from(SMALL), seeds)
def test_natural_maps_match_brute_force(name, seed):
    C = catalog.by_name(name)
    rng = np.random.default_rng(seed)
    X, Y = oracles.random_presheaf(C, rng), oracles.random_presheaf(C, rng)
    got = [t.components for t in natural_maps(X, Y)]
    want = sorted([list(map(tuple, m)) for m in oracles.nat_maps(X, Y)])
    assert [list(c) for c in got] == want


def test_first_solution_with_limit_is_least():
    C = catalog.chain(3)
    rng = np.random.default_rng(7)
    for _ in range(20):
        X, Y = oracles.random_presheaf(C, rng), oracles.random_presheaf(C, rng)
        every = natural_maps(X, Y)
        first = natural_maps(X, Y, limit=1)
        assert [t.components for t in first] == [t.components for t in every[:1]]


# ------------------------------------------------------------ limits

def test_set_pullback_counts_matching_pairs():
    X3, X2 = sets([3, 2])
    f = func(X3, X2, [0, 1, 1])
    g = func(X2, X2, [1, 1])
    pb = pullback_ps(f, g)
    assert pb.obj.carriers == (sum(1 for a in range(3) for b in range(2) if [0, 1, 1][a] == [1, 1][b]),)


def test_pullback_of_identities_is_the_domain():
    C = catalog.chain(2)
    X = oracles.random_presheaf(C, np.random.default_rng(1))
    pb = pullback_ps(identity(X), identity(X))
    assert find_iso(pb.obj, X) is not None
    assert is_pullback_square(pb.p2, pb.p1, identity(X), identity(X))


@given(st.sampled_from(SMALL), seeds)
def test_product_with_terminal_is_isomorphic(name, seed):
    C = catalog.by_name(name)
    X = oracles.random_presheaf(C, np.random.default_rng(seed))
    P = product(X, terminal_presheaf(C))
    assert P.obj.carriers == X.carriers
    assert find_iso(P.obj, X) is not None


@given(st.sampled_from(SMALL), seeds)
def test_pullback_has_the_universal_property(name, seed):
    C = catalog.by_name(name)
    rng = np.random.default_rng(seed)
    Z = oracles.random_presheaf(C, rng, max_size=2)
    X, Y, T = (oracles.random_presheaf(C, rng, max_size=2) for _ in range(3))
    f, g = oracles.random_map(X, Z, rng), oracles.random_map(Y, Z, rng)
    if f is None or g is None:
        return
    f, g = as_nat(X, Z, f), as_nat(Y, Z, g)
    pb = pullback_ps(f, g)
    assert validate_presheaf(pb.obj).ok
    _, ref = oracles.pullback_carriers(f.components, g.components, X, Y)
    assert pb.obj.carriers == ref.carriers
    # cones from T correspond exactly to maps T -> pullback
    cones = 0
    for u in oracles.nat_maps(T, X):
        for v in oracles.nat_maps(T, Y):
            if all(f(c, u[c][t]) == g(c, v[c][t]) for c in C.objects() for t in range(T.carriers[c])):
                cones += 1
                m = pb.pair(as_nat(T, X, u), as_nat(T, Y, v))
                assert compose(pb.p1, m).components == [tuple(x) for x in u]
    assert cones == len(oracles.nat_maps(T, pb.obj))


def test_square_with_non_injective_comparison_is_not_a_pullback():
    X2, X1 = sets([2, 1])
    bang = func(X2, X1, [0, 0])
    one = identity(X1)
    # commutes, but the comparison 2 -> 1 x_1 1 is not injective
    assert not is_pullback_square(bang, bang, one, one)


def test_identity_square_is_a_pullback():
    X = sets([3])[0]
    i = identity(X)
    assert is_pullback_square(i, i, i, i)


def test_non_commuting_square_is_rejected():
    X2, = sets([2])
    swap = func(X2, X2, [1, 0])
    i = identity(X2)
    with pytest.raises(PresheafError):
        is_pullback_square(i, i, i, swap)


# ------------------------------------------------------- exponentials

def test_set_exponential_size():
    X, Y = sets([2, 3])
    assert exponential(X, Y).obj.carriers == (9,)


@given(seeds)
def test_exponential_on_the_arrow_at_the_source(seed):
    C = catalog.chain(2)
    rng = np.random.default_rng(seed)
    X, Y = oracles.random_presheaf(C, rng), oracles.random_presheaf(C, rng)
    assert exponential(X, Y).obj.carriers[0] == Y.carriers[0] ** X.carriers[0]


@given(st.sampled_from(SMALL), seeds)
def test_exponential_adjunction(name, seed):
    C = catalog.by_name(name)
    rng = np.random.default_rng(seed)
    W, X, Y = (oracles.random_presheaf(C, rng, max_size=2) for _ in range(3))
    E = exponential(X, Y)
    WX = product(W, X)
    term = [tuple([0] * n) for n in W.carriers], [tuple([0] * n) for n in X.carriers]
    _, ref = oracles.pullback_carriers(term[0], term[1], W, X)
    lhs = oracles.nat_maps(ref, Y)
    rhs = oracles.nat_maps(W, E.obj)
    assert len(lhs) == len(rhs)
    for g in natural_maps(WX.obj, Y):
        t = E.transpose(g)
        back = compose(E.eval, E.eval_domain.pair(compose(t, WX.p1), WX.p2))
        assert back.components == g.components


# -------------------------------------------- slices and dependent products

def test_base_change_over_sets():
    X3, X2, X5 = sets([3, 2, 5])
    f = func(X3, X2, [0, 0, 1])
    g = func(X5, X2, [0, 1, 1, 1, 0])
    bc = base_change(f, g)
    assert bc.obj.carriers == (2 * 2 + 1 * 3,)


def test_base_change_along_identity_and_sum_along_identity():
    C = catalog.chain(2)
    Z = oracles.random_presheaf(C, np.random.default_rng(3))
    A = terminal_presheaf(C)
    g = to_terminal(Z)
    bc = base_change(identity(A), g)
    assert bc.obj.carriers == Z.carriers
    s = dependent_sum(identity(A), bc)
    assert s.proj.components == bc.proj.components


def test_dependent_sum_projection_is_the_composite():
    X2, X1, X3 = sets([2, 1, 3])
    f = func(X2, X1, [0, 0])
    over = base_change(identity(X2), func(X3, X2, [0, 1, 1]))
    s = dependent_sum(f, over)
    assert s.proj.components == compose(f, over.proj).components


def test_dependent_product_over_sets_counts_sections():
    B, A, Z = sets([3, 2, 4])
    f = func(B, A, [0, 0, 1])
    q = func(Z, B, [0, 0, 1, 2])
    P = dependent_product(f, q)
    fibre = [2, 1, 1]
    sizes = {a: int(np.prod([fibre[b] for b in range(3) if [0, 0, 1][b] == a])) for a in range(2)}
    assert sorted(P.proj.components[0]).count(0) == sizes[0]
    assert sorted(P.proj.components[0]).count(1) == sizes[1]


def test_dependent_product_along_identity():
    C = catalog.chain(2)
    Z = oracles.random_presheaf(C, np.random.default_rng(11))
    P = dependent_product(identity(terminal_presheaf(C)), to_terminal(Z))
    assert P.obj.carriers == Z.carriers


@given(st.sampled_from(["one", "chain2", "chain3", "discrete2"]), seeds)
def test_dependent_product_adjunction(name, seed):
    C = catalog.by_name(name)
    rng = np.random.default_rng(seed)
    A, B, Z, W = (oracles.random_presheaf(C, rng, max_size=2) for _ in range(4))
    f, q, w = oracles.random_map(B, A, rng), oracles.random_map(Z, B, rng), oracles.random_map(W, A, rng)
    if f is None or q is None or w is None:
        return
    f, q, w = as_nat(B, A, f), as_nat(Z, B, q), as_nat(W, A, w)
    P = dependent_product(f, q)
    over_a = oracles.nat_maps(W, P.obj, allowed=lambda c, x: [e for e in range(P.obj.carriers[c])
                                                              if P.proj(c, e) == w(c, x)])
    elems, fW = oracles.pullback_carriers(f.components, w.components, B, W)
    over_b = oracles.nat_maps(fW, Z, allowed=lambda c, i: [z for z in range(Z.carriers[c])
                                                          if q(c, z) == elems[c][i][0]])
    assert len(over_a) == len(over_b)
    pb = pullback_ps(f, w)
    _, counit = P.counit()
    fP = pullback_ps(f, P.proj)
    for k in natural_maps(pb.obj, Z, lambda c, i: [z for z in range(Z.carriers[c]) if q(c, z) == pb.p1(c, i)]):
        t = P.transpose(w, k)
        assert compose(P.proj, t).components == w.components
        lifted = fP.pair(pb.p1, compose(t, pb.p2))
        assert compose(counit, lifted).components == k.components


def test_rebuilding_is_deterministic():
    C = catalog.chain(3)
    rng = np.random.default_rng(5)
    X, Y = oracles.random_presheaf(C, rng, 2), oracles.random_presheaf(C, rng, 2)
    a, b = exponential(X, Y).obj, exponential(X, Y).obj
    assert a.tables == b.tables and a.labels == b.labels


def test_to_terminal_is_natural():
    C = catalog.diamond()
    assert validate_nat_trans(to_terminal(yoneda(C, 1))).ok
