"""The compiled and the vectorised table checkers report identical rows."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from natmod import _kernels, catalog
from natmod.presheaf import NatTrans, yoneda

pytestmark = pytest.mark.skipif("numba" not in _kernels.IMPLEMENTATIONS, reason="numba unavailable")

NAMES = ["chain3", "diamond", "pentagon", "chaotic2", "parallel", "finset2"]


def rows(a):
    return sorted(map(tuple, np.asarray(a).tolist()))


def both(kind, *args):
    fns = (_kernels.IMPLEMENTATIONS["numpy"][kind], _kernels.IMPLEMENTATIONS["numba"][kind])
    args = [_kernels._arr(a) for a in args]
    return [rows(fn(*args)) for fn in fns]


@given(st.sampled_from(NAMES), st.integers(0, 2**32 - 1), st.integers(0, 4))
def test_category_rows_agree(name, seed, n_mutations):
    C = catalog.by_name(name)
    rng = np.random.default_rng(seed)
    comp = C.comp.copy()
    m = C.n_morphisms
    for _ in range(n_mutations):
        g, f = rng.integers(0, m, size=2)
        comp[g, f] = rng.integers(-1, m)
    a, b = both("category", C.dom, C.cod, C.identity, comp)
    assert a == b
    if n_mutations == 0:
        assert a == []


@given(st.sampled_from(NAMES[:4]), st.integers(0, 2**32 - 1), st.booleans())
def test_presheaf_rows_agree(name, seed, mutate):
    C = catalog.by_name(name)
    rng = np.random.default_rng(seed)
    X = oracles.random_presheaf(C, rng, max_size=2)
    act = X.act.copy()
    if mutate and act.size:
        f = int(rng.integers(0, act.shape[0]))
        if act.shape[1]:
            act[f, int(rng.integers(0, act.shape[1]))] = int(rng.integers(0, 3))
    a, b = both("presheaf", C.dom, C.cod, C.identity, C.comp, X.carriers, act)
    assert a == b
    if not mutate:
        assert a == []


@given(st.sampled_from(NAMES[:3]), st.integers(0, 2**32 - 1))
def test_naturality_rows_agree(name, seed):
    C = catalog.by_name(name)
    rng = np.random.default_rng(seed)
    x, y = (int(v) for v in rng.integers(0, C.n_objects, size=2))
    X, Y = yoneda(C, x), yoneda(C, y)
    width = max(X.carriers, default=0)
    comps = np.zeros((C.n_objects, max(width, 1)), dtype=np.int64)
    for c in C.objects():
        for e in range(X.carriers[c]):
            comps[c, e] = rng.integers(0, max(Y.carriers[c], 1))
    a, b = both("naturality", C.dom, C.cod, X.carriers, Y.carriers, X.act, Y.act, comps)
    assert a == b


def test_backend_is_selectable_by_environment():
    assert _kernels.BACKEND in _kernels.IMPLEMENTATIONS


def test_valid_map_has_no_rows_in_either_backend():
    C = catalog.diamond()
    f = C.hom(1, 3)[0]
    from natmod.presheaf import morphism_map
    t = morphism_map(C, f)
    a, b = both("naturality", C.dom, C.cod, t.dom.carriers, t.cod.carriers, t.dom.act, t.cod.act, t.comp_array)
    assert a == b == []
    assert isinstance(t, NatTrans)
