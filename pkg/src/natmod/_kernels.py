"""Table-checking kernels.

The law checks for categories, presheaves and natural transformations are the
only dense-array loops in the package, so they live here in two versions: a
numba ``@njit`` loop version and a vectorised numpy version.  The backend is
chosen once at import time from the ``NM_KERNEL`` environment variable
(``numba`` by default, ``numpy`` to force the fallback).  When numba cannot be
imported the numpy path is used silently.

Every kernel returns an ``(k, 4)`` int64 array of violation rows
``(kind, a, b, c)``; the callers translate kinds into report entries.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba as _nb
except ImportError:  # pragma: no cover
    _nb = None

_REQUESTED = os.environ.get("NM_KERNEL", "numba").strip().lower()
BACKEND = "numba" if (_REQUESTED != "numpy" and _nb is not None) else "numpy"

# Row kinds for category checks.
CAT_COMPOSABLE_MISSING = 0
CAT_NOT_COMPOSABLE = 1
CAT_BAD_ENDPOINTS = 2
CAT_LEFT_UNIT = 3
CAT_RIGHT_UNIT = 4
CAT_ASSOC = 5
CAT_IDENTITY_ENDPOINTS = 6

# Row kinds for presheaf checks.
PS_OUT_OF_RANGE = 0
PS_IDENTITY = 1
PS_CONTRAVARIANCE = 2

# Row kinds for naturality checks.
NT_OUT_OF_RANGE = 0
NT_NATURALITY = 1

_CAP = 1 << 14


# ---------------------------------------------------------------- numpy path

def _np_category(dom, cod, ident, comp):
    rows = []
    m = dom.shape[0]
    if m == 0:
        return np.zeros((0, 4), dtype=np.int64)
    for x, i in enumerate(ident):
        if dom[i] != x or cod[i] != x:
            rows.append((CAT_IDENTITY_ENDPOINTS, x, i, 0))
    composable = cod[None, :] == dom[:, None]  # [g, f]: cod f == dom g
    defined = comp >= 0
    for g, f in np.argwhere(composable & ~defined):
        rows.append((CAT_COMPOSABLE_MISSING, g, f, 0))
    for g, f in np.argwhere(~composable & defined):
        rows.append((CAT_NOT_COMPOSABLE, g, f, comp[g, f]))
    ok = composable & defined
    gs, fs = np.nonzero(ok)
    hs = comp[gs, fs]
    bad = (dom[hs] != dom[fs]) | (cod[hs] != cod[gs])
    for g, f, h in zip(gs[bad], fs[bad], hs[bad]):
        rows.append((CAT_BAD_ENDPOINTS, g, f, h))
    shaped = not rows
    idx = np.arange(m)
    left = comp[ident[cod], idx]
    for f in idx[left != idx]:
        rows.append((CAT_LEFT_UNIT, ident[cod[f]], f, left[f]))
    right = comp[idx, ident[dom]]
    for f in idx[right != idx]:
        rows.append((CAT_RIGHT_UNIT, f, ident[dom[f]], right[f]))
    if not shaped:
        # Associativity indexes through composites, so it needs a well-shaped table.
        return np.asarray(rows[:_CAP], dtype=np.int64).reshape(-1, 4)
    # (h∘g)∘f versus h∘(g∘f) for composable triples.
    gs, fs = np.nonzero(ok)
    gf = comp[gs, fs]
    for h in range(m):
        mask = dom[h] == cod[gs]
        if not mask.any():
            continue
        g_sel, f_sel, gf_sel = gs[mask], fs[mask], gf[mask]
        lhs = comp[comp[h, g_sel], f_sel]
        rhs = comp[h, gf_sel]
        for g, f in zip(g_sel[lhs != rhs], f_sel[lhs != rhs]):
            rows.append((CAT_ASSOC, h, g, f))
            if len(rows) >= _CAP:
                break
    return np.asarray(rows[:_CAP], dtype=np.int64).reshape(-1, 4)


def _np_presheaf(dom, cod, ident, comp, carriers, act):
    rows = []
    m = dom.shape[0]
    for f in range(m):
        n_in = carriers[cod[f]]
        tbl = act[f, :n_in]
        bad = (tbl < 0) | (tbl >= carriers[dom[f]])
        for x in np.nonzero(bad)[0]:
            rows.append((PS_OUT_OF_RANGE, f, x, tbl[x]))
    if rows:
        return np.asarray(rows[:_CAP], dtype=np.int64).reshape(-1, 4)
    for x, i in enumerate(ident):
        n = carriers[x]
        tbl = act[i, :n]
        for e in np.nonzero(tbl != np.arange(n))[0]:
            rows.append((PS_IDENTITY, i, e, tbl[e]))
    gs, fs = np.nonzero(comp >= 0)
    for g, f in zip(gs, fs):
        h = comp[g, f]
        n = carriers[cod[g]]
        lhs = act[h, :n]
        rhs = act[f, act[g, :n]]
        for e in np.nonzero(lhs != rhs)[0]:
            rows.append((PS_CONTRAVARIANCE, g, f, e))
            if len(rows) >= _CAP:
                break
    return np.asarray(rows[:_CAP], dtype=np.int64).reshape(-1, 4)


def _np_naturality(dom, cod, src_carriers, tgt_carriers, src_act, tgt_act, components):
    rows = []
    for c in range(src_carriers.shape[0]):
        tbl = components[c, : src_carriers[c]]
        bad = (tbl < 0) | (tbl >= tgt_carriers[c])
        for x in np.nonzero(bad)[0]:
            rows.append((NT_OUT_OF_RANGE, c, x, tbl[x]))
    if rows:
        return np.asarray(rows[:_CAP], dtype=np.int64).reshape(-1, 4)
    for f in range(dom.shape[0]):
        c, d = cod[f], dom[f]
        n = src_carriers[c]
        lhs = tgt_act[f, components[c, :n]]
        rhs = components[d, src_act[f, :n]]
        for x in np.nonzero(lhs != rhs)[0]:
            rows.append((NT_NATURALITY, f, x, 0))
            if len(rows) >= _CAP:
                break
    return np.asarray(rows[:_CAP], dtype=np.int64).reshape(-1, 4)


# ---------------------------------------------------------------- numba path

if _nb is not None:

    @_nb.njit(cache=True)
    def _nb_category(dom, cod, ident, comp):  # pragma: no cover - compiled
        m = dom.shape[0]
        out = np.empty((_CAP, 4), dtype=np.int64)
        k = 0
        for x in range(ident.shape[0]):
            i = ident[x]
            if dom[i] != x or cod[i] != x:
                if k < _CAP:
                    out[k, 0] = CAT_IDENTITY_ENDPOINTS
                    out[k, 1] = x
                    out[k, 2] = i
                    out[k, 3] = 0
                    k += 1
        for g in range(m):
            for f in range(m):
                h = comp[g, f]
                composable = cod[f] == dom[g]
                if composable and h < 0:
                    kind = CAT_COMPOSABLE_MISSING
                elif (not composable) and h >= 0:
                    kind = CAT_NOT_COMPOSABLE
                elif composable and (dom[h] != dom[f] or cod[h] != cod[g]):
                    kind = CAT_BAD_ENDPOINTS
                else:
                    continue
                if k < _CAP:
                    out[k, 0] = kind
                    out[k, 1] = g
                    out[k, 2] = f
                    out[k, 3] = h if h >= 0 else 0
                    k += 1
        shaped = k == 0
        for f in range(m):
            left = comp[ident[cod[f]], f]
            if left != f and k < _CAP:
                out[k, 0] = CAT_LEFT_UNIT
                out[k, 1] = ident[cod[f]]
                out[k, 2] = f
                out[k, 3] = left
                k += 1
            right = comp[f, ident[dom[f]]]
            if right != f and k < _CAP:
                out[k, 0] = CAT_RIGHT_UNIT
                out[k, 1] = f
                out[k, 2] = ident[dom[f]]
                out[k, 3] = right
                k += 1
        if not shaped:
            return out[:k].copy()
        for h in range(m):
            for g in range(m):
                if cod[g] != dom[h]:
                    continue
                hg = comp[h, g]
                for f in range(m):
                    if cod[f] != dom[g]:
                        continue
                    if comp[hg, f] != comp[h, comp[g, f]] and k < _CAP:
                        out[k, 0] = CAT_ASSOC
                        out[k, 1] = h
                        out[k, 2] = g
                        out[k, 3] = f
                        k += 1
        return out[:k].copy()

    @_nb.njit(cache=True)
    def _nb_presheaf(dom, cod, ident, comp, carriers, act):  # pragma: no cover
        m = dom.shape[0]
        out = np.empty((_CAP, 4), dtype=np.int64)
        k = 0
        for f in range(m):
            for x in range(carriers[cod[f]]):
                v = act[f, x]
                if (v < 0 or v >= carriers[dom[f]]) and k < _CAP:
                    out[k, 0] = PS_OUT_OF_RANGE
                    out[k, 1] = f
                    out[k, 2] = x
                    out[k, 3] = v
                    k += 1
        if k > 0:
            return out[:k].copy()
        for c in range(ident.shape[0]):
            i = ident[c]
            for x in range(carriers[c]):
                if act[i, x] != x and k < _CAP:
                    out[k, 0] = PS_IDENTITY
                    out[k, 1] = i
                    out[k, 2] = x
                    out[k, 3] = act[i, x]
                    k += 1
        for g in range(m):
            for f in range(m):
                h = comp[g, f]
                if h < 0:
                    continue
                for x in range(carriers[cod[g]]):
                    if act[h, x] != act[f, act[g, x]] and k < _CAP:
                        out[k, 0] = PS_CONTRAVARIANCE
                        out[k, 1] = g
                        out[k, 2] = f
                        out[k, 3] = x
                        k += 1
        return out[:k].copy()

    @_nb.njit(cache=True)
    def _nb_naturality(dom, cod, src_carriers, tgt_carriers, src_act, tgt_act, components):  # pragma: no cover
        out = np.empty((_CAP, 4), dtype=np.int64)
        k = 0
        for c in range(src_carriers.shape[0]):
            for x in range(src_carriers[c]):
                v = components[c, x]
                if (v < 0 or v >= tgt_carriers[c]) and k < _CAP:
                    out[k, 0] = NT_OUT_OF_RANGE
                    out[k, 1] = c
                    out[k, 2] = x
                    out[k, 3] = v
                    k += 1
        if k > 0:
            return out[:k].copy()
        for f in range(dom.shape[0]):
            c = cod[f]
            d = dom[f]
            for x in range(src_carriers[c]):
                if tgt_act[f, components[c, x]] != components[d, src_act[f, x]] and k < _CAP:
                    out[k, 0] = NT_NATURALITY
                    out[k, 1] = f
                    out[k, 2] = x
                    out[k, 3] = 0
                    k += 1
        return out[:k].copy()

else:  # pragma: no cover
    _nb_category = _nb_presheaf = _nb_naturality = None


IMPLEMENTATIONS = {
    "numpy": {"category": _np_category, "presheaf": _np_presheaf, "naturality": _np_naturality},
}
if _nb is not None:
    IMPLEMENTATIONS["numba"] = {"category": _nb_category, "presheaf": _nb_presheaf, "naturality": _nb_naturality}


def _arr(a) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(a, dtype=np.int64))


def category_violations(dom, cod, ident, comp, backend: str | None = None) -> np.ndarray:
    fn = IMPLEMENTATIONS[backend or BACKEND]["category"]
    return fn(_arr(dom), _arr(cod), _arr(ident), _arr(comp))


def presheaf_violations(dom, cod, ident, comp, carriers, act, backend: str | None = None) -> np.ndarray:
    fn = IMPLEMENTATIONS[backend or BACKEND]["presheaf"]
    return fn(_arr(dom), _arr(cod), _arr(ident), _arr(comp), _arr(carriers), _arr(act))


def naturality_violations(dom, cod, src_carriers, tgt_carriers, src_act, tgt_act, components,
                          backend: str | None = None) -> np.ndarray:
    fn = IMPLEMENTATIONS[backend or BACKEND]["naturality"]
    return fn(_arr(dom), _arr(cod), _arr(src_carriers), _arr(tgt_carriers), _arr(src_act),
              _arr(tgt_act), _arr(components))
