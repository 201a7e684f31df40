"""Small named categories used as fixtures.

Every builder returns a validated :class:`FinCategory` whose morphism ids are
assigned in a fixed lexicographic order, so rebuilding gives identical tables.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from .fincat import FinCategory


def poset(n: int, covers: Iterable[tuple[int, int]], name: str = "", object_names: Sequence[str] | None = None) -> FinCategory:
    """The preorder generated by ``covers`` (pairs ``x <= y``) on ``0..n-1``."""
    leq = [[x == y for y in range(n)] for x in range(n)]
    for x, y in covers:
        leq[x][y] = True
    for k, i, j in itertools.product(range(n), repeat=3):
        if leq[i][k] and leq[k][j]:
            leq[i][j] = True
    arrows = [(x, y) for x in range(n) for y in range(n) if leq[x][y]]
    index = {a: i for i, a in enumerate(arrows)}
    identity = [index[(x, x)] for x in range(n)]

    def compose(g: int, f: int) -> int:
        return index[(arrows[f][0], arrows[g][1])]

    return FinCategory.from_composer(n, arrows, identity, compose, name=name, object_names=object_names)


def terminal_category() -> FinCategory:
    return poset(1, [], name="one")


def chain(n: int) -> FinCategory:
    return poset(n, [(i, i + 1) for i in range(n - 1)], name=f"chain{n}")


def discrete(n: int) -> FinCategory:
    return poset(n, [], name=f"discrete{n}")


def diamond() -> FinCategory:
    """The Boolean lattice on two atoms: bottom 0, atoms 1 and 2, top 3."""
    return poset(4, [(0, 1), (0, 2), (1, 3), (2, 3)], name="diamond", object_names=["0", "a", "b", "1"])


def pentagon() -> FinCategory:
    """The non-distributive lattice N5: 0 < a < c < 1 and 0 < b < 1."""
    return poset(5, [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)], name="pentagon",
                 object_names=["0", "a", "c", "b", "1"])


def diamond3() -> FinCategory:
    """The non-distributive lattice M3 with three atoms."""
    return poset(5, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)], name="m3",
                 object_names=["0", "a", "b", "c", "1"])


def chaotic(n: int) -> FinCategory:
    """Exactly one morphism between any two objects; everything is an iso."""
    arrows = [(x, y) for x in range(n) for y in range(n)]
    index = {a: i for i, a in enumerate(arrows)}
    return FinCategory.from_composer(n, arrows, [index[(x, x)] for x in range(n)],
                                     lambda g, f: index[(arrows[f][0], arrows[g][1])], name=f"chaotic{n}")


def parallel_pair() -> FinCategory:
    """Two objects and two parallel arrows ``0 => 1``."""
    arrows = [(0, 0), (0, 1), (0, 1), (1, 1)]

    def compose(g: int, f: int) -> int:
        if arrows[g][0] == arrows[g][1]:
            return f
        return g

    return FinCategory.from_composer(2, arrows, [0, 3], compose, name="parallel")


def finset(k: int) -> FinCategory:
    """Skeleton of finite sets of size ``0..k`` with all functions.

    Morphisms are ordered by ``(dom, cod, graph)`` where the graph is the tuple
    of images in lexicographic order.
    """
    arrows: list[tuple[int, int]] = []
    graphs: list[tuple[int, ...]] = []
    for m in range(k + 1):
        for n in range(k + 1):
            for graph in itertools.product(range(n), repeat=m):
                arrows.append((m, n))
                graphs.append(graph)
    index = {(a, g): i for i, (a, g) in enumerate(zip(arrows, graphs))}
    identity = [index[((m, m), tuple(range(m)))] for m in range(k + 1)]

    def compose(g: int, f: int) -> int:
        graph = tuple(graphs[g][v] for v in graphs[f])
        return index[((arrows[f][0], arrows[g][1]), graph)]

    return FinCategory.from_composer(k + 1, arrows, identity, compose, name=f"finset{k}")


def finset_graph(C: FinCategory, f: int) -> tuple[int, ...]:
    """Recover the function graph of a morphism of :func:`finset`."""
    m, n = C.src(f), C.tgt(f)
    return list(itertools.product(range(n), repeat=m))[C.hom(m, n).index(f)]


def by_name(name: str) -> FinCategory:
    builders = {
        "one": terminal_category,
        "chain2": lambda: chain(2),
        "chain3": lambda: chain(3),
        "discrete2": lambda: discrete(2),
        "diamond": diamond,
        "pentagon": pentagon,
        "m3": diamond3,
        "chaotic2": lambda: chaotic(2),
        "parallel": parallel_pair,
        "finset2": lambda: finset(2),
    }
    return builders[name]()
