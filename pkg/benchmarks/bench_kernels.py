"""Time the compiled table checkers against the vectorised numpy ones.

    python benchmarks/bench_kernels.py [--repeat 5] [--size 3]

Inputs are the category of finite sets of size at most ``--size``, a
representable presheaf on it and the map between two representables induced
by a morphism.  Each kernel is warmed up once (so numba compilation is not
timed), then the best of ``--repeat`` runs is reported.
"""

import argparse
import timeit

from natmod import _kernels, catalog
from natmod.presheaf import morphism_map, yoneda


def inputs(size: int) -> dict[str, tuple]:
    C = catalog.finset(size)
    X = yoneda(C, size)
    f = C.hom(size - 1, size)[0]
    t = morphism_map(C, f)
    base = (C.dom, C.cod)
    return {
        "category": (*base, C.identity, C.comp),
        "presheaf": (*base, C.identity, C.comp, X.carriers, X.act),
        "naturality": (*base, t.dom.carriers, t.cod.carriers, t.dom.act, t.cod.act, t.comp_array),
    }, C.n_morphisms


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=3)
    args = ap.parse_args()

    cases, n = inputs(args.size)
    backends = [b for b in ("numpy", "numba") if b in _kernels.IMPLEMENTATIONS]
    print(f"finite sets of size <= {args.size}: {n} morphisms; best of {args.repeat}")
    print(f"{'kernel':<12}" + "".join(f"{b:>14}" for b in backends) + f"{'ratio':>10}")
    for kind, raw in cases.items():
        arrays = [_kernels._arr(a) for a in raw]
        times = []
        for b in backends:
            fn = _kernels.IMPLEMENTATIONS[b][kind]
            fn(*arrays)
            times.append(min(timeit.repeat(lambda: fn(*arrays), number=1, repeat=args.repeat)))
        ratio = f"{times[0] / times[1]:>9.1f}x" if len(times) == 2 else ""
        print(f"{kind:<12}" + "".join(f"{t * 1e3:>12.2f}ms" for t in times) + ratio)


if __name__ == "__main__":
    main()
