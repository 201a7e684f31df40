"""Regenerate the JSON fixtures in this directory from the category catalog.

Run ``python3 fixtures/generate.py``; output is deterministic.
"""

from __future__ import annotations

import json
from pathlib import Path

from natmod import catalog

HERE = Path(__file__).resolve().parent
CATEGORIES = ["one", "chain2", "chain3", "discrete2", "diamond", "pentagon", "m3", "chaotic2", "parallel", "finset2"]


def write(name: str, data) -> None:
    (HERE / name).write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")


def main() -> None:
    for name in CATEGORIES:
        write(f"{name}.json", catalog.by_name(name).to_json())

    write("class-all.json", {"members": "all"})
    fs = catalog.by_name("finset2")
    write("class-finset2-isos.json", {"members": [f for f in fs.morphisms() if fs.is_iso(f)]})
    monos = [f for f in fs.morphisms() if len(set(catalog.finset_graph(fs, f))) == len(catalog.finset_graph(fs, f))]
    write("class-finset2-monos.json", {"members": monos})
    ch = catalog.by_name("chain2")
    write("class-chain2-id0.json", {"members": [ch.id(0)]})

    # Names for the diamond model at its top object: each type at the top is
    # the display of one object below it, named after that object.
    write("diamond-env.json", {"base_object": 3, "types": {"Zero": 0, "Pa": 1, "Pb": 2, "One": 3},
                               "terms": {"star": 0}})

    # p: 2 -> 1 over the terminal category; the fiber has two points, so no
    # representable object can sit over it.
    write("nonrep-one.json", {
        "types": {"carriers": [1], "actions": [{"mor": 0, "table": [0]}]},
        "terms": {"carriers": [2], "actions": [{"mor": 0, "table": [0, 1]}]},
        "p": {"components": [[0, 0]]},
    })
    write("rep-one.json", {
        "types": {"carriers": [1], "actions": [{"mor": 0, "table": [0]}]},
        "terms": {"carriers": [1], "actions": [{"mor": 0, "table": [0]}]},
        "p": {"components": [[0]]},
    })

    # The presheaf 2 <- 1 on chain2 (morphism 1 is 0 -> 1) and a broken copy
    # whose identity action swaps the two elements.
    write("chain2-ps.json", {"carriers": [2, 1], "actions": [
        {"mor": 0, "table": [0, 1]}, {"mor": 1, "table": [1]}, {"mor": 2, "table": [0]}]})
    write("chain2-ps-bad.json", {"carriers": [2, 1], "actions": [
        {"mor": 0, "table": [1, 0]}, {"mor": 1, "table": [1]}, {"mor": 2, "table": [0]}]})


if __name__ == "__main__":
    main()
