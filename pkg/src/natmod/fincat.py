"""Finite categories stored as explicit tables.

Objects are ``0..n-1`` and morphisms ``0..m-1``.  Composition is a dense
``m x m`` table ``comp[g, f] = g∘f`` with ``-1`` where ``cod f != dom g``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from . import _kernels
from .report import ValidationReport


class CategoryError(ValueError):
    """Malformed category data or out-of-range ids."""

    def __init__(self, message: str, report: ValidationReport | None = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class CommutativeSquare:
    """A square ``right∘top = bottom∘left``::

        P --top--> B
        |          |
       left      right
        v          v
        A --bottom-> Z

    For ``pullback(C, f, g)`` the cospan is ``bottom = f``, ``right = g``;
    ``left`` is then the pullback of ``g`` along ``f``.
    """

    top: int
    left: int
    right: int
    bottom: int
    is_pullback: bool = False

    def apex(self, C: "FinCategory") -> int:
        return int(C.dom[self.left])


class FinCategory:
    def __init__(
        self,
        n_objects: int,
        dom: Sequence[int],
        cod: Sequence[int],
        identity: Sequence[int],
        comp: np.ndarray,
        *,
        name: str = "",
        object_names: Sequence[str] | None = None,
        validate: bool = True,
    ):
        self.n_objects = int(n_objects)
        self.dom = np.asarray(dom, dtype=np.int64)
        self.cod = np.asarray(cod, dtype=np.int64)
        self.identity = np.asarray(identity, dtype=np.int64)
        self.comp = np.asarray(comp, dtype=np.int64).reshape(len(self.dom), len(self.dom))
        self.name = name
        self.object_names = list(object_names) if object_names else [str(i) for i in range(self.n_objects)]
        # Plain python mirrors for the hot scalar paths.
        self._dom = [int(x) for x in self.dom]
        self._cod = [int(x) for x in self.cod]
        self._id = [int(x) for x in self.identity]
        self._comp = self.comp.tolist()
        self._hom: dict[tuple[int, int], tuple[int, ...]] | None = None
        self._pullbacks: dict[tuple[int, int], CommutativeSquare | None] = {}
        if validate:
            report = validate_category(self)
            if report:
                raise CategoryError(f"invalid category {name!r}:\n{report}", report)

    # -- basic accessors ---------------------------------------------------
    @property
    def n_morphisms(self) -> int:
        return len(self._dom)

    def objects(self) -> range:
        return range(self.n_objects)

    def morphisms(self) -> range:
        return range(self.n_morphisms)

    def src(self, f: int) -> int:
        return self._dom[f]

    def tgt(self, f: int) -> int:
        return self._cod[f]

    def id(self, x: int) -> int:
        return self._id[x]

    def compose(self, g: int, f: int) -> int:
        """``g∘f`` (first ``f`` then ``g``)."""
        h = self._comp[g][f]
        if h < 0:
            raise CategoryError(f"morphisms {g} and {f} are not composable")
        return h

    def chain(self, *ms: int) -> int:
        """``ms[0]∘ms[1]∘...``."""
        out = ms[-1]
        for g in reversed(ms[:-1]):
            out = self.compose(g, out)
        return out

    def _build_hom(self) -> dict[tuple[int, int], tuple[int, ...]]:
        table: dict[tuple[int, int], list[int]] = {}
        for f in range(self.n_morphisms):
            table.setdefault((self._dom[f], self._cod[f]), []).append(f)
        return {k: tuple(v) for k, v in table.items()}

    def hom(self, x: int, y: int) -> tuple[int, ...]:
        self._check_obj(x)
        self._check_obj(y)
        if self._hom is None:
            self._hom = self._build_hom()
        return self._hom.get((x, y), ())

    def into(self, y: int) -> list[int]:
        """All morphisms with codomain ``y`` ordered by MorId."""
        return [f for f in range(self.n_morphisms) if self._cod[f] == y]

    def out_of(self, x: int) -> list[int]:
        return [f for f in range(self.n_morphisms) if self._dom[f] == x]

    def _check_obj(self, x: int) -> None:
        if not 0 <= x < self.n_objects:
            raise CategoryError(f"object {x} out of range 0..{self.n_objects - 1}")

    def is_iso(self, f: int) -> bool:
        return self.inverse(f) is not None

    def inverse(self, f: int) -> int | None:
        for g in self.hom(self._cod[f], self._dom[f]):
            if self._comp[g][f] == self._id[self._dom[f]] and self._comp[f][g] == self._id[self._cod[f]]:
                return g
        return None

    def __repr__(self) -> str:
        return f"FinCategory({self.name or '?'}: {self.n_objects} objects, {self.n_morphisms} morphisms)"

    # -- serialisation -----------------------------------------------------
    @classmethod
    def from_json(cls, data: dict[str, Any], *, validate: bool = True) -> "FinCategory":
        try:
            n = int(data["objects"])
            mors = data["morphisms"]
            dom = [int(m["dom"]) for m in mors]
            cod = [int(m["cod"]) for m in mors]
            ident = [int(i) for i in data["identity"]]
            comp = np.full((len(mors), len(mors)), -1, dtype=np.int64)
            for entry in data["composition"]:
                g, f, h = int(entry["after"]), int(entry["then"]), int(entry["is"])
                if not (0 <= g < len(mors) and 0 <= f < len(mors) and 0 <= h < len(mors)):
                    raise CategoryError(f"composition entry {entry} references unknown morphism")
                comp[g, f] = h
        except (KeyError, TypeError) as exc:
            raise CategoryError(f"malformed category fixture: {exc!r}") from exc
        if len(ident) != n:
            raise CategoryError("identity table length differs from object count")
        return cls(n, dom, cod, ident, comp, name=str(data.get("name", "")),
                   object_names=data.get("object_names"), validate=validate)

    def to_json(self) -> dict[str, Any]:
        comp = []
        for g in range(self.n_morphisms):
            for f in range(self.n_morphisms):
                h = self._comp[g][f]
                if h >= 0:
                    comp.append({"after": g, "then": f, "is": h})
        out: dict[str, Any] = {
            "objects": self.n_objects,
            "morphisms": [{"dom": d, "cod": c} for d, c in zip(self._dom, self._cod)],
            "identity": list(self._id),
            "composition": comp,
        }
        if self.name:
            out["name"] = self.name
        if self.object_names != [str(i) for i in range(self.n_objects)]:
            out["object_names"] = list(self.object_names)
        return out

    @classmethod
    def from_composer(
        cls,
        n_objects: int,
        arrows: Sequence[tuple[int, int]],
        identity: Sequence[int],
        compose: Any,
        **kwargs: Any,
    ) -> "FinCategory":
        """Build the composition table from a python function ``compose(g, f)``."""
        m = len(arrows)
        comp = np.full((m, m), -1, dtype=np.int64)
        for g in range(m):
            for f in range(m):
                if arrows[f][1] == arrows[g][0]:
                    comp[g, f] = compose(g, f)
        return cls(n_objects, [a[0] for a in arrows], [a[1] for a in arrows], identity, comp, **kwargs)


_CAT_MESSAGES = {
    _kernels.CAT_COMPOSABLE_MISSING: ("category.composition_total", "composite of g={a} after f={b} is missing"),
    _kernels.CAT_NOT_COMPOSABLE: ("category.composition_domain", "entry g={a} after f={b} defined although cod f != dom g"),
    _kernels.CAT_BAD_ENDPOINTS: ("category.composition_endpoints", "composite g={a} after f={b} = {c} has wrong dom/cod"),
    _kernels.CAT_LEFT_UNIT: ("category.left_unit", "id={a} after f={b} gives {c}, expected f"),
    _kernels.CAT_RIGHT_UNIT: ("category.right_unit", "f={a} after id={b} gives {c}, expected f"),
    _kernels.CAT_ASSOC: ("category.associativity", "(h∘g)∘f != h∘(g∘f) for h={a}, g={b}, f={c}"),
    _kernels.CAT_IDENTITY_ENDPOINTS: ("category.identity_endpoints", "identity {b} of object {a} is not an endomorphism of it"),
}


def validate_category(C: FinCategory) -> ValidationReport:
    """Every violated category law, with the witnessing morphism ids."""
    report = ValidationReport()
    m = C.n_morphisms
    for f in range(m):
        for end, val in (("dom", C._dom[f]), ("cod", C._cod[f])):
            if not 0 <= val < C.n_objects:
                report.add("category.object_range", f"morphism {f} has {end} {val} out of range", morphism=f)
    for x, i in enumerate(C._id):
        if not 0 <= i < m:
            report.add("category.identity_range", f"identity of {x} is {i}, out of range", object=x)
    if report:
        return report
    rows = _kernels.category_violations(C.dom, C.cod, C.identity, C.comp)
    for kind, a, b, c in rows.tolist():
        ob, msg = _CAT_MESSAGES[kind]
        report.add(ob, msg.format(a=a, b=b, c=c), a=a, b=b, c=c)
    return report


def hom(C: FinCategory, x: int, y: int) -> list[int]:
    return list(C.hom(x, y))


def terminal(C: FinCategory) -> int | None:
    """Least object with exactly one morphism from every object."""
    for t in C.objects():
        if all(len(C.hom(x, t)) == 1 for x in C.objects()):
            return t
    return None


def cones(C: FinCategory, f: int, g: int, x: int) -> list[tuple[int, int]]:
    """Pairs ``(u, v)`` from ``x`` with ``f∘u = g∘v``."""
    out = []
    for u in C.hom(x, C.src(f)):
        fu = C.compose(f, u)
        for v in C.hom(x, C.src(g)):
            if C.compose(g, v) == fu:
                out.append((u, v))
    return out


def _universal(C: FinCategory, f: int, g: int, p: int, left: int, top: int) -> bool:
    for x in C.objects():
        targets = set(cones(C, f, g, x))
        hits = set()
        for m in C.hom(x, p):
            pair = (C.compose(left, m), C.compose(top, m))
            if pair in hits:
                return False
            hits.add(pair)
        if hits != targets:
            return False
    return True


def pullback(C: FinCategory, f: int, g: int) -> CommutativeSquare | None:
    """Least-apex pullback of the cospan ``f, g``, or ``None`` when absent."""
    if C.tgt(f) != C.tgt(g):
        raise CategoryError(f"morphisms {f} and {g} do not form a cospan")
    key = (f, g)
    if key in C._pullbacks:
        return C._pullbacks[key]
    found = None
    for p in C.objects():
        for left, top in cones(C, f, g, p):
            if _universal(C, f, g, p, left, top):
                found = CommutativeSquare(top=top, left=left, right=g, bottom=f, is_pullback=True)
                break
        if found:
            break
    C._pullbacks[key] = found
    return found


def is_pullback(C: FinCategory, sq: CommutativeSquare) -> bool:
    if C.compose(sq.right, sq.top) != C.compose(sq.bottom, sq.left):
        return False
    return _universal(C, sq.bottom, sq.right, C.src(sq.left), sq.left, sq.top)


def mediate(C: FinCategory, sq: CommutativeSquare, u: int, v: int) -> int:
    """Unique ``m`` with ``left∘m = u`` and ``top∘m = v`` for a pullback square."""
    hits = [m for m in C.hom(C.src(u), C.src(sq.left))
            if C.compose(sq.left, m) == u and C.compose(sq.top, m) == v]
    if len(hits) != 1:
        raise CategoryError(f"cone ({u}, {v}) has {len(hits)} mediating maps")
    return hits[0]


def isomorphisms(C: FinCategory, x: int, y: int) -> list[int]:
    return [f for f in C.hom(x, y) if C.is_iso(f)]


def square_symmetry_iso(C: FinCategory, f: int, g: int) -> int | None:
    """The canonical iso from the apex of ``pullback(f, g)`` to that of ``pullback(g, f)``."""
    a, b = pullback(C, f, g), pullback(C, g, f)
    if a is None or b is None:
        return None
    m = mediate(C, b, a.top, a.left)
    return m if C.is_iso(m) else None


def check_hom_partition(C: FinCategory) -> bool:
    return sum(len(C.hom(x, y)) for x, y in itertools.product(C.objects(), repeat=2)) == C.n_morphisms


def objects_over(C: FinCategory, target: int, within: Iterable[int] | None = None) -> list[int]:
    pool = C.morphisms() if within is None else within
    return [f for f in pool if C.tgt(f) == target]
