"""Batch command line: ``nm <command> [inputs] [--json] [-o PATH] [--seed N]``.

Exit codes: 0 when every requested check passes, 1 when a check fails and 2
for unreadable or malformed input.  JSON reports are written with sorted keys
so two runs on the same inputs and seed are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .fincat import CategoryError, FinCategory, terminal, validate_category
from .natmodel import NaturalModel, find_representability, missing_witnesses, verify_cwf_laws
from .presheaf import NatTrans, Presheaf, PresheafError, validate_nat_trans, validate_presheaf
from .report import ValidationReport

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Unreadable or malformed input; maps to exit code 2."""


# ------------------------------------------------------------------ loading

def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None


def _guard(what: str, fn: Callable[[], Any]) -> Any:
    try:
        return fn()
    except (CategoryError, PresheafError, KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"malformed {what}: {exc}") from None


def load_category(path: str, *, validate: bool = True) -> FinCategory:
    data = _read_json(path)
    return _guard("category", lambda: FinCategory.from_json(data, validate=validate))


def load_members(path: str, C: FinCategory) -> list[int]:
    data = _read_json(path)
    members = data.get("members") if isinstance(data, dict) else data
    if members == "all":
        return list(C.morphisms())
    try:
        out = sorted({int(m) for m in members})
    except (TypeError, ValueError):
        raise InputError(f"{path}: members must be 'all' or a list of morphism indices") from None
    bad = [m for m in out if not 0 <= m < C.n_morphisms]
    if bad:
        raise InputError(f"{path}: unknown morphisms {bad}")
    return out


def load_model_file(path: str) -> tuple[NaturalModel, dict[str, Any], dict[str, Any]]:
    """Model, structures and naming environment from an emitted model file."""
    from .typeformers import load_structures

    data = _read_json(path)
    if not isinstance(data, dict) or "model" not in data:
        raise InputError(f"{path}: expected an object with a 'model' key")
    M = _guard("model", lambda: NaturalModel.from_json(data["model"]))
    structures = _guard("structures", lambda: load_structures(M, data.get("structures", {})))
    return M, structures, dict(data.get("environment") or {})


def auto_environment(M: NaturalModel, base_object: int | None = None) -> dict[str, Any]:
    """Names ``T0, T1, ...`` for the types and ``t0, t1, ...`` for the terms at the base object."""
    obj = terminal(M.base) if base_object is None else base_object
    if obj is None:
        return {"base_object": None, "types": {}, "terms": {}}
    return {"base_object": obj,
            "types": {f"T{i}": i for i in range(M.types.carriers[obj])},
            "terms": {f"t{i}": i for i in range(M.terms.carriers[obj])}}


def _environment(M: NaturalModel, data: dict[str, Any]):
    from .mltt import Environment
    from .typeformers import Formers

    return lambda structures: Environment(
        Formers(M, pi=structures.get("pi"), sigma=structures.get("sigma"), ident=structures.get("id")),
        base_object=data.get("base_object"),
        types={str(k): int(v) for k, v in data.get("types", {}).items()},
        terms={str(k): int(v) for k, v in data.get("terms", {}).items()})


# ----------------------------------------------------------------- commands

def _report_result(name: str, report: ValidationReport, extra: dict[str, Any] | None = None) -> dict[str, Any]:
    out = {"command": name, "ok": report.ok, "violations": report.to_json()}
    out.update(extra or {})
    return out


def cmd_validate_cat(args) -> dict[str, Any]:
    C = load_category(args.category, validate=False)
    return _report_result("validate-cat", validate_category(C),
                          {"objects": C.n_objects, "morphisms": C.n_morphisms})


def cmd_validate_ps(args) -> dict[str, Any]:
    C = load_category(args.category)
    data = _read_json(args.presheaf)
    X = _guard("presheaf", lambda: Presheaf.from_json(C, data, validate=False))
    return _report_result("validate-ps", validate_presheaf(X), {"carriers": [int(n) for n in X.carriers]})


def cmd_check_representable(args) -> dict[str, Any]:
    C = load_category(args.category)
    data = _read_json(args.map)

    def build():
        U = Presheaf.from_json(C, data["types"], name="U")
        T = Presheaf.from_json(C, data["terms"], name="T")
        return NatTrans.from_json(T, U, data["p"], name="p", validate=False)

    p = _guard("map", build)
    report = validate_nat_trans(p)
    extra: dict[str, Any] = {}
    if report.ok:
        witness = find_representability(C, p)
        if witness is None:
            for ctx, A in missing_witnesses(p):
                report.add("repr.missing", f"no representing object for type {A} at object {ctx}", ctx=ctx, type=A)
        else:
            extra["witness"] = [{"ctx": g, "type": A, "ext": w.ext, "pA": w.pA, "qA": w.qA}
                                for (g, A), w in sorted(witness.items())]
    return _report_result("check-representable", report, extra)


def cmd_pipeline(args) -> dict[str, Any]:
    from .dclass import run_pipeline

    C = load_category(args.category)
    members = load_members(args.members, C)
    result = run_pipeline(C, members, factor_mode=args.factor_mode)
    out = {"command": "pipeline", "ok": result.ok, "violations": result.report.to_json(),
           "members": members, "factor_mode": args.factor_mode}
    out.update(result.to_json())
    if args.emit_model:
        if not result.ok:
            out["emitted"] = None
        else:
            M = result.model
            env = _read_json(args.env) if args.env else auto_environment(M)
            structures = {k: s.to_json() for k, s in (("pi", result.pi), ("sigma", result.sigma),
                                                       ("id", result.ident)) if s is not None}
            _write(args.emit_model, {"model": M.to_json(), "structures": structures, "environment": env})
            out["emitted"] = args.emit_model
    return out


def cmd_check_former(args) -> dict[str, Any]:
    from .typeformers import check_id_ext, check_id_int, check_pi, check_sigma

    M, structures, _ = load_model_file(args.model)
    wanted = ["pi", "sigma", "id"] if args.former == "all" else [args.former]
    report = ValidationReport()
    checked = []
    for name in wanted:
        S = structures.get(name)
        if S is None:
            report.add(f"{name}.missing", f"the model file carries no {name} structure")
            continue
        if name == "pi":
            report.extend(check_pi(M, S))
        elif name == "sigma":
            report.extend(check_sigma(M, S))
        else:
            report.extend(check_id_ext(M, S) if S.mode == "extensional" else check_id_int(M, S))
        checked.append(name)
    return _report_result("check-former", report, {"checked": checked})


def cmd_typecheck(args) -> dict[str, Any]:
    from .mltt import ParseError, typecheck

    M, structures, env_data = load_model_file(args.model)
    if args.env:
        env_data = _read_json(args.env)
    elif not env_data.get("types") and not env_data.get("terms"):
        env_data = auto_environment(M, env_data.get("base_object"))
    env = _guard("environment", lambda: _environment(M, env_data)(structures))
    try:
        text = Path(args.corpus).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {args.corpus}: {exc.strerror}") from None
    try:
        verdicts = typecheck(text, env)
    except ParseError as exc:
        raise InputError(f"{args.corpus}:{exc}") from None
    rows = [v.to_json() for v in verdicts]
    ok = all(v.as_expected for v in verdicts)
    return {"command": "typecheck", "ok": ok, "verdicts": rows,
            "counts": {"judgments": len(rows), "accepted": sum(v.ok for v in verdicts),
                       "as_expected": sum(v.as_expected for v in verdicts)}}


def cmd_report(args) -> dict[str, Any]:
    """Every law suite on one model plus a seeded sample of polynomial round trips."""
    from .laws import rule_equations, substitution_stability
    from .polynomial import element_to_pair, pair_to_element
    from .typeformers import Formers, check_id_int, check_pi, check_sigma, model_objects

    M, structures, _ = load_model_file(args.model)
    F = Formers(M, pi=structures.get("pi"), sigma=structures.get("sigma"), ident=structures.get("id"))
    sections: dict[str, ValidationReport] = {"cwf": verify_cwf_laws(M)}
    for name, check in (("pi", check_pi), ("sigma", check_sigma), ("id", check_id_int)):
        if structures.get(name) is not None:
            sections[name] = check(M, structures[name])
    sections["rules"] = rule_equations(F)
    sections["substitution"] = substitution_stability(F)

    rng = np.random.default_rng(args.seed)
    PU = model_objects(M).PU.result
    cells = [(c, e) for c in M.base.objects() for e in range(PU.carriers[c])]
    picks = rng.choice(len(cells), size=min(args.samples, len(cells)), replace=False) if cells else []
    poly = ValidationReport()
    for k in sorted(int(i) for i in picks):
        c, e = cells[k]
        A, B = element_to_pair(M, model_objects(M).PU, c, e)
        if pair_to_element(M, model_objects(M).PU, c, A, B) != e:
            poly.add("poly.roundtrip", "element of P_p(U) does not survive the round trip", ctx=c, element=e)
    sections["polynomial"] = poly

    ok = all(r.ok for r in sections.values())
    return {"command": "report", "ok": ok, "seed": args.seed, "samples": len(picks),
            "sections": {k: {"ok": r.ok, "violations": r.to_json()} for k, r in sections.items()}}


# ------------------------------------------------------------------ output

def _dump(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _write(path: str, data: Any) -> None:
    try:
        Path(path).write_text(_dump(data))
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def _human(out: dict[str, Any]) -> str:
    lines = [f"{out['command']}: {'PASS' if out['ok'] else 'FAIL'}"]
    if out["command"] == "pipeline":
        lines[0] += f" (stage {out['stage']})"
    for v in out.get("violations", []):
        lines.append(f"  [{v['obligation']}] {v['message']} {json.dumps(v['witness'], sort_keys=True)}")
    for v in out.get("verdicts", []):
        mark = "ok  " if v["as_expected"] else "BAD "
        got = "accepted" if v["ok"] else v["obligation"]
        lines.append(f"  {mark}line {v['line']}: {got}  | {v['judgment']}")
        if v["message"]:
            lines.append(f"        {v['message']}")
    for name, sec in out.get("sections", {}).items():
        lines.append(f"  {name}: {'ok' if sec['ok'] else 'FAIL'}")
        for v in sec["violations"][:20]:
            lines.append(f"    [{v['obligation']}] {v['message']} {json.dumps(v['witness'], sort_keys=True)}")
    if out.get("emitted"):
        lines.append(f"  model written to {out['emitted']}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON report on stdout")
    common.add_argument("-o", "--output", metavar="PATH", help="write the JSON report to PATH")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks (default 0)")

    ap = argparse.ArgumentParser(prog="nm", description="Natural models over finite categories.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-cat", parents=[common], help="check the category laws of a fixture")
    p.add_argument("category")
    p.set_defaults(run=cmd_validate_cat)

    p = sub.add_parser("validate-ps", parents=[common], help="check the functor laws of a presheaf")
    p.add_argument("category")
    p.add_argument("presheaf")
    p.set_defaults(run=cmd_validate_ps)

    p = sub.add_parser("check-representable", parents=[common], help="search representing objects for p")
    p.add_argument("category")
    p.add_argument("map", help="JSON with 'types', 'terms' and 'p'")
    p.set_defaults(run=cmd_check_representable)

    p = sub.add_parser("pipeline", parents=[common], help="certify a class and build the model with its formers")
    p.add_argument("category")
    p.add_argument("members", help="JSON with 'members': 'all' or a list of morphisms")
    p.add_argument("--factor-mode", choices=["auto", "full", "diagonal"], default="auto")
    p.add_argument("--emit-model", metavar="PATH", help="write model, structures and environment to PATH")
    p.add_argument("--env", metavar="PATH", help="naming environment stored with the emitted model")
    p.set_defaults(run=cmd_pipeline)

    p = sub.add_parser("check-former", parents=[common], help="re-check stored type-former structures")
    p.add_argument("model")
    p.add_argument("--former", choices=["pi", "sigma", "id", "all"], default="all")
    p.set_defaults(run=cmd_check_former)

    p = sub.add_parser("typecheck", parents=[common], help="elaborate a judgment file against a model")
    p.add_argument("model")
    p.add_argument("corpus")
    p.add_argument("--env", metavar="PATH", help="naming environment overriding the one in the model file")
    p.set_defaults(run=cmd_typecheck)

    p = sub.add_parser("report", parents=[common], help="run every law suite on a model")
    p.add_argument("model")
    p.add_argument("--samples", type=int, default=50, help="sampled polynomial round trips (default 50)")
    p.set_defaults(run=cmd_report)
    return ap


def thread_cap() -> int:
    """``NM_THREADS`` caps parallelism; checks run sequentially, which honours any cap."""
    raw = os.environ.get("NM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"NM_THREADS must be an integer, got {raw!r}") from None


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        thread_cap()
        out = args.run(args)
        if args.output:
            _write(args.output, out)
    except InputError as exc:
        print(f"nm: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(_dump(out) if args.json else _human(out))
    return EXIT_OK if out["ok"] else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
