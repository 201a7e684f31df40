"""The nine acceptance criteria, each printing one PASS/FAIL line with its runtime.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are printed
even when output capture is on.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

import oracles
from conftest import FIXTURES
from natmod import catalog
from natmod.cli import load_category, load_members, main
from natmod.dclass import run_pipeline
from natmod.laws import rule_equations, substitution_stability
from natmod.mltt import Environment, typecheck
from natmod.natmodel import find_representability, identity_model, verify_cwf_laws
from natmod.polynomial import classify, poly_apply, unclassify
from natmod.presheaf import NatTrans, Presheaf, natural_maps
from natmod.typeformers import (
    Formers,
    LiftingStructure,
    PiStructure,
    check_id_int,
    check_lifting_equivalence,
    check_pi,
    check_sigma,
    id_lifting_problem,
)

BUILT = ["one", "chain2", "chain3", "diamond", "chaotic2"]
SMALL_BASES = ["one", "chain2", "chain3", "discrete2", "chaotic2", "parallel"]
BUDGET = 10 ** 6  # largest componentwise product the brute-force map enumeration may walk


@pytest.fixture
def say(capsys):
    def emit(n: int, title: str, ok: bool, seconds: float, note: str = "") -> None:
        with capsys.disabled():
            extra = f"; {note}" if note else ""
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} ({seconds:.2f}s{extra})")
    return emit


@pytest.fixture(scope="module")
def pinned():
    """The pinned end-to-end fixture: the diamond lattice with every map a display map."""
    C = load_category(str(FIXTURES / "diamond.json"))
    members = load_members(str(FIXTURES / "class-all.json"), C)
    t = time.perf_counter()
    r = run_pipeline(C, members)
    return r, time.perf_counter() - t


@pytest.fixture(scope="module")
def pinned_formers(pinned):
    r, _ = pinned
    return Formers(r.model, pi=r.pi, sigma=r.sigma, ident=r.ident)


def mutate(t: NatTrans, c: int, x: int, mod: int) -> NatTrans:
    comps = [list(row) for row in t.components]
    comps[c][x] = (comps[c][x] + 1) % mod
    return NatTrans(t.dom, t.cod, comps, validate=False)


# ------------------------------------------------------------------ 1

def test_criterion_1_cwf_laws(say):
    worst, failures = 0.0, []
    rng = np.random.default_rng(0)
    for name in ["one", "chain2", "chain3", "discrete2", "diamond", "chaotic2", "parallel", "finset2"]:
        C = catalog.by_name(name)
        for _ in range(3):
            M = identity_model(oracles.random_presheaf(C, rng, max_size=2))
            t = time.perf_counter()
            if not verify_cwf_laws(M).ok:
                failures.append(f"identity/{name}")
            worst = max(worst, time.perf_counter() - t)
    for name in BUILT:
        C = catalog.by_name(name)
        M = run_pipeline(C, list(C.morphisms())).model
        t = time.perf_counter()
        if not verify_cwf_laws(M).ok:
            failures.append(f"built/{name}")
        worst = max(worst, time.perf_counter() - t)
    ok = not failures and worst < 10
    say(1, "CwF laws on identity and pipeline models", ok, worst, f"slowest fixture; failures={failures}")
    assert ok


# ------------------------------------------------------------------ 2

def test_criterion_2_polynomial_classification(say):
    t = time.perf_counter()
    done, rejected, seed, mismatches = 0, 0, 0, 0
    while done < 100:
        rng = np.random.default_rng(seed)
        seed += 1
        C = catalog.by_name(SMALL_BASES[int(rng.integers(0, len(SMALL_BASES)))])
        A, B, X, Y = (oracles.random_presheaf(C, rng, max_size=3) for _ in range(4))
        comps = oracles.random_map(B, A, rng)
        if comps is None:
            continue
        bound = oracles.poly_size_bound(B, A, X)
        if np.prod([b ** y for b, y in zip(bound, Y.carriers)], dtype=object) > BUDGET * 1000:
            rejected += 1
            continue
        f = NatTrans(B, A, comps)
        P = poly_apply(f, X)
        if oracles.search_space(Y, P.result) > BUDGET:
            rejected += 1
            continue
        maps = len(oracles.nat_maps(Y, P.result))
        pairs = 0
        for g1 in oracles.nat_maps(Y, A):
            _, dom = oracles.pullback_carriers(g1, f.components, Y, B)
            pairs += len(oracles.nat_maps(dom, X))
        ok = maps == pairs
        for g in natural_maps(Y, P.result):
            g1, g2 = classify(P, g)
            ok = ok and unclassify(P, g1, g2).components == g.components
            h1, h2 = classify(P, unclassify(P, g1, g2))
            ok = ok and h1.components == g1.components and h2.components == g2.components
        mismatches += not ok
        done += 1
    seconds = time.perf_counter() - t
    ok = mismatches == 0 and seconds < 60
    say(2, "classification of maps into P_f(X) against brute force", ok, seconds,
        f"{done} samples, {rejected} over the enumeration budget skipped")
    assert ok


# ------------------------------------------------------------------ 3

def test_criterion_3_pinned_pipeline(say, pinned):
    r, build_time = pinned
    t = time.perf_counter()
    M = r.model
    ok = r.ok and check_pi(M, r.pi).ok and check_sigma(M, r.sigma).ok and check_id_int(M, r.ident).ok
    found = find_representability(M.base, M.p)
    ok = ok and found is not None and set(found) == set(M.witness)
    if ok:
        for (c, A), w in M.witness.items():
            v = found[(c, A)]
            iso = M.pair_sub(c, A, v.pA, v.qA)
            ok = ok and M.base.is_iso(iso)
    seconds = build_time + time.perf_counter() - t
    ok = ok and seconds < 300
    say(3, "pinned diamond fixture: formers valid, witnesses match search", ok, seconds)
    assert ok


# ------------------------------------------------------------------ 4

def test_criterion_4_rule_equations(say, pinned_formers):
    t = time.perf_counter()
    rep = rule_equations(pinned_formers)
    say(4, "computation rules for Pi, Sigma and Id", rep.ok, time.perf_counter() - t,
        f"{len(rep)} violations")
    assert rep.ok


# ------------------------------------------------------------------ 5

def test_criterion_5_substitution_stability(say, pinned_formers):
    t = time.perf_counter()
    rep = substitution_stability(pinned_formers)
    say(5, "substitution stability of every former", rep.ok, time.perf_counter() - t,
        f"{len(rep)} violations")
    assert rep.ok


# ------------------------------------------------------------------ 6

def test_criterion_6_lifting_equivalence(say, pinned):
    t = time.perf_counter()
    positives = 0
    ok = True
    for name in BUILT:
        C = catalog.by_name(name)
        r = run_pipeline(C, list(C.morphisms()))
        rho, g, _, _ = id_lifting_problem(r.model, r.ident)
        ok = ok and check_lifting_equivalence(rho, g, r.ident.lifting).ok
        positives += 1
    r, _ = pinned
    M, L = r.model, r.ident.lifting
    cm, T = L.comparison, L.comparison.target.obj
    rho, g, _, _ = id_lifting_problem(M, r.ident)
    rng = np.random.default_rng(0)
    localized = 0
    for _ in range(10):
        c = int(rng.integers(0, M.base.n_objects))
        x = int(rng.integers(0, T.carriers[c]))
        bad = LiftingStructure(mutate(L.section, c, x, cm.CB.obj.carriers[c]), cm)
        rep = check_lifting_equivalence(rho, g, bad)
        found = set(rep.obligations())
        if ("lifting.section" in found and "lifting.equivalence" not in found
                and all(oracles.touches(M.base, T, v.witness, c, x) for v in rep if "element" in v.witness)):
            localized += 1
    ok = ok and localized == 10
    say(6, "three readings of a lifting structure agree", ok, time.perf_counter() - t,
        f"{positives} positives, {localized}/10 mutants localized")
    assert ok


# ------------------------------------------------------------------ 7

def test_criterion_7_negative_paths(say, pinned, capsys):
    t = time.perf_counter()
    C = catalog.finset(2)
    isos = run_pipeline(C, [f for f in C.morphisms() if C.is_iso(f)])
    clause1 = (not isos.ok and isos.stage == "closed"
               and set(isos.report.obligations()) == {"closed.terminal_maps"})

    one = catalog.terminal_category()
    p = NatTrans(Presheaf(one, [2], [[0, 1]]), Presheaf(one, [1], [[0]]), [(0, 0)])
    code = main(["check-representable", str(FIXTURES / "one.json"), str(FIXTURES / "nonrep-one.json"), "--json"])
    cli_out = json.loads(capsys.readouterr().out)
    nonrep = (find_representability(one, p) is None and code == 1
              and {v["obligation"] for v in cli_out["violations"]} == {"repr.missing"})

    r, _ = pinned
    M, S = r.model, r.pi
    c, x = 1, 2
    rep = check_pi(M, PiStructure(S.lambda_map, mutate(S.Pi_map, c, x, M.types.carriers[c])))
    pinpointed = not rep.ok and all(v.obligation.startswith("pi.") for v in rep) and all(oracles.touches(M.base, S.Pi_map.dom, v.witness, c, x) for v in rep)

    ok = clause1 and nonrep and pinpointed
    say(7, "negative paths", ok, time.perf_counter() - t,
        f"isos={clause1}, non-representable={nonrep}, scrambled Pi={pinpointed}")
    assert ok


# ------------------------------------------------------------------ 8

def test_criterion_8_corpus(say, pinned_formers):
    t = time.perf_counter()
    data = json.loads((FIXTURES / "diamond-env.json").read_text())
    env = Environment(pinned_formers, base_object=data["base_object"], types=data["types"], terms=data["terms"])
    verdicts = typecheck((FIXTURES / "corpus.tt").read_text(), env)
    failing = [v.obligation for v in verdicts if not v.ok]
    formers_hit = {o.split(".")[0] for o in failing}
    ok = len(verdicts) >= 15 and all(v.as_expected for v in verdicts) and {"pi", "sigma", "id"} <= formers_hit
    say(8, "type theory corpus", ok, time.perf_counter() - t,
        f"{len(verdicts)} judgments, {len(failing)} ill-typed")
    assert ok


# ------------------------------------------------------------------ 9

def test_criterion_9_determinism(say, tmp_path):
    t = time.perf_counter()
    cli = [sys.executable, "-m", "natmod.cli"]
    outputs = []
    for k in range(2):
        run = tmp_path / f"run{k}"  # same relative names in each run, so paths echoed in output agree
        run.mkdir()
        subprocess.run(cli + ["pipeline", str(FIXTURES / "diamond.json"), str(FIXTURES / "class-all.json"),
                              "--emit-model", "model.json", "--env", str(FIXTURES / "diamond-env.json"),
                              "-o", "pipeline.json"], check=True, capture_output=True, cwd=run)
        subprocess.run(cli + ["report", "model.json", "--seed", "7", "-o", "report.json"],
                       check=True, capture_output=True, cwd=run)
        outputs.append([(run / name).read_bytes() for name in ("pipeline.json", "model.json", "report.json")])
    ok = outputs[0] == outputs[1]
    say(9, "two CLI runs give byte-identical JSON", ok, time.perf_counter() - t)
    assert ok
