import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FIXTURES, formers
from natmod.mltt import Environment, ParseError, parse, parse_judgment, parse_term, parse_type, shift, show, subst, typecheck
from natmod.mltt.syntax import App, Base, Fst, Id, Lam, Pair, Pi, Refl, Sigma, Snd, Var

BASES = ["Pa", "Pb", "One"]


# ------------------------------------------------------------ generators

@st.composite
def terms(draw, depth=0, size=3):
    """Terms whose free variables sit below ``depth`` binders; indices may
    also point past them."""
    if size == 0:
        return Var(draw(st.integers(0, depth + 2)))
    kind = draw(st.sampled_from(["var", "lam", "app", "pair", "fst", "snd", "refl"]))
    if kind == "var":
        return Var(draw(st.integers(0, depth + 2)))
    if kind == "lam":
        return Lam("v", Base(draw(st.sampled_from(BASES))), draw(terms(depth + 1, size - 1)))
    if kind == "app":
        return App(draw(terms(depth, size - 1)), draw(terms(depth, size - 1)))
    if kind == "pair":
        return Pair(draw(terms(depth, size - 1)), draw(terms(depth, size - 1)))
    return {"fst": Fst, "snd": Snd, "refl": Refl}[kind](draw(terms(depth, size - 1)))


@st.composite
def closed_types(draw, names=(), size=3):
    """Well-scoped types with distinct binder names, for printing."""
    if size == 0 or draw(st.booleans()):
        if names and draw(st.booleans()):
            i, j = draw(st.integers(0, len(names) - 1)), draw(st.integers(0, len(names) - 1))
            return Id(Base(draw(st.sampled_from(BASES))), Var(i), Var(j))
        return Base(draw(st.sampled_from(BASES)))
    var = f"x{len(names)}"
    ctor = draw(st.sampled_from([Pi, Sigma]))
    return ctor(var, draw(closed_types(names, size - 1)), draw(closed_types(names + (var,), size - 1)))


# ------------------------------------------------------------ parsing

def test_binders_become_indices():
    T = parse_type("Pi x:Pa. Sigma y:Pb. Id Pa x y")
    assert T.cod.cod == Id(Base("Pa"), Var(1), Var(0))
    assert parse_term("x", ["x", "y"]) == Var(1)


@given(closed_types())
def test_printing_then_parsing_is_the_identity(T):
    assert parse_type(show(T)) == T


def test_judgment_forms():
    (a, b, c) = parse("() |- One type\nx:Pa |- x : Pa  # expect: ok\nx:Pa |- x = x : Pa")
    assert (a.kind, b.kind, c.kind) == ("type", "term", "equal")
    assert (a.line, b.line, c.line) == (1, 2, 3)
    assert b.expect == "ok" and a.expect is None


def test_comments_and_blank_lines_are_skipped():
    assert len(parse("# nothing here\n\n   \n() |- One type  # trailing\n")) == 1


@pytest.mark.parametrize("text,col", [
    ("x:Pa |- x : ", 12),
    ("() |- lam x. x : Pa", 12),
    ("() |- One typ", 11),
    ("x:Pa |- x @ : Pa", 11),
    ("() |- (One type", 12),
])
def test_parse_errors_carry_positions(text, col):
    with pytest.raises(ParseError) as exc:
        parse_judgment(text, line=7)
    assert (exc.value.line, exc.value.col) == (7, col)
    assert str(exc.value).startswith(f"7:{col}:")


# ------------------------------------------------------- de Bruijn algebra

@given(terms())
def test_shift_by_zero_is_the_identity(t):
    assert shift(t, 0) == t


@given(terms(), st.integers(0, 3), st.integers(0, 3))
def test_shifts_compose(t, a, b):
    assert shift(shift(t, a), b) == shift(t, a + b)


@given(terms(), terms())
def test_substituting_into_a_weakened_term_is_the_identity(t, v):
    assert subst(shift(t, 1), 0, v) == t


def test_substitution_under_a_binder_shifts_the_value():
    body = Lam("y", Base("Pa"), App(Var(1), Var(0)))
    assert subst(body, 0, Var(3)) == Lam("y", Base("Pa"), App(Var(4), Var(0)))


# ------------------------------------------------------------ elaboration

@pytest.fixture(scope="module")
def env():
    data = json.loads((FIXTURES / "diamond-env.json").read_text())
    return Environment(formers("diamond"), base_object=data["base_object"], types=data["types"],
                       terms=data["terms"])


def test_corpus_verdicts(env):
    verdicts = typecheck((FIXTURES / "corpus.tt").read_text(), env)
    assert len(verdicts) >= 15
    assert all(v.as_expected for v in verdicts), [v.to_json() for v in verdicts if not v.as_expected]
    failing = {v.obligation for v in verdicts if not v.ok}
    assert {"pi.elim.not_function", "sigma.elim.not_pair", "id.elim.not_identity", "id.form.type_mismatch"} <= failing


@pytest.mark.parametrize("text", [
    "x:Pa |- (lam y:Pa. y) x = x : Pa",
    "x:Pa, y:Pb |- fst (pair x y) = x : Pa",
    "z:Sigma x:Pa. Pb |- pair (fst z) (snd z) = z : Sigma x:Pa. Pb",
    "f:Pi x:Pa. Pb |- lam x:Pa. f x = f : Pi x:Pa. Pb",
    "x:Pa |- J (u v p. Pa) (u. u) (refl x) = x : Pa",
])
def test_computation_rules_hold_by_denotation(env, text):
    (v,) = typecheck(text, env)
    assert v.ok, v.message


def test_variables_in_dependent_contexts(env):
    (v,) = typecheck("x:Pa, p:Id Pa x x |- p : Id Pa x x", env)
    assert v.ok


def test_failure_reports_a_position(env):
    (v,) = typecheck("x:Pa |- fst x : Pa", env)
    assert not v.ok and v.obligation == "sigma.elim.not_pair"
    line, col = (int(s) for s in v.message.split(":")[:2])
    assert (line, col) == (1, 13)  # the argument that is not a pair


def test_parse_errors_abort_the_corpus(env):
    with pytest.raises(ParseError):
        typecheck("() |- One type\n() |- ) type", env)


def test_default_base_object_is_terminal():
    E = Environment(formers("chain2"))
    assert E.base_object == 1
