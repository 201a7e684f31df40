import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import built, formers
from natmod import catalog
from natmod.laws import rule_equations, substitution_stability
from natmod.natmodel import Extension, NaturalModel, identity_model
from natmod.presheaf import NatTrans, Presheaf, compose, identity, is_iso, terminal_presheaf
from natmod.typeformers import (
    Formers,
    IdStructure,
    LiftingStructure,
    PiStructure,
    RuleError,
    SigmaStructure,
    check_id_ext,
    check_id_int,
    check_lifting_equivalence,
    check_pi,
    check_sigma,
    comparison_map,
    find_id_lifting,
    find_lifting_structure,
    id_domain,
    id_lifting_problem,
    model_objects,
    sigma_domain,
)

MODELS = ["chain2", "diamond", "chaotic2"]


def sets(sizes):
    C = catalog.terminal_category()
    return [Presheaf(C, [n], [list(range(n))]) for n in sizes]


def mutated(t: NatTrans, c: int, x: int, mod: int) -> NatTrans:
    comps = [list(row) for row in t.components]
    comps[c][x] = (comps[c][x] + 1) % mod
    return NatTrans(t.dom, t.cod, comps, validate=False)


# ------------------------------------------------------ built structures

@pytest.mark.parametrize("name", MODELS)
def test_built_structures_are_valid(name):
    r = built(name)
    assert check_pi(r.model, r.pi).ok
    assert check_sigma(r.model, r.sigma).ok
    assert check_id_int(r.model, r.ident).ok


@pytest.mark.parametrize("name", MODELS)
def test_rules_compute(name):
    assert rule_equations(formers(name)).ok


@pytest.mark.parametrize("name", MODELS)
def test_rules_are_stable_under_substitution(name):
    assert substitution_stability(formers(name)).ok


def test_empty_model_has_vacuous_structures():
    C = catalog.chain(2)
    M = identity_model(Presheaf(C, [0, 0], [[] for _ in C.morphisms()]))
    O = model_objects(M)
    D = sigma_domain(M)
    assert O.PU.result.carriers == O.PT.result.carriers == D.Q.carriers == (0, 0)
    none = [()] * C.n_objects
    assert check_pi(M, PiStructure(NatTrans(O.PT.result, M.terms, none),
                                   NatTrans(O.PU.result, M.types, none))).ok
    assert check_sigma(M, SigmaStructure(NatTrans(D.Q, M.terms, none),
                                         NatTrans(O.PU.result, M.types, none), D.pi_proj)).ok
    assert check_id_ext(M, IdStructure(NatTrans(M.terms, M.terms, none),
                                       NatTrans(O.ident.TT.obj, M.types, none), mode="extensional")).ok


# ------------------------------------------------------------- mutations

@pytest.mark.parametrize("c,x", [(0, 0), (0, 7), (1, 2), (2, 5), (3, 0), (3, 3)])
def test_scrambled_pi_component_is_pinpointed(diamond, c, x):
    M, S = diamond.model, diamond.pi
    rep = check_pi(M, PiStructure(S.lambda_map, mutated(S.Pi_map, c, x, M.types.carriers[c])))
    assert not rep.ok
    assert all(v.obligation.startswith("pi.") for v in rep)
    assert all(oracles.touches(M.base, S.Pi_map.dom, v.witness, c, x) for v in rep)


@pytest.mark.parametrize("c,x", [(0, 0), (1, 1), (2, 2)])
def test_scrambled_pair_component_is_pinpointed(diamond, c, x):
    M, S = diamond.model, diamond.sigma
    bad = SigmaStructure(mutated(S.pair_map, c, x, M.terms.carriers[c]), S.Sigma_map, S.pi_proj)
    rep = check_sigma(M, bad)
    assert not rep.ok
    assert all(oracles.touches(M.base, S.pair_map.dom, v.witness, c, x) for v in rep)


def test_identity_structure_without_lifting_is_reported(diamond):
    S = diamond.ident
    rep = check_id_int(diamond.model, IdStructure(S.i_map, S.Id_map))
    assert rep.obligations() == ["id.lifting_missing"]


def test_moved_reflexivity_breaks_the_square(diamond):
    M, S = diamond.model, diamond.ident
    bad = IdStructure(mutated(S.i_map, 0, 0, M.terms.carriers[0]), S.Id_map, lifting=S.lifting)
    rep = check_id_int(M, bad)
    assert not rep.ok
    assert set(rep.obligations()) <= {"id.natural", "id.commute"}


# ------------------------------------------------------- rule operations

def test_lambda_of_uncurried_function_is_the_function(diamond_formers):
    F = diamond_formers
    M = F.M
    for g in M.base.objects():
        for A in range(M.types.carriers[g]):
            w = M.extend(g, A)
            for B in range(M.types.carriers[w.ext]):
                for f in M.terms_of(g, F.pi_form(g, A, B)):
                    assert F.pi_lambda(g, A, F.pi_uncurry(g, A, B, f)) == f


def test_reflexivity_inhabits_the_diagonal_identity_type(diamond_formers):
    F = diamond_formers
    M = F.M
    for g in M.base.objects():
        for a in range(M.terms.carriers[g]):
            A = M.type_of(g, a)
            assert M.type_of(g, F.id_refl(g, a)) == F.id_form(g, A, a, a)


def test_ill_typed_premises_are_refused(diamond_formers):
    F = diamond_formers
    M = F.M
    g = 3
    A = next(A for A in range(M.types.carriers[g]) if len(M.terms_of(g, A)) < M.terms.carriers[g])
    wrong = next(a for a in range(M.terms.carriers[g]) if M.type_of(g, a) != A)
    B = 0
    with pytest.raises(RuleError):
        F.sigma_pair(g, A, M.types.restrict(M.extend(g, A).pA, B), wrong, wrong)
    with pytest.raises(RuleError):
        F.id_form(g, A, wrong, wrong)


def test_missing_structure_is_refused(diamond):
    F = Formers(diamond.model)
    with pytest.raises(RuleError):
        F.pi_form(0, 0, 0)


# --------------------------------------------------- domains of the formers

def test_diagonal_is_split_by_both_projections():
    M = built("diamond").model
    D = id_domain(M)
    assert compose(D.TT.p1, D.delta).same_as(identity(M.terms))
    assert compose(D.TT.p2, D.delta).same_as(identity(M.terms))


def test_same_type_pairs_over_a_point_count_fibre_squares():
    U, T = sets([2, 3])
    U = Presheaf(T.base, [2], [[0, 1]])
    p = NatTrans(T, U, [(0, 1, 1)])
    # the pairing table is irrelevant to this count
    N = NaturalModel(p, {(0, A): Extension(0, 0, 0) for A in range(2)})
    assert id_domain(N).TT.obj.carriers == (1 ** 2 + 2 ** 2,)


# ---------------------------------------------------------- lifting

def test_iso_on_either_side_gives_iso_comparison():
    A, B, C_, D = sets([2, 2, 3, 2])
    swap = NatTrans(A, B, [(1, 0)])
    g = NatTrans(C_, D, [(0, 1, 1)])
    assert is_iso(comparison_map(swap, g).c)
    f = NatTrans(C_, D, [(0, 1, 1)])
    assert is_iso(comparison_map(f, identity(B)).c)


def test_comparison_sizes_over_a_point():
    A, B, C_, D = sets([1, 2, 3, 2])
    f = NatTrans(A, B, [(0,)])
    g = NatTrans(C_, D, [(0, 1, 1)])
    cm = comparison_map(f, g)
    assert cm.CB.obj.carriers == (3 ** 2,)
    squares = sum(1 for beta in np.ndindex(2, 2) for alpha in range(3) if beta[0] == [0, 1, 1][alpha])
    assert cm.target.obj.carriers == (squares,)


def test_iso_lifting_is_the_inverse_comparison():
    A, B, C_, D = sets([2, 2, 3, 2])
    f = NatTrans(A, B, [(1, 0)])
    g = NatTrans(C_, D, [(0, 1, 1)])
    L = find_lifting_structure(f, g)
    assert compose(L.comparison.c, L.section).same_as(identity(L.comparison.target.obj))
    assert compose(L.section, L.comparison.c).same_as(identity(L.comparison.CB.obj))


def test_square_with_no_filler_has_no_lifting():
    Z, O = sets([0, 1])
    f, g = NatTrans(Z, O, [()]), NatTrans(Z, O, [()])
    assert find_lifting_structure(f, g) is None


@given(st.sampled_from(["chain2", "chain3", "discrete2"]), st.integers(0, 2**32 - 1))
def test_identity_has_a_lifting_against_anything(name, seed):
    C = catalog.by_name(name)
    rng = np.random.default_rng(seed)
    A, X = oracles.random_presheaf(C, rng, max_size=2), oracles.random_presheaf(C, rng, max_size=2)
    Y = terminal_presheaf(C)
    g = NatTrans(X, Y, [(0,) * n for n in X.carriers])
    L = find_lifting_structure(identity(A), g)
    assert L is not None
    assert check_lifting_equivalence(identity(A), g, L).ok


@pytest.mark.parametrize("name", MODELS)
def test_built_identity_liftings_satisfy_every_reading(name):
    r = built(name)
    rho, g, over, _ = id_lifting_problem(r.model, r.ident)
    assert check_lifting_equivalence(rho, g, r.ident.lifting).ok
    assert find_id_lifting(r.model, r.ident) is not None


@pytest.mark.parametrize("seed", range(10))
def test_mutated_lifting_fails_every_reading_at_the_mutated_cell(diamond, seed):
    M, S = diamond.model, diamond.ident
    L = S.lifting
    cm = L.comparison
    T = cm.target.obj
    rng = np.random.default_rng(seed)
    c = int(rng.integers(0, M.base.n_objects))
    x = int(rng.integers(0, T.carriers[c]))
    bad = LiftingStructure(mutated(L.section, c, x, cm.CB.obj.carriers[c]), cm)
    rho, g, _, _ = id_lifting_problem(M, S)
    rep = check_lifting_equivalence(rho, g, bad)
    found = set(rep.obligations())
    assert "lifting.section" in found
    assert "lifting.equivalence" not in found
    assert all(oracles.touches(M.base, T, v.witness, c, x) for v in rep if "element" in v.witness)
