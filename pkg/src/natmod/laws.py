"""Exhaustive checks of the computation rules and of substitution stability.

Both functions quantify over every premise a finite model offers; each
violated equation is one report entry naming the premise.
"""

from __future__ import annotations

from .report import ValidationReport
from .typeformers import Formers


def rule_equations(F: Formers) -> ValidationReport:
    """Π-comp, Σ-comp with surjective pairing, and Id-comp."""
    M = F.M
    C, U, T = M.base, M.types, M.terms
    report = ValidationReport()
    for g in C.objects():
        for A in range(U.carriers[g]):
            w = M.extend(g, A)
            if F.pi is not None:
                for b in range(T.carriers[w.ext]):
                    B = M.type_of(w.ext, b)
                    lam = F.pi_lambda(g, A, b)
                    for a in M.terms_of(g, A):
                        if F.pi_app(g, A, B, lam, a) != T.restrict(M.section(g, A, a), b):
                            report.add("pi.comp", "(λb)(a) != b[a]", ctx=g, type=A, body=b, arg=a)
            if F.sigma is not None:
                for B in range(U.carriers[w.ext]):
                    for a in M.terms_of(g, A):
                        for b in M.terms_of(g, F.subst_at(g, A, B, a)):
                            c = F.sigma_pair(g, A, B, a, b)
                            if F.sigma_proj1(g, A, B, c) != a:
                                report.add("sigma.comp1", "π1<a,b> != a", ctx=g, type=A, fam=B, a=a, b=b)
                            if F.sigma_proj2(g, A, B, c) != b:
                                report.add("sigma.comp2", "π2<a,b> != b", ctx=g, type=A, fam=B, a=a, b=b)
                    for c in M.terms_of(g, F.sigma_form(g, A, B)):
                        a, b = F.sigma_split(g, A, B, c)
                        if F.sigma_pair(g, A, B, a, b) != c:
                            report.add("sigma.eta", "<π1 c, π2 c> != c", ctx=g, type=A, fam=B, term=c)
            if F.ident is not None and F.ident.lifting is not None:
                tw = F.tower(g, A)
                for Cty in range(U.carriers[tw.top]):
                    for c in M.terms_of(tw.w1.ext, U.restrict(tw.rho, Cty)):
                        if T.restrict(tw.rho, F.id_j(g, A, Cty, c)) != c:
                            report.add("id.comp", "j(c)ρ_A != c", ctx=g, type=A, motive=Cty, term=c)
    return report


def substitution_stability(F: Formers) -> ValidationReport:
    """Every former and rule operation commutes with every substitution."""
    M = F.M
    C, U, T = M.base, M.types, M.terms
    report = ValidationReport()
    for g in C.objects():
        for sigma in C.into(g):
            d = C.src(sigma)
            for A in range(U.carriers[g]):
                As = U.restrict(sigma, A)
                w = M.extend(g, A)
                sA = M.lifted(g, A, sigma)
                cell = {"sigma": sigma, "ctx": g, "type": A}
                for B in range(U.carriers[w.ext]):
                    Bs = U.restrict(sA, B)
                    if F.pi is not None:
                        P = F.pi_form(g, A, B)
                        if U.restrict(sigma, P) != F.pi_form(d, As, Bs):
                            report.add("subst.pi_form", "(Π_A B)σ != Π_{Aσ} Bσ", fam=B, **cell)
                        for f in M.terms_of(g, P):
                            for a in M.terms_of(g, A):
                                lhs = T.restrict(sigma, F.pi_app(g, A, B, f, a))
                                rhs = F.pi_app(d, As, Bs, T.restrict(sigma, f), T.restrict(sigma, a))
                                if lhs != rhs:
                                    report.add("subst.app", "(f a)σ != (fσ)(aσ)", fam=B, fn=f, arg=a, **cell)
                    if F.sigma is not None:
                        S = F.sigma_form(g, A, B)
                        if U.restrict(sigma, S) != F.sigma_form(d, As, Bs):
                            report.add("subst.sigma_form", "(Σ_A B)σ != Σ_{Aσ} Bσ", fam=B, **cell)
                        for a in M.terms_of(g, A):
                            for b in M.terms_of(g, F.subst_at(g, A, B, a)):
                                lhs = T.restrict(sigma, F.sigma_pair(g, A, B, a, b))
                                rhs = F.sigma_pair(d, As, Bs, T.restrict(sigma, a), T.restrict(sigma, b))
                                if lhs != rhs:
                                    report.add("subst.pair", "<a,b>σ != <aσ,bσ>", fam=B, a=a, b=b, **cell)
                        for c in M.terms_of(g, S):
                            a, b = F.sigma_split(g, A, B, c)
                            a2, b2 = F.sigma_split(d, As, Bs, T.restrict(sigma, c))
                            if (T.restrict(sigma, a), T.restrict(sigma, b)) != (a2, b2):
                                report.add("subst.proj", "(π_i c)σ != π_i(cσ)", fam=B, term=c, **cell)
                if F.pi is not None:
                    for b in range(T.carriers[w.ext]):
                        if T.restrict(sigma, F.pi_lambda(g, A, b)) != F.pi_lambda(d, As, T.restrict(sA, b)):
                            report.add("subst.lambda", "(λ_A b)σ != λ_{Aσ}(bσ)", body=b, **cell)
                if F.ident is not None:
                    terms = M.terms_of(g, A)
                    for a in terms:
                        if T.restrict(sigma, F.id_refl(g, a)) != F.id_refl(d, T.restrict(sigma, a)):
                            report.add("subst.refl", "i(a)σ != i(aσ)", term=a, **cell)
                        for b in terms:
                            lhs = U.restrict(sigma, F.id_form(g, A, a, b))
                            if lhs != F.id_form(d, As, T.restrict(sigma, a), T.restrict(sigma, b)):
                                report.add("subst.id_form", "Id_A(a,b)σ != Id_{Aσ}(aσ,bσ)", a=a, b=b, **cell)
                    if F.ident.lifting is not None:
                        _j_naturality(F, g, A, sigma, report)
    return report


def _j_naturality(F: Formers, g: int, A: int, sigma: int, report: ValidationReport) -> None:
    """``j(c)σ_{Id_A} = j(cσ_A)`` with ``σ_{Id_A}`` the substitution lifted
    through the three extensions of the identity tower."""
    M = F.M
    C, U, T = M.base, M.types, M.terms
    d = C.src(sigma)
    As = U.restrict(sigma, A)
    tw, tw2 = F.tower(g, A), F.tower(d, As)
    s1 = M.lifted(g, A, sigma)
    s2 = M.lifted(tw.w1.ext, tw.A1, s1)
    s3 = M.lifted(tw.w2.ext, tw.IdA, s2)
    if C.src(s3) != tw2.top or C.src(s1) != tw2.w1.ext:
        report.add("subst.j", "lifted substitution misses the identity tower", sigma=sigma, ctx=g, type=A)
        return
    for Cty in range(U.carriers[tw.top]):
        Cs = U.restrict(s3, Cty)
        for c in M.terms_of(tw.w1.ext, U.restrict(tw.rho, Cty)):
            lhs = T.restrict(s3, F.id_j(g, A, Cty, c))
            rhs = F.id_j(d, As, Cs, T.restrict(s1, c))
            if lhs != rhs:
                report.add("subst.j", "j(c)σ_{Id_A} != j(cσ_A)", sigma=sigma, ctx=g, type=A, motive=Cty, term=c)
