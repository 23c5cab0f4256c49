"""Restriction and extension functors between unions of strata, and the
three decomposition procedures for Witt classes of forms on quiver
representations.

A representation "on S_k .. S_l" is a representation on the first l
vertices that vanishes below vertex k.  Vertex arguments are public labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qforms as qf
from . import quivercat as qc
from . import ratlin as rl
from .qforms import EpsForm, WittInvariant
from .quivercat import QuiverRep, RepForm, RepMor


# closed restrictions

def p_ishriek(rep: QuiverRep, k: int) -> RepMor:
    """Inclusion of the largest subrepresentation vanishing below vertex k."""
    return qc.subrep(rep, qc.vanishing_below(rep, rep.spec.index(k)))


def p_istar(rep: QuiverRep, k: int) -> RepMor:
    """Projection onto the largest quotient vanishing below vertex k."""
    return qc.quotient(rep, qc.cogenerated_below(rep, rep.spec.index(k)))


def _midrestrict_spaces(rep: QuiverRep, i: int) -> tuple[list, list]:
    K = qc.vanishing_below(rep, i)
    W = qc.cogenerated_below(rep, i)
    return K, [rl.intersect(a, b) for a, b in zip(K, W)]


def i_midrestrict(rep: QuiverRep, k: int) -> QuiverRep:
    """Image of p_ishriek(rep, k) -> rep -> p_istar(rep, k)."""
    sub = p_ishriek(rep, k)
    proj = p_istar(rep, k)
    return qc.image(qc.compose(proj, sub))[0].target


def i_midrestrict_form(f: RepForm, k: int) -> RepForm:
    """The form induced on the intermediate restriction to vertices >= k."""
    K, KW = _midrestrict_spaces(f.rep, f.spec.index(k))
    inc = qc.subrep(f.rep, K)
    restricted = qc.restrict_form(f, inc)
    inner = [rl.span(s.coords(t.basis)) if t.dim else rl.zero(s.dim) for s, t in zip(K, KW)]
    return qc.reduce_by_spaces(restricted, inner).form


# open extensions

def _last_N(rep: QuiverRep, N: np.ndarray | None) -> np.ndarray:
    return rep.N(rep.m - 1) if N is None else rl.mat(N)


def _extend_once(rep: QuiverRep, N: np.ndarray, mode: str) -> QuiverRep:
    l, d = rep.m, rep.dims[-1]
    schubert = rep.spec.kind == "schubert" and l >= 2
    if mode == "shriek":
        if schubert:
            im = rl.image(rep.c[l - 2])
            c_new = rl.quotient_map(d, im)
            V_new = rl.mul(N, rl.section(d, im))
        else:
            c_new, V_new = rl.eye(d), N
    else:
        if schubert:
            ker = rl.kernel(rep.V[l - 2])
            V_new = ker.basis
            c_new = ker.coords(N)
        else:
            c_new, V_new = N, rl.eye(d)
    return QuiverRep(rep.spec, rep.dims + (c_new.shape[0],), rep.c + (c_new,), rep.V + (V_new,))


def _extend(rep: QuiverRep, n: int | None, N, mode: str) -> QuiverRep:
    n = rep.spec.n if n is None else n
    out = QuiverRep(rep.spec, rep.dims, rep.c, rep.V)
    N = _last_N(rep, N)
    while out.m < n:
        out = _extend_once(out, N, mode)
        N = out.N(out.m - 1)
    return out


def j_shriek(rep: QuiverRep, n: int | None = None, N: np.ndarray | None = None) -> QuiverRep:
    """Initial extension of a representation on the first l vertices to n vertices.

    N overrides the monodromy logarithm at the last given vertex (needed for
    a disc local system, whose monodromy is not visible on one vertex).
    """
    return _extend(rep, n, N, "shriek")


def j_star(rep: QuiverRep, n: int | None = None, N: np.ndarray | None = None) -> QuiverRep:
    """Terminal extension; the transpose pattern of j_shriek."""
    return _extend(rep, n, N, "star")


def j_midext(rep: QuiverRep, n: int | None = None, N: np.ndarray | None = None) -> QuiverRep:
    """Intermediate extension: vertex l+i carries im(N_l^i), with N_l and inclusions as arrows."""
    n = rep.spec.n if n is None else n
    N = _last_N(rep, N)
    d = rep.dims[-1]
    prev = rl.eye(d)
    dims, c, V = list(rep.dims), list(rep.c), list(rep.V)
    for i in range(1, n - rep.m + 1):
        img = rl.image(rl.power(N, i))
        P = img.basis
        c.append(img.coords(rl.mul(N, prev)))
        V.append(rl.span(prev).coords(P) if prev.shape[1] else rl.zeros(0, P.shape[1]))
        dims.append(img.dim)
        prev = P
    return QuiverRep(rep.spec, tuple(dims), tuple(c), tuple(V))


def extend_mor(a: QuiverRep, b: QuiverRep, prefix: Sequence[np.ndarray]) -> RepMor:
    """The unique morphism a -> b agreeing with the given maps on the first vertices."""
    basis = qc.hom_space(a, b)
    p = len(prefix)
    target = [x for m in prefix for x in rl.mat(m).flat]
    A = rl.zeros(len(target), len(basis))
    for j, h in enumerate(basis):
        flat = [x for m in h.maps[:p] for x in m.flat]
        for i, x in enumerate(flat):
            A[i, j] = x
    sol = rl.solve(A, rl.col(target)) if basis else None
    if sol is None:
        if all(x == 0 for x in target):
            return qc.zero_mor(a, b)
        raise qc.RepError("no morphism extends the given maps")
    if rl.kernel(A).dim:
        raise qc.RepError("extension of the given maps is not unique")
    maps = [sum((sol[j, 0] * h.maps[i] for j, h in enumerate(basis)), rl.zeros(b.dims[i], a.dims[i]))
            for i in range(a.m)]
    return RepMor(a, b, tuple(maps))


def natural_map(rep: QuiverRep, n: int | None = None, N: np.ndarray | None = None) -> RepMor:
    """j_shriek -> j_star, the identity on the original vertices."""
    a, b = j_shriek(rep, n, N), j_star(rep, n, N)
    return extend_mor(a, b, [rl.eye(d) for d in rep.dims])


def j_midext_image(rep: QuiverRep, n: int | None = None, N: np.ndarray | None = None) -> QuiverRep:
    """Intermediate extension computed as the image of the natural map."""
    return qc.image(natural_map(rep, n, N))[0].target


def j_midext_mor(f: RepMor, n: int | None = None) -> RepMor:
    """j_midext on morphisms: f_l restricted to the images of the N_l powers."""
    a, b = j_midext(f.source, n), j_midext(f.target, n)
    l = f.source.m
    Na, Nb = f.source.N(l - 1), f.target.N(l - 1)
    maps = list(f.maps)
    for i in range(1, a.m - l + 1):
        src = rl.image(rl.power(Na, i))
        tgt = rl.image(rl.power(Nb, i))
        maps.append(tgt.coords(rl.mul(f.maps[l - 1], src.basis)) if src.dim else rl.zeros(tgt.dim, 0))
    return RepMor(a, b, tuple(maps))


def j_midext_form(f: RepForm, n: int | None = None) -> RepForm:
    """The unique form on j_midext(rep) extending the given one."""
    rep = j_midext(f.rep, n, f.rep.last_N)
    basis = qc.form_space(rep)
    p = f.rep.m
    target = [x for m in f.beta for x in m.flat]
    A = rl.zeros(len(target), len(basis))
    for j, g in enumerate(basis):
        for i, x in enumerate(x for m in g.beta[:p] for x in m.flat):
            A[i, j] = x
    if not basis:
        if any(x != 0 for x in target):
            raise qc.RepError("form does not extend")
        return RepForm(rep, tuple(rl.zeros(d, d) for d in rep.dims))
    sol = rl.solve(A, rl.col(target))
    if sol is None:
        raise qc.RepError("form does not extend")
    beta = [sum((sol[j, 0] * g.beta[i] for j, g in enumerate(basis)), rl.zeros(rep.dims[i], rep.dims[i]))
            for i in range(rep.m)]
    return RepForm(rep, tuple(beta))


def open_restrict_form(f: RepForm, k: int) -> RepForm:
    """j^*: restriction to the open union of the strata up to vertex k."""
    return qc.restrict_open_form(f, f.spec.index(k) + 1)


# forms on strata

def restrict_to_stratum(f: RepForm, k: int) -> EpsForm:
    return qc.stratum_form(f, f.spec.index(k))[0]


def _terms_report(spec, terms) -> list[dict]:
    return [{"vertex": k, "eps": spec.sign(spec.index(k)), "invariant": inv} for k, inv in terms]


def canonical_decomposition(f: RepForm, order: Sequence[int] | None = None) -> list[tuple[int, EpsForm]]:
    """Anisotropic stratum forms from the staged reduction, zero terms omitted."""
    g = qc.anisotropic_representative(f, order)
    idx = qc.check_order(f.spec, order)
    out = []
    for i in idx:
        if i >= g.rep.m:
            continue
        form = qc.stratum_form(g, i)[0]
        if form.dim:
            out.append((f.spec.label(i), form))
    return out


@dataclass(frozen=True)
class Term:
    """One summand of a splitting formula: its stratum and full Witt class."""

    vertex: int
    classes: dict

    def invariant(self, spec) -> WittInvariant:
        form = self.classes.get(self.vertex)
        if form is None:
            return WittInvariant.trivial(spec.sign(spec.index(self.vertex)))
        return qf.witt_invariants(form)


def _term(f: RepForm, i: int) -> dict:
    """Class of j_{S_i !*} j_{S_i}^* f for f supported on vertices >= i."""
    local = qc.restrict_open_form(f, i + 1)
    ext = j_midext_form(local, f.rep.m)
    return qc.witt_class_forms(ext)


def cs1_terms(f: RepForm, order: Sequence[int] | None = None) -> list[Term]:
    """Peel off strata one at a time, restricting intermediately to the rest."""
    idx = qc.check_order(f.spec, order)
    if not f.is_nondegenerate():
        raise qf.FormError("splitting decomposition needs a nondegenerate form")
    out = []
    cur = f
    for t, i in enumerate(idx):
        out.append(Term(f.spec.label(i), _term(cur, i)))
        if t + 1 < len(idx):
            cur = i_midrestrict_form(cur, f.spec.label(idx[t + 1]))
    return out


def cs1_splitting(f: RepForm, order: Sequence[int] | None = None) -> list[tuple[int, WittInvariant]]:
    return [(t.vertex, t.invariant(f.spec)) for t in cs1_terms(f, order)]


def strict_support_terms(f: RepForm) -> list[Term]:
    """Terms j_{S!*} j_S^* i_S^{!*} f with the one-step closed inclusion of each closure."""
    if not f.is_nondegenerate():
        raise qf.FormError("strict-support sum needs a nondegenerate form")
    out = []
    for i in range(f.rep.m):
        g = i_midrestrict_form(f, f.spec.label(i)) if i else f
        out.append(Term(f.spec.label(i), _term(g, i)))
    return out


def strict_support_sum(f: RepForm) -> list[tuple[int, WittInvariant]]:
    return [(t.vertex, t.invariant(f.spec)) for t in strict_support_terms(f)]


def total_of_terms(terms: Sequence[Term]) -> dict[int, WittInvariant]:
    return qc.add_classes(*[t.classes for t in terms])


def agrees_with_total(f: RepForm, terms: Sequence[Term] | None = None) -> bool:
    terms = strict_support_terms(f) if terms is None else terms
    return _normalize(total_of_terms(terms), f) == _normalize(qc.witt_class(f), f)


def _normalize(classes: dict, f: RepForm) -> dict:
    return {k: classes.get(k, WittInvariant.trivial(f.spec.sign(f.spec.index(k))))
            for k in [f.spec.label(i) for i in range(f.rep.m)]}


# reports

def canonical_report(f: RepForm, order=None) -> list[dict]:
    return _terms_report(f.spec, [(k, qf.witt_invariants(g)) for k, g in canonical_decomposition(f, order)])


def _term_entry(spec, t: Term) -> dict:
    entry = _terms_report(spec, [(t.vertex, t.invariant(spec))])[0]
    extra = {k: qf.witt_invariants(g) for k, g in sorted(t.classes.items())
             if k != t.vertex and g.dim}
    extra = {k: v for k, v in extra.items() if not v.is_trivial}
    if extra:
        entry["other_components"] = _terms_report(spec, sorted(extra.items()))
    return entry


def cs1_report(f: RepForm, order=None) -> list[dict]:
    return [_term_entry(f.spec, t) for t in cs1_terms(f, order)]


def strict_support_report(f: RepForm) -> dict:
    terms = strict_support_terms(f)
    return {"terms": [_term_entry(f.spec, t) for t in terms],
            "agrees_with_total": agrees_with_total(f, terms)}
