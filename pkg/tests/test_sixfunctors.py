import random

import gen
import pytest

from wittkit import catalog
from wittkit import qforms as qf
from wittkit import quivercat as qc
from wittkit import ratlin as rl
from wittkit import sixfunctors as sf
from wittkit.quivercat import QuiverSpec, RepMor

RANK3 = QuiverSpec("rank", 3)
SPECS = [QuiverSpec("rank", 2), RANK3, QuiverSpec("rank", 4),
         QuiverSpec("schubert", 3), QuiverSpec("schubert", 4), QuiverSpec.disc()]


def inv(*d):
    return qf.invariants_of_diagonal(d)


def truncate(m: RepMor, l: int) -> RepMor:
    return RepMor(qc.restrict_open(m.source, l), qc.restrict_open(m.target, l), m.maps[:l])


# closed restrictions

def test_p_ishriek_of_supported_rep_is_identity():
    s = qc.simple(RANK3, 2)
    inc = sf.p_ishriek(s, 2)
    assert inc.source == s and qc.mor_equal(inc, qc.identity(s))
    assert sf.p_istar(s, 2).target == s


def test_p_ishriek_is_maximal():
    rng = random.Random(1)
    for spec in SPECS:
        for _ in range(8):
            rep = gen.rep(rng, spec, max_dim=2)
            for i in range(1, rep.m):
                k = spec.label(i)
                big = sf.p_ishriek(rep, k)
                assert all(d == 0 for d in big.source.dims[:i])
                spaces = qc.image_spaces(big)
                seed = [rl.zero(d) for d in rep.dims]
                j = rng.randrange(i, rep.m)
                if rep.dims[j]:
                    seed[j] = rl.span(gen.int_mat(rng, rep.dims[j], 1))
                cand = qc.generated_subrep(rep, seed)
                if all(s.dim == 0 for s in cand[:i]):
                    assert all(c.issubspace(s) for c, s in zip(cand, spaces))
                proj = sf.p_istar(rep, k)
                assert all(d == 0 for d in proj.target.dims[:i]) and proj.is_epi()


def test_cs2_intermediate_restriction():
    f = catalog.cs2_form()
    assert sf.i_midrestrict(f.rep, 2).dims == (0, 0, 1)
    g = sf.i_midrestrict_form(f, 2)
    assert g.rep.dims == (0, 0, 1) and g.vertex_form(2) == qf.diagonal([-1])


def test_closed_composite_differs():
    f = catalog.cs2_form()
    twice = sf.i_midrestrict_form(sf.i_midrestrict_form(f, 2), 3)
    once = sf.i_midrestrict_form(f, 3)
    assert twice.vertex_form(2) == qf.diagonal([-1])
    assert once.rep.total_dim == 0


# open extensions

def test_extensions_of_a_simple():
    s = qc.restrict_open(qc.simple(RANK3, 1), 1)
    sh, st = sf.j_shriek(s), sf.j_star(s)
    assert sh.dims == st.dims == (1, 1, 1)
    assert all(rl.equal(c, rl.eye(1)) for c in sh.c) and all(rl.is_zero(v) for v in sh.V)
    assert all(rl.equal(v, rl.eye(1)) for v in st.V) and all(rl.is_zero(c) for c in st.c)
    assert sf.j_midext(s).dims == (1, 0, 0)
    assert sf.j_midext(s) == qc.simple(RANK3, 1)


def test_natural_map_image_is_midext():
    rng = random.Random(2)
    for spec in SPECS:
        for _ in range(5):
            l = rng.randint(1, spec.n - 1)
            rep = gen.rep(rng, spec, m=l)
            nat = sf.natural_map(rep)
            assert qc.validate_mor(nat) == []
            assert all(rl.equal(m, rl.eye(d)) for m, d in zip(nat.maps[:l], rep.dims))
            assert qc.same_shape(sf.j_midext_image(rep), sf.j_midext(rep))


def test_adjunction_sanity():
    rng = random.Random(3)
    for spec in SPECS:
        for _ in range(5):
            l = rng.randint(1, spec.n - 1)
            rep = gen.rep(rng, spec, m=l)
            sh, st = sf.j_shriek(rep), sf.j_star(rep)
            for ext in (sh, st, sf.j_midext(rep)):
                assert qc.validate(ext) == []
                assert qc.same_shape(qc.restrict_open(ext, l), rep)
            closed = spec.label(l)
            assert sf.p_istar(sh, closed).target.total_dim == 0
            assert sf.p_ishriek(st, closed).source.total_dim == 0


def test_ie2_middle_exactness_fails_at_vertex_3():
    f, g = catalog.ie2_sequence()
    assert all(rl.image(a) == rl.kernel(b) for a, b in zip(f.maps, g.maps))
    F, G = sf.j_midext_mor(f), sf.j_midext_mor(g)
    assert [r.dims for r in (F.source, F.target, G.target)] == [(1, 1, 0), (1, 2, 1), (0, 1, 0)]
    bad = [i + 1 for i in range(3) if rl.image(F.maps[i]) != rl.kernel(G.maps[i])]
    assert bad == [3]
    assert F.is_mono() and G.is_epi()


def test_midext_preserves_monos_and_epis():
    rng = random.Random(4)
    for spec in SPECS * 2:
        f = gen.form(rng, spec)
        a, b = gen.exact_pair(rng, f)
        l = rng.randint(1, spec.n - 1)
        inc, proj = truncate(a, l), truncate(b, l)
        if inc.is_mono():
            assert sf.j_midext_mor(inc).is_mono()
        if proj.is_epi():
            assert sf.j_midext_mor(proj).is_epi()


def test_open_extensions_compose():
    rng = random.Random(5)
    for spec in SPECS:
        if spec.n < 3:
            continue
        for _ in range(5):
            rep = gen.rep(rng, spec, m=1)
            N = rep.last_N
            step = sf.j_midext(rep, 2, N)
            assert qc.same_shape(sf.j_midext(step), sf.j_midext(rep, None, N))


def test_midext_commutes_with_duality():
    rng = random.Random(6)
    for spec in SPECS:
        for _ in range(5):
            l = rng.randint(1, spec.n - 1)
            rep = gen.rep(rng, spec, m=l)
            assert qc.same_shape(sf.j_midext(qc.dual(rep)), qc.dual(sf.j_midext(rep)))
            assert qc.same_shape(sf.j_shriek(qc.dual(rep)), qc.dual(sf.j_star(rep)))


def test_midext_of_ie1_local_form():
    f = sf.j_midext_form(catalog.ie1_local_form())
    assert f.rep == catalog.ie1_form().rep
    assert qc.validate_form(f) == [] and f.is_nondegenerate()


def test_midext_forms_are_valid():
    rng = random.Random(7)
    for spec in SPECS:
        for _ in range(4):
            f = gen.form(rng, spec)
            for l in range(1, spec.n):
                g = sf.j_midext_form(qc.restrict_open_form(f, l), spec.n)
                assert qc.validate_form(g) == [] and g.is_nondegenerate()


# stratum forms and decompositions

def test_restrict_to_stratum():
    f = catalog.cs2_form()
    assert sf.restrict_to_stratum(f, 1) == f.vertex_form(0)
    middle = sf.restrict_to_stratum(f, 2)
    assert middle.dim == 1 and middle.eps == -1 and rl.is_zero(middle.gram)


def test_cs2_decompositions():
    f = catalog.cs2_form()
    assert [(k, qf.witt_invariants(g)) for k, g in sf.canonical_decomposition(f)] == [(1, inv(1)), (3, inv(-1))]
    assert sf.cs1_splitting(f, (1, 2, 3)) == [(1, inv(1)), (2, qf.WittInvariant.trivial(-1)), (3, inv(-1))]
    strict = sf.strict_support_sum(f)
    assert [(k, v) for k, v in strict if not v.is_trivial] == [(1, inv(1))]
    assert sf.agrees_with_total(f) is False
    report = sf.strict_support_report(f)
    assert report["agrees_with_total"] is False and len(report["terms"]) == 3


def test_anisotropic_forms_agree_across_modes():
    rng = random.Random(8)
    for spec in SPECS * 2:
        g = qc.anisotropic_representative(gen.form(rng, spec))
        if not g.rep.total_dim:
            continue
        canon = {k: qf.witt_invariants(h) for k, h in sf.canonical_decomposition(g)}
        assert canon == {spec.label(i): qf.witt_invariants(qc.stratum_form(g, i)[0])
                         for i in range(g.rep.m) if qc.stratum_form(g, i)[0].dim}
        cs1 = {k: v for k, v in sf.cs1_splitting(g) if not v.is_trivial}
        strict = {k: v for k, v in sf.strict_support_sum(g) if not v.is_trivial}
        assert cs1 == strict == {k: v for k, v in canon.items() if not v.is_trivial}
        assert sf.agrees_with_total(g)


def test_single_stratum_agrees():
    rng = random.Random(9)
    for spec in SPECS:
        for k in spec.labels():
            f = gen.simple_form(rng, spec, k)
            terms = [(v, w) for v, w in sf.strict_support_sum(f) if not w.is_trivial]
            assert len(terms) <= 1 and sf.agrees_with_total(f)


def test_metabolic_terms_sum_to_zero():
    rng = random.Random(10)
    for spec in SPECS:
        h = qc.hyperbolic_form(gen.rep(rng, spec))
        assert all(v.is_trivial for v in sf.total_of_terms(sf.cs1_terms(h)).values())
        assert sf.canonical_decomposition(h) == []


def test_cs1_sum_is_the_total():
    rng = random.Random(11)
    for spec in SPECS * 2:
        f = gen.form(rng, spec)
        for order in qc.linear_extensions(spec):
            total = sf.total_of_terms(sf.cs1_terms(f, order))
            assert sf._normalize(total, f) == sf._normalize(qc.witt_class(f), f)


def test_closed_open_split_adds_up():
    rng = random.Random(12)
    for spec in SPECS * 2:
        f = gen.form(rng, spec)
        total = qc.witt_class(f)
        for k in range(1, spec.n):
            closed = sf.i_midrestrict_form(f, spec.label(k))
            opened = sf.j_midext_form(qc.restrict_open_form(f, k), spec.n)
            assert qc.add_classes(qc.witt_class_forms(closed), qc.witt_class_forms(opened)) == total


def test_anisotropy_is_preserved():
    rng = random.Random(13)
    for spec in SPECS * 2:
        g = qc.anisotropic_representative(gen.form(rng, spec))
        for k in range(1, spec.n):
            assert qc.is_anisotropic_rep(sf.i_midrestrict_form(g, spec.label(k)))
            assert qc.is_anisotropic_rep(sf.j_midext_form(qc.restrict_open_form(g, k), spec.n))


def test_canonical_is_stable():
    rng = random.Random(14)
    for spec in SPECS:
        f = gen.form(rng, spec)
        base = sf.canonical_report(f)
        h = qc.hyperbolic_form(gen.rep(rng, spec, max_dim=2))
        assert sf.canonical_report(qc.direct_sum_forms(f, h)) == base
        for order in qc.linear_extensions(spec):
            assert sf.canonical_report(f, order) == base


def test_degenerate_input_rejected():
    f = catalog.cs2_form()
    zero = qc.RepForm(f.rep, tuple(0 * b for b in f.beta))
    with pytest.raises(qf.FormError):
        sf.cs1_splitting(zero)
    with pytest.raises(qf.FormError):
        sf.strict_support_sum(zero)


def test_bad_order_rejected():
    with pytest.raises(qc.OrderError):
        sf.canonical_decomposition(catalog.cs2_form(), (3, 2, 1))
