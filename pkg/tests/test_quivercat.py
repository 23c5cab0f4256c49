import random
from collections import Counter

import gen
import pytest

from wittkit import catalog
from wittkit import qforms as qf
from wittkit import quivercat as qc
from wittkit import ratlin as rl
from wittkit import sixfunctors as sf
from wittkit.quivercat import QuiverRep, QuiverSpec, RepForm, RepMor

RANK3 = QuiverSpec("rank", 3)
SPECS = [QuiverSpec("rank", 2), RANK3, QuiverSpec("rank", 4),
         QuiverSpec("schubert", 3), QuiverSpec("schubert", 4), QuiverSpec.disc()]


def ie1_extended_rep():
    return catalog.ie1_form().rep


def test_spec_shapes():
    assert QuiverSpec.disc().labels() == [0, 1]
    assert RANK3.labels() == [1, 2, 3]
    assert [RANK3.sign(i) for i in range(3)] == [1, -1, 1]
    assert [QuiverSpec.disc().sign(i) for i in range(2)] == [-1, 1]
    with pytest.raises(qc.RepError):
        QuiverSpec("disc", 3)
    with pytest.raises(qc.RepError):
        QuiverSpec("cyclic", 2)
    with pytest.raises(qc.RepError):
        RANK3.index(4)


def test_validate_examples():
    assert qc.validate(qc.zero_rep(RANK3)) == []
    assert qc.validate(catalog.cs2_rep()) == []
    bad = qc.make_rep(RANK3, (1, 2, 1), [[[1], [0]], [[0, 1]]], [[[1, 0]], [[1], [0]]])
    v = qc.validate(bad)
    assert v and v[0].relation == "V1c1 = 0" and v[0].vertex == 1


def test_schubert_relations():
    spec = QuiverSpec("schubert", 3)
    rep = qc.make_rep(spec, (1, 1, 1), [[[1]], [[1]]], [[[0]], [[0]]])
    names = {x.relation for x in qc.validate(rep)}
    assert "c2c1 = 0" in names
    same = qc.make_rep(RANK3, (1, 1, 1), [[[1]], [[1]]], [[[0]], [[0]]])
    assert qc.validate(same) == []


def test_non_unipotent_rejected():
    rep = qc.make_rep(QuiverSpec.disc(), (1, 1), [[[1]]], [[[1]]])
    assert any("nilpotent" in v.relation for v in qc.validate(rep))


def test_shape_errors():
    with pytest.raises(rl.DimensionError):
        qc.make_rep(RANK3, (1, 1, 1), [[[1]]], [[[0]]])
    with pytest.raises(rl.DimensionError):
        QuiverRep(RANK3, (1, 2), (rl.zeros(1, 1),), (rl.zeros(1, 2),))


def test_renormalize_variation():
    spec = QuiverSpec.disc()
    raw = qc.make_rep(spec, (1, 1), [[[1]]], [[[0]]])
    assert qc.renormalize_variation(raw) == raw
    c = rl.mat([[1, 0], [0, 1]])
    v = rl.mat([[0, 1], [0, 0]])
    raw = QuiverRep(spec, (2, 2), (c,), (v,))
    out = qc.renormalize_variation(raw)
    n = rl.mul(c, v)
    assert rl.equal(out.V[0], rl.mul(v, rl.eye(2) - n / 2))


def test_renormalized_exponential():
    rng = random.Random(1)
    spec = QuiverSpec.disc()
    for _ in range(20):
        d = rng.randint(1, 3)
        N = gen.nilpotent(rng, d)
        P = gen.invertible(rng, d)
        c, v = P, rl.mul(rl.inverse(P), N)
        out = qc.renormalize_variation(QuiverRep(spec, (d, d), (c,), (v,)))
        assert rl.equal(qc.exp_nilpotent(rl.mul(out.V[0], c)), rl.eye(d) + rl.mul(v, c))


def test_simple_duals():
    for spec in SPECS:
        for k in spec.labels():
            s = qc.simple(spec, k)
            assert qc.dual(s) == s


def test_biduality_coherence():
    rng = random.Random(2)
    for spec in SPECS:
        rep = gen.rep(rng, spec)
        chi = qc.biduality(rep)
        assert qc.validate_mor(chi) == [] and chi.is_iso()
        back = qc.compose(qc.dual_mor(chi), qc.biduality(qc.dual(rep)))
        assert qc.mor_equal(back, qc.identity(qc.dual(rep)))


def test_ie1_rep_self_dual_via_beta():
    f = catalog.ie1_form()
    assert qc.validate_form(f) == []
    mor = qc.form_as_mor(f)
    assert qc.validate_mor(mor) == [] and mor.is_iso()
    assert qc.same_shape(qc.dual(ie1_extended_rep()), ie1_extended_rep())


def test_duality_is_exact():
    rng = random.Random(3)
    for spec in SPECS:
        f = gen.form(rng, spec)
        a, b = gen.exact_pair(rng, f)
        da, db = qc.dual_mor(b), qc.dual_mor(a)
        for x, y in zip(da.maps, db.maps):
            assert rl.image(x) == rl.kernel(y)


def test_kernel_image_cokernel():
    rng = random.Random(4)
    assert qc.kernel(qc.identity(catalog.cs2_rep())).source.is_zero()
    f, _ = catalog.ie2_sequence()
    assert qc.kernel(f).source.is_zero() and f.is_mono()
    for spec in SPECS:
        rep = gen.rep(rng, spec)
        homs = qc.hom_space(rep, rep)
        m = homs[rng.randrange(len(homs))]
        k = qc.kernel(m)
        _, into = qc.image(m)
        co = qc.cokernel(m)
        for i in range(rep.m):
            assert k.source.dims[i] + into.source.dims[i] == rep.dims[i]
            assert into.source.dims[i] + co.target.dims[i] == rep.dims[i]
        for piece in (k.source, into.source, co.target):
            assert qc.validate(piece) == []


def test_composition_factors():
    assert qc.simple(RANK3, 1).dims == (1, 0, 0)
    assert qc.composition_factors(catalog.cs2_rep()) == Counter({1: 1, 2: 2, 3: 1})
    a, b = catalog.cs2_rep(), qc.simple(RANK3, 3)
    assert qc.composition_factors(qc.direct_sum(a, b)) == qc.composition_factors(a) + qc.composition_factors(b)


def test_form_validation():
    f = catalog.cs2_form()
    assert qc.validate_form(f) == []
    bad = RepForm(f.rep, (f.beta[0], rl.eye(2), f.beta[2]))
    names = {v.relation for v in qc.validate_form(bad)}
    assert "beta2 antisymmetric" in names


def test_hom_space_dimension():
    s = catalog.cs2_rep()
    homs = qc.hom_space(s, s)
    assert all(qc.validate_mor(h) == [] for h in homs)
    assert any(h.is_iso() for h in homs)


def test_cs2_reduction_by_middle_simple():
    f = catalog.cs2_form()
    sub = [rl.zero(1), rl.span(rl.col([1, 0])), rl.zero(1)]
    assert qc.is_subrep(f.rep, sub)
    red = qc.isotropic_reduce_rep(f, sub)
    assert red.rep.dims == (1, 0, 1)
    assert red.vertex_form(0) == qf.diagonal([1])
    assert red.vertex_form(2) == qf.diagonal([-1])


def test_reduce_by_zero():
    f = catalog.cs2_form()
    red = qc.isotropic_reduce_rep(f, [rl.zero(d) for d in f.rep.dims])
    assert red.rep == f.rep and all(rl.equal(a, b) for a, b in zip(red.beta, f.beta))


def test_ie1_reduction():
    f = catalog.ie1_form()
    sub = qc.generated_subrep(f.rep, catalog.ie1_lagrangian() + [rl.zero(1)])
    red = qc.isotropic_reduce_rep(f, sub)
    assert red.rep.dims == (0, 1) and red.vertex_form(1) == qf.diagonal([1])


def test_non_isotropic_reduction_rejected():
    f = catalog.cs2_form()
    with pytest.raises(qf.FormError):
        qc.isotropic_reduce_rep(f, [rl.zero(1), rl.span(rl.col([1, 0])), rl.full(1)])
    with pytest.raises(qc.RepError):
        qc.isotropic_reduce_rep(f, [rl.full(1), rl.zero(2), rl.zero(1)])


def test_max_isotropic_rep_examples():
    f = catalog.cs2_form()
    sub = qc.max_isotropic_rep(f)
    assert sub.source.dims == (0, 1, 0)
    g = qc.anisotropic_representative(f)
    assert g.rep.dims == (1, 0, 1)
    assert qc.max_isotropic_rep(g).source.is_zero()
    rng = random.Random(5)
    for spec in SPECS:
        h = gen.form(rng, spec)
        meta = qc.direct_sum_forms(h, -h)
        assert qc.anisotropic_representative(meta).rep.total_dim == 0


def test_witt_class_examples():
    cls = qc.witt_class(catalog.cs2_form())
    assert cls[1] == qf.invariants_of_diagonal([1])
    assert cls[2] == qf.WittInvariant.trivial(-1)
    assert cls[3] == qf.invariants_of_diagonal([-1])
    rng = random.Random(6)
    for spec in SPECS:
        h = qc.hyperbolic_form(gen.rep(rng, spec))
        assert all(v.is_trivial for v in qc.witt_class(h).values())


def test_witt_class_is_additive():
    rng = random.Random(7)
    for spec in SPECS * 2:
        f, g = gen.form(rng, spec), gen.form(rng, spec)
        total = qc.witt_class(qc.direct_sum_forms(f, g))
        assert total == qc.add_classes(qc.witt_class_forms(f), qc.witt_class_forms(g))


def test_metabolic_summands_do_not_change_the_class():
    rng = random.Random(8)
    for spec in SPECS:
        f = gen.form(rng, spec)
        h = qc.hyperbolic_form(gen.rep(rng, spec, max_dim=2))
        assert qc.witt_class(qc.direct_sum_forms(f, h)) == qc.witt_class(f)


def test_anisotropy_by_restrictions():
    rng = random.Random(9)
    for spec in SPECS * 2:
        g = qc.anisotropic_representative(gen.form(rng, spec))
        assert qc.max_isotropic_rep(g).source.is_zero()
        for i in range(g.rep.m):
            form, N, _ = qc.stratum_form(g, i)
            assert qc.max_isotropic_local(form, N).dim == 0
            if form.eps == 1 and form.dim:
                assert qf.is_anisotropic(form) or not rl.is_zero(N)


def test_splitting_relation_examples():
    f = catalog.cs2_form()
    ident = qc.identity(f.rep)
    alpha, gamma = qc.splitting_relation_rep(f, ident, qc.zero_mor(f.rep, qc.zero_rep(RANK3)))
    assert alpha.rep.dims == f.rep.dims and gamma.rep.total_dim == 0
    local = catalog.ie1_local_form()
    lag = qc.subrep(local.rep, catalog.ie1_lagrangian())
    proj = qc.quotient(local.rep, catalog.ie1_lagrangian())
    alpha, gamma = qc.splitting_relation_rep(local, lag, proj)
    assert alpha.rep.total_dim == 0 and gamma.rep.total_dim == 0


def test_splitting_relation_rejects_inexact():
    f = catalog.cs2_form()
    ident = qc.identity(f.rep)
    with pytest.raises(qc.RepError):
        qc.splitting_relation_rep(f, ident, ident)


def test_splitting_relation_random():
    rng = random.Random(10)
    for spec in SPECS * 3:
        f = gen.form(rng, spec)
        a, b = gen.exact_pair(rng, f)
        alpha, gamma = qc.splitting_relation_rep(f, a, b)
        assert qc.witt_class(f) == qc.add_classes(qc.witt_class_forms(alpha), qc.witt_class_forms(gamma))


def test_restriction_commutes_with_reduction():
    """Reducing a subobject's form agrees with restricting the reduced form, in Witt classes."""
    rng = random.Random(11)
    for spec in SPECS:
        f = gen.form(rng, spec)
        iso = qc.max_isotropic_rep(f)
        red = qc.isotropic_reduce_rep(f, iso)
        assert qc.witt_class(red) == qc.witt_class(f)
        restricted = qc.restrict_form(f, qc.identity(f.rep))
        assert qc.witt_class(qc.nondegenerate_part(restricted)) == qc.witt_class(f)


def test_anisotropic_splitting_isometry():
    rng = random.Random(12)
    for spec in SPECS:
        g = qc.anisotropic_representative(gen.form(rng, spec))
        for k in range(1, g.rep.m):
            closed = sf.i_midrestrict_form(g, spec.label(k))
            opened = sf.j_midext_form(qc.restrict_open_form(g, k), g.rep.m)
            s = qc.direct_sum_forms(closed, opened)
            assert s.rep.dims == g.rep.dims
            assert qc.witt_class(s) == qc.witt_class(g)


def test_orders():
    assert qc.linear_extensions(RANK3) == [(1, 2, 3)]
    assert qc.check_order(RANK3, (1, 2, 3)) == [0, 1, 2]
    with pytest.raises(qc.OrderError):
        qc.check_order(RANK3, (2, 1, 3))
    with pytest.raises(qc.OrderError):
        qc.check_order(RANK3, (1, 2))


def test_json_round_trip():
    f = catalog.cs2_form()
    assert RepForm.from_json(f.to_json()).rep == f.rep
    local = catalog.ie1_local_form()
    assert QuiverRep.from_json(local.rep.to_json()) == local.rep
    d = f.to_json()
    assert d["spec"] == {"kind": "rank", "n": 3} and d["dims"] == [1, 2, 1]
    assert d["beta"][1] == [["0", "1"], ["-1", "0"]]


def test_morphism_checks():
    a = catalog.cs2_rep()
    with pytest.raises(rl.DimensionError):
        RepMor(a, a, (rl.eye(1), rl.eye(2)))
    bad = RepMor(a, a, (rl.eye(1), rl.mat([[1, 0], [0, 2]]), rl.eye(1)))
    assert qc.validate_mor(bad)
