"""Seeded random generators for representations, forms and sequences."""

from __future__ import annotations

import random
from fractions import Fraction

from wittkit import catalog
from wittkit import gluecat as gc
from wittkit import quivercat as qc
from wittkit import ratlin as rl
from wittkit import sixfunctors as sf
from wittkit.quivercat import QuiverRep, QuiverSpec, RepForm


def rat(rng: random.Random, h: int = 3) -> Fraction:
    return Fraction(rng.randint(-h, h), rng.randint(1, h))


def int_mat(rng: random.Random, r: int, c: int, h: int = 3):
    return rl.mat([[rng.randint(-h, h) for _ in range(c)] for _ in range(r)], (r, c))


def invertible(rng: random.Random, d: int, h: int = 2):
    while True:
        P = int_mat(rng, d, d, h)
        if rl.rank(P) == d:
            return P


def nilpotent(rng: random.Random, d: int, max_index: int = 3):
    """P J P^-1 for a random Jordan type with blocks of size <= max_index."""
    sizes = []
    left = d
    while left:
        s = rng.randint(1, min(left, max_index))
        sizes.append(s)
        left -= s
    J = rl.block_diag(*[gc.jordan_block(s) for s in sizes]) if sizes else rl.zeros(0, 0)
    P = invertible(rng, d)
    return rl.mul(P, J, rl.inverse(P))


def local_datum(rng: random.Random, max_dim: int = 3, max_index: int = 3) -> gc.LocalDatum:
    d = rng.randint(1, max_dim)
    return gc.LocalDatum(d, nilpotent(rng, d, max_index))


def _attempt(rng, spec: QuiverSpec, m: int, depth: int) -> QuiverRep:
    if m == 1:
        d = rng.randint(1, 2)
        N = nilpotent(rng, d) if spec.kind == "disc" else None
        return QuiverRep(spec, (d,), (), (), N)
    options = ["simple", "ext", "ext"]
    if depth > 0:
        options += ["sum", "sub", "quot"]
    how = rng.choice(options)
    if how == "simple":
        return qc.simple(spec, spec.label(rng.randrange(m)), m)
    if how == "ext":
        l = rng.randint(1, m - 1)
        base = _attempt(rng, spec, l, depth - 1)
        op = rng.choice([sf.j_shriek, sf.j_star, sf.j_midext])
        return op(base, m)
    if how == "sum":
        return qc.direct_sum(_attempt(rng, spec, m, depth - 1), _attempt(rng, spec, m, depth - 1))
    rep = _attempt(rng, spec, m, depth - 1)
    i = rng.randrange(m)
    seed = [rl.zero(d) for d in rep.dims]
    if rep.dims[i]:
        seed[i] = rl.span(int_mat(rng, rep.dims[i], 1))
    spaces = qc.generated_subrep(rep, seed)
    return qc.subrep(rep, spaces).source if how == "sub" else qc.quotient(rep, spaces).target


def rep(rng: random.Random, spec: QuiverSpec, m: int | None = None, depth: int = 2,
        max_dim: int = 3) -> QuiverRep:
    m = spec.n if m is None else m
    for _ in range(100):
        r = _attempt(rng, spec, m, depth)
        if r.total_dim and max(r.dims) <= max_dim:
            return r
    return qc.simple(spec, spec.label(0), m)


def _symplectic(k: int):
    return rl.block_diag(*[rl.mat([[0, 1], [-1, 0]])] * k)


def simple_form(rng: random.Random, spec: QuiverSpec, k: int, mult: int | None = None) -> RepForm:
    """A form on a sum of copies of the simple at vertex k."""
    i = spec.index(k)
    s = qc.simple(spec, k)
    if spec.sign(i) == 1:
        mult = mult or rng.randint(1, 2)
        entries = [Fraction(rng.choice([1, -1, 2, -2, 3, -3, 5, 6, 7, 10])) for _ in range(mult)]
        beta = rl.diag(entries)
    else:
        mult = 2 * (mult or 1)
        beta = _symplectic(mult // 2)
    r = s
    for _ in range(mult - 1):
        r = qc.direct_sum(r, s)
    return RepForm(r, tuple(beta if j == i else rl.zeros(0, 0) for j in range(spec.n)))


def _block(rng, spec: QuiverSpec) -> RepForm:
    how = rng.choice(["simple", "simple", "dual_sum", "midext", "midext", "cs2"])
    if how == "simple":
        return simple_form(rng, spec, spec.label(rng.randrange(spec.n)))
    if how == "cs2" and spec == QuiverSpec("rank", 3):
        f = catalog.cs2_form()
        lam = rng.choice([1, -1, 2, 3, -5])
        return RepForm(f.rep, tuple(lam * b for b in f.beta))
    if how == "dual_sum":
        return dual_sum_form(rng, spec, spec.n)
    l = rng.randint(1, spec.n)
    base = dual_sum_form(rng, spec, l, max_dim=2)
    return sf.j_midext_form(base, spec.n) if l < spec.n else base


def dual_sum_form(rng, spec: QuiverSpec, l: int, max_dim: int = 2) -> RepForm:
    """A generic nondegenerate form on a + D(a) for random a on the first l vertices."""
    for _ in range(20):
        a = rep(rng, spec, m=l, depth=1, max_dim=max_dim)
        h = qc.hyperbolic_form(a)
        g = _combine(rng, h.rep, qc.form_space(h.rep))
        if g.is_nondegenerate():
            return g
    return h


def _combine(rng, r: QuiverRep, forms, h: int = 3) -> RepForm:
    coeffs = [rng.randint(-h, h) for _ in forms]
    beta = [sum((c * g.beta[i] for c, g in zip(coeffs, forms)), rl.zeros(d, d)) for i, d in enumerate(r.dims)]
    return RepForm(r, tuple(beta))


def height(x: Fraction) -> int:
    x = Fraction(x)
    return max(abs(x.numerator), x.denominator)


def form(rng: random.Random, spec: QuiverSpec, max_dim: int = 4, max_height: int | None = None,
         generic: float = 0.5) -> RepForm:
    """A random nondegenerate form on a random self-dual representation."""
    for _ in range(200):
        blocks = [_block(rng, spec) for _ in range(rng.randint(1, 3))]
        f = blocks[0]
        for b in blocks[1:]:
            f = qc.direct_sum_forms(f, b)
        if max(f.rep.dims) > max_dim:
            continue
        if rng.random() < generic:
            forms = qc.form_space(f.rep)
            g = _combine(rng, f.rep, forms)
            if g.is_nondegenerate():
                f = g
        if max_height is not None and any(height(x) > max_height for b in f.beta for x in b.flat):
            continue
        if f.is_nondegenerate():
            return f
    raise RuntimeError("could not generate a nondegenerate form")


def exact_pair(rng: random.Random, f: RepForm):
    """A sequence a -> b -> c exact at b, b the representation of f."""
    b = f.rep
    seed = [rl.zero(d) for d in b.dims]
    for i, d in enumerate(b.dims):
        if d and rng.random() < 0.5:
            seed[i] = rl.span(int_mat(rng, d, rng.randint(1, d)))
    spaces = qc.generated_subrep(b, seed)
    inc = qc.subrep(b, spaces)
    proj = qc.quotient(b, spaces)
    how = rng.choice(["plain", "pre", "post"])
    if how == "pre":
        # precompose with an epimorphism onto the subobject
        extra = qc.simple(b.spec, b.spec.label(rng.randrange(b.m)))
        src = qc.direct_sum(inc.source, extra)
        maps = tuple(rl.hstack([m, rl.zeros(m.shape[0], e)]) for m, e in zip(inc.maps, extra.dims))
        return qc.RepMor(src, b, maps), proj
    if how == "post":
        # postcompose with a monomorphism out of the quotient
        extra = qc.simple(b.spec, b.spec.label(rng.randrange(b.m)))
        tgt = qc.direct_sum(proj.target, extra)
        maps = tuple(rl.vstack([m, rl.zeros(e, m.shape[1])]) for m, e in zip(proj.maps, extra.dims))
        return inc, qc.RepMor(b, tgt, maps)
    return inc, proj


def local_form(rng: random.Random, max_dim: int = 4, max_index: int = 3) -> gc.GlueForm:
    """A nondegenerate antisymmetric form on a random unipotent local datum."""
    spec = QuiverSpec.disc()
    for _ in range(200):
        blocks = []
        for _ in range(rng.randint(1, 2)):
            if rng.random() < 0.3:
                blocks.append(catalog.ie1_local_form())
                continue
            d = rng.randint(1, 2)
            a = gc.LocalDatum(d, nilpotent(rng, d, max_index))
            blocks.append(qc.hyperbolic_form(a.to_rep()))
        r = blocks[0].rep
        for b in blocks[1:]:
            r = qc.direct_sum(r, b.rep)
        if r.dims[0] > max_dim:
            continue
        forms = qc.form_space(r)
        g = _combine(rng, r, forms)
        if g.is_nondegenerate() and rl.nilpotency_index(g.rep.N(0)) <= max_index:
            return gc.GlueForm.from_repform(g)
    raise RuntimeError("could not generate a local form")
