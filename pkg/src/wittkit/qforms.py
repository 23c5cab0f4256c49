"""Epsilon-symmetric bilinear forms over Q and their Witt classes.

A form is a Gram matrix G with G^T = eps * G, possibly degenerate.  Witt
classes of symmetric forms are decided through the classical complete
invariants of the anisotropic kernel: dimension, signature, square-free
discriminant and the Hasse symbols at the finitely many places where they
can be nontrivial.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np
from sympy import factorint, isprime, symbols
from sympy.solvers.diophantine.diophantine import diop_ternary_quadratic_normal

from . import ratlin as rl
from .ratlin import DimensionError, Subspace

INF = "inf"


class FormError(ValueError):
    """A form-level precondition failed (e.g. a subspace is not isotropic)."""


class SearchExhausted(RuntimeError):
    """Isotropy was certified but the bounded search did not reach a vector."""


@dataclass(frozen=True, eq=False)
class EpsForm:
    gram: np.ndarray
    eps: int = 1

    def __post_init__(self):
        g = rl.mat(self.gram)
        if g.shape[0] != g.shape[1]:
            raise DimensionError(f"Gram matrix must be square, got {g.shape}")
        if self.eps not in (1, -1):
            raise ValueError(f"eps must be +1 or -1, got {self.eps}")
        if not rl.equal(g.T, self.eps * g):
            raise FormError(f"Gram matrix is not {'anti-' if self.eps < 0 else ''}symmetric")
        g.flags.writeable = False
        object.__setattr__(self, "gram", g)

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, EpsForm):
            return NotImplemented
        return self.eps == other.eps and rl.equal(self.gram, other.gram)

    def __hash__(self) -> int:
        return hash((self.eps, tuple(self.gram.flat)))

    def __neg__(self) -> EpsForm:
        return EpsForm(-self.gram, self.eps)

    def __repr__(self) -> str:
        rows = "; ".join(" ".join(rl.rat_to_str(x) for x in r) for r in self.gram)
        return f"EpsForm(eps={self.eps:+d}, [{rows}])"

    def is_zero(self) -> bool:
        return rl.is_zero(self.gram)

    def is_nondegenerate(self) -> bool:
        return rl.rank(self.gram) == self.dim

    def to_json(self) -> dict:
        return {"eps": self.eps, "gram": rl.mat_to_json(self.gram)}

    @classmethod
    def from_json(cls, d: dict) -> EpsForm:
        g = d["gram"]
        return cls(rl.mat_from_json(g, shape=(len(g), len(g))), int(d["eps"]))


def diagonal(entries, eps: int = 1) -> EpsForm:
    return EpsForm(rl.diag(entries), eps)


def zero_form(n: int, eps: int = 1) -> EpsForm:
    return EpsForm(rl.zeros(n, n), eps)


def orthogonal_sum(*forms: EpsForm) -> EpsForm:
    eps = {f.eps for f in forms}
    if len(eps) > 1:
        raise FormError("cannot add forms of different symmetry")
    return EpsForm(rl.block_diag(*(f.gram for f in forms)), eps.pop())


def hyperbolic(eps: int = 1) -> EpsForm:
    return EpsForm(rl.mat([[0, 1], [eps, 0]]), eps)


def pairing(f: EpsForm, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return rl.mul(u.T, f.gram, v)


# degenerate-form calculus

def radical(f: EpsForm) -> Subspace:
    return rl.kernel(f.gram)


def _check(f: EpsForm, s: Subspace):
    if s.ambient_dim != f.dim:
        raise DimensionError(f"subspace ambient {s.ambient_dim} does not match form dim {f.dim}")


def restrict(f: EpsForm, s: Subspace) -> EpsForm:
    _check(f, s)
    return EpsForm(rl.mul(s.basis.T, f.gram, s.basis), f.eps)


def restrict_to_basis(f: EpsForm, basis: np.ndarray) -> EpsForm:
    return EpsForm(rl.mul(basis.T, f.gram, basis), f.eps)


def orthogonal_complement(f: EpsForm, s: Subspace) -> Subspace:
    _check(f, s)
    return rl.kernel(rl.mul(s.basis.T, f.gram))


def is_isotropic(f: EpsForm, s: Subspace) -> bool:
    return restrict(f, s).is_zero()


@dataclass(frozen=True)
class IsotropicReduction:
    """The induced form on perp/s with the maps that realize the quotient.

    ``quotient`` sends coordinates in the canonical basis of ``perp`` onto
    the reduced space and has kernel s; ``lift`` is a section of it written
    in ambient coordinates.
    """

    form: EpsForm
    perp: Subspace
    quotient: np.ndarray
    lift: np.ndarray

    def project(self, v: np.ndarray) -> np.ndarray:
        """Image in the reduced space of ambient vectors lying in perp."""
        return rl.mul(self.quotient, self.perp.coords(v))


def isotropic_reduce(f: EpsForm, s: Subspace) -> IsotropicReduction:
    _check(f, s)
    if not is_isotropic(f, s):
        raise FormError("subspace is not isotropic for the form")
    perp = orthogonal_complement(f, s)
    inner = rl.span(perp.coords(s.basis)) if s.dim else rl.zero(perp.dim)
    q = rl.quotient_map(perp.dim, inner)
    sec = rl.section(perp.dim, inner)
    lift = rl.mul(perp.basis, sec)
    return IsotropicReduction(restrict_to_basis(f, lift), perp, q, lift)


def nondegenerate_part(f: EpsForm) -> IsotropicReduction:
    """Reduction by the radical, which is always isotropic."""
    return isotropic_reduce(f, radical(f))


# diagonalization

def diagonalize(f: EpsForm) -> tuple[np.ndarray, list[Fraction]]:
    """Basis P (columns) with P^T G P diagonal, for symmetric f.

    Gram-Schmidt against the first remaining basis vector of nonzero norm;
    when every norm vanishes but the form does not, the first pair with a
    nonzero product is merged.  Zero diagonal entries span the radical.
    """
    if f.eps != 1:
        raise FormError("only symmetric forms can be diagonalized")
    G = f.gram
    rest = [rl.col(r) for r in rl.eye(f.dim)]
    chosen: list[np.ndarray] = []
    diag: list[Fraction] = []
    while rest:
        norms = [pairing(f, b, b)[0, 0] for b in rest]
        i = next((i for i, x in enumerate(norms) if x != 0), None)
        if i is None:
            pair = next(((i, j) for i, j in itertools.combinations(range(len(rest)), 2)
                         if pairing(f, rest[i], rest[j])[0, 0] != 0), None)
            if pair is None:
                break
            i, j = pair
            rest[i] = rest[i] + rest[j]
        u = rest.pop(i)
        nu = pairing(f, u, u)[0, 0]
        gu = rl.mul(u.T, G)
        rest = [b - (rl.mul(gu, b)[0, 0] / nu) * u for b in rest]
        chosen.append(u)
        diag.append(nu)
    chosen.extend(rest)
    diag.extend([Fraction(0)] * len(rest))
    P = rl.hstack(chosen, rows=f.dim) if chosen else rl.zeros(f.dim, 0)
    return P, diag


# number theory

def squarefree(x) -> int:
    """Square-free integer in the square class of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("zero has no square class")
    n = abs(x.numerator * x.denominator)
    core = 1
    for p, e in factorint(n).items():
        if e % 2:
            core *= p
    return core if x > 0 else -core


def _int_class(x) -> int:
    x = Fraction(x)
    return x.numerator * x.denominator


def _valuation(n: int, p: int) -> tuple[int, int]:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def _place(place):
    if place == INF or (isinstance(place, float) and math.isinf(place)):
        return INF
    p = int(place)
    if not isprime(p):
        raise ValueError(f"{place!r} is not a prime or 'inf'")
    return p


def hilbert_symbol(a, b, place) -> int:
    """(a, b) at a prime p or at the real place 'inf'."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol is undefined for zero arguments")
    place = _place(place)
    if place == INF:
        return -1 if a < 0 and b < 0 else 1
    p = place
    al, u = _valuation(_int_class(a), p)
    be, v = _valuation(_int_class(b), p)
    if p == 2:
        def e(t):
            return ((t - 1) // 2) % 2

        def w(t):
            return ((t * t - 1) // 8) % 2

        s = e(u) * e(v) + al * w(v) + be * w(u)
        return -1 if s % 2 else 1
    s = 1
    if (al * be) % 2 and (p - 1) // 2 % 2:
        s = -s
    if be % 2 and pow(u % p, (p - 1) // 2, p) != 1:
        s = -s
    if al % 2 and pow(v % p, (p - 1) // 2, p) != 1:
        s = -s
    return s


def relevant_places(entries) -> list:
    """The real place, 2, and odd primes dividing numerators or denominators."""
    primes = {2}
    for x in entries:
        x = Fraction(x)
        for n in (x.numerator, x.denominator):
            if n:
                primes.update(factorint(abs(n)))
    return [INF] + sorted(primes)


def hasse_symbol(entries, place) -> int:
    out = 1
    for a, b in itertools.combinations(entries, 2):
        out *= hilbert_symbol(a, b, place)
    return out


def is_local_square(d: int, place) -> bool:
    """Whether a square-free integer d is a square in Q_place."""
    if place == INF:
        return d > 0
    if place == 2:
        return d % 8 == 1
    if d % place == 0:
        return False
    return pow(d % place, (place - 1) // 2, place) == 1


def locally_isotropic(entries, place) -> bool:
    """Whether the diagonal form <entries> represents 0 over Q_place."""
    n = len(entries)
    d = squarefree(reduce(lambda x, y: x * y, entries, Fraction(1)))
    eps = hasse_symbol(entries, place)
    if n == 1:
        return False
    if n == 2:
        return is_local_square(squarefree(-d), place)
    if n == 3:
        return hilbert_symbol(-1, -d, place) == eps
    if n == 4:
        return not is_local_square(d, place) or eps == hilbert_symbol(-1, -1, place)
    return True


# isotropic vectors

@dataclass(frozen=True)
class Anisotropic:
    """Certificate that a nondegenerate symmetric form has no isotropic vector."""

    reason: str
    place: object = None


def max_doublings() -> int:
    return int(os.environ.get("WITTKIT_MAX_HEIGHT", "10"))


def isotropy_certificate(entries) -> Anisotropic | None:
    """None when <entries> is isotropic over Q, else a certificate."""
    n = len(entries)
    if n == 0:
        return Anisotropic("zero-dimensional")
    if n == 1:
        return Anisotropic("one-dimensional")
    definite = all(x > 0 for x in entries) or all(x < 0 for x in entries)
    if definite:
        return Anisotropic("definite", INF)
    if n >= 5:
        return None
    for place in relevant_places(entries):
        if not locally_isotropic(entries, place):
            return Anisotropic("locally anisotropic", place)
    return None


def _search_diagonal(coeffs: list[int], height: int) -> list[int] | None:
    """Integer x with sum c_i x_i^2 = 0 and |x_i| <= height for i < n-1."""
    n = len(coeffs)
    last = coeffs[-1]
    head = coeffs[:-1]
    ranges = [range(0, height + 1)] + [range(-height, height + 1)] * (n - 2)
    for xs in itertools.product(*ranges):
        if not any(xs):
            continue
        t = -_weighted_squares(head, xs)
        if t % last:
            continue
        sq = t // last
        if sq < 0:
            continue
        r = math.isqrt(sq)
        if r * r == sq:
            return list(xs) + [r]
    return None


def _isotropic_subset(d) -> list[int]:
    """Smallest coordinate subset whose diagonal subform is isotropic."""
    for k in range(2, min(len(d), 5) + 1):
        for idx in itertools.combinations(range(len(d)), k):
            if isotropy_certificate([d[i] for i in idx]) is None:
                return list(idx)
    raise FormError("no isotropic subform found")


def _weighted_squares(c, xs) -> int:
    return sum(ci * x * x for ci, x in zip(c, xs))


def _ternary(c: list[int]) -> list[Fraction]:
    """Zero of an isotropic <c0, c1, c2> with square-free entries, by Legendre descent."""
    c = list(c)
    scale = [Fraction(1)] * 3
    # sympy wants pairwise coprime coefficients: move common factors across
    while True:
        for i, j in ((0, 1), (0, 2), (1, 2)):
            g = math.gcd(c[i], c[j])
            if g > 1:
                k = 3 - i - j
                c[i] //= g
                c[j] //= g
                scale[i] /= g
                scale[j] /= g
                core = squarefree(c[k] * g)
                scale[k] /= math.isqrt((c[k] * g) // core)
                c[k] = core
                break
        else:
            break
    x, y, z = symbols("x y z", integer=True)
    sol = diop_ternary_quadratic_normal(c[0] * x**2 + c[1] * y**2 + c[2] * z**2)
    if sol[0] is None:
        raise FormError(f"no rational zero found for <{c[0]}, {c[1]}, {c[2]}>")
    return [Fraction(int(v)) * f for v, f in zip(sol, scale)]


def _square_class(t: int, place) -> tuple:
    if place == INF:
        return (t > 0,)
    v, u = _valuation(t, place)
    if place == 2:
        return (v % 2, u % 8)
    return (v % 2, pow(u % place, (place - 1) // 2, place) == 1)


def _class_reps(place) -> list[int]:
    if place == INF:
        return [1, -1]
    if place == 2:
        return [u * e for u in (1, 3, 5, 7) for e in (1, 2)]
    n = next(x for x in range(2, place) if pow(x, (place - 1) // 2, place) != 1)
    return [1, n, place, n * place]


def _split_values(head: list[int], rest: list[int], bound: int):
    """Square-free t with <head, -t> and <t, rest> both isotropic everywhere.

    t runs over +-(product of bad primes) * q for q = 1 or a prime below
    bound; the local conditions at each bad place are tabulated once.
    """
    places = relevant_places(head + rest)
    bad = [p for p in places if p != INF]
    allowed = {}
    for place in places:
        allowed[place] = {_square_class(r, place) for r in _class_reps(place)
                          if locally_isotropic(head + [-r], place) and locally_isotropic([r] + rest, place)}
    h = -head[0] * head[1]
    r = -rest[0] * rest[1] if len(rest) == 2 else None
    extra = [1]
    for q in range(3, bound + 1):
        if q in bad or not isprime(q):
            continue
        # at a new prime q | t both halves reduce to binary forms mod q
        if pow(h % q, (q - 1) // 2, q) != 1 or (r is not None and pow(r % q, (q - 1) // 2, q) != 1):
            continue
        extra.append(q)
    for q in extra:
        for k in range(len(bad) + 1):
            for ps in itertools.combinations(bad, k):
                for t in (q * math.prod(ps), -q * math.prod(ps)):
                    if all(_square_class(t, p) in allowed[p] for p in places):
                        yield t


def _solve_core(coeffs: list[int]) -> list[Fraction]:
    """Zero of an isotropic diagonal integral form with no isotropic proper subform."""
    n = len(coeffs)
    height = 1
    tried = set()
    for _ in range(max_doublings() + 1):
        if n <= 3:
            xs = _search_diagonal(coeffs, min(height, 8))
            if xs is not None:
                return [Fraction(x) for x in xs]
            if height >= 8:
                return _ternary(coeffs)
        else:
            # c0 x0^2 + c1 x1^2 = t = -(the rest), for t found among local square classes
            head, rest = coeffs[:2], coeffs[2:]
            for t in _split_values(head, rest, 4 * height):
                if t in tried:
                    continue
                tried.add(t)
                if isotropy_certificate(head + [-t]) is not None:
                    continue
                if isotropy_certificate([t] + rest) is not None:
                    continue
                x0, x1, u = _ternary(head + [-t])
                tail = solve_diagonal([Fraction(t)] + [Fraction(c) for c in rest])
                v = tail[0]
                return [x0 / u * v, x1 / u * v] + tail[1:]
        height *= 2
    raise SearchExhausted(f"no isotropic vector up to height {height // 2}")


def solve_diagonal(d: list[Fraction]) -> list[Fraction]:
    """Nonzero x with sum d_i x_i^2 = 0 for a certified isotropic nondegenerate diagonal."""
    idx = _isotropic_subset(d)
    sub = [d[i] for i in idx]
    core = [squarefree(x) for x in sub]
    # d_i = core_i * r_i^2, so x_i / r_i solves the original diagonal equation
    scale = [_sqrt_rational(x / c) for x, c in zip(sub, core)]
    order = sorted(range(len(core)), key=lambda i: (abs(core[i]), i))
    xs = _solve_core([core[i] for i in order])
    y = [Fraction(0)] * len(d)
    for i, x in zip(order, xs):
        y[idx[i]] = x / scale[i]
    return y


def find_isotropic_vector(f: EpsForm) -> np.ndarray | Anisotropic:
    """A nonzero v with v^T G v = 0, or a certificate that none exists.

    f must be a nondegenerate symmetric form.  The search runs over the
    square-free integral diagonal model with a height bound doubling from 1;
    WITTKIT_MAX_HEIGHT sets the number of doublings.  In four or five
    variables the enumeration picks a value t of the first two coordinates
    that the rest also represents, which drops the dimension by one; ternary
    forms not solved at small height go to Legendre descent.
    """
    if f.eps != 1:
        raise FormError("isotropic vector search is for symmetric forms")
    if not f.is_nondegenerate():
        raise FormError("form must be nondegenerate")
    P, d = diagonalize(f)
    cert = isotropy_certificate(d)
    if cert is not None:
        return cert
    return rl.mul(P, rl.col(solve_diagonal(d)))


def _sqrt_rational(x: Fraction) -> Fraction:
    n, m = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n != x.numerator or m * m != x.denominator:
        raise ValueError(f"{x} is not a rational square")
    return Fraction(n, m)


# maximal isotropic subspaces

def _split_plane(f: EpsForm, basis: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hyperbolic partner of an isotropic v inside span(basis); returns (v, complement basis)."""
    g = rl.mul(v.T, f.gram, basis)
    j = next(j for j in range(basis.shape[1]) if g[0, j] != 0)
    w = basis[:, [j]] / g[0, j]
    plane = rl.hstack([v, w])
    comp = rl.kernel(rl.mul(plane.T, f.gram, basis))
    return v, rl.mul(basis, comp.basis)


def max_isotropic(f: EpsForm) -> Subspace:
    """Radical plus one isotropic line from each split hyperbolic plane."""
    rad = radical(f)
    basis = rl.section(f.dim, rad)
    found = [rad.basis]
    while basis.shape[1]:
        local = restrict_to_basis(f, basis)
        if f.eps == -1:
            v = basis[:, [0]]
        else:
            hit = find_isotropic_vector(local)
            if isinstance(hit, Anisotropic):
                break
            v = rl.mul(basis, hit)
        v, basis = _split_plane(f, basis, v)
        found.append(v)
    return rl.span(rl.hstack(found, rows=f.dim))


def anisotropic_kernel(f: EpsForm) -> EpsForm:
    return isotropic_reduce(f, max_isotropic(f)).form


def is_anisotropic(f: EpsForm) -> bool:
    return max_isotropic(f).dim == 0


# Witt invariants

def _place_key(p):
    return (0, 0) if p == INF else (1, p)


@dataclass(frozen=True)
class WittInvariant:
    """Complete invariant of a Witt class over Q.

    ``hasse`` lists the places where the Hasse symbol of the anisotropic
    kernel is -1, real place first then primes ascending.
    """

    eps: int
    anis_dim: int = 0
    signature: int = 0
    disc: int = 1
    hasse: tuple = ()

    @classmethod
    def trivial(cls, eps: int = 1) -> WittInvariant:
        return cls(eps)

    @property
    def is_trivial(self) -> bool:
        return self.anis_dim == 0

    def to_json(self) -> dict:
        return {
            "eps": self.eps,
            "anis_dim": self.anis_dim,
            "signature": self.signature,
            "disc": self.disc,
            "hasse": {str(p): -1 for p in self.hasse},
        }

    @classmethod
    def from_json(cls, d: dict) -> WittInvariant:
        places = [INF if k == INF else int(k) for k, v in d.get("hasse", {}).items() if int(v) == -1]
        return cls(int(d["eps"]), int(d["anis_dim"]), int(d["signature"]), int(d["disc"]),
                   tuple(sorted(places, key=_place_key)))

    def __str__(self) -> str:
        if self.eps == -1 or self.anis_dim == 0:
            return "0"
        h = ",".join(str(p) for p in self.hasse)
        return f"W(dim={self.anis_dim}, sig={self.signature}, disc={self.disc}, hasse=[{h}])"


def invariants_of_diagonal(entries) -> WittInvariant:
    """Invariants read off an anisotropic diagonal form."""
    entries = [Fraction(x) for x in entries]
    sig = sum(1 if x > 0 else -1 for x in entries)
    disc = squarefree(reduce(lambda x, y: x * y, entries, Fraction(1)))
    places = relevant_places(entries)
    hasse = tuple(p for p in places if hasse_symbol(entries, p) == -1)
    return WittInvariant(1, len(entries), sig, disc, hasse)


def witt_invariants(f: EpsForm) -> WittInvariant:
    if f.eps == -1:
        return WittInvariant.trivial(-1)
    kernel = anisotropic_kernel(f)
    _, d = diagonalize(kernel)
    return invariants_of_diagonal(d)


def _same_eps(f: EpsForm, g: EpsForm):
    if f.eps != g.eps:
        raise FormError(f"symmetry mismatch: {f.eps} vs {g.eps}")


def witt_equal(f: EpsForm, g: EpsForm) -> bool:
    _same_eps(f, g)
    return witt_invariants(f) == witt_invariants(g)


def witt_add(f: EpsForm, g: EpsForm) -> WittInvariant:
    _same_eps(f, g)
    return witt_invariants(orthogonal_sum(f, g))
