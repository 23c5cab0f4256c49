"""Representations of the rank, Schubert and disc quivers with duality.

Vertices are stored 0-based internally.  Public vertex labels are 1..n for
the rank and Schubert quivers and 0 (nearby cycles) / 1 (vanishing cycles)
for the disc quiver.  ``c[k]`` maps vertex k to k+1 and ``V[k]`` maps k+1
back to k.

A representation may live on an open union of strata, i.e. on the first
m <= n vertices; duality signs always refer to the ambient n.  Such a
truncated representation can carry ``last_N``, the monodromy logarithm at
its last vertex, which is not recoverable from the arrows when m = 1.

Forms are stored as morphisms ``beta[k]: A_k -> A_k^*``.  The pairing they
define is b(x, y) = (beta x)(y), whose Gram matrix is ``beta[k].T``.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import qforms as qf
from . import ratlin as rl
from .qforms import EpsForm
from .ratlin import DimensionError, Subspace

KINDS = ("rank", "schubert", "disc")


class RepError(ValueError):
    """Invalid representation, morphism or form data."""


class OrderError(ValueError):
    """A stratum ordering that is not a linear extension of the closure order."""


@dataclass(frozen=True)
class QuiverSpec:
    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RepError(f"unknown quiver kind {self.kind!r}")
        if self.kind == "disc" and self.n != 2:
            raise RepError("the disc quiver has exactly two vertices")
        if self.n < 1:
            raise RepError("a quiver needs at least one vertex")

    @classmethod
    def disc(cls) -> QuiverSpec:
        return cls("disc", 2)

    @property
    def base(self) -> int:
        return 0 if self.kind == "disc" else 1

    def sign(self, i: int) -> int:
        """Biduality sign at 0-based vertex i."""
        return -1 if (self.n - 1 - i) % 2 else 1

    def label(self, i: int) -> int:
        return i + self.base

    def index(self, label: int) -> int:
        i = int(label) - self.base
        if not 0 <= i < self.n:
            raise RepError(f"vertex {label} out of range for {self.kind} quiver with n={self.n}")
        return i

    def labels(self) -> list[int]:
        return [self.label(i) for i in range(self.n)]

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n}


def closure_relations(spec: QuiverSpec) -> set[tuple[int, int]]:
    """Pairs (i, j) of 0-based vertices with S_j in the closure of S_i.

    For all three shapes the strata are linearly ordered by closure, open
    stratum first.
    """
    return {(i, j) for i in range(spec.n) for j in range(i + 1, spec.n)}


def linear_extensions(spec: QuiverSpec) -> list[tuple[int, ...]]:
    """All admissible processing orders, as tuples of vertex labels."""
    rel = closure_relations(spec)
    out = []
    for perm in itertools.permutations(range(spec.n)):
        pos = {v: p for p, v in enumerate(perm)}
        if all(pos[i] < pos[j] for i, j in rel):
            out.append(tuple(spec.label(i) for i in perm))
    return out


def check_order(spec: QuiverSpec, order: Sequence[int] | None) -> list[int]:
    """Validate a label ordering and return it as 0-based indices."""
    if order is None:
        return list(range(spec.n))
    order = tuple(int(x) for x in order)
    if sorted(order) != spec.labels():
        raise OrderError(f"order {order} is not a permutation of the vertices {spec.labels()}")
    if order not in linear_extensions(spec):
        raise OrderError(f"order {order} is not a linear extension of the closure order")
    return [spec.index(x) for x in order]


@dataclass(frozen=True)
class Violation:
    relation: str
    vertex: int
    detail: str = ""

    def to_json(self) -> dict:
        return {"relation": self.relation, "vertex": self.vertex, "detail": self.detail}


def _frozen(m) -> np.ndarray:
    m = rl.mat(m)
    m.flags.writeable = False
    return m


@dataclass(frozen=True, eq=False)
class QuiverRep:
    spec: QuiverSpec
    dims: tuple
    c: tuple
    V: tuple
    last_N: np.ndarray | None = None

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        m = len(dims)
        if not 1 <= m <= self.spec.n:
            raise DimensionError(f"{m} vertices given for a quiver with n={self.spec.n}")
        if any(d < 0 for d in dims):
            raise DimensionError("negative vertex dimension")
        if len(self.c) != m - 1 or len(self.V) != m - 1:
            raise DimensionError(f"expected {m - 1} arrows in each direction")
        c = tuple(_frozen(x) for x in self.c)
        V = tuple(_frozen(x) for x in self.V)
        for k in range(m - 1):
            if c[k].shape != (dims[k + 1], dims[k]):
                raise DimensionError(f"c at vertex {self.spec.label(k)} has shape {c[k].shape}")
            if V[k].shape != (dims[k], dims[k + 1]):
                raise DimensionError(f"V at vertex {self.spec.label(k)} has shape {V[k].shape}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "V", V)
        if self.last_N is not None:
            N = _frozen(self.last_N)
            if N.shape != (dims[-1], dims[-1]):
                raise DimensionError("last_N does not match the last vertex")
            object.__setattr__(self, "last_N", N)

    @property
    def m(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def N(self, i: int) -> np.ndarray:
        """Monodromy logarithm at 0-based vertex i."""
        if i < self.m - 1:
            return rl.mul(self.V[i], self.c[i])
        if self.last_N is not None:
            return self.last_N
        if i == 0:
            return rl.zeros(self.dims[0], self.dims[0])
        return rl.mul(self.c[i - 1], self.V[i - 1])

    def arrows(self):
        """(source, target, matrix) for every arrow, plus the stored last_N loop."""
        for k in range(self.m - 1):
            yield k, k + 1, self.c[k]
            yield k + 1, k, self.V[k]
        if self.last_N is not None:
            yield self.m - 1, self.m - 1, self.last_N

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuiverRep):
            return NotImplemented
        same_N = (self.last_N is None) == (other.last_N is None) and (
            self.last_N is None or rl.equal(self.last_N, other.last_N))
        return (self.spec == other.spec and self.dims == other.dims and same_N
                and all(rl.equal(a, b) for a, b in zip(self.c + self.V, other.c + other.V)))

    __hash__ = None

    def __repr__(self) -> str:
        return f"QuiverRep({self.spec.kind}, n={self.spec.n}, dims={self.dims})"

    def to_json(self) -> dict:
        d = {"spec": self.spec.to_json(), "dims": list(self.dims),
             "c": [rl.mat_to_json(x) for x in self.c],
             "V": [rl.mat_to_json(x) for x in self.V]}
        if self.last_N is not None:
            d["last_N"] = rl.mat_to_json(self.last_N)
        return d

    @classmethod
    def from_json(cls, d: dict) -> QuiverRep:
        spec = QuiverSpec(d["spec"]["kind"], int(d["spec"]["n"]))
        dims = [int(x) for x in d["dims"]]
        if len(d.get("c", [])) != len(dims) - 1 or len(d.get("V", [])) != len(dims) - 1:
            raise DimensionError(f"expected {len(dims) - 1} arrows in each direction")
        c = [rl.mat_from_json(x, (dims[k + 1], dims[k])) for k, x in enumerate(d["c"])]
        V = [rl.mat_from_json(x, (dims[k], dims[k + 1])) for k, x in enumerate(d["V"])]
        N = d.get("last_N")
        if N is not None:
            N = rl.mat_from_json(N, (dims[-1], dims[-1]))
        return cls(spec, tuple(dims), tuple(c), tuple(V), N)


def make_rep(spec: QuiverSpec, dims, c, V, last_N=None) -> QuiverRep:
    return QuiverRep(spec, tuple(dims), tuple(rl.mat(x, (dims[k + 1], dims[k])) for k, x in enumerate(c)),
                     tuple(rl.mat(x, (dims[k], dims[k + 1])) for k, x in enumerate(V)),
                     None if last_N is None else rl.mat(last_N, (dims[-1], dims[-1])))


def zero_rep(spec: QuiverSpec, m: int | None = None) -> QuiverRep:
    m = spec.n if m is None else m
    return QuiverRep(spec, (0,) * m, (rl.zeros(0, 0),) * (m - 1), (rl.zeros(0, 0),) * (m - 1))


def simple(spec: QuiverSpec, k: int, m: int | None = None) -> QuiverRep:
    """One-dimensional at vertex label k, zero elsewhere, all arrows zero."""
    i = spec.index(k)
    m = spec.n if m is None else m
    dims = [1 if j == i else 0 for j in range(m)]
    return QuiverRep(spec, tuple(dims), tuple(rl.zeros(dims[j + 1], dims[j]) for j in range(m - 1)),
                     tuple(rl.zeros(dims[j], dims[j + 1]) for j in range(m - 1)))


def composition_factors(rep: QuiverRep) -> Counter:
    return Counter({rep.spec.label(i): d for i, d in enumerate(rep.dims) if d})


@dataclass(frozen=True, eq=False)
class RepMor:
    source: QuiverRep
    target: QuiverRep
    maps: tuple

    def __post_init__(self):
        if self.source.m != self.target.m or self.source.spec != self.target.spec:
            raise DimensionError("morphism between representations of different quivers")
        maps = tuple(_frozen(x) for x in self.maps)
        if len(maps) != self.source.m:
            raise DimensionError("one matrix per vertex is required")
        for i, f in enumerate(maps):
            if f.shape != (self.target.dims[i], self.source.dims[i]):
                raise DimensionError(f"map at vertex {self.source.spec.label(i)} has shape {f.shape}")
        object.__setattr__(self, "maps", maps)

    def is_mono(self) -> bool:
        return all(rl.rank(f) == f.shape[1] for f in self.maps)

    def is_epi(self) -> bool:
        return all(rl.rank(f) == f.shape[0] for f in self.maps)

    def is_iso(self) -> bool:
        return self.is_mono() and self.is_epi()

    def is_zero(self) -> bool:
        return all(rl.is_zero(f) for f in self.maps)


def identity(rep: QuiverRep) -> RepMor:
    return RepMor(rep, rep, tuple(rl.eye(d) for d in rep.dims))


def zero_mor(a: QuiverRep, b: QuiverRep) -> RepMor:
    return RepMor(a, b, tuple(rl.zeros(y, x) for x, y in zip(a.dims, b.dims)))


def compose(g: RepMor, f: RepMor) -> RepMor:
    """g after f."""
    return RepMor(f.source, g.target, tuple(rl.mul(b, a) for a, b in zip(f.maps, g.maps)))


def mor_equal(f: RepMor, g: RepMor) -> bool:
    return all(rl.equal(a, b) for a, b in zip(f.maps, g.maps))


# validation

def validate(rep: QuiverRep) -> list[Violation]:
    out: list[Violation] = []
    lab = rep.spec.label
    c, V, m = rep.c, rep.V, rep.m
    if rep.spec.kind in ("rank", "schubert"):
        if m >= 2 and not rl.is_zero(rl.mul(V[0], c[0])):
            out.append(Violation("V1c1 = 0", lab(0), "V_1 c_1 is nonzero"))
        for k in range(m - 2):
            if not rl.equal(rl.mul(c[k], V[k]), rl.mul(V[k + 1], c[k + 1])):
                out.append(Violation(f"c{k + 1}V{k + 1} = V{k + 2}c{k + 2}", lab(k + 1),
                                     "commutation relation fails"))
        if rep.spec.kind == "schubert":
            for k in range(1, m - 1):
                if not rl.is_zero(rl.mul(c[k], c[k - 1])):
                    out.append(Violation(f"c{k + 1}c{k} = 0", lab(k), "composite of c arrows is nonzero"))
                if not rl.is_zero(rl.mul(V[k - 1], V[k])):
                    out.append(Violation(f"V{k}V{k + 1} = 0", lab(k), "composite of V arrows is nonzero"))
    if rep.last_N is not None and m >= 2 and rep.spec.kind != "disc":
        if not rl.equal(rep.last_N, rl.mul(c[m - 2], V[m - 2])):
            out.append(Violation("last_N = cV", lab(m - 1), "stored monodromy disagrees with arrows"))
    for i in range(m):
        if not rl.is_nilpotent(rep.N(i)):
            out.append(Violation(f"N{lab(i)} nilpotent", lab(i), "monodromy is not unipotent"))
    return out


def validate_mor(f: RepMor) -> list[Violation]:
    out = []
    a, b = f.source, f.target
    lab = a.spec.label
    for k in range(a.m - 1):
        if not rl.equal(rl.mul(f.maps[k + 1], a.c[k]), rl.mul(b.c[k], f.maps[k])):
            out.append(Violation(f"f{k + 2}c{k + 1} = c{k + 1}f{k + 1}", lab(k), "does not commute with c"))
        if not rl.equal(rl.mul(f.maps[k], a.V[k]), rl.mul(b.V[k], f.maps[k + 1])):
            out.append(Violation(f"f{k + 1}V{k + 1} = V{k + 1}f{k + 2}", lab(k + 1), "does not commute with V"))
    if a.last_N is not None or b.last_N is not None:
        i = a.m - 1
        if not rl.equal(rl.mul(f.maps[i], a.N(i)), rl.mul(b.N(i), f.maps[i])):
            out.append(Violation("fN = Nf", lab(i), "does not commute with the monodromy"))
    return out


@dataclass(frozen=True, eq=False)
class RepForm:
    rep: QuiverRep
    beta: tuple

    def __post_init__(self):
        beta = tuple(_frozen(x) for x in self.beta)
        if len(beta) != self.rep.m:
            raise DimensionError("one form matrix per vertex is required")
        for i, b in enumerate(beta):
            if b.shape != (self.rep.dims[i],) * 2:
                raise DimensionError(f"beta at vertex {self.rep.spec.label(i)} has shape {b.shape}")
        object.__setattr__(self, "beta", beta)

    @property
    def spec(self) -> QuiverSpec:
        return self.rep.spec

    def vertex_form(self, i: int) -> EpsForm:
        """The pairing at 0-based vertex i; its Gram matrix is beta[i] transposed."""
        return EpsForm(self.beta[i].T, self.spec.sign(i))

    def is_nondegenerate(self) -> bool:
        return all(rl.rank(b) == b.shape[0] for b in self.beta)

    def __neg__(self) -> RepForm:
        return RepForm(self.rep, tuple(-b for b in self.beta))

    def to_json(self) -> dict:
        d = self.rep.to_json()
        d["beta"] = [rl.mat_to_json(b) for b in self.beta]
        return d

    @classmethod
    def from_json(cls, d: dict) -> RepForm:
        rep = QuiverRep.from_json(d)
        if len(d.get("beta", [])) != rep.m:
            raise DimensionError("one form matrix per vertex is required")
        return cls(rep, tuple(rl.mat_from_json(b, (rep.dims[i],) * 2) for i, b in enumerate(d["beta"])))


def validate_form(f: RepForm) -> list[Violation]:
    out = validate(f.rep)
    rep, beta, lab = f.rep, f.beta, f.spec.label
    for i, b in enumerate(beta):
        s = f.spec.sign(i)
        if not rl.equal(b.T, s * b):
            kind = "symmetric" if s == 1 else "antisymmetric"
            out.append(Violation(f"beta{lab(i)} {kind}", lab(i), f"form must be {kind} at this vertex"))
    for k in range(rep.m - 1):
        if not rl.equal(rl.mul(beta[k + 1], rep.c[k]), -rl.mul(rep.V[k].T, beta[k])):
            out.append(Violation(f"beta{lab(k + 1)}c{k + 1} = -V{k + 1}^T beta{lab(k)}", lab(k),
                                 "form does not intertwine c with the dual arrow"))
        if not rl.equal(rl.mul(beta[k], rep.V[k]), rl.mul(rep.c[k].T, beta[k + 1])):
            out.append(Violation(f"beta{lab(k)}V{k + 1} = c{k + 1}^T beta{lab(k + 1)}", lab(k + 1),
                                 "form does not intertwine V with the dual arrow"))
    if rep.last_N is not None:
        i = rep.m - 1
        N = rep.N(i)
        if not rl.equal(rl.mul(beta[i], N), -rl.mul(N.T, beta[i])):
            out.append(Violation("beta N = -N^T beta", lab(i), "form does not intertwine the monodromy"))
    return out


# renormalization of the variation arrows

def log_series_factor(n: np.ndarray) -> np.ndarray:
    """f(n) for f(t) = ln(1+t)/t, exact on nilpotent n."""
    k = rl.nilpotency_index(n) if n.shape[0] else 0
    out = rl.zeros(*n.shape)
    p = rl.eye(n.shape[0])
    for j in range(max(k, 1)):
        out = out + Fraction((-1) ** j, j + 1) * p
        p = rl.mul(p, n)
    return out


def exp_nilpotent(n: np.ndarray) -> np.ndarray:
    out = rl.zeros(*n.shape)
    p = rl.eye(n.shape[0])
    j = 0
    fact = 1
    while not rl.is_zero(p):
        out = out + Fraction(1, fact) * p
        j += 1
        fact *= j
        p = rl.mul(p, n)
    return out


def renormalize_variation(rep: QuiverRep) -> QuiverRep:
    """Replace each raw variation arrow v_k by V_k = v_k f(c_k v_k)."""
    V = []
    for k, v in enumerate(rep.V):
        n = rl.mul(rep.c[k], v)
        if not rl.is_nilpotent(n):
            raise RepError(f"c v is not nilpotent at vertex {rep.spec.label(k + 1)}")
        V.append(rl.mul(v, log_series_factor(n)))
    return QuiverRep(rep.spec, rep.dims, rep.c, tuple(V), rep.last_N)


# duality

def dual(rep: QuiverRep) -> QuiverRep:
    N = None if rep.last_N is None else -rep.last_N.T
    return QuiverRep(rep.spec, rep.dims, tuple(-v.T for v in rep.V), tuple(c.T for c in rep.c), N)


def dual_mor(f: RepMor) -> RepMor:
    return RepMor(dual(f.target), dual(f.source), tuple(x.T for x in f.maps))


def biduality(rep: QuiverRep) -> RepMor:
    """chi: rep -> D(D(rep)), the evaluation map twisted by the vertex signs."""
    return RepMor(rep, dual(dual(rep)), tuple(rep.spec.sign(i) * rl.eye(d) for i, d in enumerate(rep.dims)))


def form_as_mor(f: RepForm) -> RepMor:
    return RepMor(f.rep, dual(f.rep), f.beta)


# subobjects and quotients from vertex subspaces

def _spaces_ok(rep: QuiverRep, spaces: Sequence[Subspace]):
    if len(spaces) != rep.m or any(s.ambient_dim != d for s, d in zip(spaces, rep.dims)):
        raise DimensionError("subspaces do not match the representation")


def is_subrep(rep: QuiverRep, spaces: Sequence[Subspace]) -> bool:
    _spaces_ok(rep, spaces)
    return all(spaces[t].contains(rl.mul(a, spaces[s].basis)) for s, t, a in rep.arrows())


def generated_subrep(rep: QuiverRep, spaces: Sequence[Subspace]) -> list[Subspace]:
    """Smallest subrepresentation containing the given subspaces."""
    _spaces_ok(rep, spaces)
    cur = list(spaces)
    changed = True
    while changed:
        changed = False
        for s, t, a in rep.arrows():
            new = rl.sum(cur[t], rl.apply(a, cur[s]))
            if new.dim != cur[t].dim:
                cur[t] = new
                changed = True
    return cur


def max_subrep_within(rep: QuiverRep, spaces: Sequence[Subspace]) -> list[Subspace]:
    """Largest subrepresentation contained in the given subspaces."""
    _spaces_ok(rep, spaces)
    cur = list(spaces)
    changed = True
    while changed:
        changed = False
        for s, t, a in rep.arrows():
            new = rl.intersect(cur[s], rl.preimage(a, cur[t]))
            if new.dim != cur[s].dim:
                cur[s] = new
                changed = True
    return cur


def subrep(rep: QuiverRep, spaces: Sequence[Subspace]) -> RepMor:
    """Inclusion of the subrepresentation spanned by stable vertex subspaces."""
    if not is_subrep(rep, spaces):
        raise RepError("subspaces are not stable under the arrows")
    B = [s.basis for s in spaces]
    c = tuple(spaces[k + 1].coords(rl.mul(rep.c[k], B[k])) for k in range(rep.m - 1))
    V = tuple(spaces[k].coords(rl.mul(rep.V[k], B[k + 1])) for k in range(rep.m - 1))
    N = None
    if rep.last_N is not None:
        N = spaces[-1].coords(rl.mul(rep.last_N, B[-1]))
    sub = QuiverRep(rep.spec, tuple(s.dim for s in spaces), c, V, N)
    return RepMor(sub, rep, tuple(B))


def quotient(rep: QuiverRep, spaces: Sequence[Subspace]) -> RepMor:
    """Projection onto the quotient by stable vertex subspaces."""
    if not is_subrep(rep, spaces):
        raise RepError("subspaces are not stable under the arrows")
    Q = [rl.quotient_map(d, s) for d, s in zip(rep.dims, spaces)]
    S = [rl.section(d, s) for d, s in zip(rep.dims, spaces)]
    c = tuple(rl.mul(Q[k + 1], rep.c[k], S[k]) for k in range(rep.m - 1))
    V = tuple(rl.mul(Q[k], rep.V[k], S[k + 1]) for k in range(rep.m - 1))
    N = None if rep.last_N is None else rl.mul(Q[-1], rep.last_N, S[-1])
    quo = QuiverRep(rep.spec, tuple(q.shape[0] for q in Q), c, V, N)
    return RepMor(rep, quo, tuple(Q))


def image_spaces(f: RepMor) -> list[Subspace]:
    return [rl.image(x) for x in f.maps]


def kernel(f: RepMor) -> RepMor:
    return subrep(f.source, [rl.kernel(x) for x in f.maps])


def image(f: RepMor) -> tuple[RepMor, RepMor]:
    """(source -> image epi, image -> target mono)."""
    inc = subrep(f.target, image_spaces(f))
    sub = inc.source
    epi = RepMor(f.source, sub, tuple(s.coords(x) for s, x in zip(image_spaces(f), f.maps)))
    return epi, inc


def cokernel(f: RepMor) -> RepMor:
    return quotient(f.target, image_spaces(f))


def direct_sum(a: QuiverRep, b: QuiverRep) -> QuiverRep:
    if a.spec != b.spec or a.m != b.m:
        raise DimensionError("direct sum of representations of different quivers")
    N = None
    if a.last_N is not None or b.last_N is not None:
        N = rl.block_diag(a.N(a.m - 1), b.N(b.m - 1))
    return QuiverRep(a.spec, tuple(x + y for x, y in zip(a.dims, b.dims)),
                     tuple(rl.block_diag(x, y) for x, y in zip(a.c, b.c)),
                     tuple(rl.block_diag(x, y) for x, y in zip(a.V, b.V)), N)


def direct_sum_forms(f: RepForm, g: RepForm) -> RepForm:
    return RepForm(direct_sum(f.rep, g.rep), tuple(rl.block_diag(x, y) for x, y in zip(f.beta, g.beta)))


def restrict_open(rep: QuiverRep, m: int) -> QuiverRep:
    """Restriction to the open union of the first m strata."""
    if not 1 <= m <= rep.m:
        raise DimensionError(f"cannot restrict {rep.m} vertices to {m}")
    N = rep.N(m - 1) if (m < rep.m and rep.spec.kind == "disc") else (rep.last_N if m == rep.m else None)
    return QuiverRep(rep.spec, rep.dims[:m], rep.c[:m - 1], rep.V[:m - 1], N)


def restrict_open_form(f: RepForm, m: int) -> RepForm:
    return RepForm(restrict_open(f.rep, m), f.beta[:m])


def same_shape(a: QuiverRep, b: QuiverRep) -> bool:
    """Isomorphism-grade comparison: dims and ranks of all arrows and composites."""
    if a.spec != b.spec or a.dims != b.dims:
        return False
    paths_a = _path_ranks(a)
    return paths_a == _path_ranks(b)


def _path_ranks(rep: QuiverRep) -> dict:
    out = {}
    for i in range(rep.m):
        out[("N", i)] = [rl.rank(rl.power(rep.N(i), e)) for e in range(1, rep.dims[i] + 1)]
    for k in range(rep.m - 1):
        out[("c", k)] = rl.rank(rep.c[k])
        out[("V", k)] = rl.rank(rep.V[k])
    return out


# linear spaces of morphisms and forms

def _solve_linear(shapes: list[tuple[int, int]], constraints) -> list[list[np.ndarray]]:
    """Basis of the solution space of a linear system on tuples of matrices."""
    sizes = [r * c for r, c in shapes]
    total = sum(sizes)

    def unpack(vec):
        out, pos = [], 0
        for (r, c), s in zip(shapes, sizes):
            out.append(rl.mat(np.array(vec[pos:pos + s], dtype=object).reshape(r, c)) if s else rl.zeros(r, c))
            pos += s
        return out

    columns = []
    for j in range(total):
        e = [Fraction(0)] * total
        e[j] = Fraction(1)
        residues = constraints(unpack(e))
        columns.append([x for r in residues for x in r.flat])
    rows = len(columns[0]) if columns else 0
    A = rl.zeros(rows, total)
    for j, colv in enumerate(columns):
        for i, x in enumerate(colv):
            A[i, j] = x
    ker = rl.kernel(A)
    return [unpack(list(ker.basis[:, j])) for j in range(ker.dim)]


def hom_space(a: QuiverRep, b: QuiverRep) -> list[RepMor]:
    """A basis of Hom(a, b)."""
    shapes = [(y, x) for x, y in zip(a.dims, b.dims)]

    def constraints(fs):
        res = []
        for k in range(a.m - 1):
            res.append(rl.mul(fs[k + 1], a.c[k]) - rl.mul(b.c[k], fs[k]))
            res.append(rl.mul(fs[k], a.V[k]) - rl.mul(b.V[k], fs[k + 1]))
        if a.last_N is not None or b.last_N is not None:
            i = a.m - 1
            res.append(rl.mul(fs[i], a.N(i)) - rl.mul(b.N(i), fs[i]))
        return res

    return [RepMor(a, b, tuple(fs)) for fs in _solve_linear(shapes, constraints)]


def form_space(rep: QuiverRep) -> list[RepForm]:
    """A basis of the symmetric (perverse-sense) forms on rep, possibly degenerate."""
    shapes = [(d, d) for d in rep.dims]
    D = dual(rep)

    def constraints(bs):
        res = [b.T - rep.spec.sign(i) * b for i, b in enumerate(bs)]
        for k in range(rep.m - 1):
            res.append(rl.mul(bs[k + 1], rep.c[k]) - rl.mul(D.c[k], bs[k]))
            res.append(rl.mul(bs[k], rep.V[k]) - rl.mul(D.V[k], bs[k + 1]))
        if rep.last_N is not None:
            i = rep.m - 1
            res.append(rl.mul(bs[i], rep.N(i)) - rl.mul(D.N(i), bs[i]))
        return res

    return [RepForm(rep, tuple(bs)) for bs in _solve_linear(shapes, constraints)]


def hyperbolic_form(a: QuiverRep) -> RepForm:
    """The metabolic form on a + D(a) with lagrangian a."""
    B = direct_sum(a, dual(a))
    beta = []
    for i, d in enumerate(a.dims):
        m = rl.zeros(2 * d, 2 * d)
        m[:d, d:] = rl.eye(d)
        m[d:, :d] = a.spec.sign(i) * rl.eye(d)
        beta.append(m)
    return RepForm(B, tuple(beta))


# forms on subobjects and isotropic reduction

def _sub_spaces(f: RepForm, sub) -> list[Subspace]:
    if isinstance(sub, RepMor):
        if sub.target.dims != f.rep.dims:
            raise DimensionError("subobject does not map into the form's representation")
        if not sub.is_mono():
            raise RepError("subobject map is not a monomorphism")
        return image_spaces(sub)
    spaces = list(sub)
    _spaces_ok(f.rep, spaces)
    return spaces


def restrict_form(f: RepForm, sub: RepMor) -> RepForm:
    """The pulled-back form D(sub) . beta . sub on the source of sub."""
    return RepForm(sub.source, tuple(rl.mul(i.T, b, i) for i, b in zip(sub.maps, f.beta)))


def ortho_spaces(f: RepForm, spaces: Sequence[Subspace]) -> list[Subspace]:
    return [qf.orthogonal_complement(f.vertex_form(i), s) for i, s in enumerate(spaces)]


def ortho_complement(f: RepForm, sub) -> RepMor:
    return subrep(f.rep, ortho_spaces(f, _sub_spaces(f, sub)))


@dataclass(frozen=True, eq=False)
class RepReduction:
    """Reduced form on perp/sub; ``lift[i]`` embeds reduced coordinates into perp."""

    form: RepForm
    perp: list = field(default_factory=list)
    lift: list = field(default_factory=list)
    quotient: list = field(default_factory=list)

    def project(self, i: int, v: np.ndarray) -> np.ndarray:
        return rl.mul(self.quotient[i], self.perp[i].coords(v))


def is_isotropic_rep(f: RepForm, spaces: Sequence[Subspace]) -> bool:
    return all(qf.is_isotropic(f.vertex_form(i), s) for i, s in enumerate(spaces))


def reduce_by_spaces(f: RepForm, spaces: Sequence[Subspace]) -> RepReduction:
    if not is_subrep(f.rep, spaces):
        raise RepError("isotropic data is not a subrepresentation")
    if not is_isotropic_rep(f, spaces):
        raise qf.FormError("subobject is not isotropic")
    reds = [qf.isotropic_reduce(f.vertex_form(i), s) for i, s in enumerate(spaces)]
    rep = f.rep
    c = tuple(reds[k + 1].project(rl.mul(rep.c[k], reds[k].lift)) for k in range(rep.m - 1))
    V = tuple(reds[k].project(rl.mul(rep.V[k], reds[k + 1].lift)) for k in range(rep.m - 1))
    N = None
    if rep.last_N is not None:
        N = reds[-1].project(rl.mul(rep.last_N, reds[-1].lift))
    new = QuiverRep(rep.spec, tuple(r.form.dim for r in reds), c, V, N)
    form = RepForm(new, tuple(r.form.gram.T for r in reds))
    return RepReduction(form, [r.perp for r in reds], [r.lift for r in reds], [r.quotient for r in reds])


def isotropic_reduce_rep(f: RepForm, sub) -> RepForm:
    return reduce_by_spaces(f, _sub_spaces(f, sub)).form


def radical_spaces(f: RepForm) -> list[Subspace]:
    return [qf.radical(f.vertex_form(i)) for i in range(f.rep.m)]


def nondegenerate_part(f: RepForm) -> RepForm:
    return reduce_by_spaces(f, radical_spaces(f)).form


# strata and the staged anisotropic reduction

def vanishing_below(rep: QuiverRep, i: int) -> list[Subspace]:
    """Vertex spaces of the largest subrepresentation vanishing at vertices < i."""
    return max_subrep_within(rep, [rl.zero(d) if j < i else rl.full(d) for j, d in enumerate(rep.dims)])


def cogenerated_below(rep: QuiverRep, i: int) -> list[Subspace]:
    """Subrepresentation generated by the vertices < i (the kernel of the largest quotient vanishing there)."""
    return generated_subrep(rep, [rl.full(d) if j < i else rl.zero(d) for j, d in enumerate(rep.dims)])


def stratum_space(rep: QuiverRep, i: int) -> Subspace:
    return vanishing_below(rep, i)[i]


def stratum_form(f: RepForm, i: int) -> tuple[EpsForm, np.ndarray, Subspace]:
    """(beta restricted to stratum i, its monodromy logarithm, the stratum space)."""
    s = stratum_space(f.rep, i)
    N = rl.mul(f.rep.N(i), s.basis)
    N = s.coords(N) if s.dim else rl.zeros(0, 0)
    return qf.restrict(f.vertex_form(i), s), N, s


def max_isotropic_local(form: EpsForm, N: np.ndarray) -> Subspace:
    """Maximal N-stable isotropic subspace for a form on a unipotent local system.

    The radical goes first.  While N is nonzero the image of its top nonzero
    power is isotropic and N-stable, so it is split off next; once N vanishes
    the plain maximal isotropic subspace finishes the job.
    """
    total = rl.zero(form.dim)
    cur_form, cur_N, lift = form, N, rl.eye(form.dim)
    while True:
        piece = qf.radical(cur_form)
        if piece.dim == 0 and not rl.is_zero(cur_N):
            piece = rl.image(rl.power(cur_N, rl.nilpotency_index(cur_N) - 1))
        elif piece.dim == 0:
            piece = qf.max_isotropic(cur_form)
        if piece.dim == 0:
            return total
        total = rl.sum(total, rl.image(rl.mul(lift, piece.basis)))
        red = qf.isotropic_reduce(cur_form, piece)
        cur_N = _induced(cur_N, red)
        cur_form = red.form
        lift = rl.mul(lift, red.lift)


def _induced(N: np.ndarray, red: qf.IsotropicReduction) -> np.ndarray:
    if red.form.dim == 0:
        return rl.zeros(0, 0)
    return red.project(rl.mul(N, red.lift))


def staged_reduction(f: RepForm, order: Sequence[int] | None = None):
    """Run the open-to-closed staged reduction.

    Yields, per processed stratum index i, the triple
    (i, form before the stage, isotropic vertex spaces pushed at that stage).
    The final element of the returned list is the accumulated isotropic
    subobject of the input together with the anisotropic reduction.
    """
    idx = check_order(f.spec, order)
    if not f.is_nondegenerate():
        raise qf.FormError("staged reduction needs a nondegenerate form")
    cur = f
    total = [rl.zero(d) for d in f.rep.dims]
    lift = [rl.eye(d) for d in f.rep.dims]
    stages = []
    for i in idx:
        if i >= cur.rep.m:
            continue
        form_i, N_i, s = stratum_form(cur, i)
        a = max_isotropic_local(form_i, N_i)
        seed = [rl.zero(d) for d in cur.rep.dims]
        seed[i] = rl.image(rl.mul(s.basis, a.basis)) if a.dim else rl.zero(cur.rep.dims[i])
        spaces = generated_subrep(cur.rep, seed)
        stages.append((i, cur, spaces))
        if all(sp.dim == 0 for sp in spaces):
            continue
        red = reduce_by_spaces(cur, spaces)
        total = [rl.sum(t, rl.image(rl.mul(L, sp.basis))) for t, L, sp in zip(total, lift, spaces)]
        lift = [rl.mul(L, l2) for L, l2 in zip(lift, red.lift)]
        cur = red.form
    return total, cur, stages


def max_isotropic_rep(f: RepForm, order: Sequence[int] | None = None) -> RepMor:
    total, _, _ = staged_reduction(f, order)
    return subrep(f.rep, total)


def anisotropic_representative(f: RepForm, order: Sequence[int] | None = None) -> RepForm:
    f = nondegenerate_part(f)
    return staged_reduction(f, order)[1]


def is_anisotropic_rep(f: RepForm) -> bool:
    """Every stratum restriction is anisotropic as a local-system form."""
    for i in range(f.rep.m):
        form, N, _ = stratum_form(f, i)
        if max_isotropic_local(form, N).dim:
            return False
    return True


def witt_class_forms(f: RepForm, order: Sequence[int] | None = None) -> dict[int, EpsForm]:
    """Anisotropic stratum forms of an anisotropic representative, keyed by vertex label."""
    g = anisotropic_representative(f, order)
    return {f.spec.label(i): stratum_form(g, i)[0] for i in range(g.rep.m)}


def witt_class(f: RepForm, order: Sequence[int] | None = None) -> dict[int, qf.WittInvariant]:
    return {k: qf.witt_invariants(v) for k, v in witt_class_forms(f, order).items()}


def add_classes(*classes: dict[int, EpsForm]) -> dict[int, qf.WittInvariant]:
    """Vertex-wise Witt sum of class representatives."""
    keys = sorted(set().union(*classes))
    out = {}
    for k in keys:
        forms = [c[k] for c in classes if k in c]
        out[k] = qf.witt_invariants(qf.orthogonal_sum(*forms))
    return out


def splitting_relation_rep(f: RepForm, fmor: RepMor, gmor: RepMor) -> tuple[RepForm, RepForm]:
    """Nondegenerate parts of beta pulled back along f and along beta^-1 D(g)."""
    if not f.is_nondegenerate():
        raise qf.FormError("splitting relation needs a nondegenerate form")
    if fmor.target.dims != f.rep.dims or gmor.source.dims != f.rep.dims:
        raise DimensionError("sequence does not pass through the form's representation")
    if not compose(gmor, fmor).is_zero():
        raise RepError("g after f is not zero")
    if any(rl.image(a) != rl.kernel(b) for a, b in zip(fmor.maps, gmor.maps)):
        raise RepError("sequence is not exact at the middle term")
    alpha = restrict_form(f, fmor)
    h = RepMor(dual(gmor.target), f.rep,
               tuple(rl.mul(rl.inverse(b), g.T) for b, g in zip(f.beta, gmor.maps)))
    gamma = restrict_form(f, h)
    return nondegenerate_part(alpha), nondegenerate_part(gamma)
