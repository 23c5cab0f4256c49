"""Unipotent nearby and vanishing cycles on the disc in the gluing model.

A local datum is a unipotent local system on the punctured disc, recorded
by its space and monodromy logarithm N.  A gluing datum (psi, phi, can, var)
with var . can = N describes a perverse sheaf on the disc; it is the same
thing as a representation of the two-vertex disc quiver (vertex 0 = psi,
vertex 1 = phi, c = can, V = var), and all form calculus is delegated to
:mod:`quivercat` through that dictionary.

Tate twists are integer labels only.  N lowers the twist by one, and
duality negates it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qforms as qf
from . import quivercat as qc
from . import ratlin as rl
from . import sixfunctors as sf
from .qforms import EpsForm, WittInvariant
from .quivercat import QuiverRep, QuiverSpec, RepForm, RepMor

DISC = QuiverSpec.disc()


class GlueError(ValueError):
    pass


def _ro(m) -> np.ndarray:
    m = rl.mat(m)
    m.flags.writeable = False
    return m


@dataclass(frozen=True, eq=False)
class LocalDatum:
    dim: int
    N: np.ndarray
    twist: int = 0

    def __post_init__(self):
        N = _ro(self.N)
        if N.shape != (self.dim, self.dim):
            raise rl.DimensionError(f"N has shape {N.shape}, expected {(self.dim, self.dim)}")
        if not rl.is_nilpotent(N):
            raise GlueError("monodromy logarithm is not nilpotent")
        object.__setattr__(self, "N", N)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocalDatum):
            return NotImplemented
        return self.dim == other.dim and self.twist == other.twist and rl.equal(self.N, other.N)

    __hash__ = None

    def to_rep(self) -> QuiverRep:
        return QuiverRep(DISC, (self.dim,), (), (), self.N)

    @classmethod
    def from_rep(cls, rep: QuiverRep, twist: int = 0) -> LocalDatum:
        return cls(rep.dims[0], rep.N(0), twist)

    def to_json(self) -> dict:
        return {"dim": self.dim, "N": rl.mat_to_json(self.N), "twist": self.twist}

    @classmethod
    def from_json(cls, d: dict) -> LocalDatum:
        n = int(d["dim"])
        return cls(n, rl.mat_from_json(d["N"], (n, n)), int(d.get("twist", 0)))


@dataclass(frozen=True, eq=False)
class GluingDatum:
    psi: LocalDatum
    phi: int
    can: np.ndarray
    var: np.ndarray

    def __post_init__(self):
        can, var = _ro(self.can), _ro(self.var)
        if can.shape != (self.phi, self.psi.dim) or var.shape != (self.psi.dim, self.phi):
            raise rl.DimensionError("can/var do not match the psi and phi dimensions")
        if not rl.equal(rl.mul(var, can), self.psi.N):
            raise GlueError("var . can differs from N")
        object.__setattr__(self, "can", can)
        object.__setattr__(self, "var", var)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GluingDatum):
            return NotImplemented
        return (self.psi == other.psi and self.phi == other.phi
                and rl.equal(self.can, other.can) and rl.equal(self.var, other.var))

    __hash__ = None

    def to_rep(self) -> QuiverRep:
        return QuiverRep(DISC, (self.psi.dim, self.phi), (self.can,), (self.var,))

    @classmethod
    def from_rep(cls, rep: QuiverRep, twist: int = 0) -> GluingDatum:
        if rep.spec != DISC or rep.m != 2:
            raise GlueError("not a representation of the full disc quiver")
        return cls(LocalDatum(rep.dims[0], rep.N(0), twist), rep.dims[1], rep.c[0], rep.V[0])

    def to_json(self) -> dict:
        return {"psi": self.psi.to_json(), "phi_dim": self.phi,
                "can": rl.mat_to_json(self.can), "var": rl.mat_to_json(self.var)}

    @classmethod
    def from_json(cls, d: dict) -> GluingDatum:
        psi = LocalDatum.from_json(d["psi"])
        p = int(d["phi_dim"])
        return cls(psi, p, rl.mat_from_json(d["can"], (p, psi.dim)), rl.mat_from_json(d["var"], (psi.dim, p)))


@dataclass(frozen=True, eq=False)
class GlueForm:
    """A form on a local datum (beta_phi is None) or on a gluing datum.

    Matrices are Gram matrices: antisymmetric on psi, symmetric on phi.
    """

    datum: LocalDatum | GluingDatum
    beta_psi: np.ndarray
    beta_phi: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "beta_psi", _ro(self.beta_psi))
        if self.beta_phi is not None:
            object.__setattr__(self, "beta_phi", _ro(self.beta_phi))
        bad = qc.validate_form(self.to_repform())
        if bad:
            raise GlueError("; ".join(v.relation for v in bad))

    @property
    def is_local(self) -> bool:
        return isinstance(self.datum, LocalDatum)

    def to_repform(self) -> RepForm:
        rep = self.datum.to_rep()
        if self.is_local:
            return RepForm(rep, (self.beta_psi.T,))
        return RepForm(rep, (self.beta_psi.T, self.beta_phi.T))

    @classmethod
    def from_repform(cls, f: RepForm, twist: int = 0) -> GlueForm:
        if f.rep.m == 1:
            return cls(LocalDatum.from_rep(f.rep, twist), f.beta[0].T)
        return cls(GluingDatum.from_rep(f.rep, twist), f.beta[0].T, f.beta[1].T)

    def is_nondegenerate(self) -> bool:
        return self.to_repform().is_nondegenerate()

    def to_json(self) -> dict:
        d = self.datum.to_json()
        d["beta_psi"] = rl.mat_to_json(self.beta_psi)
        if self.beta_phi is not None:
            d["beta_phi"] = rl.mat_to_json(self.beta_phi)
        return d

    @classmethod
    def from_json(cls, d: dict) -> GlueForm:
        if "phi_dim" in d:
            datum = GluingDatum.from_json(d)
            return cls(datum, rl.mat_from_json(d["beta_psi"], (datum.psi.dim,) * 2),
                       rl.mat_from_json(d["beta_phi"], (datum.phi,) * 2))
        datum = LocalDatum.from_json(d)
        return cls(datum, rl.mat_from_json(d["beta_psi"], (datum.dim,) * 2))


def jordan_block(m: int) -> np.ndarray:
    """Lower shift e_i -> e_{i+1} on Q^m."""
    J = rl.zeros(m, m)
    for i in range(m - 1):
        J[i + 1, i] = 1
    return J


def _kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = rl.zeros(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            if a[i, j] != 0:
                out[i * b.shape[0]:(i + 1) * b.shape[0], j * b.shape[1]:(j + 1) * b.shape[1]] = a[i, j] * b
    return out


def jordan_tensor(a: LocalDatum, m: int) -> LocalDatum:
    """a tensor L^m, with N acting as N x 1 + 1 x J_m."""
    if m < 1:
        raise ValueError("Jordan block size must be positive")
    N = _kron(a.N, rl.eye(m)) + _kron(rl.eye(a.dim), jordan_block(m))
    return LocalDatum(a.dim * m, N, a.twist)


def nilpotency_index(a: LocalDatum) -> int:
    return rl.nilpotency_index(a.N) if a.dim else 0


# the three extensions

def j_shriek(a: LocalDatum) -> GluingDatum:
    return GluingDatum(a, a.dim, rl.eye(a.dim), a.N)


def j_star(a: LocalDatum) -> GluingDatum:
    return GluingDatum(a, a.dim, a.N, rl.eye(a.dim))


def j_midext(a: LocalDatum) -> GluingDatum:
    img = rl.image(a.N)
    return GluingDatum(a, img.dim, img.coords(a.N), img.basis)


def j_ops(a: LocalDatum) -> dict[str, GluingDatum]:
    return {"j_shriek": j_shriek(a), "j_star": j_star(a), "j_midext": j_midext(a)}


def natural_map(a: LocalDatum) -> RepMor:
    """j_shriek(a) -> j_star(a): identity on psi and N on phi."""
    return RepMor(j_shriek(a).to_rep(), j_star(a).to_rep(), (rl.eye(a.dim), a.N))


def i_star(dim: int, twist: int = 0) -> GluingDatum:
    """Extension by zero of a space on the puncture."""
    return GluingDatum(LocalDatum(0, rl.zeros(0, 0), twist), dim, rl.zeros(dim, 0), rl.zeros(0, dim))


def phi_un(b: GluingDatum) -> tuple[int, np.ndarray, np.ndarray]:
    """The vanishing cycles space with its can and var legs."""
    return b.phi, b.can, b.var


def j_upper_star(b: GluingDatum) -> LocalDatum:
    return b.psi


# nearby cycles and the maximal extension via stabilized kernels

def _psi_kernel(a: LocalDatum, n: int) -> tuple[LocalDatum, np.ndarray]:
    """ker(j_!(a x L^n) -> j_*(a x L^n)), with the N x 1 action and its basis."""
    B = jordan_tensor(a, n)
    ker = qc.kernel(natural_map(B))
    sub = ker.source
    if sub.dims[0] != 0:
        raise AssertionError("kernel of j_! -> j_* meets the open part")
    basis = ker.maps[1]
    NA = _kron(a.N, rl.eye(n))
    Nk = rl.span(basis).coords(rl.mul(NA, basis)) if basis.shape[1] else rl.zeros(0, 0)
    return LocalDatum(sub.dims[1], Nk, a.twist), basis


def _stabilize(step, a: LocalDatum, start: int):
    limit = nilpotency_index(a) + 2
    n = start
    prev = step(a, n)
    while True:
        nxt = step(a, n + 1)
        if _size(prev) == _size(nxt):
            return prev, n
        if n + 1 > limit:
            raise AssertionError("kernel did not stabilize")
        prev, n = nxt, n + 1


def _size(x) -> tuple:
    d = x[0]
    return (d.dim,) if isinstance(d, LocalDatum) else (d.psi.dim, d.phi)


def _psi_identification(a: LocalDatum, n: int) -> np.ndarray:
    """v -> sum_i (-N)^(n-1-i) v x e_i, the embedding of a into the stable kernel."""
    cols = rl.zeros(a.dim * n, a.dim)
    for i in range(n):
        block = rl.power(-a.N, n - 1 - i)
        for r in range(a.dim):
            cols[r * n + i, :] = block[r, :]
    return cols


def psi_kernel(a: LocalDatum) -> tuple[LocalDatum, int, np.ndarray]:
    """Stable nearby-cycles kernel, the n where it stabilized, and the embedding of a."""
    (datum, basis), n = _stabilize(_psi_kernel, a, 1)
    emb = _psi_identification(a, n)
    if rl.image(emb) != rl.image(basis):
        raise AssertionError("nearby cycles kernel differs from the closed form")
    return datum, n, emb


def psi_un(a: LocalDatum) -> LocalDatum:
    """Unipotent nearby cycles; equal to a itself once the kernel is identified."""
    datum, n, emb = psi_kernel(a)
    coords = rl.solve(emb, rl.mul(_kron(a.N, rl.eye(n)), emb)) if a.dim else a.N
    if not rl.equal(coords, a.N) or datum.dim != a.dim:
        raise AssertionError("nearby cycles monodromy differs from N")
    return a


def _xi_kernel(a: LocalDatum, n: int):
    """ker(j_!(a x L^(n+1)) -> j_*(a x L^n)) through L^(n+1) -> L^(n+1) / im J^n."""
    L = n + 1
    B = jordan_tensor(a, L)
    Bq = jordan_tensor(a, n)
    keep = [r * L + i for r in range(a.dim) for i in range(n)]
    pi = rl.zeros(a.dim * n, a.dim * L)
    for row, col in enumerate(keep):
        pi[row, col] = 1
    mor = RepMor(j_shriek(B).to_rep(), j_star(Bq).to_rep(), (pi, rl.mul(Bq.N, pi)))
    ker = qc.kernel(mor)
    return GluingDatum.from_rep(ker.source, a.twist), ker


def xi_closed(a: LocalDatum) -> GluingDatum:
    """(a, a + a, can = (1, 0), var = (N, 1))."""
    d = a.dim
    return GluingDatum(a, 2 * d, rl.vstack([rl.eye(d), rl.zeros(d, d)]), rl.hstack([a.N, rl.eye(d)]))


def _xi_identification(a: LocalDatum, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Embeddings of psi and phi of xi_closed(a) into the kernel model at length n + 1."""
    d, L = a.dim, n + 1
    psi = rl.zeros(d * L, d)
    phi = rl.zeros(d * L, 2 * d)
    for r in range(d):
        psi[r * L + n, r] = 1
        phi[r * L + n, r] = 1
    for i in range(n):
        block = rl.power(-a.N, n - 1 - i)
        for r in range(d):
            phi[r * L + i, d:] = block[r, :]
    return psi, phi


def xi_kernel(a: LocalDatum) -> tuple[GluingDatum, int, RepMor]:
    """Stable maximal-extension kernel, the n where it stabilized, and the iso from xi_closed."""
    (kdatum, ker), n = _stabilize(_xi_kernel, a, 1)
    closed = xi_closed(a)
    psi_e, phi_e = _xi_identification(a, n)
    spans = [rl.image(m) for m in ker.maps]
    if rl.image(psi_e) != spans[0] or rl.image(phi_e) != spans[1]:
        raise AssertionError("maximal extension kernel differs from the closed form")
    iso = RepMor(closed.to_rep(), ker.source, tuple(
        rl.solve(m, e) if a.dim else rl.zeros(0, 0) for m, e in zip(ker.maps, (psi_e, phi_e))))
    if qc.validate_mor(iso) or not iso.is_iso():
        raise AssertionError("maximal extension kernel is not isomorphic to the closed form")
    return kdatum, n, iso


def xi_un(a: LocalDatum) -> GluingDatum:
    """Maximal extension, computed from the stable kernel and checked against xi_closed."""
    xi_kernel(a)
    return xi_closed(a)


def xi_sequences(a: LocalDatum) -> dict[str, tuple[RepMor, RepMor]]:
    """0 -> j_!a -> Xi a -> i_* a(-1) -> 0 and 0 -> i_* a -> Xi a -> j_* a -> 0."""
    d = a.dim
    xi = xi_closed(a).to_rep()
    js, jst = j_shriek(a).to_rep(), j_star(a).to_rep()
    ist = i_star(d).to_rep()
    first = (RepMor(js, xi, (rl.eye(d), rl.vstack([rl.eye(d), rl.zeros(d, d)]))),
             RepMor(xi, ist, (rl.zeros(0, d), rl.hstack([rl.zeros(d, d), rl.eye(d)]))))
    ker_var = rl.vstack([rl.eye(d), -a.N])
    second = (RepMor(ist, xi, (rl.zeros(d, 0), ker_var)),
              RepMor(xi, jst, (rl.eye(d), rl.hstack([a.N, rl.eye(d)]))))
    return {"shriek": first, "star": second}


def is_short_exact(f: RepMor, g: RepMor) -> bool:
    if qc.validate_mor(f) or qc.validate_mor(g):
        return False
    if not (f.is_mono() and g.is_epi()):
        return False
    return all(rl.image(a) == rl.kernel(b) for a, b in zip(f.maps, g.maps))


# duality

def dual_local(a: LocalDatum) -> LocalDatum:
    return LocalDatum(a.dim, -a.N.T, -a.twist)


def dual_glue(b: GluingDatum) -> GluingDatum:
    """(psi*, phi*, -var^T, can^T); exchanges j_shriek and j_star."""
    return GluingDatum(dual_local(b.psi), b.phi, -b.var.T, b.can.T)


def glue_biduality(b: GluingDatum) -> RepMor:
    return qc.biduality(b.to_rep())


def xi_duality_iso(a: LocalDatum) -> RepMor:
    """Xi(D a) -> D Xi(a), the identity on psi."""
    d = a.dim
    T = rl.vstack([rl.hstack([-a.N.T, rl.eye(d)]), rl.hstack([-rl.eye(d), rl.zeros(d, d)])])
    return RepMor(xi_closed(dual_local(a)).to_rep(), dual_glue(xi_closed(a)).to_rep(), (rl.eye(d), T))


# forms

def _local_repform(f: GlueForm) -> RepForm:
    if not f.is_local:
        raise GlueError("expected a form on a local datum")
    return f.to_repform()


def n_pairing(f: GlueForm) -> EpsForm:
    """(x, y) -> beta(N x, y), symmetric because beta is antisymmetric and N skew for it."""
    if not f.is_local:
        f = restrict_to_open(f)
    return EpsForm(rl.mul(f.datum.N.T, f.beta_psi), 1)


def restrict_to_open(f: GlueForm) -> GlueForm:
    if f.is_local:
        return f
    return GlueForm(f.datum.psi, f.beta_psi)


def phi_form(f: GlueForm) -> EpsForm:
    if f.is_local:
        raise GlueError("a local form has no vanishing cycles part")
    return EpsForm(f.beta_phi, 1)


def j_midext_form(f: GlueForm) -> GlueForm:
    g = sf.j_midext_form(_local_repform(f), 2)
    return GlueForm.from_repform(g, f.datum.twist)


def xi_form(f: GlueForm) -> GlueForm:
    """The form Xi(beta) transported along xi_duality_iso."""
    a = f.datum
    M = _local_repform(f).beta[0]
    T = xi_duality_iso(a).maps[1]
    Mphi = rl.mul(T, rl.block_diag(M, M))
    return GlueForm(xi_closed(a), f.beta_psi, Mphi.T)


def i_star_form(form: EpsForm) -> GlueForm:
    if form.eps != 1:
        raise qf.FormError("forms on the puncture are symmetric")
    return GlueForm(i_star(form.dim), rl.zeros(0, 0), form.gram)


def i_midrestrict_form(f: GlueForm) -> EpsForm:
    g = sf.i_midrestrict_form(f.to_repform(), 1)
    return g.vertex_form(1)


def witt_class(f: GlueForm) -> dict[int, WittInvariant]:
    """Witt class on the disc; a local form yields only the psi entry."""
    return qc.witt_class(f.to_repform())


def local_class(f: GlueForm) -> WittInvariant:
    return witt_class(restrict_to_open(f))[0]


def add_glue_classes(*forms: GlueForm) -> dict[int, WittInvariant]:
    return qc.add_classes(*[qc.witt_class_forms(g.to_repform()) for g in forms])


def gluing_split(f: GlueForm) -> tuple[GlueForm, EpsForm]:
    """(j^* beta, Phi beta) as anisotropic representatives."""
    if not f.is_nondegenerate():
        raise qf.FormError("gluing split needs a nondegenerate form")
    u = qc.anisotropic_representative(_local_repform(restrict_to_open(f)))
    return GlueForm.from_repform(u, f.datum.psi.twist), qf.anisotropic_kernel(phi_form(f))


def gluing_split_invariants(f: GlueForm) -> tuple[WittInvariant, WittInvariant]:
    u, y = gluing_split(f)
    return local_class(u), qf.witt_invariants(y)


def gluing_unsplit(u: GlueForm, y: EpsForm) -> GlueForm:
    """Xi[u] + i_*[y] as one form on the direct sum."""
    a, b = xi_form(u), i_star_form(y)
    return GlueForm.from_repform(qc.direct_sum_forms(a.to_repform(), b.to_repform()), u.datum.twist)


def twist_audit(b: GluingDatum) -> dict[str, int]:
    """Twist shifts of can, var and N; var . can must shift by the same amount as N."""
    shifts = {"can": 0, "var": -1, "N": -1}
    if shifts["can"] + shifts["var"] != shifts["N"] or not rl.equal(rl.mul(b.var, b.can), b.psi.N):
        raise GlueError("twist labels do not balance")
    return shifts
